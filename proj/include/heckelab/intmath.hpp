#pragma once
#include <gmpxx.h>

#include <utility>
#include <vector>

namespace heckelab {

bool is_prime(long n);
bool is_prime(const mpz_class& n);
std::vector<long> primes_upto(long bound);            // ascending, includes bound
std::vector<std::pair<long, int>> factorize(long n);  // n >= 1, ascending primes
std::vector<long> divisors(long n);                   // ascending
long euler_phi(long n);
long psi_index(long n);  // [SL2(Z) : Gamma0(n)] = n * prod_{p|n} (1 + 1/p)
long mod_inverse(long a, long m);  // throws UsageError when gcd(a, m) != 1
long mulmod(long a, long b, long m);
long powmod(long a, long e, long m);
long sturm_bound(long level, long weight);  // floor(weight * psi_index(level) / 12)

}  // namespace heckelab
