#include "heckelab/intmath.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "heckelab/errors.hpp"

namespace heckelab {

bool is_prime(long n) {
    if (n < 2) return false;
    mpz_class z(n);
    // BPSW + Miller-Rabin; exact for anything fitting in a long.
    return mpz_probab_prime_p(z.get_mpz_t(), 32) != 0;
}

bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

std::vector<long> primes_upto(long bound) {
    std::vector<long> out;
    if (bound < 2) return out;
    std::vector<char> sieve(static_cast<size_t>(bound) + 1, 1);
    for (long i = 2; i <= bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (long j = i * i; j <= bound; j += i) sieve[j] = 0;
    }
    return out;
}

std::vector<std::pair<long, int>> factorize(long n) {
    if (n < 1) throw UsageError("factorize: n must be positive");
    std::vector<std::pair<long, int>> out;
    for (long p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) n /= p, ++e;
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

std::vector<long> divisors(long n) {
    std::vector<long> out{1};
    for (auto [p, e] : factorize(n)) {
        size_t sz = out.size();
        long q = 1;
        for (int i = 1; i <= e; ++i) {
            q *= p;
            for (size_t j = 0; j < sz; ++j) out.push_back(out[j] * q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

long euler_phi(long n) {
    long r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

long psi_index(long n) {
    long r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p + 1);
    return r;
}

long mod_inverse(long a, long m) {
    long old_r = a % m, r = m, old_s = 1, s = 0;
    if (old_r < 0) old_r += m;
    while (r != 0) {
        long q = old_r / r;
        long t = old_r - q * r;
        old_r = r, r = t;
        t = old_s - q * s;
        old_s = s, s = t;
    }
    if (old_r != 1)
        throw UsageError("mod_inverse: " + std::to_string(a) + " not a unit mod " +
                         std::to_string(m));
    old_s %= m;
    if (old_s < 0) old_s += m;
    return old_s;
}

long mulmod(long a, long b, long m) {
    a %= m;
    if (a < 0) a += m;
    b %= m;
    if (b < 0) b += m;
    return static_cast<long>(static_cast<__int128>(a) * b % m);
}

long powmod(long a, long e, long m) {
    if (e < 0) return powmod(mod_inverse(a, m), -e, m);
    long r = 1 % m;
    a %= m;
    if (a < 0) a += m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

long sturm_bound(long level, long weight) {
    if (level < 1 || weight < 1) throw UsageError("sturm_bound: level and weight must be positive");
    return weight * psi_index(level) / 12;
}

}  // namespace heckelab
