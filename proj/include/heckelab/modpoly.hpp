#pragma once
#include <gmpxx.h>

#include <utility>
#include <vector>

namespace heckelab::modp {

// Dense polynomials over Z/m: coefficients in [0, m), no trailing zeros.
// The zero polynomial is the empty vector.  Most callers use a prime modulus;
// the arithmetic helpers also serve Hensel lifting mod p^k.
using Poly = std::vector<mpz_class>;

int degree(const Poly& f);  // -1 for the zero polynomial
void normalize(Poly& f, const mpz_class& m);
Poly reduce(const std::vector<mpz_class>& coeffs, const mpz_class& m);
Poly add(const Poly& a, const Poly& b, const mpz_class& m);
Poly sub(const Poly& a, const Poly& b, const mpz_class& m);
Poly mul(const Poly& a, const Poly& b, const mpz_class& m);
Poly scalar_mul(const mpz_class& c, const Poly& a, const mpz_class& m);
// Divisor leading coefficient must be invertible mod m.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, const mpz_class& m);
Poly rem(const Poly& a, const Poly& b, const mpz_class& m);
Poly mulmod(const Poly& a, const Poly& b, const Poly& f, const mpz_class& m);
Poly powmod(const Poly& a, const mpz_class& e, const Poly& f, const mpz_class& m);
Poly derivative(const Poly& a, const mpz_class& m);
mpz_class eval(const Poly& a, const mpz_class& x, const mpz_class& m);
Poly monic(const Poly& a, const mpz_class& p);
Poly gcd(const Poly& a, const Poly& b, const mpz_class& p);  // monic, p prime
bool equal(const Poly& a, const Poly& b);

// Complete factorization over F_p (Berlekamp).  Factors are monic
// irreducible, sorted by (degree, coefficient sequence); the leading unit of
// f is dropped.  Rejects composite p.
std::vector<std::pair<Poly, int>> factor(const Poly& f, long p);

// Rabin test; f must be monic of degree >= 1 over F_p.
bool is_irreducible(const Poly& f, const mpz_class& p);

// s with s*a = 1 mod f over F_p (extended Euclid); UsageError if gcd(a,f) != 1.
Poly inv_mod(const Poly& a, const Poly& f, const mpz_class& p);

}  // namespace heckelab::modp
