#pragma once
#include <gmpxx.h>

#include <vector>

#include "heckelab/numberfield.hpp"

namespace heckelab {

// Deligne/Fontaine verdict at P for the Hecke polynomial x^2 - a_p x + p^{k-1}.
// When ordinary, unit_root holds the coordinates in Z[theta]/p^m of the
// P-component of the Hensel-lifted unit root (the CRT idempotent of P times
// the root, so the other completions read zero).
struct LocalClassification {
    bool ordinary = false;  // false encodes irreducible-at-p
    FFElem unit_root_residue;
    std::vector<mpz_class> unit_root;
    long precision = 0;  // m
    mpz_class modulus;   // p^m
};

// 2 <= k <= p+1 enforced (HypothesisViolated); a_p must be integral above p.
LocalClassification classify_local(const NFCoords& ap, long k, const PrimeIdeal& P, long m);

bool is_ordinary_value(const NFCoords& ap, const PrimeIdeal& P);  // v_P(a_p) = 0

// U_p eigenvalues of the two p-stabilizations: alpha the unit root, beta its
// cofactor (alpha + beta = a_p, alpha*beta = p^{k-1}); both masked to the
// P-component, coordinates mod p^m.
struct Stabilization {
    std::vector<mpz_class> alpha, beta;
    long beta_valuation = 0;  // v_P(beta) = (k-1) e
    long precision = 0;
    mpz_class modulus;
};

// NonOrdinary when v_P(a_p) > 0 (both roots then have positive valuation).
Stabilization p_stabilize_value(const NFCoords& ap, long k, const PrimeIdeal& P, long m);

}  // namespace heckelab
