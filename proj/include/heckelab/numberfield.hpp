#pragma once
#include <gmpxx.h>

#include <memory>
#include <optional>
#include <vector>

#include "heckelab/finitefield.hpp"
#include "heckelab/qmatrix.hpp"
#include "heckelab/qpoly.hpp"

namespace heckelab {

class NumberField;
using NFPtr = std::shared_ptr<const NumberField>;

// Element coordinates in the power basis 1, theta, ..., theta^{d-1}.
using NFCoords = std::vector<mpq_class>;

// Q(theta) for a monic irreducible g with g(theta) = 0.
class NumberField {
public:
    static NFPtr create(const ZPoly& g);  // UsageError unless monic irreducible

    size_t degree() const { return deg_; }
    const ZPoly& modulus() const { return g_; }

    NFCoords zero() const { return NFCoords(deg_, 0); }
    NFCoords one() const { return from_rational(1); }
    NFCoords gen() const;
    NFCoords from_rational(const mpq_class& c) const;
    NFCoords from_poly(const QPoly& f) const;  // reduce mod g
    QPoly to_poly(const NFCoords& a) const;
    bool is_zero(const NFCoords& a) const;

    NFCoords add(const NFCoords& a, const NFCoords& b) const;
    NFCoords sub(const NFCoords& a, const NFCoords& b) const;
    NFCoords neg(const NFCoords& a) const;
    NFCoords mul(const NFCoords& a, const NFCoords& b) const;
    NFCoords inv(const NFCoords& a) const;  // UsageError on zero
    NFCoords div(const NFCoords& a, const NFCoords& b) const;
    NFCoords pow(const NFCoords& a, long e) const;

    QMat mul_matrix(const NFCoords& a) const;  // column j = a * theta^j
    mpq_class norm(const NFCoords& a) const;
    mpq_class trace(const NFCoords& a) const;

    // a = A(theta)/den with integral A and minimal den > 0
    std::pair<std::vector<mpz_class>, mpz_class> integer_coords(const NFCoords& a) const;

private:
    explicit NumberField(ZPoly g);
    ZPoly g_;
    size_t deg_;
    std::vector<NFCoords> theta_pow_;  // theta^d ... theta^{2d-2}
};

// Prime of Q(theta) above p in Kummer-Dedekind form (p, local(theta)).
// residue is the canonical F_{p^f}; theta_image is the distinguished root of
// local there (least enumeration rank).
struct PrimeIdeal {
    NFPtr field;
    mpz_class p;
    modp::Poly local;  // monic irreducible mod p, coefficients in [0, p)
    int e = 1, f = 1;
    FFPtr residue;
    FFElem theta_image;
};

// Kummer-Dedekind splitting of p.  Requires Z[theta] maximal at p (checked
// with the Dedekind criterion, NotPMaximal otherwise).  Output follows the
// sorted order of the mod-p factors.
std::vector<PrimeIdeal> factor_prime(const NFPtr& K, const mpz_class& p);

// v_P(a); nullopt encodes +infinity (zero element only).
std::optional<long> valuation(const NFCoords& a, const PrimeIdeal& P);

// Image of a in the residue field; NegativeValuation if v_P(a) < 0.
FFElem reduce_mod(const NFCoords& a, const PrimeIdeal& P);

}  // namespace heckelab
