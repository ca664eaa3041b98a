#pragma once
#include <gmpxx.h>

#include <memory>
#include <vector>

#include "heckelab/modpoly.hpp"

namespace heckelab {

class FiniteField;
using FFPtr = std::shared_ptr<const FiniteField>;

// Element of F_{p^f}: coordinates in the power basis of the generator,
// coefficients reduced mod p, no trailing zeros (same shape as modp::Poly).
using FFElem = modp::Poly;

// F_{p^f} presented as F_p[t]/(g) with a canonical defining polynomial g:
// the first monic irreducible of degree f when coefficient vectors
// (c_{f-1}, ..., c_1, c_0) are enumerated with c_0 varying fastest.
// Instances are cached, so pointer equality is field equality.
class FiniteField {
public:
    static FFPtr get(const mpz_class& p, unsigned f);

    const mpz_class& p() const { return p_; }
    unsigned f() const { return f_; }
    const modp::Poly& modulus() const { return g_; }
    const mpz_class& order() const { return q_; }

    FFElem zero() const { return {}; }
    FFElem one() const { return from_int(1); }
    FFElem gen() const;
    FFElem from_int(const mpz_class& n) const;

    // Enumeration rank sum_i c_i p^i in [0, q); doubles as the deterministic
    // total order used everywhere roots or embeddings get sorted.
    mpz_class index(const FFElem& a) const;
    FFElem from_index(mpz_class n) const;

    FFElem add(const FFElem& a, const FFElem& b) const;
    FFElem sub(const FFElem& a, const FFElem& b) const;
    FFElem neg(const FFElem& a) const;
    FFElem mul(const FFElem& a, const FFElem& b) const;
    FFElem inv(const FFElem& a) const;  // UsageError on zero
    FFElem pow(const FFElem& a, mpz_class e) const;

private:
    FiniteField(mpz_class p, unsigned f, modp::Poly g);
    mpz_class p_;
    unsigned f_;
    modp::Poly g_;
    mpz_class q_;
};

// Field homomorphism src -> dst, determined by the image of the source
// generator (a root of the source modulus in dst).
struct FFEmbedding {
    FFPtr src, dst;
    FFElem gen_image;
    FFElem apply(const FFElem& a) const;
};

// All embeddings src -> dst, sorted by index of the generator image.
// Throws NotASubfield unless the characteristics match and src.f | dst.f.
std::vector<FFEmbedding> embeddings(const FFPtr& src, const FFPtr& dst);

// Distinct roots in K of a nonzero polynomial with coefficients in K
// (position i = coefficient of x^i), sorted by index.
std::vector<FFElem> find_roots(const std::vector<FFElem>& h, const FFPtr& K);

}  // namespace heckelab
