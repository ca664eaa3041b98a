#pragma once
#include <gmpxx.h>

#include <array>
#include <string>
#include <vector>

#include "heckelab/congruence.hpp"
#include "heckelab/qmatrix.hpp"

namespace heckelab {

// Element a + b*sqrt(u) of the quadratic model field attached to a QuadModel.
struct QuadElem {
    mpq_class a, b;
    bool is_zero() const { return a == 0 && b == 0; }
    bool is_rational() const { return b == 0; }
    bool operator==(const QuadElem&) const = default;
};

// Exact model of the unramified quadratic extension of Q_p, p an odd prime:
// the field Q(sqrt u) with u the least positive quadratic non-residue mod p,
// so that p stays inert and conjugation sigma plays the role of the Frobenius
// of the residue extension.  Every commutant question below is a finite
// linear-algebra problem with coefficients in this dense subfield, so exact
// rational arithmetic replaces p-adic precision management.
class QuadModel {
public:
    explicit QuadModel(long p);  // UsageError unless p is an odd prime

    long p() const { return p_; }
    long u() const { return u_; }

    QuadElem make(const mpq_class& a, const mpq_class& b = 0) const { return {a, b}; }
    QuadElem from_int(long n) const { return {mpq_class(n), 0}; }
    QuadElem sqrt_u() const { return {0, 1}; }

    QuadElem add(const QuadElem& x, const QuadElem& y) const;
    QuadElem sub(const QuadElem& x, const QuadElem& y) const;
    QuadElem neg(const QuadElem& x) const;
    QuadElem mul(const QuadElem& x, const QuadElem& y) const;
    QuadElem inv(const QuadElem& x) const;  // UsageError on zero
    QuadElem div(const QuadElem& x, const QuadElem& y) const;
    QuadElem sigma(const QuadElem& x) const { return {x.a, -x.b}; }
    mpq_class norm(const QuadElem& x) const;  // x * sigma(x) = a^2 - u b^2

    // v(x) = v_p(x * sigma(x)) / 2, the unique extension of the p-adic
    // valuation; integer-valued because p is inert.  UsageError on zero.
    long valuation(const QuadElem& x) const;

private:
    long p_ = 0, u_ = 0;
};

// p-adic valuation of a nonzero rational (UsageError on zero).
long rational_valuation(const mpq_class& q, long p);

// 2x2 matrix over the quadratic model field.
struct QuadMat {
    std::array<std::array<QuadElem, 2>, 2> e;
    bool is_zero() const;
    bool operator==(const QuadMat&) const = default;
};

QuadMat mat_identity();
QuadMat mat_add(const QuadModel& F, const QuadMat& x, const QuadMat& y);
QuadMat mat_sub(const QuadModel& F, const QuadMat& x, const QuadMat& y);
QuadMat mat_mul(const QuadModel& F, const QuadMat& x, const QuadMat& y);
QuadMat mat_scale(const QuadModel& F, const QuadElem& c, const QuadMat& x);
QuadMat mat_sigma(const QuadMat& x);  // sigma applied entrywise
QuadElem mat_det(const QuadModel& F, const QuadMat& x);
QuadMat mat_inv(const QuadModel& F, const QuadMat& x);  // UsageError if det = 0

// The supersingular crystalline Frobenius in its normal form (0 1; -p 0);
// characteristic polynomial X^2 + p.
QuadMat supersingular_frobenius(const QuadModel& F);

// Q-subspace of 2x2 model matrices given by a Q-basis; base_dimension is the
// dimension over Q (model scalars count 2).  The commutant constructors fill
// the basis with the deterministic kernel basis of the defining realified
// linear system, so equal inputs give identical bases.
struct EndoAlgebra {
    std::vector<QuadMat> basis;
    long base_dimension = 0;
};

// Membership of t in the Q-span of alg.basis.
bool algebra_contains(const QuadModel& F, const EndoAlgebra& alg, const QuadMat& t);
// Identity in the span and all pairwise basis products in the span.
bool algebra_closed(const QuadModel& F, const EndoAlgebra& alg);

// {T rational : T phi = phi T} for an invertible rational phi (given as a 2x2
// QMat).  Models the endomorphisms over the base field, where the Frobenius
// is genuinely linear.
EndoAlgebra linear_commutant(const QuadModel& F, const QMat& phi);
// linear_commutant intersected with {T : T(line) in line}, line a nonzero
// rational vector.
EndoAlgebra filtered_commutant(const QuadModel& F, const QMat& phi,
                               const std::vector<mpq_class>& line);
// {T over the model : T phi = phi T^sigma}: the sigma-twisted commutant of a
// semilinear operator v -> phi v^sigma.  Solved by splitting each of the four
// unknown entries into rational and sqrt(u) parts (8 rational unknowns).
EndoAlgebra semilinear_commutant(const QuadModel& F, const QuadMat& phi);
// semilinear_commutant intersected with {T : T(line) in line}, line a nonzero
// vector over the model.
EndoAlgebra filtered_semilinear_commutant(const QuadModel& F, const QuadMat& phi,
                                          const std::array<QuadElem, 2>& line);

// Structure checks for the sigma-twisted commutant of the supersingular
// Frobenius: it should be the quaternion division algebra ramified at p and
// infinity, elements (a b; -p b^sigma a^sigma) with reduced norm
// det = N(a) + p N(b).
struct QuaternionReport {
    bool identity = false;            // I lies in the span
    bool closure = false;             // basis products stay in the span
    bool parameterized = false;       // every basis element is (a b; -p b^sigma a^sigma)
    bool norm_multiplicative = false; // det is rational on the span and multiplicative
    bool no_zero_divisors = false;    // nonzero elements have det != 0, with the
                                      // valuation-parity certificate v(N(a)) even,
                                      // v(p N(b)) odd when parameterized holds
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};
QuaternionReport quaternion_checks(const QuadModel& F, const EndoAlgebra& alg,
                                   long samples = 1000, unsigned long seed = 20260814);

// Conjugates both the semilinear Frobenius and a candidate commutant element
// by a sigma-fixed invertible A and reports whether sigma-commutation holds
// in the new basis: (A T A^-1)(A phi A^-1) = (A phi A^-1)(A T A^-1)^sigma.
// UsageError unless A^sigma = A and det A != 0.
bool base_change_covariance(const QuadModel& F, const QuadMat& A, const QuadMat& phi,
                            const QuadMat& T);

// The four commutant dimensions for the supersingular Frobenius at p with
// filtration line span(e1): linear, filtered, sigma-semilinear, filtered
// sigma-semilinear.
struct CommutantDims {
    long linear = 0, filtered = 0, semilinear = 0, filtered_semilinear = 0;
    bool operator==(const CommutantDims&) const = default;
};
CommutantDims commutant_dimensions(long p);

// One report line per odd prime in [lo, hi]: the dimension quadruple plus
// quaternion and base-change check outcomes (samples random elements for the
// quaternion checks, bc_samples random (A, T) pairs for base change).
// status "pass" iff the quadruple equals (2, 1, 4, 2) and every check holds.
std::vector<ReportLine> phimod_report(long lo, long hi, long samples = 200,
                                      long bc_samples = 25);

}  // namespace heckelab
