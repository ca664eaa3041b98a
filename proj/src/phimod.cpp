#include "heckelab/phimod.hpp"

#include <random>
#include <sstream>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab {

QuadModel::QuadModel(long p) : p_(p) {
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        throw UsageError("QuadModel: p must be an odd prime, got " + std::to_string(p));
    // Least positive non-residue (always a prime < p, but scanning is cheap).
    for (long u = 2; u < p; ++u) {
        if (powmod(u, (p - 1) / 2, p) == p - 1) {
            u_ = u;
            break;
        }
    }
}

QuadElem QuadModel::add(const QuadElem& x, const QuadElem& y) const {
    return {mpq_class(x.a + y.a), mpq_class(x.b + y.b)};
}

QuadElem QuadModel::sub(const QuadElem& x, const QuadElem& y) const {
    return {mpq_class(x.a - y.a), mpq_class(x.b - y.b)};
}

QuadElem QuadModel::neg(const QuadElem& x) const { return {mpq_class(-x.a), mpq_class(-x.b)}; }

QuadElem QuadModel::mul(const QuadElem& x, const QuadElem& y) const {
    return {mpq_class(x.a * y.a + u_ * (x.b * y.b)), mpq_class(x.a * y.b + x.b * y.a)};
}

mpq_class QuadModel::norm(const QuadElem& x) const { return x.a * x.a - u_ * (x.b * x.b); }

QuadElem QuadModel::inv(const QuadElem& x) const {
    if (x.is_zero()) throw UsageError("QuadModel: division by zero");
    mpq_class n = norm(x);  // nonzero: u is not a rational square
    return {mpq_class(x.a / n), mpq_class(-x.b / n)};
}

QuadElem QuadModel::div(const QuadElem& x, const QuadElem& y) const { return mul(x, inv(y)); }

long rational_valuation(const mpq_class& q, long p) {
    if (q == 0) throw UsageError("rational_valuation: zero has no finite valuation");
    mpz_class pz(p), tmp;
    long vn = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.get_num().get_mpz_t(), pz.get_mpz_t()));
    long vd = static_cast<long>(mpz_remove(tmp.get_mpz_t(), q.get_den().get_mpz_t(), pz.get_mpz_t()));
    return vn - vd;
}

long QuadModel::valuation(const QuadElem& x) const {
    if (x.is_zero()) throw UsageError("QuadModel: zero has no finite valuation");
    // v_p(a^2 - u b^2) is even: if v_p(a) != v_p(b) the smaller doubles, and
    // at equal valuations the leading parts cannot cancel mod p since u is a
    // non-residue.  So the division below is exact.
    return rational_valuation(norm(x), p_) / 2;
}

bool QuadMat::is_zero() const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!e[i][j].is_zero()) return false;
    return true;
}

QuadMat mat_identity() {
    QuadMat m{};
    m.e[0][0] = {1, 0};
    m.e[1][1] = {1, 0};
    return m;
}

QuadMat mat_add(const QuadModel& F, const QuadMat& x, const QuadMat& y) {
    QuadMat r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = F.add(x.e[i][j], y.e[i][j]);
    return r;
}

QuadMat mat_sub(const QuadModel& F, const QuadMat& x, const QuadMat& y) {
    QuadMat r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = F.sub(x.e[i][j], y.e[i][j]);
    return r;
}

QuadMat mat_mul(const QuadModel& F, const QuadMat& x, const QuadMat& y) {
    QuadMat r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            QuadElem s = F.mul(x.e[i][0], y.e[0][j]);
            r.e[i][j] = F.add(s, F.mul(x.e[i][1], y.e[1][j]));
        }
    return r;
}

QuadMat mat_scale(const QuadModel& F, const QuadElem& c, const QuadMat& x) {
    QuadMat r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j] = F.mul(c, x.e[i][j]);
    return r;
}

QuadMat mat_sigma(const QuadMat& x) {
    QuadMat r = x;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.e[i][j].b = -r.e[i][j].b;
    return r;
}

QuadElem mat_det(const QuadModel& F, const QuadMat& x) {
    return F.sub(F.mul(x.e[0][0], x.e[1][1]), F.mul(x.e[0][1], x.e[1][0]));
}

QuadMat mat_inv(const QuadModel& F, const QuadMat& x) {
    QuadElem d = mat_det(F, x);
    if (d.is_zero()) throw UsageError("mat_inv: singular matrix");
    QuadElem di = F.inv(d);
    QuadMat r{};
    r.e[0][0] = F.mul(di, x.e[1][1]);
    r.e[0][1] = F.neg(F.mul(di, x.e[0][1]));
    r.e[1][0] = F.neg(F.mul(di, x.e[1][0]));
    r.e[1][1] = F.mul(di, x.e[0][0]);
    return r;
}

QuadMat supersingular_frobenius(const QuadModel& F) {
    QuadMat m{};
    m.e[0][1] = F.from_int(1);
    m.e[1][0] = F.from_int(-F.p());
    return m;
}

namespace {

// Realified coordinates: unknown entry T[k][l] = x + y*sqrt(u) occupies slots
// 2*(2k+l) (rational part) and 2*(2k+l)+1 (sqrt-u part).
constexpr size_t kSlots = 8;

std::vector<mpq_class> flatten(const QuadMat& t) {
    std::vector<mpq_class> v(kSlots);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            v[2 * (2 * k + l)] = t.e[k][l].a;
            v[2 * (2 * k + l) + 1] = t.e[k][l].b;
        }
    return v;
}

QuadMat unflatten(const std::vector<mpq_class>& v) {
    QuadMat t{};
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            t.e[k][l].a = v[2 * (2 * k + l)];
            t.e[k][l].b = v[2 * (2 * k + l) + 1];
        }
    return t;
}

// One linear form over the model in the 8 rational unknowns: coeff[m] is the
// model coefficient of unknown m.
struct ModelForm {
    std::array<QuadElem, kSlots> coeff{};
    // Adds c * T[k][l] (the unknown entry multiplied by a known c).
    void add_entry(const QuadModel& F, int k, int l, const QuadElem& c) {
        size_t m = 2 * (2 * k + l);
        coeff[m] = F.add(coeff[m], c);
        // sqrt(u) * c
        coeff[m + 1] = F.add(coeff[m + 1], QuadElem{mpq_class(F.u() * c.b), c.a});
    }
    // Adds c * sigma(T[k][l]).
    void add_entry_conj(const QuadModel& F, int k, int l, const QuadElem& c) {
        size_t m = 2 * (2 * k + l);
        coeff[m] = F.add(coeff[m], c);
        coeff[m + 1] = F.sub(coeff[m + 1], QuadElem{mpq_class(F.u() * c.b), c.a});
    }
};

void append_realified(QMat& rows, size_t& next, const ModelForm& form) {
    for (size_t m = 0; m < kSlots; ++m) {
        rows(next, m) = form.coeff[m].a;
        rows(next + 1, m) = form.coeff[m].b;
    }
    next += 2;
}

EndoAlgebra kernel_to_algebra(const QMat& system) {
    QMat ker = kernel_basis(system);
    EndoAlgebra alg;
    alg.base_dimension = static_cast<long>(ker.cols());
    for (size_t j = 0; j < ker.cols(); ++j) alg.basis.push_back(unflatten(ker.col(j)));
    return alg;
}

void require_invertible(const QMat& phi) {
    if (phi.rows() != 2 || phi.cols() != 2) throw UsageError("commutant: phi must be 2x2");
    if (det(phi) == 0) throw UsageError("commutant: phi must be invertible");
}

void require_invertible(const QuadModel& F, const QuadMat& phi) {
    if (mat_det(F, phi).is_zero()) throw UsageError("commutant: phi must be invertible");
}

// Rows of T phi - phi T over Q in the 4 unknowns t_{kl} (slot 2k+l).
QMat linear_system(const QMat& phi, const std::vector<mpq_class>* line) {
    size_t nrows = 4 + (line ? 1 : 0);
    QMat sys(nrows, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            size_t r = 2 * i + j;
            for (int k = 0; k < 2; ++k) {
                sys(r, 2 * i + k) += phi(k, j);   // (T phi)_{ij}
                sys(r, 2 * k + j) -= phi(i, k);   // (phi T)_{ij}
            }
        }
    if (line) {
        const auto& v = *line;
        // (T v)_0 v_1 - (T v)_1 v_0 = 0
        for (int k = 0; k < 2; ++k) {
            sys(4, 0 + k) += v[k] * v[1];
            sys(4, 2 + k) -= v[k] * v[0];
        }
    }
    return sys;
}

EndoAlgebra rational_kernel_to_algebra(const QMat& system) {
    QMat ker = kernel_basis(system);
    EndoAlgebra alg;
    alg.base_dimension = static_cast<long>(ker.cols());
    for (size_t j = 0; j < ker.cols(); ++j) {
        auto v = ker.col(j);
        QuadMat t{};
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) t.e[k][l] = {v[2 * k + l], 0};
        alg.basis.push_back(t);
    }
    return alg;
}

std::string q_str(const mpq_class& q) { return q.get_str(); }

}  // namespace

EndoAlgebra linear_commutant(const QuadModel& F, const QMat& phi) {
    (void)F;
    require_invertible(phi);
    return rational_kernel_to_algebra(linear_system(phi, nullptr));
}

EndoAlgebra filtered_commutant(const QuadModel& F, const QMat& phi,
                               const std::vector<mpq_class>& line) {
    (void)F;
    require_invertible(phi);
    if (line.size() != 2 || (line[0] == 0 && line[1] == 0))
        throw UsageError("filtered_commutant: line must be a nonzero vector in Q^2");
    return rational_kernel_to_algebra(linear_system(phi, &line));
}

EndoAlgebra semilinear_commutant(const QuadModel& F, const QuadMat& phi) {
    require_invertible(F, phi);
    QMat sys(8, kSlots);
    size_t next = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            ModelForm form;
            for (int k = 0; k < 2; ++k) {
                form.add_entry(F, i, k, phi.e[k][j]);                  // (T phi)_{ij}
                form.add_entry_conj(F, k, j, F.neg(phi.e[i][k]));      // -(phi T^sigma)_{ij}
            }
            append_realified(sys, next, form);
        }
    return kernel_to_algebra(sys);
}

EndoAlgebra filtered_semilinear_commutant(const QuadModel& F, const QuadMat& phi,
                                          const std::array<QuadElem, 2>& line) {
    require_invertible(F, phi);
    if (line[0].is_zero() && line[1].is_zero())
        throw UsageError("filtered_semilinear_commutant: line must be nonzero");
    QMat sys(10, kSlots);
    size_t next = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            ModelForm form;
            for (int k = 0; k < 2; ++k) {
                form.add_entry(F, i, k, phi.e[k][j]);
                form.add_entry_conj(F, k, j, F.neg(phi.e[i][k]));
            }
            append_realified(sys, next, form);
        }
    // (T v)_0 v_1 - (T v)_1 v_0 = 0 over the model
    ModelForm cross;
    for (int k = 0; k < 2; ++k) {
        cross.add_entry(F, 0, k, F.mul(line[k], line[1]));
        cross.add_entry(F, 1, k, F.neg(F.mul(line[k], line[0])));
    }
    append_realified(sys, next, cross);
    return kernel_to_algebra(sys);
}

bool algebra_contains(const QuadModel& F, const EndoAlgebra& alg, const QuadMat& t) {
    (void)F;
    if (alg.basis.empty()) return t.is_zero();
    QMat a(kSlots, alg.basis.size());
    for (size_t j = 0; j < alg.basis.size(); ++j) a.set_col(j, flatten(alg.basis[j]));
    return solve(a, flatten(t)).has_value();
}

bool algebra_closed(const QuadModel& F, const EndoAlgebra& alg) {
    if (!algebra_contains(F, alg, mat_identity())) return false;
    for (const auto& x : alg.basis)
        for (const auto& y : alg.basis)
            if (!algebra_contains(F, alg, mat_mul(F, x, y))) return false;
    return true;
}

namespace {

mpq_class p_power(long p, long e) {
    mpz_class pp;
    mpz_ui_pow_ui(pp.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e < 0 ? -e : e));
    if (e >= 0) return mpq_class(pp);
    return mpq_class(1) / mpq_class(pp);
}

// Random nonzero Q-combination of the basis, scaled by a random power of p to
// exercise valuations.
QuadMat random_element(const QuadModel& F, const EndoAlgebra& alg, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> coeff(-5, 5);
    std::uniform_int_distribution<long> exp(-1, 2);
    for (int attempt = 0; attempt < 64; ++attempt) {
        QuadMat t{};
        for (const auto& b : alg.basis)
            t = mat_add(F, t, mat_scale(F, F.make(mpq_class(coeff(rng))), b));
        if (t.is_zero()) continue;
        return mat_scale(F, F.make(p_power(F.p(), exp(rng))), t);
    }
    return alg.basis.empty() ? mat_identity() : alg.basis.front();
}

}  // namespace

QuaternionReport quaternion_checks(const QuadModel& F, const EndoAlgebra& alg, long samples,
                                   unsigned long seed) {
    QuaternionReport rep;
    auto fail = [&rep](std::string msg) { rep.failures.push_back(std::move(msg)); };

    rep.identity = algebra_contains(F, alg, mat_identity());
    if (!rep.identity) fail("identity: I is not in the span");

    rep.closure = true;
    for (size_t i = 0; i < alg.basis.size() && rep.closure; ++i)
        for (size_t j = 0; j < alg.basis.size() && rep.closure; ++j)
            if (!algebra_contains(F, alg, mat_mul(F, alg.basis[i], alg.basis[j]))) {
                rep.closure = false;
                fail("closure: product of basis elements " + std::to_string(i) + "," +
                     std::to_string(j) + " leaves the span");
            }

    rep.parameterized = true;
    mpq_class p(F.p());
    for (size_t i = 0; i < alg.basis.size(); ++i) {
        const QuadMat& t = alg.basis[i];
        bool ok = t.e[1][0] == F.neg(F.mul(F.make(p), F.sigma(t.e[0][1]))) &&
                  t.e[1][1] == F.sigma(t.e[0][0]);
        if (!ok) {
            rep.parameterized = false;
            fail("parameterized: basis element " + std::to_string(i) +
                 " is not of the form (a b; -p b^sigma a^sigma)");
        }
    }

    std::mt19937_64 rng(seed);
    rep.norm_multiplicative = true;
    long pair_samples = samples / 5 + 1;
    for (long s = 0; s < pair_samples && rep.norm_multiplicative; ++s) {
        QuadMat x = random_element(F, alg, rng);
        QuadMat y = random_element(F, alg, rng);
        QuadElem dx = mat_det(F, x), dy = mat_det(F, y), dxy = mat_det(F, mat_mul(F, x, y));
        if (!dx.is_rational() || !dy.is_rational()) {
            rep.norm_multiplicative = false;
            fail("norm: determinant is not rational on sample " + std::to_string(s));
        } else if (!(dxy == F.mul(dx, dy))) {
            rep.norm_multiplicative = false;
            fail("norm: determinant is not multiplicative on sample " + std::to_string(s));
        }
    }

    rep.no_zero_divisors = true;
    auto check_nonzero = [&](const QuadMat& t, const std::string& what) {
        if (t.is_zero()) return;
        QuadElem d = mat_det(F, t);
        if (d.is_zero()) {
            rep.no_zero_divisors = false;
            fail("zero-divisor: nonzero " + what + " has determinant 0");
            return;
        }
        if (!rep.parameterized) return;
        // det = N(a) + p N(b); v_p(N(a)) is even, v_p(p N(b)) is odd, so the
        // two terms can never cancel.
        const QuadElem& a = t.e[0][0];
        const QuadElem& b = t.e[0][1];
        if (!a.is_zero() && rational_valuation(F.norm(a), F.p()) % 2 != 0) {
            rep.no_zero_divisors = false;
            fail("zero-divisor: v_p(N(a)) odd for " + what + " (a = " + q_str(a.a) + "+" +
                 q_str(a.b) + "*sqrt(u))");
        }
        if (!b.is_zero() && rational_valuation(F.p() * F.norm(b), F.p()) % 2 == 0) {
            rep.no_zero_divisors = false;
            fail("zero-divisor: v_p(p N(b)) even for " + what);
        }
    };
    for (size_t i = 0; i < alg.basis.size() && rep.no_zero_divisors; ++i)
        check_nonzero(alg.basis[i], "basis element " + std::to_string(i));
    for (long s = 0; s < samples && rep.no_zero_divisors; ++s)
        check_nonzero(random_element(F, alg, rng), "sample " + std::to_string(s));

    return rep;
}

bool base_change_covariance(const QuadModel& F, const QuadMat& A, const QuadMat& phi,
                            const QuadMat& T) {
    if (!(mat_sigma(A) == A))
        throw UsageError("base_change_covariance: A must be sigma-fixed (rational entries)");
    if (mat_det(F, A).is_zero()) throw UsageError("base_change_covariance: A must be invertible");
    QuadMat Ai = mat_inv(F, A);
    QuadMat Tp = mat_mul(F, mat_mul(F, A, T), Ai);
    QuadMat Pp = mat_mul(F, mat_mul(F, A, phi), Ai);
    return mat_mul(F, Tp, Pp) == mat_mul(F, Pp, mat_sigma(Tp));
}

CommutantDims commutant_dimensions(long p) {
    QuadModel F(p);
    QMat phi_q(2, 2);
    phi_q(0, 1) = 1;
    phi_q(1, 0) = -p;
    std::vector<mpq_class> e1{1, 0};
    QuadMat phi = supersingular_frobenius(F);
    std::array<QuadElem, 2> e1_m{F.from_int(1), F.from_int(0)};
    CommutantDims d;
    d.linear = linear_commutant(F, phi_q).base_dimension;
    d.filtered = filtered_commutant(F, phi_q, e1).base_dimension;
    d.semilinear = semilinear_commutant(F, phi).base_dimension;
    d.filtered_semilinear = filtered_semilinear_commutant(F, phi, e1_m).base_dimension;
    return d;
}

std::vector<ReportLine> phimod_report(long lo, long hi, long samples, long bc_samples) {
    std::vector<ReportLine> out;
    if (hi < 3) return out;
    for (long p : primes_upto(hi)) {
        if (p < lo || p == 2) continue;
        QuadModel F(p);
        CommutantDims dims = commutant_dimensions(p);
        bool dims_ok = dims == CommutantDims{2, 1, 4, 2};
        EndoAlgebra alg = semilinear_commutant(F, supersingular_frobenius(F));
        QuaternionReport q =
            quaternion_checks(F, alg, samples, 20260814ul + static_cast<unsigned long>(p));
        std::mt19937_64 rng(20260814ul ^ static_cast<unsigned long>(p));
        std::uniform_int_distribution<long> entry(-4, 4);
        std::uniform_int_distribution<long> coeff(-5, 5);
        bool bc_ok = true;
        for (long s = 0; s < bc_samples && bc_ok; ++s) {
            QuadMat A{};
            do {
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) A.e[i][j] = F.from_int(entry(rng));
            } while (mat_det(F, A).is_zero());
            QuadMat T{};
            for (const auto& b : alg.basis)
                T = mat_add(F, T, mat_scale(F, F.from_int(coeff(rng)), b));
            bc_ok = base_change_covariance(F, A, supersingular_frobenius(F), T);
        }
        bool pass = dims_ok && q.ok() && bc_ok;
        std::ostringstream os;
        os << "{\"kind\":\"phimod\",\"p\":" << p << ",\"u\":" << F.u() << ",\"dims\":["
           << dims.linear << "," << dims.filtered << "," << dims.semilinear << ","
           << dims.filtered_semilinear << "],\"quaternion\":\"" << (q.ok() ? "pass" : "fail")
           << "\",\"base_change\":\"" << (bc_ok ? "pass" : "fail") << "\"";
        if (!q.failures.empty()) {
            os << ",\"failures\":[";
            for (size_t i = 0; i < q.failures.size(); ++i) {
                if (i) os << ",";
                os << "\"" << json_escape(q.failures[i]) << "\"";
            }
            os << "]";
        }
        os << ",\"status\":\"" << (pass ? "pass" : "fail") << "\"}";
        out.push_back({"phimod", pass ? "pass" : "fail", os.str()});
    }
    return out;
}

}  // namespace heckelab
