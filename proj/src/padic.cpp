#include "heckelab/padic.hpp"

#include <algorithm>
#include <utility>

#include "heckelab/errors.hpp"

namespace heckelab {

namespace {

// Gauss-Jordan solve A w = b over Z/M, M = p^m: pivots must be units mod p,
// which suffices here because every system solved is invertible mod p.
std::vector<mpz_class> solve_unit_system(std::vector<std::vector<mpz_class>> A,
                                         std::vector<mpz_class> b, const mpz_class& M,
                                         const mpz_class& p) {
    size_t d = A.size();
    for (size_t col = 0; col < d; ++col) {
        size_t piv = d;
        for (size_t r = col; r < d; ++r) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), A[r][col].get_mpz_t(), p.get_mpz_t());
            if (g == 1) {
                piv = r;
                break;
            }
        }
        if (piv == d) throw UsageError("p-adic solve: matrix not invertible at p");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), A[col][col].get_mpz_t(), M.get_mpz_t());
        for (size_t j = 0; j < d; ++j) A[col][j] = A[col][j] * inv % M;
        b[col] = b[col] * inv % M;
        for (size_t r = 0; r < d; ++r) {
            if (r == col || A[r][col] == 0) continue;
            mpz_class f = A[r][col];
            for (size_t j = 0; j < d; ++j) A[r][j] = (A[r][j] - f * A[col][j]) % M;
            b[r] = (b[r] - f * b[col]) % M;
        }
    }
    for (auto& x : b)
        if (x < 0) x += M;
    return b;
}

// Working ring (Z/M)[theta] = (Z/M)[x]/(g), M = p^m
struct Ring {
    modp::Poly g;  // field modulus reduced mod M
    mpz_class M, p;
    size_t d;

    Ring(const NumberField& K, const mpz_class& p_, long m) : p(p_), d(K.degree()) {
        mpz_pow_ui(M.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(m));
        g = modp::reduce(K.modulus(), M);
    }
    modp::Poly mul(const modp::Poly& a, const modp::Poly& b) const {
        return modp::rem(modp::mul(a, b, M), g, M);
    }
    modp::Poly add(const modp::Poly& a, const modp::Poly& b) const { return modp::add(a, b, M); }
    modp::Poly sub(const modp::Poly& a, const modp::Poly& b) const { return modp::sub(a, b, M); }
    modp::Poly scalar(const mpz_class& c) const { return modp::reduce({c}, M); }
    // inverse of a unit (unit on every component)
    modp::Poly inv(const modp::Poly& u) const {
        std::vector<std::vector<mpz_class>> rows(d, std::vector<mpz_class>(d, 0));
        modp::Poly cur = modp::rem(u, g, M);
        for (size_t j = 0; j < d; ++j) {
            for (size_t i = 0; i < cur.size(); ++i) rows[i][j] = cur[i];
            if (j + 1 < d) cur = mul(cur, {0, 1});
        }
        std::vector<mpz_class> e0(d, 0);
        e0[0] = 1;
        auto w = solve_unit_system(std::move(rows), std::move(e0), M, p);
        modp::Poly out(w.begin(), w.end());
        modp::normalize(out, M);
        return out;
    }
    // truncate an element to precision p^m2 <= M
    static std::vector<mpz_class> coords_mod(const modp::Poly& a, size_t d, const mpz_class& M2) {
        std::vector<mpz_class> out(d, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            out[i] = a[i] % M2;
            if (out[i] < 0) out[i] += M2;
        }
        return out;
    }
};

// CRT idempotent of the P-component of (Z/M)[x]/(g): 1 on Z_p[x]/(h^e)'s
// Hensel block, 0 on the others.  Built mod p, then lifted quadratically.
modp::Poly component_idempotent(const Ring& R, const PrimeIdeal& P, long m) {
    modp::Poly gbar = modp::reduce(R.g, R.p);
    modp::Poly he = {1};
    for (int i = 0; i < P.e; ++i) he = modp::mul(he, P.local, R.p);
    modp::Poly cof = modp::divmod(gbar, he, R.p).first;
    if (modp::degree(cof) == 0) return R.scalar(1);  // single component
    modp::Poly s = modp::inv_mod(cof, he, R.p);
    modp::Poly e = modp::rem(modp::mul(cof, s, R.p), gbar, R.p);
    // Newton on x^2 = x: e <- 3e^2 - 2e^3 doubles the p-precision
    long prec = 1;
    while (prec < m) {
        modp::Poly e2 = R.mul(e, e);
        modp::Poly e3 = R.mul(e2, e);
        e = R.sub(R.mul(R.scalar(3), e2), R.mul(R.scalar(2), e3));
        prec *= 2;
    }
    if (!R.sub(R.mul(e, e), e).empty()) throw UsageError("internal: idempotent lift failed");
    return e;
}

struct UnitRootResult {
    modp::Poly x;     // Newton limit in the full ring (a_p off-component)
    modp::Poly idem;  // P-component idempotent
};

// Hensel/Newton for the unit root of f(T) = T^2 - a_p T + p^{k-1} on the
// P-component, starting from T = a_p (f' = a_p there, a unit).
UnitRootResult lift_unit_root(const Ring& R, const modp::Poly& ap, long k, const PrimeIdeal& P,
                              long m) {
    modp::Poly idem = component_idempotent(R, P, m);
    mpz_class pk1;
    mpz_pow_ui(pk1.get_mpz_t(), R.p.get_mpz_t(), static_cast<unsigned long>(k - 1));
    modp::Poly one = R.scalar(1);
    modp::Poly x = ap;
    for (long iter = 0; iter < 2 * m + 4; ++iter) {
        modp::Poly fx = R.add(R.sub(R.mul(x, x), R.mul(ap, x)), R.scalar(pk1));
        modp::Poly masked = R.mul(idem, fx);
        if (masked.empty()) return {std::move(x), std::move(idem)};
        // W = (e f'(x) + (1-e))^{-1}; e W inverts f'(x) on the component
        modp::Poly fpx = R.sub(R.add(x, x), ap);
        modp::Poly u = R.add(R.mul(idem, fpx), R.sub(one, idem));
        x = R.sub(x, R.mul(masked, R.inv(u)));
    }
    throw UsageError("internal: unit-root iteration did not converge");
}

// a_p as an element of (Z/M)[theta]; denominator must be a unit at p
modp::Poly ring_image(const Ring& R, const NumberField& K, const NFCoords& ap) {
    auto [A, den] = K.integer_coords(ap);
    mpz_class dinv;
    if (!mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), R.M.get_mpz_t()))
        throw UsageError("a_p must be integral above p");
    modp::Poly out = modp::reduce(A, R.M);
    return modp::rem(modp::scalar_mul(dinv, out, R.M), R.g, R.M);
}

FFElem residue_of_integral(const std::vector<mpz_class>& coords, const PrimeIdeal& P) {
    const FiniteField& F = *P.residue;
    FFElem acc;
    for (size_t i = coords.size(); i-- > 0;)
        acc = F.add(F.mul(acc, P.theta_image), F.from_int(coords[i]));
    return acc;
}

}  // namespace

bool is_ordinary_value(const NFCoords& ap, const PrimeIdeal& P) {
    auto v = valuation(ap, P);
    return v.has_value() && *v == 0;
}

LocalClassification classify_local(const NFCoords& ap, long k, const PrimeIdeal& P, long m) {
    if (k < 2 || k > P.p + 1)
        throw HypothesisViolated("classify_local: weight " + std::to_string(k) +
                                 " outside [2, p+1] for p = " + P.p.get_str());
    if (m < 1) throw UsageError("classify_local: precision must be >= 1");
    const NumberField& K = *P.field;
    LocalClassification out;
    out.precision = m;
    mpz_pow_ui(out.modulus.get_mpz_t(), P.p.get_mpz_t(), static_cast<unsigned long>(m));
    auto v = valuation(ap, P);
    if (!v.has_value() || *v > 0) {
        out.ordinary = false;  // Fontaine branch
        return out;
    }
    if (*v < 0) throw UsageError("classify_local: a_p has a pole at P");
    out.ordinary = true;
    Ring R(K, P.p, m);
    auto lifted = lift_unit_root(R, ring_image(R, K, ap), k, P, m);
    modp::Poly alpha = R.mul(lifted.idem, lifted.x);
    out.unit_root = Ring::coords_mod(alpha, K.degree(), out.modulus);
    out.unit_root_residue = residue_of_integral(out.unit_root, P);
    return out;
}

Stabilization p_stabilize_value(const NFCoords& ap, long k, const PrimeIdeal& P, long m) {
    if (k < 2) throw UsageError("p_stabilize: weight must be >= 2");
    if (m < 1) throw UsageError("p_stabilize: precision must be >= 1");
    auto v = valuation(ap, P);
    if (!v.has_value() || *v > 0)
        throw NonOrdinary("v_P(a_p) > 0: both roots of the Hecke polynomial are non-units");
    if (*v < 0) throw UsageError("p_stabilize: a_p has a pole at P");
    const NumberField& K = *P.field;
    // extra headroom so v(beta) = (k-1) e stays below the working precision
    long mw = std::max(m, k + 1);
    Ring R(K, P.p, mw);
    modp::Poly apR = ring_image(R, K, ap);
    auto lifted = lift_unit_root(R, apR, k, P, mw);
    modp::Poly alpha = R.mul(lifted.idem, lifted.x);
    modp::Poly beta = R.mul(lifted.idem, R.sub(apR, lifted.x));

    // checks of the stabilization identities on the P-component
    mpz_class pk1;
    mpz_pow_ui(pk1.get_mpz_t(), P.p.get_mpz_t(), static_cast<unsigned long>(k - 1));
    modp::Poly lhs = R.mul(alpha, beta);
    modp::Poly rhs = R.mul(lifted.idem, R.scalar(pk1));
    if (!R.sub(lhs, rhs).empty()) throw UsageError("internal: alpha*beta != p^{k-1}");
    if (!R.sub(R.add(alpha, beta), R.mul(lifted.idem, apR)).empty())
        throw UsageError("internal: alpha+beta != a_p");

    Stabilization out;
    out.precision = m;
    mpz_pow_ui(out.modulus.get_mpz_t(), P.p.get_mpz_t(), static_cast<unsigned long>(m));
    out.alpha = Ring::coords_mod(alpha, K.degree(), out.modulus);
    out.beta = Ring::coords_mod(beta, K.degree(), out.modulus);
    // v(beta) from the masked lift; legitimate because membership in P^j
    // only constrains the P-component and j stays below e * mw
    auto bw = Ring::coords_mod(beta, K.degree(), R.M);
    NFCoords bq(bw.begin(), bw.end());
    auto vb = valuation(bq, P);
    if (!vb.has_value()) throw UsageError("internal: beta vanished at working precision");
    out.beta_valuation = *vb;
    if (out.beta_valuation != (k - 1) * P.e)
        throw UsageError("internal: v(beta) != (k-1)e");
    return out;
}

}  // namespace heckelab
