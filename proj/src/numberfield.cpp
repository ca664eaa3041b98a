#include "heckelab/numberfield.hpp"

#include <algorithm>
#include <utility>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab {

NumberField::NumberField(ZPoly g) : g_(std::move(g)), deg_(zdeg(g_) > 0 ? zdeg(g_) : 0) {
    // theta^d = -(g_0 + g_1 theta + ... + g_{d-1} theta^{d-1}), then recur
    NFCoords cur(deg_);
    for (size_t i = 0; i < deg_; ++i) cur[i] = -g_[i];
    theta_pow_.push_back(cur);
    for (size_t k = 1; k + 1 < deg_; ++k) {
        NFCoords next(deg_, 0);
        for (size_t i = 0; i + 1 < deg_; ++i) next[i + 1] = cur[i];
        const mpq_class& top = cur[deg_ - 1];
        if (top != 0)
            for (size_t i = 0; i < deg_; ++i) next[i] += top * theta_pow_[0][i];
        theta_pow_.push_back(next);
        cur = std::move(next);
    }
}

NFPtr NumberField::create(const ZPoly& g) {
    if (zdeg(g) < 1 || g.back() != 1)
        throw UsageError("NumberField: modulus must be monic of degree >= 1");
    if (!is_irreducible(g)) throw UsageError("NumberField: modulus is reducible");
    return NFPtr(new NumberField(g));
}

NFCoords NumberField::gen() const {
    NFCoords a = zero();
    if (deg_ == 1)
        a[0] = -g_[0];
    else
        a[1] = 1;
    return a;
}

NFCoords NumberField::from_rational(const mpq_class& c) const {
    NFCoords a = zero();
    a[0] = c;
    return a;
}

NFCoords NumberField::from_poly(const QPoly& f) const {
    auto [q, r] = qdivmod(f, to_qpoly(g_));
    (void)q;
    NFCoords a = zero();
    for (size_t i = 0; i < r.size(); ++i) a[i] = r[i];
    return a;
}

QPoly NumberField::to_poly(const NFCoords& a) const {
    QPoly f(a.begin(), a.end());
    qnormalize(f);
    return f;
}

bool NumberField::is_zero(const NFCoords& a) const {
    return std::all_of(a.begin(), a.end(), [](const mpq_class& x) { return x == 0; });
}

NFCoords NumberField::add(const NFCoords& a, const NFCoords& b) const {
    NFCoords out(deg_);
    for (size_t i = 0; i < deg_; ++i) out[i] = a[i] + b[i];
    return out;
}

NFCoords NumberField::sub(const NFCoords& a, const NFCoords& b) const {
    NFCoords out(deg_);
    for (size_t i = 0; i < deg_; ++i) out[i] = a[i] - b[i];
    return out;
}

NFCoords NumberField::neg(const NFCoords& a) const {
    NFCoords out(deg_);
    for (size_t i = 0; i < deg_; ++i) out[i] = -a[i];
    return out;
}

NFCoords NumberField::mul(const NFCoords& a, const NFCoords& b) const {
    std::vector<mpq_class> conv(2 * deg_ - 1, 0);
    for (size_t i = 0; i < deg_; ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < deg_; ++j)
            if (b[j] != 0) conv[i + j] += a[i] * b[j];
    }
    NFCoords out(conv.begin(), conv.begin() + static_cast<long>(deg_));
    for (size_t k = deg_; k < conv.size(); ++k) {
        if (conv[k] == 0) continue;
        const NFCoords& pw = theta_pow_[k - deg_];
        for (size_t i = 0; i < deg_; ++i) out[i] += conv[k] * pw[i];
    }
    return out;
}

NFCoords NumberField::inv(const NFCoords& a) const {
    if (is_zero(a)) throw UsageError("NumberField::inv: zero element");
    auto x = solve(mul_matrix(a), one());
    if (!x) throw UsageError("NumberField::inv: multiplication matrix singular");
    return *x;
}

NFCoords NumberField::div(const NFCoords& a, const NFCoords& b) const { return mul(a, inv(b)); }

NFCoords NumberField::pow(const NFCoords& a, long e) const {
    NFCoords base = e < 0 ? inv(a) : a;
    unsigned long n = static_cast<unsigned long>(e < 0 ? -e : e);
    NFCoords out = one();
    while (n) {
        if (n & 1) out = mul(out, base);
        base = mul(base, base);
        n >>= 1;
    }
    return out;
}

QMat NumberField::mul_matrix(const NFCoords& a) const {
    QMat m(deg_, deg_);
    NFCoords cur = a;
    for (size_t j = 0; j < deg_; ++j) {
        for (size_t i = 0; i < deg_; ++i) m(i, j) = cur[i];
        if (j + 1 < deg_) cur = mul(cur, gen());
    }
    return m;
}

mpq_class NumberField::norm(const NFCoords& a) const { return det(mul_matrix(a)); }

mpq_class NumberField::trace(const NFCoords& a) const {
    QMat m = mul_matrix(a);
    mpq_class t = 0;
    for (size_t i = 0; i < deg_; ++i) t += m(i, i);
    return t;
}

std::pair<std::vector<mpz_class>, mpz_class> NumberField::integer_coords(
    const NFCoords& a) const {
    mpz_class den = 1;
    for (const auto& c : a) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
    std::vector<mpz_class> A(deg_);
    for (size_t i = 0; i < deg_; ++i) {
        mpq_class scaled = a[i] * den;
        A[i] = scaled.get_num();  // exact: den is a common denominator
    }
    return {std::move(A), std::move(den)};
}

// ---- primes ----

namespace {

// valuation of n at p (n != 0)
long vp(const mpz_class& n, const mpz_class& p) {
    mpz_class rest;
    return static_cast<long>(
        mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

// coordinates of local(theta)^j for j = 0..jmax, as integer vectors
std::vector<std::vector<mpz_class>> local_powers(const PrimeIdeal& P, long jmax) {
    const NumberField& K = *P.field;
    QPoly hq;
    for (const auto& c : P.local) hq.emplace_back(c);
    qnormalize(hq);
    NFCoords h = K.from_poly(hq);
    std::vector<std::vector<mpz_class>> out;
    NFCoords cur = K.one();
    for (long j = 0; j <= jmax; ++j) {
        auto [A, den] = K.integer_coords(cur);
        if (den != 1) throw UsageError("internal: non-integral power of integral element");
        out.push_back(std::move(A));
        if (j < jmax) cur = K.mul(cur, h);
    }
    return out;
}

// columns spanning p^k Z[theta] + p^{k-1} h Z[theta] + ... + h^k Z[theta],
// which is P^k intersected with Z[theta] in the p-maximal situation
std::vector<std::vector<mpz_class>> ideal_power_columns(
    const PrimeIdeal& P, long k, const std::vector<std::vector<mpz_class>>& hpow) {
    const NumberField& K = *P.field;
    size_t d = K.degree();
    std::vector<std::vector<mpz_class>> cols;
    for (long j = 0; j <= k; ++j) {
        mpz_class scale;
        mpz_pow_ui(scale.get_mpz_t(), P.p.get_mpz_t(), static_cast<unsigned long>(k - j));
        // generator times theta^i, reduced through the field multiplication
        NFCoords w(d, 0);
        for (size_t i = 0; i < d; ++i) w[i] = hpow[static_cast<size_t>(j)][i] * scale;
        NFCoords cur = w;
        for (size_t i = 0; i < d; ++i) {
            auto [A, den] = K.integer_coords(cur);
            if (den != 1) throw UsageError("internal: non-integral ideal generator");
            cols.push_back(std::move(A));
            if (i + 1 < d) cur = K.mul(cur, K.gen());
        }
    }
    return cols;
}

}  // namespace

std::vector<PrimeIdeal> factor_prime(const NFPtr& K, const mpz_class& p) {
    if (!is_prime(p)) throw UsageError("factor_prime: p must be prime");
    if (!p.fits_slong_p()) throw UsageError("factor_prime: p out of range");
    const ZPoly& g = K->modulus();
    modp::Poly gbar = modp::reduce(g, p);
    auto factors = modp::factor(gbar, p.get_si());

    // Dedekind criterion: with gbar = prod h_i^{e_i}, lift the radical R and
    // the cofactor C = gbar/R, then T = (R*C - g)/p must be coprime to every
    // repeated h_i mod p.
    modp::Poly radical = {1};
    modp::Poly repeated = {1};
    for (const auto& [h, e] : factors) {
        radical = modp::mul(radical, h, p);
        if (e >= 2) repeated = modp::mul(repeated, h, p);
    }
    modp::Poly cof = modp::divmod(gbar, radical, p).first;
    ZPoly prod = zmul(ZPoly(radical.begin(), radical.end()), ZPoly(cof.begin(), cof.end()));
    ZPoly diff = zsub(prod, g);
    std::vector<mpz_class> T(diff.size());
    for (size_t i = 0; i < diff.size(); ++i)
        mpz_divexact(T[i].get_mpz_t(), diff[i].get_mpz_t(), p.get_mpz_t());
    modp::Poly Tbar = modp::reduce(T, p);
    if (modp::degree(modp::gcd(Tbar, repeated, p)) > 0)
        throw NotPMaximal("Z[theta] is not maximal at " + p.get_str());

    std::vector<PrimeIdeal> out;
    for (const auto& [h, e] : factors) {
        PrimeIdeal P;
        P.field = K;
        P.p = p;
        P.local = h;
        P.e = e;
        P.f = modp::degree(h);
        P.residue = FiniteField::get(p, static_cast<unsigned>(P.f));
        std::vector<FFElem> hc(h.size());
        for (size_t i = 0; i < h.size(); ++i) hc[i] = P.residue->from_int(h[i]);
        auto roots = find_roots(hc, P.residue);
        if (roots.empty()) throw UsageError("internal: local factor has no residue root");
        P.theta_image = roots.front();
        out.push_back(std::move(P));
    }
    return out;
}

std::optional<long> valuation(const NFCoords& a, const PrimeIdeal& P) {
    const NumberField& K = *P.field;
    if (K.is_zero(a)) return std::nullopt;
    auto [A, den] = K.integer_coords(a);
    long shift = P.e * vp(den, P.p);
    // bound: f * v_P(A) <= v_p(Norm(A))
    NFCoords ai(A.begin(), A.end());
    mpq_class nrm = K.norm(ai);
    long cap = vp(nrm.get_num(), P.p) + 1;
    auto hpow = local_powers(P, cap);
    long v = 0;
    while (v < cap) {
        auto hnf = hnf_lattice(ideal_power_columns(P, v + 1, hpow), K.degree());
        if (!lattice_contains(hnf, A)) break;
        ++v;
    }
    return v - shift;
}

FFElem reduce_mod(const NFCoords& a, const PrimeIdeal& P) {
    const NumberField& K = *P.field;
    const FiniteField& R = *P.residue;
    auto [A, den] = K.integer_coords(a);
    long s = den == 0 ? 0 : vp(den, P.p);
    if (s == 0) {
        // evaluate A at theta_image, divide by the p-unit denominator
        FFElem acc;
        for (size_t i = A.size(); i-- > 0;)
            acc = R.add(R.mul(acc, P.theta_image), R.from_int(A[i]));
        return R.mul(acc, R.inv(R.from_int(den)));
    }
    auto v = valuation(a, P);
    if (v && *v < 0)
        throw NegativeValuation("element has valuation " + std::to_string(*v));
    // Solve A = p^s u (r_0 + r_1 theta + ... + r_{f-1} theta^{f-1}) + J,
    // J in P^{se+1} meet Z[theta]; r_i mod p are the residue coordinates.
    mpz_class ps, u;
    mpz_pow_ui(ps.get_mpz_t(), P.p.get_mpz_t(), static_cast<unsigned long>(s));
    u = den / ps;
    long k = s * P.e + 1;
    auto hpow = local_powers(P, k);
    auto cols = ideal_power_columns(P, k, hpow);
    size_t d = K.degree(), f = static_cast<size_t>(P.f);
    std::vector<std::vector<mpz_class>> sys;
    for (size_t i = 0; i < f; ++i) {
        std::vector<mpz_class> c(d, 0);
        c[i] = ps * u;
        sys.push_back(std::move(c));
    }
    for (auto& c : cols) sys.push_back(std::move(c));
    auto sol = solve_integer(sys, d, A);
    if (!sol) throw UsageError("internal: residue lift system inconsistent");
    FFElem out;
    for (size_t i = f; i-- > 0;) {
        mpz_class ri = (*sol)[i] % P.p;
        if (ri < 0) ri += P.p;
        out = R.add(R.mul(out, P.theta_image), R.from_int(ri));
    }
    return out;
}

}  // namespace heckelab
