#include "heckelab/qpoly.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"
#include "heckelab/modpoly.hpp"

namespace heckelab {

int zdeg(const ZPoly& f) { return static_cast<int>(f.size()) - 1; }
int qdeg(const QPoly& f) { return static_cast<int>(f.size()) - 1; }

void znormalize(ZPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

void qnormalize(QPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

QPoly to_qpoly(const ZPoly& f) {
    QPoly r(f.begin(), f.end());
    qnormalize(r);
    return r;
}

ZPoly to_primitive(const QPoly& f) {
    QPoly g = f;
    qnormalize(g);
    if (g.empty()) return {};
    mpz_class den = 1;
    for (const auto& c : g) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    ZPoly z;
    z.reserve(g.size());
    for (const auto& c : g) {
        mpq_class t = c * den;
        z.push_back(t.get_num());
    }
    mpz_class content = 0;
    for (const auto& c : z) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
    if (z.back() < 0) content = -content;
    for (auto& c : z) c /= content;
    return z;
}

QPoly qadd(const QPoly& a, const QPoly& b) {
    QPoly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    qnormalize(r);
    return r;
}

QPoly qsub(const QPoly& a, const QPoly& b) {
    QPoly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    qnormalize(r);
    return r;
}

QPoly qmul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    qnormalize(r);
    return r;
}

QPoly qscale(const mpq_class& c, const QPoly& a) {
    if (c == 0) return {};
    QPoly r = a;
    for (auto& x : r) x *= c;
    return r;
}

std::pair<QPoly, QPoly> qdivmod(const QPoly& a, const QPoly& b) {
    if (b.empty()) throw UsageError("qdivmod: division by zero");
    QPoly r = a, q;
    int db = qdeg(b);
    mpq_class lcinv = 1 / b.back();
    if (qdeg(r) >= db) q.assign(r.size() - b.size() + 1, 0);
    while (qdeg(r) >= db) {
        int k = qdeg(r) - db;
        mpq_class t = r.back() * lcinv;
        q[k] = t;
        for (size_t i = 0; i < b.size(); ++i) r[k + i] -= t * b[i];
        qnormalize(r);
    }
    qnormalize(q);
    return {q, r};
}

QPoly qmonic(const QPoly& a) {
    if (a.empty()) return a;
    return qscale(1 / a.back(), a);
}

QPoly qgcd(const QPoly& a, const QPoly& b) {
    QPoly f = a, g = b;
    qnormalize(f);
    qnormalize(g);
    while (!g.empty()) {
        QPoly r = qdivmod(f, g).second;
        f = std::move(g);
        g = std::move(r);
    }
    return qmonic(f);
}

QPoly qderivative(const QPoly& a) {
    QPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
    qnormalize(r);
    return r;
}

mpq_class qeval(const QPoly& f, const mpq_class& x) {
    mpq_class r = 0;
    for (size_t i = f.size(); i-- > 0;) r = r * x + f[i];
    return r;
}

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
    if (a.empty() || b.empty()) return {};
    ZPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    znormalize(r);
    return r;
}

ZPoly zadd(const ZPoly& a, const ZPoly& b) {
    ZPoly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    znormalize(r);
    return r;
}

ZPoly zsub(const ZPoly& a, const ZPoly& b) {
    ZPoly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    znormalize(r);
    return r;
}

ZPoly zderivative(const ZPoly& a) {
    ZPoly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
    znormalize(r);
    return r;
}

mpq_class zeval(const ZPoly& f, const mpq_class& x) {
    mpq_class r = 0;
    for (size_t i = f.size(); i-- > 0;) r = r * x + f[i];
    return r;
}

std::vector<std::pair<ZPoly, int>> squarefree_decompose(const ZPoly& f) {
    std::vector<std::pair<ZPoly, int>> out;
    QPoly f0 = to_qpoly(to_primitive(to_qpoly(f)));
    if (f0.empty()) throw UsageError("squarefree_decompose: zero polynomial");
    if (qdeg(f0) == 0) return out;
    QPoly fp = qderivative(f0);
    QPoly a = qgcd(f0, fp);
    if (qdeg(a) == 0) {
        out.emplace_back(to_primitive(f0), 1);
        return out;
    }
    QPoly b = qdivmod(f0, a).first;
    QPoly c = qdivmod(fp, a).first;
    QPoly d = qsub(c, qderivative(b));
    int i = 1;
    while (qdeg(b) > 0) {
        QPoly g = qgcd(b, d);
        if (qdeg(g) > 0) out.emplace_back(to_primitive(g), i);
        b = qdivmod(b, g).first;
        c = qdivmod(d, g).first;
        d = qsub(c, qderivative(b));
        ++i;
    }
    return out;
}

namespace {

bool zpoly_less(const ZPoly& a, const ZPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

// --- Hensel machinery (symmetric step; all node products monic) ---

struct BezoutPair {
    modp::Poly s, t;  // s*g + t*h = 1 mod p
};

BezoutPair bezout_mod_p(const modp::Poly& g, const modp::Poly& h, const mpz_class& p) {
    // extended Euclid over F_p
    modp::Poly r0 = g, r1 = h;
    modp::Poly s0{1}, s1{}, t0{}, t1{1};
    while (!r1.empty()) {
        auto [q, r] = modp::divmod(r0, r1, p);
        modp::Poly s2 = modp::sub(s0, modp::mul(q, s1, p), p);
        modp::Poly t2 = modp::sub(t0, modp::mul(q, t1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (modp::degree(r0) != 0) throw UsageError("bezout_mod_p: inputs not coprime");
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), r0[0].get_mpz_t(), p.get_mpz_t());
    return {modp::scalar_mul(inv, s0, p), modp::scalar_mul(inv, t0, p)};
}

// Lift f = g*h (mod m) to mod m^2; preserves monicity of g and h.
void hensel_step(const modp::Poly& f, modp::Poly& g, modp::Poly& h, modp::Poly& s,
                 modp::Poly& t, const mpz_class& m) {
    mpz_class m2 = m * m;
    modp::Poly fr = f;
    modp::normalize(fr, m2);
    modp::Poly e = modp::sub(fr, modp::mul(g, h, m2), m2);
    modp::Poly dg = modp::rem(modp::mul(t, e, m2), g, m2);
    modp::Poly dh = modp::rem(modp::mul(s, e, m2), h, m2);
    g = modp::add(g, dg, m2);
    h = modp::add(h, dh, m2);
    modp::Poly b = modp::sub(
        modp::add(modp::mul(s, g, m2), modp::mul(t, h, m2), m2), modp::Poly{1}, m2);
    modp::Poly ds = modp::rem(modp::mul(s, b, m2), h, m2);
    modp::Poly dt = modp::rem(modp::mul(t, b, m2), g, m2);
    s = modp::sub(s, ds, m2);
    t = modp::sub(t, dt, m2);
}

modp::Poly product_mod(const std::vector<modp::Poly>& fs, size_t lo, size_t hi,
                       const mpz_class& m) {
    modp::Poly r{1};
    for (size_t i = lo; i < hi; ++i) r = modp::mul(r, fs[i], m);
    return r;
}

// Lift the factorization f = prod facs[lo..hi) (mod p) to modulus M (a power
// of p reached by repeated squaring from p).
void hensel_tree(const modp::Poly& f, const std::vector<modp::Poly>& facs, size_t lo,
                 size_t hi, const mpz_class& p, const mpz_class& M,
                 std::vector<modp::Poly>& out) {
    if (hi - lo == 1) {
        modp::Poly r = f;
        modp::normalize(r, M);
        out.push_back(std::move(r));
        return;
    }
    size_t mid = lo + (hi - lo) / 2;
    modp::Poly g = product_mod(facs, lo, mid, p);
    modp::Poly h = product_mod(facs, mid, hi, p);
    auto [s, t] = bezout_mod_p(g, h, p);
    mpz_class m = p;
    while (m < M) {
        hensel_step(f, g, h, s, t, m);
        m *= m;
    }
    modp::normalize(g, M);
    modp::normalize(h, M);
    hensel_tree(g, facs, lo, mid, p, M, out);
    hensel_tree(h, facs, mid, hi, p, M, out);
}

ZPoly symmetric_lift(const modp::Poly& f, const mpz_class& M) {
    ZPoly r(f.begin(), f.end());
    mpz_class half = M / 2;
    for (auto& c : r)
        if (c > half) c -= M;
    znormalize(r);
    return r;
}

// Exact division test for monic divisor.
bool zdivides_monic(const ZPoly& f, const ZPoly& g, ZPoly* quotient) {
    if (g.empty() || g.back() != 1) throw UsageError("zdivides_monic: divisor not monic");
    if (zdeg(g) > zdeg(f)) return false;
    ZPoly r = f, q(f.size() - g.size() + 1, 0);
    while (zdeg(r) >= zdeg(g)) {
        int k = zdeg(r) - zdeg(g);
        mpz_class t = r.back();
        q[k] = t;
        for (size_t i = 0; i < g.size(); ++i) r[k + i] -= t * g[i];
        znormalize(r);
    }
    if (!r.empty()) return false;
    if (quotient) *quotient = q;
    return true;
}

// Zassenhaus on a monic squarefree integer polynomial.
std::vector<ZPoly> zassenhaus_monic(const ZPoly& F) {
    int n = zdeg(F);
    if (n == 1) return {F};

    // Choose the reduction prime: smallest handful keeping F squarefree,
    // favoring the one with fewest modular factors.
    long best_p = 0;
    std::vector<std::pair<modp::Poly, int>> best_factors;
    int tried = 0;
    for (long p = 3; tried < 4; p += 2) {
        if (!is_prime(p)) continue;
        mpz_class pz(p);
        modp::Poly fbar = modp::reduce(F, pz);
        if (modp::degree(fbar) != n) continue;  // cannot happen for monic F
        if (modp::degree(modp::gcd(fbar, modp::derivative(fbar, pz), pz)) != 0) continue;
        auto factors = modp::factor(fbar, p);
        ++tried;
        if (best_p == 0 || factors.size() < best_factors.size()) {
            best_p = p;
            best_factors = std::move(factors);
        }
        if (best_factors.size() == 1) break;
    }
    if (best_factors.size() == 1) return {F};

    mpz_class p(best_p);
    std::vector<modp::Poly> facs;
    facs.reserve(best_factors.size());
    for (auto& [g, mult] : best_factors) facs.push_back(std::move(g));

    // Landau-Mignotte style bound, deliberately generous.
    mpz_class H = 0;
    for (const auto& c : F) H = std::max(H, mpz_class(abs(c)));
    mpz_class B = (H + 1) * (n + 1);
    B <<= n;  // * 2^n
    mpz_class M = p;
    while (M < 2 * B + 1) M *= M;

    modp::Poly Fm = modp::reduce(F, M);
    std::vector<modp::Poly> lifted;
    hensel_tree(Fm, facs, 0, facs.size(), p, M, lifted);

    // Recombination.
    std::vector<int> remaining(lifted.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    ZPoly frun = F;
    std::vector<ZPoly> out;
    size_t card = 1;
    while (2 * card <= remaining.size()) {
        // enumerate size-card subsets of `remaining` in lex order
        std::vector<size_t> pos(card);
        std::iota(pos.begin(), pos.end(), 0);
        bool found = false;
        while (true) {
            modp::Poly prod{1};
            for (size_t i : pos) prod = modp::mul(prod, lifted[remaining[i]], M);
            ZPoly cand = symmetric_lift(prod, M);
            ZPoly quot;
            if (zdivides_monic(frun, cand, &quot)) {
                out.push_back(cand);
                frun = quot;
                std::vector<int> next;
                for (size_t i = 0, k = 0; i < remaining.size(); ++i) {
                    if (k < pos.size() && pos[k] == i)
                        ++k;
                    else
                        next.push_back(remaining[i]);
                }
                remaining = std::move(next);
                found = true;
                break;
            }
            // next combination
            bool advanced = false;
            for (size_t i = card; i-- > 0;) {
                if (pos[i] + (card - i) < remaining.size()) {
                    ++pos[i];
                    for (size_t j = i + 1; j < card; ++j) pos[j] = pos[j - 1] + 1;
                    advanced = true;
                    break;
                }
            }
            if (!advanced) break;
        }
        if (!found) ++card;
    }
    if (zdeg(frun) > 0) out.push_back(frun);
    return out;
}

// General squarefree primitive input: monicize, factor, map back.
std::vector<ZPoly> zassenhaus_squarefree(const ZPoly& g) {
    int n = zdeg(g);
    if (n == 1) return {g};
    mpz_class L = g.back();
    if (L == 1) return zassenhaus_monic(g);
    // F(x) = L^{n-1} g(x/L) is monic with the same splitting behavior.
    ZPoly F(g.size());
    mpz_class pw = 1;
    for (int i = n; i >= 0; --i) {
        F[i] = g[i] * pw;
        pw *= L;
    }
    std::vector<ZPoly> out;
    for (const auto& G : zassenhaus_monic(F)) {
        QPoly back;
        mpq_class s = 1;
        for (size_t i = 0; i < G.size(); ++i) {
            back.push_back(mpq_class(G[i]) * s);
            s *= L;
        }
        out.push_back(to_primitive(back));
    }
    return out;
}

}  // namespace

std::vector<std::pair<ZPoly, int>> factor_rational(const ZPoly& f) {
    ZPoly g = f;
    znormalize(g);
    if (g.empty()) throw UsageError("factor_rational: zero polynomial");
    std::vector<std::pair<ZPoly, int>> out;
    if (zdeg(g) == 0) return out;
    for (const auto& [part, mult] : squarefree_decompose(g))
        for (const auto& irr : zassenhaus_squarefree(part)) out.emplace_back(irr, mult);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (x.first == y.first) return x.second < y.second;
        return zpoly_less(x.first, y.first);
    });
    return out;
}

bool is_irreducible(const ZPoly& f) {
    ZPoly g = f;
    znormalize(g);
    if (zdeg(g) < 1) return false;
    auto factors = factor_rational(g);
    return factors.size() == 1 && factors[0].second == 1;
}

namespace {

mpq_class qpow(const mpq_class& base, long e) {
    mpq_class r = 1, b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

}  // namespace

mpq_class resultant(const QPoly& a, const QPoly& b) {
    QPoly f = a, g = b;
    qnormalize(f);
    qnormalize(g);
    if (f.empty() || g.empty()) return 0;
    mpq_class res = 1;
    while (true) {
        if (qdeg(g) == 0) return res * qpow(g[0], qdeg(f));
        QPoly r = qdivmod(f, g).second;
        if (r.empty()) return 0;  // common factor of positive degree
        int df = qdeg(f), dg = qdeg(g), dr = qdeg(r);
        if ((df & 1) && (dg & 1)) res = -res;
        res *= qpow(g.back(), df - dr);
        f = std::move(g);
        g = std::move(r);
    }
}

mpq_class discriminant(const ZPoly& f) {
    QPoly fq = to_qpoly(f);
    int n = qdeg(fq);
    if (n < 1) throw UsageError("discriminant: degree must be >= 1");
    mpq_class r = resultant(fq, qderivative(fq));
    r /= fq.back();
    if (((n * (n - 1)) / 2) & 1) r = -r;
    return r;
}

std::string poly_string(const ZPoly& f, const std::string& var) {
    if (f.empty()) return "0";
    std::string s;
    for (size_t i = f.size(); i-- > 0;) {
        if (f[i] == 0) continue;
        mpz_class c = f[i];
        bool neg = c < 0;
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        mpz_class ac = abs(c);
        if (ac != 1 || i == 0) s += ac.get_str();
        if (i > 0) {
            if (ac != 1) s += "*";
            s += var;
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s.empty() ? "0" : s;
}

}  // namespace heckelab
