#include "heckelab/modpoly.hpp"

#include <algorithm>
#include <cstddef>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab::modp {

namespace {

mpz_class mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r = a % m;
    if (r < 0) r += m;
    return r;
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
        throw UsageError("modpoly: leading coefficient not invertible");
    return r;
}

const Poly kX{0, 1};

}  // namespace

int degree(const Poly& f) { return static_cast<int>(f.size()) - 1; }

void normalize(Poly& f, const mpz_class& m) {
    for (auto& c : f) c = mod(c, m);
    while (!f.empty() && f.back() == 0) f.pop_back();
}

Poly reduce(const std::vector<mpz_class>& coeffs, const mpz_class& m) {
    Poly f = coeffs;
    normalize(f, m);
    return f;
}

Poly add(const Poly& a, const Poly& b, const mpz_class& m) {
    Poly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    normalize(r, m);
    return r;
}

Poly sub(const Poly& a, const Poly& b, const mpz_class& m) {
    Poly r = a;
    if (b.size() > r.size()) r.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    normalize(r, m);
    return r;
}

Poly mul(const Poly& a, const Poly& b, const mpz_class& m) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    normalize(r, m);
    return r;
}

Poly scalar_mul(const mpz_class& c, const Poly& a, const mpz_class& m) {
    Poly r = a;
    for (auto& x : r) x *= c;
    normalize(r, m);
    return r;
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b, const mpz_class& m) {
    if (b.empty()) throw UsageError("modpoly: division by zero");
    Poly r = a, q;
    int db = degree(b);
    mpz_class lcinv = inv_mod(b.back(), m);
    if (degree(r) >= db) q.assign(r.size() - b.size() + 1, 0);
    while (degree(r) >= db) {
        int k = degree(r) - db;
        mpz_class t = mod(r.back() * lcinv, m);
        q[k] = t;
        for (size_t i = 0; i < b.size(); ++i) r[k + i] -= t * b[i];
        normalize(r, m);
    }
    normalize(q, m);
    return {q, r};
}

Poly rem(const Poly& a, const Poly& b, const mpz_class& m) { return divmod(a, b, m).second; }

Poly mulmod(const Poly& a, const Poly& b, const Poly& f, const mpz_class& m) {
    return rem(mul(a, b, m), f, m);
}

Poly powmod(const Poly& a, const mpz_class& e, const Poly& f, const mpz_class& m) {
    Poly r{1};
    normalize(r, m);
    Poly base = rem(a, f, m);
    mpz_class k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) r = mulmod(r, base, f, m);
        base = mulmod(base, base, f, m);
        k >>= 1;
    }
    return r;
}

Poly derivative(const Poly& a, const mpz_class& m) {
    Poly r;
    for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
    normalize(r, m);
    return r;
}

mpz_class eval(const Poly& a, const mpz_class& x, const mpz_class& m) {
    mpz_class r = 0;
    for (size_t i = a.size(); i-- > 0;) r = mod(r * x + a[i], m);
    return r;
}

Poly monic(const Poly& a, const mpz_class& p) {
    if (a.empty()) return a;
    return scalar_mul(inv_mod(a.back(), p), a, p);
}

Poly gcd(const Poly& a, const Poly& b, const mpz_class& p) {
    Poly f = a, g = b;
    normalize(f, p);
    normalize(g, p);
    while (!g.empty()) {
        Poly r = rem(f, g, p);
        f = std::move(g);
        g = std::move(r);
    }
    return monic(f, p);
}

bool equal(const Poly& a, const Poly& b) { return a == b; }

namespace {

bool poly_less(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

// f = g(x^p) with F_p coefficients: the p-th root is g itself (Frobenius
// fixes the prime field).
Poly pth_root(const Poly& f, long p) {
    Poly g;
    for (size_t i = 0; i < f.size(); i += static_cast<size_t>(p)) g.push_back(f[i]);
    return g;
}

// Squarefree decomposition of a monic f over F_p; multiplicities are scaled
// by `scale` to account for p-th power unwrapping.
void squarefree_decompose(const Poly& f, long p, int scale,
                          std::vector<std::pair<Poly, int>>& out) {
    mpz_class m(p);
    Poly c = gcd(f, derivative(f, m), m);
    Poly w = divmod(f, c, m).first;
    int i = 1;
    while (degree(w) > 0) {
        Poly y = gcd(w, c, m);
        Poly z = divmod(w, y, m).first;
        if (degree(z) > 0) out.emplace_back(z, i * scale);
        w = std::move(y);
        c = divmod(c, w, m).first;
        ++i;
    }
    if (degree(c) > 0) squarefree_decompose(pth_root(c, p), p, scale * p, out);
}

// Kernel basis of the F_p matrix A (n x n), deterministic order.
std::vector<std::vector<mpz_class>> fp_kernel(std::vector<std::vector<mpz_class>> a, long p) {
    mpz_class m(p);
    size_t n = a.size();
    std::vector<long> pivot_of_col(n, -1);
    size_t row = 0;
    for (size_t col = 0; col < n && row < n; ++col) {
        size_t piv = row;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) continue;
        std::swap(a[piv], a[row]);
        mpz_class inv = inv_mod(a[row][col], m);
        for (size_t j = 0; j < n; ++j) a[row][j] = mod(a[row][j] * inv, m);
        for (size_t i = 0; i < n; ++i) {
            if (i == row || a[i][col] == 0) continue;
            mpz_class t = a[i][col];
            for (size_t j = 0; j < n; ++j) a[i][j] = mod(a[i][j] - t * a[row][j], m);
        }
        pivot_of_col[col] = static_cast<long>(row);
        ++row;
    }
    std::vector<std::vector<mpz_class>> basis;
    for (size_t col = 0; col < n; ++col) {
        if (pivot_of_col[col] >= 0) continue;
        std::vector<mpz_class> v(n, 0);
        v[col] = 1;
        for (size_t c2 = 0; c2 < col; ++c2)
            if (pivot_of_col[c2] >= 0) v[c2] = mod(-a[pivot_of_col[c2]][col], m);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Berlekamp splitting of a monic squarefree f.
std::vector<Poly> berlekamp(const Poly& f, long p) {
    mpz_class m(p);
    int n = degree(f);
    if (n <= 1) return {f};
    Poly xp = powmod(kX, mpz_class(p), f, m);
    std::vector<Poly> rows(n);
    rows[0] = Poly{1};
    for (int i = 1; i < n; ++i) rows[i] = mulmod(rows[i - 1], xp, f, m);
    // v = sum v_j x^j satisfies v^p = v mod f  <=>  sum_j v_j rows[j] = v.
    std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n, 0));
    for (int j = 0; j < n; ++j) {
        for (size_t i = 0; i < rows[j].size(); ++i) a[i][j] = rows[j][i];
        a[j][j] = mod(a[j][j] - 1, m);
    }
    auto kernel = fp_kernel(std::move(a), p);
    size_t r = kernel.size();  // number of irreducible factors
    std::vector<Poly> factors{f};
    for (const auto& vec : kernel) {
        if (factors.size() == r) break;
        Poly v = reduce(vec, m);
        if (degree(v) <= 0) continue;  // the constants never split anything
        std::vector<Poly> next;
        for (const auto& u : factors) {
            if (degree(u) == 1) {
                next.push_back(u);
                continue;
            }
            Poly remn = u;
            for (long c = 0; c < p && degree(remn) > 0; ++c) {
                Poly shifted = sub(v, Poly{mpz_class(c)}, m);
                Poly g = gcd(remn, shifted, m);
                if (degree(g) > 0) {
                    next.push_back(g);
                    remn = divmod(remn, g, m).first;
                }
            }
        }
        factors = std::move(next);
    }
    return factors;
}

}  // namespace

std::vector<std::pair<Poly, int>> factor(const Poly& f, long p) {
    if (!is_prime(p)) throw UsageError("modp::factor: modulus must be prime");
    mpz_class m(p);
    Poly g = f;
    normalize(g, m);
    if (g.empty()) throw UsageError("modp::factor: zero polynomial");
    g = monic(g, m);
    std::vector<std::pair<Poly, int>> out;
    if (degree(g) == 0) return out;
    std::vector<std::pair<Poly, int>> parts;
    squarefree_decompose(g, p, 1, parts);
    for (const auto& [z, mult] : parts)
        for (const auto& u : berlekamp(z, p)) out.emplace_back(u, mult);
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        if (!poly_less(x.first, y.first) && !poly_less(y.first, x.first))
            return x.second < y.second;
        return poly_less(x.first, y.first);
    });
    return out;
}

bool is_irreducible(const Poly& f, const mpz_class& p) {
    int n = degree(f);
    if (n < 1) throw UsageError("modp::is_irreducible: need degree >= 1");
    if (f.back() != 1) throw UsageError("modp::is_irreducible: need monic input");
    if (n == 1) return true;
    const Poly x = {0, 1};
    mpz_class pn;
    mpz_pow_ui(pn.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(n));
    if (!equal(powmod(x, pn, f, p), rem(x, f, p))) return false;
    for (const auto& [q, e] : factorize(n)) {
        (void)e;
        mpz_class pk;
        mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(),
                   static_cast<unsigned long>(n / q));
        Poly w = sub(powmod(x, pk, f, p), x, p);
        if (degree(gcd(w, f, p)) != 0) return false;
    }
    return true;
}

Poly inv_mod(const Poly& a, const Poly& f, const mpz_class& p) {
    if (degree(f) < 1) throw UsageError("modp::inv_mod: modulus must have degree >= 1");
    Poly r0 = f, r1 = rem(a, f, p);
    Poly s0, s1 = {1};  // invariant: s_i * a = r_i mod f
    while (!r1.empty()) {
        auto [q, r2] = divmod(r0, r1, p);
        Poly s2 = sub(s0, mul(q, s1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (degree(r0) != 0) throw UsageError("modp::inv_mod: element is not invertible");
    mpz_class c;
    if (!mpz_invert(c.get_mpz_t(), r0[0].get_mpz_t(), p.get_mpz_t()))
        throw UsageError("modp::inv_mod: element is not invertible");
    return rem(scalar_mul(c, s0, p), f, p);
}

}  // namespace heckelab::modp
