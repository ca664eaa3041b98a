#include "heckelab/modsym.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab {
namespace {

long exgcd(long a, long b, long& x, long& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return a < 0 ? -a : a;
    }
    long x1, y1;
    long g = exgcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Canonical representative of (u : v) in P^1(Z/N), or (-1, -1) when
// gcd(u, v, N) > 1.  The first coordinate of the representative is
// gcd(u, N); the second is minimized over the residual unit stabilizer.
std::pair<long, long> p1_normalize(long N, long u, long v) {
    if (N == 1) return {0, 0};
    u %= N;
    if (u < 0) u += N;
    v %= N;
    if (v < 0) v += N;
    if (u == 0) {
        if (std::gcd(v, N) != 1) return {-1, -1};
        return {0, 1};
    }
    long s, t;
    long g = exgcd(u, N, s, t);  // s*u ≡ g (mod N)
    if (std::gcd(g, v) != 1) return {-1, -1};
    long d = N / g;
    s %= d;
    if (s < 0) s += d;
    while (std::gcd(s, N) != 1) s += d;  // unit with s*u ≡ g (mod N)
    long v1 = static_cast<long>(static_cast<__int128>(s) * v % N);
    long vmin = v1;
    // remaining freedom: units congruent to 1 mod N/g
    for (long lam = 1 + d; lam < N + 1; lam += d) {
        if (std::gcd(lam, N) != 1) continue;
        long cand = static_cast<long>(static_cast<__int128>(lam) * v1 % N);
        if (cand < vmin) vmin = cand;
    }
    return {g, vmin};
}

// Lift of the symbol (c : d) to a matrix [a b; c0 d0] in SL_2(Z) whose
// bottom row reduces to (c, d) mod N.
std::array<long, 4> sl2_lift(long N, long c, long d) {
    if (c % N == 0) return {1, 0, 0, 1};  // the class of (0 : 1)
    long c0 = c % N;
    if (c0 < 0) c0 += N;
    long d0 = d % N;
    if (d0 < 0) d0 += N;
    while (std::gcd(c0, d0) != 1) d0 += N;
    long x, y;
    exgcd(d0, c0, x, y);  // x*d0 + y*c0 = 1
    return {x, -y, c0, d0};
}

struct Cusp {
    long p, q;  // lowest terms, q >= 0, infinity = (1, 0)
};

Cusp make_cusp(long p, long q) {
    if (q == 0) return {1, 0};
    long g = std::gcd(p < 0 ? -p : p, q < 0 ? -q : q);
    if (g == 0) g = 1;
    p /= g;
    q /= g;
    if (q < 0) {
        p = -p;
        q = -q;
    }
    return {p, q};
}

long cusp_inverse_part(const Cusp& c) {
    if (c.q == 0) return 1;
    if (c.q == 1) return 0;
    long pm = c.p % c.q;
    if (pm < 0) pm += c.q;
    return mod_inverse(pm, c.q);
}

bool cusp_equivalent(long N, const Cusp& c1, const Cusp& c2) {
    long s1 = cusp_inverse_part(c1);
    long s2 = cusp_inverse_part(c2);
    long g = std::gcd(c1.q * c2.q, N);  // gcd(0, N) = N handles infinity
    if (g == 0) g = N;
    long lhs = (s1 % g) * (c2.q % g) % g - (s2 % g) * (c1.q % g) % g;
    lhs %= g;
    if (lhs < 0) lhs += g;
    return lhs == 0;
}

long nu2(long N) {
    if (N % 4 == 0) return 0;
    long out = 1;
    for (auto& [p, e] : factorize(N)) {
        (void)e;
        if (p == 2) continue;
        out *= 1 + (p % 4 == 1 ? 1 : -1);
    }
    return out;
}

long nu3(long N) {
    if (N % 9 == 0) return 0;
    long out = 1;
    for (auto& [p, e] : factorize(N)) {
        (void)e;
        if (p == 3) continue;
        out *= 1 + (p % 3 == 1 ? 1 : -1);
    }
    return out;
}

QMat vstack(const QMat& a, const QMat& b) {
    if (a.rows() == 0) return b;
    if (b.rows() == 0) return a;
    if (a.cols() != b.cols()) throw UsageError("vstack: column mismatch");
    QMat out(a.rows() + b.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (size_t i = 0; i < b.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, j) = b(i, j);
    return out;
}

// res[i] += coeff * (multiplicity of symbol i in the Manin decomposition of
// the path {infinity, p/q}); continued-fraction convergents, exact.
void add_infty_path(const ManinSymbolSpace& sp, std::vector<long long>& res, mpz_class p,
                    mpz_class q, long long coeff) {
    if (q < 0) {
        p = -p;
        q = -q;
    }
    mpz_class pprev = 1, qprev = 0;  // convergent p_{-1}/q_{-1}
    mpz_class pcur = 0, qcur = 0;
    bool have_cur = false;
    int det = -1;  // det of [p_k p_{k-1}; q_k q_{k-1}]
    mpz_class a, r;
    while (q != 0) {
        mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
        if (!have_cur) {
            pcur = a;
            qcur = 1;
            have_cur = true;
        } else {
            mpz_class pn = a * pcur + pprev;
            mpz_class qn = a * qcur + qprev;
            pprev = pcur;
            qprev = qcur;
            pcur = pn;
            qcur = qn;
        }
        long N = sp.N;
        long cc = static_cast<long>(mpz_fdiv_ui(qcur.get_mpz_t(), N));
        long dd = static_cast<long>(mpz_fdiv_ui(qprev.get_mpz_t(), N));
        if (det == -1) dd = (N - dd) % N;
        long idx = sp.p1_index(cc, dd);
        if (idx < 0) throw UsageError("internal: continued fraction produced an invalid symbol");
        res[static_cast<size_t>(idx)] += coeff;
        det = -det;
        p = q;
        q = r;
    }
}

// {alpha, beta} with endpoints given as (numerator, denominator); a zero
// denominator encodes infinity.
void add_path(const ManinSymbolSpace& sp, std::vector<long long>& res, const mpz_class& pa,
              const mpz_class& qa, const mpz_class& pb, const mpz_class& qb, long long coeff) {
    add_infty_path(sp, res, pb, qb, coeff);
    add_infty_path(sp, res, pa, qa, -coeff);
}

std::vector<mpq_class> project_counts(const ManinSymbolSpace& sp,
                                      const std::vector<long long>& counts) {
    std::vector<mpq_class> out(sp.dim(), 0);
    for (size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        for (size_t r = 0; r < sp.dim(); ++r)
            if (sp.proj(r, i) != 0) out[r] += mpq_class(static_cast<long>(counts[i])) * sp.proj(r, i);
    }
    return out;
}

QMat restrict_to(const QMat& op, const QMat& w) {
    return left_inverse(w) * (op * w);
}

QPoly qpow_poly(const QPoly& base, int e) {
    QPoly out{1};
    for (int i = 0; i < e; ++i) out = qmul(out, base);
    return out;
}

}  // namespace

long nu_infinity(long N) {
    if (N < 1) throw UsageError("nu_infinity: level must be positive");
    long out = 0;
    for (long d : divisors(N)) out += euler_phi(std::gcd(d, N / d));
    return out;
}

long genus(long N) {
    if (N < 1) throw UsageError("genus: level must be positive");
    long num = 12 + psi_index(N) - 3 * nu2(N) - 4 * nu3(N) - 6 * nu_infinity(N);
    if (num % 12 != 0) throw UsageError("internal: genus formula not integral");
    return num / 12;
}

long ManinSymbolSpace::p1_index(long c, long d) const {
    c %= N;
    if (c < 0) c += N;
    d %= N;
    if (d < 0) d += N;
    return table[static_cast<size_t>(c) * N + d];
}

SpacePtr build_space(long N) {
    if (N < 1) throw UsageError("build_space: level must be positive");
    if (N > kMaxLevel)
        throw LevelTooLarge("level " + std::to_string(N) + " exceeds the supported bound " +
                            std::to_string(kMaxLevel));
    ManinSymbolSpace sp;
    sp.N = N;

    // P^1(Z/N): enumerate self-normalized pairs in lexicographic order.
    std::map<std::pair<long, long>, long> index_of;
    for (long u = 0; u < N; ++u)
        for (long v = 0; v < N; ++v) {
            auto nm = p1_normalize(N, u, v);
            if (nm.first == u && nm.second == v) {
                index_of[nm] = static_cast<long>(sp.gens.size());
                sp.gens.push_back(nm);
            }
        }
    sp.table.assign(static_cast<size_t>(N) * N, -1);
    for (long u = 0; u < N; ++u)
        for (long v = 0; v < N; ++v) {
            auto nm = p1_normalize(N, u, v);
            if (nm.first >= 0) sp.table[static_cast<size_t>(u) * N + v] = index_of.at(nm);
        }

    // Two- and three-term relations x + xS = 0, x + xT + xT^2 = 0 acting on
    // the bottom row (c d) from the right.
    size_t n = sp.gens.size();
    QMat rel(2 * n, n);
    for (size_t i = 0; i < n; ++i) {
        auto [c, d] = sp.gens[i];
        long is = sp.p1_index(d, -c);
        long it = sp.p1_index(d, -c - d);
        long it2 = sp.p1_index(-c - d, c);
        if (is < 0 || it < 0 || it2 < 0) throw UsageError("internal: relation image invalid");
        rel(2 * i, i) += 1;
        rel(2 * i, static_cast<size_t>(is)) += 1;
        rel(2 * i + 1, i) += 1;
        rel(2 * i + 1, static_cast<size_t>(it)) += 1;
        rel(2 * i + 1, static_cast<size_t>(it2)) += 1;
    }
    std::vector<size_t> pivs;
    rref(rel, &pivs);
    std::vector<bool> is_pivot(n, false);
    for (size_t p : pivs) is_pivot[p] = true;
    for (size_t j = 0; j < n; ++j)
        if (!is_pivot[j]) sp.basis_gens.push_back(j);
    std::vector<long> free_rank(n, -1);
    for (size_t k = 0; k < sp.basis_gens.size(); ++k) free_rank[sp.basis_gens[k]] = k;

    sp.proj = QMat(sp.basis_gens.size(), n);
    for (size_t k = 0; k < sp.basis_gens.size(); ++k) sp.proj(k, sp.basis_gens[k]) = 1;
    for (size_t r = 0; r < pivs.size(); ++r)
        for (size_t j = 0; j < n; ++j) {
            if (is_pivot[j] || rel(r, j) == 0) continue;
            sp.proj(free_rank[j], pivs[r]) = -rel(r, j);
        }

    // Boundary: [g] -> [g oo] - [g 0]; discover cusp classes from every
    // generator so the class list is complete.
    std::vector<Cusp> reps;
    auto class_of = [&](const Cusp& c) -> size_t {
        for (size_t i = 0; i < reps.size(); ++i)
            if (cusp_equivalent(N, reps[i], c)) return i;
        reps.push_back(c);
        return reps.size() - 1;
    };
    std::vector<std::pair<size_t, size_t>> gen_boundary(n);
    for (size_t i = 0; i < n; ++i) {
        auto m = sl2_lift(N, sp.gens[i].first, sp.gens[i].second);
        size_t cls_inf = class_of(make_cusp(m[0], m[2]));
        size_t cls_zero = class_of(make_cusp(m[1], m[3]));
        gen_boundary[i] = {cls_inf, cls_zero};
    }
    sp.boundary = QMat(reps.size(), sp.basis_gens.size());
    for (size_t k = 0; k < sp.basis_gens.size(); ++k) {
        auto [ci, cz] = gen_boundary[sp.basis_gens[k]];
        sp.boundary(ci, k) += 1;
        sp.boundary(cz, k) -= 1;
    }
    for (const Cusp& c : reps) sp.cusps.emplace_back(c.p, c.q);

    return std::make_shared<ManinSymbolSpace>(std::move(sp));
}

CuspidalSubspace cuspidal_subspace(const SpacePtr& space) {
    CuspidalSubspace out;
    out.ambient = space;
    out.basis = kernel_basis(space->boundary);
    out.left_inv = left_inverse(out.basis);
    return out;
}

std::vector<Mat22> heilbronn_merel(long n) {
    if (n < 1) throw UsageError("heilbronn_merel: determinant must be positive");
    std::vector<Mat22> out;
    for (long a = 1; a <= n; ++a) {
        if (n % a == 0) {  // c = 0 (any b) and b = 0 (any c)
            long dd = n / a;
            for (long b = 0; b < a; ++b) out.push_back({a, b, 0, dd});
            for (long c = 1; c < dd; ++c) out.push_back({a, 0, c, dd});
        }
        for (long b = 1; b < a; ++b) {  // b, c >= 1: a d = n + b c
            long g = std::gcd(a, b);
            if (n % g != 0) continue;
            long a1 = a / g;
            long n1 = (n / g) % a1;
            long binv = a1 == 1 ? 0 : mod_inverse((b / g) % a1, a1);
            long c0 = (a1 - n1) % a1 * binv % a1;
            if (c0 == 0) c0 = a1;
            for (long c = c0; c * (a - b) < n; c += a1)
                out.push_back({a, b, c, (n + b * c) / a});
        }
    }
    return out;
}

QMat hecke_on_space(const SpacePtr& space, long n) {
    const ManinSymbolSpace& sp = *space;
    std::vector<Mat22> H = heilbronn_merel(n);
    QMat out(sp.dim(), sp.dim());
    long N = sp.N;
#pragma omp parallel for schedule(dynamic)
    for (size_t k = 0; k < sp.basis_gens.size(); ++k) {
        auto [c, d] = sp.gens[sp.basis_gens[k]];
        std::vector<long long> counts(sp.gens.size(), 0);
        for (const Mat22& h : H) {
            long idx = sp.table[static_cast<size_t>((c * h.a + d * h.c) % N) * N +
                                (c * h.b + d * h.d) % N];
            if (idx >= 0) counts[static_cast<size_t>(idx)] += 1;
        }
        auto col = project_counts(sp, counts);
        for (size_t r = 0; r < sp.dim(); ++r) out(r, k) = col[r];
    }
    return out;
}

QMat hecke_matrix(const CuspidalSubspace& cusp, long ell) {
    if (!is_prime(ell)) throw UsageError("hecke_matrix: index must be prime");
    return cusp.left_inv * (hecke_on_space(cusp.ambient, ell) * cusp.basis);
}

QMat hecke_matrix_reference(const CuspidalSubspace& cusp, long ell) {
    if (!is_prime(ell)) throw UsageError("hecke_matrix_reference: index must be prime");
    const ManinSymbolSpace& sp = *cusp.ambient;
    QMat on_space(sp.dim(), sp.dim());
    for (size_t k = 0; k < sp.basis_gens.size(); ++k) {
        auto [c, d] = sp.gens[sp.basis_gens[k]];
        auto m = sl2_lift(sp.N, c, d);
        mpz_class pa = m[1], qa = m[3];  // alpha = g 0
        mpz_class pb = m[0], qb = m[2];  // beta  = g oo
        std::vector<long long> counts(sp.gens.size(), 0);
        if (sp.N % ell != 0) add_path(sp, counts, ell * pa, qa, ell * pb, qb, 1);
        for (long j = 0; j < ell; ++j)
            add_path(sp, counts, pa + j * qa, ell * qa, pb + j * qb, ell * qb, 1);
        auto col = project_counts(sp, counts);
        for (size_t r = 0; r < sp.dim(); ++r) on_space(r, k) = col[r];
    }
    return cusp.left_inv * (on_space * cusp.basis);
}

QMat degeneracy_matrix(const SpacePtr& from, const SpacePtr& to, long t) {
    const ManinSymbolSpace& sf = *from;
    const ManinSymbolSpace& st = *to;
    if (sf.N % (st.N * t) != 0)
        throw UsageError("degeneracy_matrix: t must divide the level quotient");
    QMat out(st.dim(), sf.dim());
    for (size_t k = 0; k < sf.basis_gens.size(); ++k) {
        auto [c, d] = sf.gens[sf.basis_gens[k]];
        auto m = sl2_lift(sf.N, c, d);
        std::vector<long long> counts(st.gens.size(), 0);
        add_path(st, counts, mpz_class(t) * m[1], mpz_class(m[3]), mpz_class(t) * m[0],
                 mpz_class(m[2]), 1);
        auto col = project_counts(st, counts);
        for (size_t r = 0; r < st.dim(); ++r) out(r, k) = col[r];
    }
    return out;
}

QMat newspace_basis(const CuspidalSubspace& cusp) {
    long N = cusp.ambient->N;
    QMat stacked(0, cusp.basis.cols());
    for (auto& [q, e] : factorize(N)) {
        (void)e;
        long M = N / q;
        if (genus(M) == 0) continue;  // no cusp forms downstairs
        SpacePtr to = build_space(M);
        for (long t : {1L, q}) {
            QMat dmap = degeneracy_matrix(cusp.ambient, to, t);
            stacked = vstack(stacked, dmap * cusp.basis);
        }
    }
    if (stacked.rows() == 0) return QMat::identity(cusp.basis.cols());
    return kernel_basis(stacked);
}

namespace {

// ---- small dense linear algebra over a number field ----

using NFMat = std::vector<std::vector<NFCoords>>;

// First kernel vector of a (rows x cols) matrix over K, if any.
std::optional<std::vector<NFCoords>> nf_kernel_vector(const NFPtr& K, NFMat a) {
    if (a.empty()) return std::nullopt;
    size_t rows = a.size(), cols = a[0].size();
    std::vector<long> pivot_of_col(cols, -1);
    size_t rank = 0;
    for (size_t col = 0; col < cols && rank < rows; ++col) {
        size_t piv = rank;
        while (piv < rows && K->is_zero(a[piv][col])) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[rank]);
        NFCoords inv = K->inv(a[rank][col]);
        for (size_t j = col; j < cols; ++j) a[rank][j] = K->mul(a[rank][j], inv);
        for (size_t i = 0; i < rows; ++i) {
            if (i == rank || K->is_zero(a[i][col])) continue;
            NFCoords f = a[i][col];
            for (size_t j = col; j < cols; ++j)
                a[i][j] = K->sub(a[i][j], K->mul(f, a[rank][j]));
        }
        pivot_of_col[col] = static_cast<long>(rank);
        ++rank;
    }
    for (size_t j = 0; j < cols; ++j) {
        if (pivot_of_col[j] >= 0) continue;
        std::vector<NFCoords> x(cols, K->zero());
        x[j] = K->one();
        for (size_t c = 0; c < j; ++c)
            if (pivot_of_col[c] >= 0) x[c] = K->neg(a[static_cast<size_t>(pivot_of_col[c])][j]);
        return x;
    }
    return std::nullopt;
}

struct Separator {
    QMat tmat;   // separating operator restricted to the block
    ZPoly psi;   // its minimal polynomial (monic irreducible, degree dim/2)
    bool pmax = false;
};

bool field_p_maximal(const ZPoly& psi) {
    if (zdeg(psi) <= 1) return true;
    NFPtr K = NumberField::create(psi);
    for (long p : {3L, 5L, 7L, 11L, 13L}) {
        try {
            factor_prime(K, p);
        } catch (const NotPMaximal&) {
            return false;
        }
    }
    return true;
}

std::optional<ZPoly> separator_minpoly(const QMat& t_w) {
    QPoly mp = minpoly(t_w);
    if (static_cast<size_t>(qdeg(mp)) * 2 != t_w.rows()) return std::nullopt;
    ZPoly z = to_primitive(mp);
    if (z.empty() || z.back() != 1) return std::nullopt;  // not an integral operator
    if (!is_irreducible(z)) return std::nullopt;
    return z;
}

// Hecke matrices on the cuspidal subspace, computed on demand.
struct HeckeCache {
    const CuspidalSubspace& cusp;
    std::map<long, QMat> store;
    const QMat& get(long ell) {
        auto it = store.find(ell);
        if (it == store.end()) it = store.emplace(ell, hecke_matrix(cusp, ell)).first;
        return it->second;
    }
};

// Deterministic schedule: single T_q for q not dividing N, then sums of two.
std::optional<Separator> find_separator(long N, const QMat& w, HeckeCache& cache) {
    std::vector<long> qs;
    for (long q = 2; qs.size() < 12; ++q)
        if (is_prime(q) && N % q != 0) qs.push_back(q);
    std::optional<Separator> fallback;
    auto consider = [&](const QMat& op) -> bool {
        QMat t_w = restrict_to(op, w);
        auto psi = separator_minpoly(t_w);
        if (!psi) return false;
        Separator s{t_w, *psi, field_p_maximal(*psi)};
        if (s.pmax) {
            fallback = s;
            return true;
        }
        if (!fallback) fallback = s;
        return false;
    };
    for (long q : qs)
        if (consider(cache.get(q))) return fallback;
    for (size_t i = 0; i < 8 && i < qs.size(); ++i)
        for (size_t j = i + 1; j < 8 && j < qs.size(); ++j)
            if (consider(cache.get(qs[i]) + cache.get(qs[j]))) return fallback;
    return fallback;
}

std::vector<long long> apply_heilbronn_weighted(const ManinSymbolSpace& sp,
                                                const std::vector<std::pair<size_t, long long>>& w,
                                                const std::vector<Mat22>& H) {
    long long total = 0;
    for (auto& [j, wt] : w) total += wt < 0 ? -wt : wt;
    if (total > (1LL << 62) / static_cast<long long>(H.size() + 1))
        throw UsageError("internal: eigenvalue accumulator would overflow");
    std::vector<long long> res(sp.gens.size(), 0);
    long N = sp.N;
    for (auto& [j, wt] : w) {
        long c = sp.gens[j].first, d = sp.gens[j].second;
        for (const Mat22& h : H) {
            long idx = sp.table[static_cast<size_t>((c * h.a + d * h.c) % N) * N +
                                (c * h.b + d * h.d) % N];
            if (idx >= 0) res[static_cast<size_t>(idx)] += wt;
        }
    }
    return res;
}

}  // namespace

std::vector<EigenformOrbit> newform_decomposition(long N, long bound) {
    if (bound < 1) throw UsageError("newform_decomposition: bound must be positive");
    SpacePtr space = build_space(N);
    CuspidalSubspace cusp = cuspidal_subspace(space);
    QMat newb = newspace_basis(cusp);
    std::vector<EigenformOrbit> orbits;
    if (newb.cols() == 0) return orbits;

    HeckeCache cache{cusp, {}};
    std::vector<QMat> blocks{newb};  // cuspidal coordinates throughout
    std::vector<std::optional<Separator>> seps{std::nullopt};

    long refine_limit = 4 * sturm_bound(N, 2) + 30;
    for (long ell = 2;; ++ell) {
        bool all_done = true;
        for (auto& s : seps)
            if (!s) all_done = false;
        if (all_done) break;
        if (ell > refine_limit)
            throw UsageError("newform_decomposition: eigenspace refinement did not terminate");
        if (!is_prime(ell)) continue;

        const QMat& tc = cache.get(ell);
        std::vector<QMat> next_blocks;
        std::vector<std::optional<Separator>> next_seps;
        for (size_t b = 0; b < blocks.size(); ++b) {
            if (seps[b]) {
                next_blocks.push_back(blocks[b]);
                next_seps.push_back(seps[b]);
                continue;
            }
            QMat t_w = restrict_to(tc, blocks[b]);
            auto factors = factor_rational(to_primitive(charpoly(t_w)));
            if (factors.size() <= 1) {
                next_blocks.push_back(blocks[b]);
                next_seps.push_back(std::nullopt);
                continue;
            }
            for (auto& [phi, mult] : factors) {
                QMat ker = kernel_basis(poly_apply(qpow_poly(to_qpoly(phi), mult), t_w));
                next_blocks.push_back(blocks[b] * ker);
                next_seps.push_back(std::nullopt);
            }
        }
        blocks = std::move(next_blocks);
        seps = std::move(next_seps);
        for (size_t b = 0; b < blocks.size(); ++b)
            if (!seps[b]) seps[b] = find_separator(N, blocks[b], cache);
    }

    std::vector<long> primes = primes_upto(bound);
    for (size_t b = 0; b < blocks.size(); ++b) {
        const QMat& w = blocks[b];
        const Separator& sep = *seps[b];
        NFPtr K = NumberField::create(sep.psi);
        NFCoords theta = K->gen();
        size_t wd = w.cols();

        // left eigenvector of the separating operator over K
        NFMat a(wd, std::vector<NFCoords>(wd));
        for (size_t i = 0; i < wd; ++i)
            for (size_t j = 0; j < wd; ++j) {
                a[i][j] = K->from_rational(sep.tmat(j, i));
                if (i == j) a[i][j] = K->sub(a[i][j], theta);
            }
        auto zeta_opt = nf_kernel_vector(K, a);
        if (!zeta_opt) throw UsageError("internal: separating operator has no left eigenvector");
        const std::vector<NFCoords>& zeta = *zeta_opt;

        QMat w_amb = cusp.basis * w;                       // ambient-quotient coords
        QMat f_rat = left_inverse(w_amb) * space->proj;    // block coords of each symbol
        size_t nsym = space->gens.size();
        std::vector<NFCoords> f(nsym, K->zero());
        for (size_t i = 0; i < nsym; ++i)
            for (size_t k = 0; k < wd; ++k) {
                if (f_rat(k, i) == 0) continue;
                for (size_t j = 0; j < K->degree(); ++j) f[i][j] += zeta[k][j] * f_rat(k, i);
            }

        size_t k0 = 0;
        while (k0 < wd && K->is_zero(zeta[k0])) ++k0;
        if (k0 == wd) throw UsageError("internal: zero eigenvector");
        mpz_class den = 1;
        for (size_t r = 0; r < w_amb.rows(); ++r)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(),
                    w_amb(r, k0).get_den().get_mpz_t());
        std::vector<std::pair<size_t, long long>> u;
        for (size_t r = 0; r < w_amb.rows(); ++r) {
            mpq_class entry = w_amb(r, k0) * den;
            if (entry == 0) continue;
            if (!mpz_fits_slong_p(entry.get_num().get_mpz_t()))
                throw UsageError("internal: eigenvector lift too large");
            u.emplace_back(space->basis_gens[r], mpz_get_si(entry.get_num().get_mpz_t()));
        }
        auto pair_with = [&](const std::vector<long long>& counts) {
            NFCoords acc = K->zero();
            for (size_t i = 0; i < nsym; ++i) {
                if (counts[i] == 0) continue;
                for (size_t j = 0; j < K->degree(); ++j)
                    acc[j] += static_cast<long>(counts[i]) * f[i][j];
            }
            return acc;
        };
        std::vector<long long> unit(nsym, 0);
        for (auto& [idx, wt] : u) unit[idx] += wt;
        NFCoords q0 = pair_with(unit);
        if (K->is_zero(q0)) throw UsageError("internal: eigenvector pairing vanished");
        NFCoords q0inv = K->inv(q0);

        std::vector<NFCoords> ap(primes.size());
        bool failed = false;
#pragma omp parallel for schedule(dynamic)
        for (size_t i = 0; i < primes.size(); ++i) {
            try {
                std::vector<Mat22> H = heilbronn_merel(primes[i]);
                std::vector<long long> counts = apply_heilbronn_weighted(*space, u, H);
                ap[i] = K->mul(pair_with(counts), q0inv);
            } catch (...) {
#pragma omp atomic write
                failed = true;
            }
        }
        if (failed) throw UsageError("internal: eigenvalue extraction failed");

        EigenformOrbit orbit;
        orbit.level = N;
        orbit.orbit_index = static_cast<int>(b);
        orbit.field_poly = sep.psi;
        orbit.hecke_field = K;
        orbit.an.assign(bound + 1, K->zero());
        orbit.an[1] = K->one();
        std::map<long, NFCoords> ap_of;
        for (size_t i = 0; i < primes.size(); ++i) ap_of[primes[i]] = ap[i];
        std::vector<long> spf(bound + 1, 0);
        for (long p : primes)
            for (long m = p; m <= bound; m += p)
                if (spf[m] == 0) spf[m] = p;
        for (long n = 2; n <= bound; ++n) {
            long p = spf[n];
            long pe = 1, m = n;
            while (m % p == 0) {
                m /= p;
                pe *= p;
            }
            if (m > 1) {
                orbit.an[n] = K->mul(orbit.an[pe], orbit.an[m]);
            } else if (pe == p) {
                orbit.an[n] = ap_of.at(p);
            } else if (N % p == 0) {
                orbit.an[n] = K->mul(ap_of.at(p), orbit.an[n / p]);
            } else {
                NFCoords t = K->mul(ap_of.at(p), orbit.an[n / p]);
                NFCoords s = K->mul(K->from_rational(p), orbit.an[n / (p * p)]);
                orbit.an[n] = K->sub(t, s);
            }
        }
        orbits.push_back(std::move(orbit));
    }
    return orbits;
}

}  // namespace heckelab
