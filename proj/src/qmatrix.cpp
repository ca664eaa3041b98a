#include "heckelab/qmatrix.hpp"

#include <algorithm>

#include "heckelab/errors.hpp"

namespace heckelab {

QMat QMat::identity(size_t n) {
    QMat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

QMat QMat::operator*(const QMat& o) const {
    if (c_ != o.r_) throw UsageError("QMat: dimension mismatch in product");
    QMat out(r_, o.c_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t k = 0; k < c_; ++k) {
            const mpq_class& t = (*this)(i, k);
            if (t == 0) continue;
            for (size_t j = 0; j < o.c_; ++j) out(i, j) += t * o(k, j);
        }
    return out;
}

QMat QMat::operator+(const QMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw UsageError("QMat: dimension mismatch in sum");
    QMat out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += o.a_[i];
    return out;
}

QMat QMat::operator-(const QMat& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw UsageError("QMat: dimension mismatch in difference");
    QMat out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= o.a_[i];
    return out;
}

QMat QMat::transpose() const {
    QMat out(c_, r_);
    for (size_t i = 0; i < r_; ++i)
        for (size_t j = 0; j < c_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

bool QMat::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const mpq_class& x) { return x == 0; });
}

std::vector<mpq_class> QMat::col(size_t j) const {
    std::vector<mpq_class> v(r_);
    for (size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
}

void QMat::set_col(size_t j, const std::vector<mpq_class>& v) {
    for (size_t i = 0; i < r_; ++i) (*this)(i, j) = v[i];
}

namespace {

// Pivot heuristic: smallest operand size, lowest row index on ties.  Keeps
// fraction growth in check and is deterministic.
size_t entry_size(const mpq_class& x) {
    return mpz_size(x.get_num().get_mpz_t()) + mpz_size(x.get_den().get_mpz_t());
}

}  // namespace

size_t rref(QMat& m, std::vector<size_t>* pivot_cols) {
    if (pivot_cols) pivot_cols->clear();
    size_t rank = 0;
    for (size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        size_t best = m.rows();
        size_t best_sz = 0;
        for (size_t i = rank; i < m.rows(); ++i) {
            if (m(i, col) == 0) continue;
            size_t sz = entry_size(m(i, col));
            if (best == m.rows() || sz < best_sz) best = i, best_sz = sz;
        }
        if (best == m.rows()) continue;
        if (best != rank)
            for (size_t j = 0; j < m.cols(); ++j) std::swap(m(best, j), m(rank, j));
        mpq_class inv = 1 / m(rank, col);
        for (size_t j = col; j < m.cols(); ++j) m(rank, j) *= inv;
        for (size_t i = 0; i < m.rows(); ++i) {
            if (i == rank || m(i, col) == 0) continue;
            mpq_class t = m(i, col);
            for (size_t j = col; j < m.cols(); ++j) m(i, j) -= t * m(rank, j);
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

QMat kernel_basis(const QMat& a) {
    QMat m = a;
    std::vector<size_t> pivots;
    size_t rank = rref(m, &pivots);
    std::vector<char> is_pivot(a.cols(), 0);
    for (size_t c : pivots) is_pivot[c] = 1;
    QMat out(a.cols(), a.cols() - rank);
    size_t k = 0;
    for (size_t j = 0; j < a.cols(); ++j) {
        if (is_pivot[j]) continue;
        out(j, k) = 1;
        for (size_t r = 0; r < rank; ++r) out(pivots[r], k) = -m(r, j);
        ++k;
    }
    return out;
}

std::optional<std::vector<mpq_class>> solve(const QMat& a, const std::vector<mpq_class>& b) {
    if (b.size() != a.rows()) throw UsageError("solve: rhs size mismatch");
    QMat m(a.rows(), a.cols() + 1);
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
        m(i, a.cols()) = b[i];
    }
    std::vector<size_t> pivots;
    size_t rank = rref(m, &pivots);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    std::vector<mpq_class> x(a.cols(), 0);
    for (size_t r = 0; r < rank; ++r) x[pivots[r]] = m(r, a.cols());
    return x;
}

std::vector<mpq_class> mat_vec(const QMat& a, const std::vector<mpq_class>& v) {
    if (v.size() != a.cols()) throw UsageError("mat_vec: size mismatch");
    std::vector<mpq_class> out(a.rows(), 0);
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0) out[i] += a(i, j) * v[j];
    return out;
}

QMat hstack(const QMat& a, const QMat& b) {
    if (a.rows() != b.rows()) throw UsageError("hstack: row mismatch");
    QMat out(a.rows(), a.cols() + b.cols());
    for (size_t i = 0; i < a.rows(); ++i) {
        for (size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
        for (size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
    }
    return out;
}

QMat left_inverse(const QMat& a) {
    QMat aug = hstack(a, QMat::identity(a.rows()));
    std::vector<size_t> pivs;
    size_t rank = rref(aug, &pivs);
    if (rank < a.cols() || (a.cols() > 0 && pivs[a.cols() - 1] != a.cols() - 1))
        throw UsageError("left_inverse: matrix does not have full column rank");
    QMat out(a.cols(), a.rows());
    for (size_t i = 0; i < a.cols(); ++i)
        for (size_t j = 0; j < a.rows(); ++j) out(i, j) = aug(i, a.cols() + j);
    return out;
}

mpq_class det(QMat a) {
    if (a.rows() != a.cols()) throw UsageError("det: matrix not square");
    size_t n = a.rows();
    mpq_class d = 1;
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        while (piv < n && a(piv, col) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            for (size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            d = -d;
        }
        d *= a(col, col);
        mpq_class inv = 1 / a(col, col);
        for (size_t i = col + 1; i < n; ++i) {
            if (a(i, col) == 0) continue;
            mpq_class t = a(i, col) * inv;
            for (size_t j = col; j < n; ++j) a(i, j) -= t * a(col, j);
        }
    }
    return d;
}

QPoly charpoly(const QMat& a) {
    if (a.rows() != a.cols()) throw UsageError("charpoly: matrix not square");
    size_t n = a.rows();
    if (n == 0) return QPoly{1};
    QMat h = a;
    // similarity reduction to upper Hessenberg form
    for (size_t j = 0; j + 2 < n; ++j) {
        size_t piv = j + 1;
        while (piv < n && h(piv, j) == 0) ++piv;
        if (piv == n) continue;
        if (piv != j + 1) {
            for (size_t k = 0; k < n; ++k) std::swap(h(piv, k), h(j + 1, k));
            for (size_t k = 0; k < n; ++k) std::swap(h(k, piv), h(k, j + 1));
        }
        for (size_t i = j + 2; i < n; ++i) {
            if (h(i, j) == 0) continue;
            mpq_class t = h(i, j) / h(j + 1, j);
            for (size_t k = 0; k < n; ++k) h(i, k) -= t * h(j + 1, k);
            for (size_t k = 0; k < n; ++k) h(k, j + 1) += t * h(k, i);
        }
    }
    // characteristic polynomials of the leading blocks
    std::vector<QPoly> p(n + 1);
    p[0] = QPoly{1};
    for (size_t m = 1; m <= n; ++m) {
        QPoly t = qmul(p[m - 1], QPoly{-h(m - 1, m - 1), 1});
        mpq_class prod = 1;
        for (size_t i = m - 1; i >= 1; --i) {
            prod *= h(i, i - 1);
            if (h(i - 1, m - 1) != 0 && prod != 0)
                t = qsub(t, qscale(h(i - 1, m - 1) * prod, p[i - 1]));
        }
        p[m] = std::move(t);
    }
    return p[n];
}

QPoly minpoly_vector(const QMat& a, const std::vector<mpq_class>& v) {
    size_t n = a.rows();
    QMat krylov(n, 0);
    std::vector<mpq_class> w = v;
    for (size_t k = 0; k <= n; ++k) {
        // try to express w in terms of the previous iterates
        QMat sys(n, krylov.cols() + 1);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < krylov.cols(); ++j) sys(i, j) = krylov(i, j);
            sys(i, krylov.cols()) = w[i];
        }
        std::vector<size_t> pivots;
        size_t rank = rref(sys, &pivots);
        if (pivots.empty() || pivots.back() != krylov.cols()) {
            QPoly m(krylov.cols() + 1, 0);
            m[krylov.cols()] = 1;
            for (size_t r = 0; r < rank; ++r) m[pivots[r]] = -sys(r, krylov.cols());
            return m;
        }
        QMat next(n, krylov.cols() + 1);
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < krylov.cols(); ++j) next(i, j) = krylov(i, j);
            next(i, krylov.cols()) = w[i];
        }
        krylov = std::move(next);
        w = mat_vec(a, w);
    }
    throw UsageError("minpoly_vector: no dependency found");  // unreachable
}

QPoly minpoly(const QMat& a) {
    size_t n = a.rows();
    QPoly m{1};
    for (size_t i = 0; i < n; ++i) {
        if (qdeg(m) == static_cast<int>(n)) break;
        std::vector<mpq_class> e(n, 0);
        e[i] = 1;
        QPoly mi = minpoly_vector(a, e);
        // lcm(m, mi)
        QPoly g = qgcd(m, mi);
        m = qdivmod(qmul(m, mi), g).first;
        m = qmonic(m);
    }
    return m;
}

QMat poly_apply(const QPoly& f, const QMat& a) {
    size_t n = a.rows();
    QMat out(n, n);
    for (size_t i = f.size(); i-- > 0;) {
        out = out * a;
        for (size_t d = 0; d < n; ++d) out(d, d) += f[i];
    }
    return out;
}

// ---- integer lattice helpers ----

std::vector<std::vector<mpz_class>> hnf_lattice(const std::vector<std::vector<mpz_class>>& cols,
                                                size_t d) {
    std::vector<std::vector<mpz_class>> work;
    for (const auto& c : cols) {
        if (c.size() != d) throw UsageError("hnf_lattice: column size mismatch");
        if (std::any_of(c.begin(), c.end(), [](const mpz_class& x) { return x != 0; }))
            work.push_back(c);
    }
    std::vector<std::vector<mpz_class>> basis(d);
    for (size_t row = 0; row < d; ++row) {
        // euclidean reduction among columns active at this row
        while (true) {
            size_t best = work.size();
            for (size_t j = 0; j < work.size(); ++j) {
                if (work[j][row] == 0) continue;
                if (best == work.size() ||
                    mpz_cmpabs(work[j][row].get_mpz_t(), work[best][row].get_mpz_t()) < 0)
                    best = j;
            }
            if (best == work.size()) break;
            bool reduced_any = false;
            for (size_t j = 0; j < work.size(); ++j) {
                if (j == best || work[j][row] == 0) continue;
                mpz_class q = work[j][row] / work[best][row];  // truncated ok
                if (q != 0)
                    for (size_t i = 0; i < d; ++i) work[j][i] -= q * work[best][i];
                if (work[j][row] != 0) reduced_any = true;
            }
            if (!reduced_any) {
                // best column is the pivot for this row
                if (work[best][row] < 0)
                    for (auto& x : work[best]) x = -x;
                basis[row] = std::move(work[best]);
                work.erase(work.begin() + static_cast<long>(best));
                break;
            }
        }
        if (basis[row].empty()) basis[row].assign(d, 0);
        // drop columns that became zero
        std::erase_if(work, [](const std::vector<mpz_class>& c) {
            return std::all_of(c.begin(), c.end(),
                               [](const mpz_class& x) { return x == 0; });
        });
    }
    // reduce entries above each pivot (proper HNF, keeps entries small)
    for (size_t row = d; row-- > 0;) {
        if (basis[row][row] == 0) continue;
        for (size_t r2 = 0; r2 < row; ++r2) {
            if (basis[r2].empty() || basis[r2][row] == 0 || basis[r2][r2] == 0) continue;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), basis[r2][row].get_mpz_t(), basis[row][row].get_mpz_t());
            if (q != 0)
                for (size_t i = 0; i < d; ++i) basis[r2][i] -= q * basis[row][i];
        }
    }
    return basis;
}

bool lattice_contains(const std::vector<std::vector<mpz_class>>& hnf, std::vector<mpz_class> v) {
    size_t d = hnf.size();
    for (size_t row = 0; row < d; ++row) {
        if (v[row] == 0) continue;
        if (hnf[row][row] == 0) return false;
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[row].get_mpz_t(),
                    hnf[row][row].get_mpz_t());
        if (r != 0) return false;
        for (size_t i = row; i < d; ++i) v[i] -= q * hnf[row][i];
    }
    return true;
}

std::optional<std::vector<mpz_class>> solve_integer(
    const std::vector<std::vector<mpz_class>>& cols, size_t d, const std::vector<mpz_class>& b) {
    size_t m = cols.size();
    // extended columns carry the expressing coefficients along
    std::vector<std::vector<mpz_class>> ext;
    ext.reserve(m);
    for (size_t j = 0; j < m; ++j) {
        std::vector<mpz_class> c(d + m, 0);
        for (size_t i = 0; i < d; ++i) c[i] = cols[j][i];
        c[d + j] = 1;
        ext.push_back(std::move(c));
    }
    // column HNF on the top d rows only
    std::vector<std::vector<mpz_class>> basis(d);
    auto work = std::move(ext);
    for (size_t row = 0; row < d; ++row) {
        while (true) {
            size_t best = work.size();
            for (size_t j = 0; j < work.size(); ++j) {
                if (work[j][row] == 0) continue;
                if (best == work.size() ||
                    mpz_cmpabs(work[j][row].get_mpz_t(), work[best][row].get_mpz_t()) < 0)
                    best = j;
            }
            if (best == work.size()) break;
            bool reduced_any = false;
            for (size_t j = 0; j < work.size(); ++j) {
                if (j == best || work[j][row] == 0) continue;
                mpz_class q = work[j][row] / work[best][row];
                if (q != 0)
                    for (size_t i = 0; i < d + m; ++i) work[j][i] -= q * work[best][i];
                if (work[j][row] != 0) reduced_any = true;
            }
            if (!reduced_any) {
                basis[row] = std::move(work[best]);
                work.erase(work.begin() + static_cast<long>(best));
                break;
            }
        }
    }
    std::vector<mpz_class> v = b, coeff(m, 0);
    for (size_t row = 0; row < d; ++row) {
        if (v[row] == 0) continue;
        if (basis[row].empty() || basis[row][row] == 0) return std::nullopt;
        mpz_class q, r;
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v[row].get_mpz_t(),
                    basis[row][row].get_mpz_t());
        if (r != 0) return std::nullopt;
        for (size_t i = row; i < d; ++i) v[i] -= q * basis[row][i];
        for (size_t i = 0; i < m; ++i) coeff[i] += q * basis[row][d + i];
    }
    return coeff;
}

}  // namespace heckelab
