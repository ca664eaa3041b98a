#pragma once
#include <gmpxx.h>

#include <optional>
#include <vector>

#include "heckelab/qpoly.hpp"

namespace heckelab {

// Dense exact rational matrix, row-major.
class QMat {
public:
    QMat() = default;
    QMat(size_t rows, size_t cols) : r_(rows), c_(cols), a_(rows * cols, 0) {}
    static QMat identity(size_t n);

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    mpq_class& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const mpq_class& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    QMat operator*(const QMat& o) const;
    QMat operator+(const QMat& o) const;
    QMat operator-(const QMat& o) const;
    bool operator==(const QMat& o) const = default;
    QMat transpose() const;
    bool is_zero() const;

    std::vector<mpq_class> col(size_t j) const;
    void set_col(size_t j, const std::vector<mpq_class>& v);

private:
    size_t r_ = 0, c_ = 0;
    std::vector<mpq_class> a_;
};

// In-place reduced row echelon form; returns rank, optionally the pivot
// columns (ascending).
size_t rref(QMat& m, std::vector<size_t>* pivot_cols = nullptr);
// L with L a = identity; UsageError unless a has full column rank.
QMat left_inverse(const QMat& a);
// Columns span {x : a x = 0}; deterministic (free columns ascending).
QMat kernel_basis(const QMat& a);
std::optional<std::vector<mpq_class>> solve(const QMat& a, const std::vector<mpq_class>& b);
std::vector<mpq_class> mat_vec(const QMat& a, const std::vector<mpq_class>& v);
QMat hstack(const QMat& a, const QMat& b);
mpq_class det(QMat a);
QPoly charpoly(const QMat& a);  // monic, exact (Hessenberg)
QPoly minpoly_vector(const QMat& a, const std::vector<mpq_class>& v);
QPoly minpoly(const QMat& a);
QMat poly_apply(const QPoly& f, const QMat& a);

// ---- Integer lattice helpers (column HNF) ----
// Lower-triangular basis of the full-rank lattice spanned by `cols` in Z^d;
// H[i] is the i-th basis column with H[i][i] > 0 and zeros above row i.
// Rows with no pivot get a zero marker column (rank-deficient lattices).
std::vector<std::vector<mpz_class>> hnf_lattice(const std::vector<std::vector<mpz_class>>& cols,
                                                size_t d);
bool lattice_contains(const std::vector<std::vector<mpz_class>>& hnf, std::vector<mpz_class> v);
// Some integer solution x with  cols * x = b, if one exists.
std::optional<std::vector<mpz_class>> solve_integer(
    const std::vector<std::vector<mpz_class>>& cols, size_t d, const std::vector<mpz_class>& b);

}  // namespace heckelab
