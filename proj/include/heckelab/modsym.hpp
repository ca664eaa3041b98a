#pragma once
#include <memory>
#include <utility>
#include <vector>

#include "heckelab/numberfield.hpp"
#include "heckelab/qmatrix.hpp"
#include "heckelab/qpoly.hpp"

namespace heckelab {

// Levels above this are rejected with LevelTooLarge.
inline constexpr long kMaxLevel = 2000;

long genus(long level);        // genus of X_0(level)
long nu_infinity(long level);  // number of cusps of X_0(level)

// Weight-2 Manin symbol space for Gamma_0(N): the quotient of the free
// Q-vector space on P^1(Z/N) by the two- and three-term relations.  The
// quotient basis is a subset of the symbols themselves (basis_gens).
struct ManinSymbolSpace {
    long N = 1;
    std::vector<std::pair<long, long>> gens;  // normalized P^1(Z/N) reps
    std::vector<long> table;                  // (c mod N)*N + (d mod N) -> gen index, -1 invalid
    std::vector<size_t> basis_gens;           // gen indices forming a quotient basis
    QMat proj;                                // dim x |gens|: symbol -> quotient coords
    std::vector<std::pair<long, long>> cusps; // cusp class representatives (p, q), infinity = (1,0)
    QMat boundary;                            // |cusps| x dim

    size_t dim() const { return basis_gens.size(); }
    long p1_index(long c, long d) const;  // -1 when gcd(c, d, N) > 1
};
using SpacePtr = std::shared_ptr<const ManinSymbolSpace>;

SpacePtr build_space(long N);

struct CuspidalSubspace {
    SpacePtr ambient;
    QMat basis;     // ambient dim x (2 * genus)
    QMat left_inv;  // (2 * genus) x ambient dim, left_inv * basis = identity
};
CuspidalSubspace cuspidal_subspace(const SpacePtr& space);

struct Mat22 {
    long a, b, c, d;
};
// All integer matrices [a b; c d] with det n, a > b >= 0, d > c >= 0; their
// sum acts on Manin symbols as T_n (terms landing outside P^1(Z/N) dropped).
std::vector<Mat22> heilbronn_merel(long n);

// T_n on the full quotient space (Heilbronn matrices, parallel over columns).
QMat hecke_on_space(const SpacePtr& space, long n);
// T_ell (or U_ell when ell | N) restricted to the cuspidal subspace.
QMat hecke_matrix(const CuspidalSubspace& cusp, long ell);
// Same operator computed from the coset definition via modular paths and
// continued fractions; serial, kept as an independent cross-check.
QMat hecke_matrix_reference(const CuspidalSubspace& cusp, long ell);

// Level-lowering map to level M | N induced by z -> t z (t | N/M); columns
// are images of the source quotient basis in target quotient coordinates.
QMat degeneracy_matrix(const SpacePtr& from, const SpacePtr& to, long t);
// Basis (in cuspidal coordinates) of the intersection of the kernels of all
// degeneracy maps to proper divisor levels.
QMat newspace_basis(const CuspidalSubspace& cusp);

struct EigenformOrbit {
    long level = 1;
    long weight = 2;
    int orbit_index = 0;
    ZPoly field_poly;           // monic irreducible, degree = [K_f : Q]
    NFPtr hecke_field;
    std::vector<NFCoords> an;   // an[n] for 1 <= n <= bound (an[0] unused)
    bool is_new = true;
};

// Galois orbits of newforms of weight 2 on Gamma_0(N) with eigenvalues a_n
// for n <= bound.  Orbit order is deterministic (refinement by T_2, T_3, ...
// splitting along sorted irreducible factors).
std::vector<EigenformOrbit> newform_decomposition(long N, long bound);

}  // namespace heckelab
