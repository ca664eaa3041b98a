#pragma once
#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

namespace heckelab {

// Dense polynomials, ascending coefficients, no trailing zeros.
using ZPoly = std::vector<mpz_class>;
using QPoly = std::vector<mpq_class>;

int zdeg(const ZPoly& f);  // -1 for zero
int qdeg(const QPoly& f);
void znormalize(ZPoly& f);
void qnormalize(QPoly& f);
QPoly to_qpoly(const ZPoly& f);
// Clears denominators, divides by content, makes the leading coefficient
// positive.
ZPoly to_primitive(const QPoly& f);

QPoly qadd(const QPoly& a, const QPoly& b);
QPoly qsub(const QPoly& a, const QPoly& b);
QPoly qmul(const QPoly& a, const QPoly& b);
QPoly qscale(const mpq_class& c, const QPoly& a);
std::pair<QPoly, QPoly> qdivmod(const QPoly& a, const QPoly& b);
QPoly qgcd(const QPoly& a, const QPoly& b);  // monic
QPoly qderivative(const QPoly& a);
mpq_class qeval(const QPoly& f, const mpq_class& x);
QPoly qmonic(const QPoly& a);

ZPoly zmul(const ZPoly& a, const ZPoly& b);
ZPoly zadd(const ZPoly& a, const ZPoly& b);
ZPoly zsub(const ZPoly& a, const ZPoly& b);
ZPoly zderivative(const ZPoly& a);
mpq_class zeval(const ZPoly& f, const mpq_class& x);

// Squarefree decomposition over Q (Yun); parts are primitive with positive
// leading coefficient, pairwise coprime, and f = unit * prod part^mult.
std::vector<std::pair<ZPoly, int>> squarefree_decompose(const ZPoly& f);

// Irreducible factorization over Q (Zassenhaus).  Factors are primitive
// irreducible integer polynomials with positive leading coefficient, sorted
// by (degree, coefficient sequence); f = unit * prod factor^mult.
std::vector<std::pair<ZPoly, int>> factor_rational(const ZPoly& f);

bool is_irreducible(const ZPoly& f);

mpq_class resultant(const QPoly& a, const QPoly& b);
mpq_class discriminant(const ZPoly& f);

std::string poly_string(const ZPoly& f, const std::string& var = "x");

}  // namespace heckelab
