// Unit-root lifting and p-stabilization: Deligne/Fontaine classification.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "heckelab/errors.hpp"
#include "heckelab/padic.hpp"

using namespace heckelab;

namespace {
ZPoly zp(const std::vector<long>& v) {
    ZPoly f;
    for (long x : v) f.emplace_back(x);
    znormalize(f);
    return f;
}

// Q presented as a degree-1 field (theta = 0)
NFPtr rationals() { return NumberField::create(zp({0, 1})); }
}  // namespace

TEST_CASE("unit root of x^2 + 2x + 7 over Q_7") {
    auto Q = rationals();
    auto P = factor_prime(Q, 7)[0];
    NFCoords ap = Q->from_rational(-2);
    for (auto [m, want] : std::vector<std::pair<long, long>>{{1, 5}, {2, 26}, {3, 222}}) {
        auto c = classify_local(ap, 2, P, m);
        CHECK(c.ordinary);
        REQUIRE(c.unit_root.size() == 1);
        CHECK(c.unit_root[0] == want);
        CHECK(P.residue->index(c.unit_root_residue) == 5);
        CHECK(c.unit_root_residue == reduce_mod(ap, P));
    }
}

TEST_CASE("exact factorization (x-1)(x-p)") {
    auto Q = rationals();
    for (long p : {3L, 7L, 13L}) {
        auto P = factor_prime(Q, p)[0];
        auto c = classify_local(Q->from_rational(1 + p), 2, P, 5);
        CHECK(c.ordinary);
        CHECK(c.unit_root[0] == 1);  // alpha = 1 exactly
    }
}

TEST_CASE("Fontaine branch: a_p = 0 mod p") {
    auto Q = rationals();
    auto P = factor_prime(Q, 7)[0];
    CHECK(!classify_local(Q->from_rational(7), 2, P, 3).ordinary);
    CHECK(!classify_local(Q->from_rational(0), 2, P, 3).ordinary);
    CHECK(!classify_local(Q->from_rational(-14), 2, P, 3).ordinary);
    CHECK(classify_local(Q->from_rational(3), 2, P, 3).ordinary);
    CHECK(!is_ordinary_value(Q->from_rational(7), P));
    CHECK(is_ordinary_value(Q->from_rational(3), P));
}

TEST_CASE("weight hypothesis 2 <= k <= p+1") {
    auto Q = rationals();
    auto P = factor_prime(Q, 7)[0];
    CHECK_THROWS_AS(classify_local(Q->from_rational(-2), 1, P, 2), HypothesisViolated);
    CHECK_THROWS_AS(classify_local(Q->from_rational(-2), 9, P, 2), HypothesisViolated);
    CHECK(classify_local(Q->from_rational(-2), 8, P, 2).ordinary);  // k = p+1 allowed
}

TEST_CASE("unit root in an inert quadratic completion") {
    // theta^2 = theta + 1, p = 3 inert; a_p = theta is a global unit.
    auto K = NumberField::create(zp({-1, -1, 1}));
    auto P = factor_prime(K, 3)[0];
    REQUIRE(P.f == 2);
    auto c = classify_local(K->gen(), 2, P, 2);
    CHECK(c.ordinary);
    // one Newton step from x = theta: alpha = 3 + 7 theta mod 9
    REQUIRE(c.unit_root.size() == 2);
    CHECK(c.unit_root[0] == 3);
    CHECK(c.unit_root[1] == 7);
    CHECK(c.unit_root_residue == reduce_mod(K->gen(), P));
}

TEST_CASE("unit root with a split prime is masked to one component") {
    // Q(i), p = 5 splits; the two components give different unit roots.
    auto K = NumberField::create(zp({1, 0, 1}));
    auto ps = factor_prime(K, 5);
    auto c0 = classify_local(K->gen(), 2, ps[0], 2);
    REQUIRE(c0.ordinary);
    CHECK(c0.unit_root == std::vector<mpz_class>{4, 3});  // 8 in Z_5, carried by e_0
    CHECK(ps[0].residue->index(c0.unit_root_residue) == 3);
    auto c1 = classify_local(K->gen(), 2, ps[1], 2);
    CHECK(c1.unit_root == std::vector<mpz_class>{21, 3});  // 17 in Z_5, carried by e_1
    CHECK(ps[1].residue->index(c1.unit_root_residue) == 2);
}

TEST_CASE("stabilization fixtures") {
    auto Q = rationals();
    auto P7 = factor_prime(Q, 7)[0];
    auto s = p_stabilize_value(Q->from_rational(-2), 2, P7, 2);
    CHECK(s.alpha == std::vector<mpz_class>{26});
    CHECK(s.beta == std::vector<mpz_class>{21});  // 7/alpha mod 49
    CHECK(s.beta_valuation == 1);
    CHECK(s.modulus == 49);

    auto s2 = p_stabilize_value(Q->from_rational(8), 2, factor_prime(Q, 7)[0], 4);
    CHECK(s2.alpha == std::vector<mpz_class>{1});
    CHECK(s2.beta == std::vector<mpz_class>{7});
    CHECK(s2.beta_valuation == 1);

    CHECK_THROWS_AS(p_stabilize_value(Q->from_rational(0), 2, P7, 2), NonOrdinary);
    CHECK_THROWS_AS(p_stabilize_value(Q->from_rational(7), 2, P7, 2), NonOrdinary);
}

TEST_CASE("stabilization identities at higher weight") {
    auto Q = rationals();
    auto P = factor_prime(Q, 7)[0];
    // k = 3: v(beta) = 2
    auto s = p_stabilize_value(Q->from_rational(2), 3, P, 4);
    CHECK(s.beta_valuation == 2);
    mpz_class M = s.modulus;
    CHECK((s.alpha[0] + s.beta[0]) % M == 2);
    CHECK((s.alpha[0] * s.beta[0]) % M == 49 % M);
    CHECK(s.alpha[0] % 7 != 0);
    // k = 5 <= p+1: v(beta) = 4, identities mod 7^3
    auto s5 = p_stabilize_value(Q->from_rational(1), 5, P, 3);
    CHECK(s5.beta_valuation == 4);
    CHECK((s5.alpha[0] + s5.beta[0]) % s5.modulus == 1);
    CHECK((s5.alpha[0] * s5.beta[0]) % s5.modulus == mpz_class(2401) % s5.modulus);
}

TEST_CASE("stabilization at a ramified prime") {
    // theta^2 = theta + 1 at p = 5, e = 2: v(beta) = (k-1) e = 2
    auto K = NumberField::create(zp({-1, -1, 1}));
    auto P = factor_prime(K, 5)[0];
    REQUIRE(P.e == 2);
    auto s = p_stabilize_value(K->gen(), 2, P, 3);
    CHECK(s.beta_valuation == 2);
    // alpha + beta = theta and alpha*beta = 5 mod 125
    mpz_class M = s.modulus;
    CHECK((s.alpha[0] + s.beta[0]) % M == 0);
    CHECK((s.alpha[1] + s.beta[1]) % M == 1);
    // residue of alpha is theta's residue (a unit)
    NFCoords av(s.alpha.begin(), s.alpha.end());
    CHECK(reduce_mod(av, P) == reduce_mod(K->gen(), P));
}

TEST_CASE("stabilization at a split prime keeps the component identity") {
    auto K = NumberField::create(zp({1, 0, 1}));
    auto ps = factor_prime(K, 5);
    auto s = p_stabilize_value(K->gen(), 2, ps[0], 2);
    CHECK(s.beta_valuation == 1);
    // alpha is 8 and beta is theta - 8 = (18-8) = 10 on the P_0 component:
    // verify by evaluating coordinates at the lifted root 18 of x^2+1 mod 25
    auto at18 = [](const std::vector<mpz_class>& v) {
        mpz_class acc = 0;
        for (size_t i = v.size(); i-- > 0;) acc = (acc * 18 + v[i]) % 25;
        return acc;
    };
    CHECK(at18(s.alpha) == 8);
    CHECK(at18(s.beta) == 10);
}
