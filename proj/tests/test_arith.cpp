#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"
#include "heckelab/modpoly.hpp"
#include "heckelab/qpoly.hpp"

using namespace heckelab;

TEST_CASE("integer helpers") {
    CHECK(is_prime(2));
    CHECK(is_prime(47));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
    CHECK(primes_upto(13) == std::vector<long>{2, 3, 5, 7, 11, 13});
    CHECK(factorize(60) ==
          std::vector<std::pair<long, int>>{{2, 2}, {3, 1}, {5, 1}});
    CHECK(divisors(28) == std::vector<long>{1, 2, 4, 7, 14, 28});
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(12) == 4);
    // index of Gamma0(N): N * prod (1 + 1/p)
    CHECK(psi_index(1) == 1);
    CHECK(psi_index(11) == 12);
    CHECK(psi_index(6) == 12);
    CHECK(psi_index(37) == 38);
    CHECK(mod_inverse(3, 7) == 5);
    CHECK(powmod(2, 10, 1000) == 24);
    CHECK_THROWS_AS(mod_inverse(6, 9), UsageError);
}

static modp::Poly P(std::vector<long> v, long m) {
    modp::Poly f(v.begin(), v.end());
    modp::normalize(f, mpz_class(m));
    return f;
}

TEST_CASE("mod-p factorization: fixed examples") {
    // x^2+1 over F_5 = (x+2)(x+3); roots are +-2
    auto f1 = modp::factor(P({1, 0, 1}, 5), 5);
    REQUIRE(f1.size() == 2);
    CHECK(f1[0].first == P({2, 1}, 5));
    CHECK(f1[0].second == 1);
    CHECK(f1[1].first == P({3, 1}, 5));
    CHECK(f1[1].second == 1);

    // x^2+1 irreducible over F_3
    auto f2 = modp::factor(P({1, 0, 1}, 3), 3);
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].first == P({1, 0, 1}, 3));
    CHECK(f2[0].second == 1);

    // x^2 over F_7
    auto f3 = modp::factor(P({0, 0, 1}, 7), 7);
    REQUIRE(f3.size() == 1);
    CHECK(f3[0].first == P({0, 1}, 7));
    CHECK(f3[0].second == 2);

    // x^5 - x splits into all of F_5
    auto f4 = modp::factor(P({0, -1, 0, 0, 0, 1}, 5), 5);
    CHECK(f4.size() == 5);
    for (const auto& [g, m] : f4) {
        CHECK(modp::degree(g) == 1);
        CHECK(m == 1);
    }

    CHECK_THROWS_AS(modp::factor(P({1, 1}, 6), 6), UsageError);
    CHECK_THROWS_AS(modp::factor(modp::Poly{}, 5), UsageError);
}

TEST_CASE("mod-p factorization: random round trips") {
    std::mt19937 rng(20260814);
    for (long p : {2L, 3L, 5L, 7L, 13L, 37L, 47L}) {
        mpz_class m(p);
        for (int iter = 0; iter < 40; ++iter) {
            int deg = 1 + static_cast<int>(rng() % 8);
            std::vector<mpz_class> cs(deg + 1);
            for (auto& c : cs) c = static_cast<long>(rng() % p);
            while (cs[deg] == 0) cs[deg] = static_cast<long>(rng() % p);
            modp::Poly f = modp::reduce(cs, m);
            auto factors = modp::factor(f, p);
            modp::Poly prod{f.back()};
            for (const auto& [g, mult] : factors) {
                CHECK(g.back() == 1);
                for (int i = 0; i < mult; ++i) prod = modp::mul(prod, g, m);
            }
            CHECK(modp::equal(prod, f));
        }
    }
}

static ZPoly Z(std::vector<long> v) {
    ZPoly f(v.begin(), v.end());
    znormalize(f);
    return f;
}

TEST_CASE("rational factorization: fixed examples") {
    // x^2-x-1 irreducible (no rational roots)
    auto f1 = factor_rational(Z({-1, -1, 1}));
    REQUIRE(f1.size() == 1);
    CHECK(f1[0].first == Z({-1, -1, 1}));
    CHECK(f1[0].second == 1);
    CHECK(is_irreducible(Z({-1, -1, 1})));

    // (x+2)^2
    auto f2 = factor_rational(Z({4, 4, 1}));
    REQUIRE(f2.size() == 1);
    CHECK(f2[0].first == Z({2, 1}));
    CHECK(f2[0].second == 2);

    // x^3 - x = x(x-1)(x+1)
    auto f3 = factor_rational(Z({0, -1, 0, 1}));
    REQUIRE(f3.size() == 3);
    CHECK(f3[0].first == Z({-1, 1}));
    CHECK(f3[1].first == Z({0, 1}));
    CHECK(f3[2].first == Z({1, 1}));

    // x^4+1 stays irreducible over Q even though it splits mod every prime
    CHECK(is_irreducible(Z({1, 0, 0, 0, 1})));

    // x^4+4 = (x^2-2x+2)(x^2+2x+2)
    auto f5 = factor_rational(Z({4, 0, 0, 0, 1}));
    REQUIRE(f5.size() == 2);
    CHECK(f5[0].first == Z({2, -2, 1}));
    CHECK(f5[1].first == Z({2, 2, 1}));

    // non-monic: 6x^2+5x+1 = (2x+1)(3x+1)
    auto f6 = factor_rational(Z({1, 5, 6}));
    REQUIRE(f6.size() == 2);
    CHECK(f6[0].first == Z({1, 2}));
    CHECK(f6[1].first == Z({1, 3}));
}

TEST_CASE("rational factorization: random round trips") {
    std::mt19937 rng(77);
    std::vector<ZPoly> pool = {Z({1, 1}), Z({-1, 1}), Z({2, 1}),  Z({-3, 1}),
                               Z({1, 0, 1}), Z({-2, 0, 1}), Z({1, 1, 1}),
                               Z({-1, -1, 1}), Z({1, 0, 0, 1})};
    for (int iter = 0; iter < 30; ++iter) {
        ZPoly f = Z({1});
        int nf = 2 + static_cast<int>(rng() % 3);
        for (int i = 0; i < nf; ++i) f = zmul(f, pool[rng() % pool.size()]);
        auto factors = factor_rational(f);
        ZPoly prod = Z({1});
        for (const auto& [g, mult] : factors) {
            CHECK(is_irreducible(g));
            for (int i = 0; i < mult; ++i) prod = zmul(prod, g);
        }
        CHECK(prod == f);  // all pool entries are monic
    }
}

TEST_CASE("squarefree decomposition") {
    // x^3+x^2 = x^2 (x+1)
    auto parts = squarefree_decompose(Z({0, 0, 1, 1}));
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == std::make_pair(Z({1, 1}), 1));
    CHECK(parts[1] == std::make_pair(Z({0, 1}), 2));

    // (x^2+3x+2)^2 has squarefree part of multiplicity 2
    ZPoly f = zmul(Z({2, 3, 1}), Z({2, 3, 1}));
    auto parts2 = squarefree_decompose(f);
    REQUIRE(parts2.size() == 1);
    CHECK(parts2[0] == std::make_pair(Z({2, 3, 1}), 2));
}

TEST_CASE("resultant and discriminant") {
    CHECK(discriminant(Z({-1, -1, 1})) == 5);   // x^2-x-1
    CHECK(discriminant(Z({1, 0, 1})) == -4);    // x^2+1
    CHECK(discriminant(Z({-1, -1, 0, 1})) == -23);  // x^3-x-1
    CHECK(discriminant(Z({-1, 1, 0, 1})) == -31);   // x^3+x-1
    // resultant(x^2-1, x-2) = (2^2 - 1) = 3
    CHECK(resultant(to_qpoly(Z({-1, 0, 1})), to_qpoly(Z({-2, 1}))) == 3);
    // shared root => 0
    CHECK(resultant(to_qpoly(Z({-1, 0, 1})), to_qpoly(Z({-1, 1}))) == 0);
}

TEST_CASE("poly_string formatting") {
    CHECK(poly_string(Z({-1, -1, 1})) == "x^2 - x - 1");
    CHECK(poly_string(Z({0, 2})) == "2*x");
    CHECK(poly_string(Z({})) == "0");
    CHECK(poly_string(Z({5})) == "5");
}
