#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subdiv/lattice.hpp"
#include "test_support.hpp"

using namespace subdiv;

TEST_CASE("rational arithmetic is exact and canonical") {
    Rational a(6, 16);
    CHECK(a.str() == "3/8");
    CHECK(Rational(-4, -6) == Rational(2, 3));
    CHECK((Rational(1, 3) + Rational(1, 6)).str() == "1/2");
    CHECK((Rational(1, 3) * Rational(3, 7)).str() == "1/7");
    CHECK(Rational::parse("-5/10") == Rational(-1, 2));
    CHECK(Rational::parse("7").is_integer());
    CHECK(Rational(-7, 2).floor() == Rational(-4));
    CHECK(Rational(7, 2).floor() == Rational(3));
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("a/2"), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("rationals never overflow") {
    Rational x(1, 3);
    for (int i = 0; i < 200; ++i) x *= Rational(10, 7);
    Rational y = x;
    for (int i = 0; i < 200; ++i) y /= Rational(10, 7);
    CHECK(y == Rational(1, 3));
}

TEST_CASE("dilation matrix validation") {
    CHECK_THROWS_AS(DilationMatrix(2, {1, 0, 0, 1}), std::invalid_argument);   // |det| = 1
    CHECK_THROWS_AS(DilationMatrix(2, {2, 0, 0, 0}), std::invalid_argument);   // singular
    CHECK_THROWS_AS(DilationMatrix(2, {2, 0, 0, -1}), std::invalid_argument);  // eigenvalue -1
    DilationMatrix shear(2, {2, 1, 0, 2});
    CHECK(shear.det() == 4);
    DilationMatrix quincunx(2, {1, -1, 1, 1});
    CHECK(quincunx.det_abs() == 2);  // eigenvalues 1 +- i, expanding
}

TEST_CASE("coset representatives") {
    DilationMatrix shear(2, {2, 1, 0, 2});
    auto reps = coset_representatives(shear, 1);
    REQUIRE(reps.size() == 4);
    CHECK(reps[0] == MultiIndex{0, 0});
    CHECK(reps[1] == MultiIndex{1, 0});
    CHECK(reps[2] == MultiIndex{1, 1});
    CHECK(reps[3] == MultiIndex{2, 1});

    DilationMatrix two_i(2, {2, 0, 0, 2});
    auto reps2 = coset_representatives(two_i, 1);
    REQUIRE(reps2.size() == 4);
    CHECK(reps2[0] == MultiIndex{0, 0});
    CHECK(reps2[1] == MultiIndex{0, 1});
    CHECK(reps2[2] == MultiIndex{1, 0});
    CHECK(reps2[3] == MultiIndex{1, 1});

    DilationMatrix two_1d(1, {2});
    auto reps1 = coset_representatives(two_1d, 1);
    REQUIRE(reps1.size() == 2);
    CHECK(reps1[0] == MultiIndex{0});
    CHECK(reps1[1] == MultiIndex{1});

    CHECK(coset_representatives(two_i, 2).size() == 16);
    CHECK(coset_representatives(two_1d, 3).size() == 8);
}

TEST_CASE("coset decompose") {
    DilationMatrix two_1d(1, {2});
    auto z = coset_decompose(MultiIndex{0}, two_1d, 1);
    CHECK(z.eps == MultiIndex{0});
    CHECK(z.beta == MultiIndex{0});
    auto five = coset_decompose(MultiIndex{5}, two_1d, 1);
    CHECK(five.eps == MultiIndex{1});
    CHECK(five.beta == MultiIndex{2});

    DilationMatrix shear(2, {2, 1, 0, 2});
    auto split = coset_decompose(MultiIndex{3, 1}, shear, 1);
    CHECK(split.eps == MultiIndex{1, 1});
    CHECK(split.beta == MultiIndex{1, 0});
    // recompose exactly: (3,1) - (1,1) = M (1,0)
    CHECK(shear.apply(split.beta) == MultiIndex{2, 0});
}

TEST_CASE("decompose-recompose round trip over random boxes") {
    std::vector<DilationMatrix> mats{DilationMatrix(2, {2, 1, 0, 2}), DilationMatrix(2, {2, 0, 0, 2}),
                                     DilationMatrix(2, {1, -1, 1, 1}), DilationMatrix(1, {3}),
                                     DilationMatrix(3, {2, 0, 0, 0, 2, 0, 0, 0, 2})};
    testsup::Rng rng(42);
    for (const DilationMatrix& M : mats) {
        for (int r = 1; r <= 2; ++r) {
            const DilationMatrix Mr = M.power(r);
            const auto reps = coset_representatives(M, r);
            for (int trial = 0; trial < 50; ++trial) {
                std::vector<long> coords(M.dim());
                for (auto& c : coords) c = rng.range(-20, 20);
                const MultiIndex alpha{std::vector<long>(coords)};
                const auto split = coset_decompose(alpha, M, r);
                CHECK(split.eps + Mr.apply(split.beta) == alpha);
                // eps is one of the canonical representatives
                CHECK(std::find(reps.begin(), reps.end(), split.eps) != reps.end());
            }
        }
    }
}

TEST_CASE("representative count equals |det M|^r and classes are disjoint") {
    DilationMatrix shear(2, {2, 1, 0, 2});
    for (int r = 1; r <= 2; ++r) {
        auto reps = coset_representatives(shear, r);
        long expected = 1;
        for (int k = 0; k < r; ++k) expected *= shear.det_abs();
        CHECK(static_cast<long>(reps.size()) == expected);
        // pairwise inequivalent: decompose maps each representative to itself
        for (const auto& rep : reps) {
            auto split = coset_decompose(rep, shear, r);
            CHECK(split.eps == rep);
            bool beta_zero = true;
            for (int i = 0; i < rep.dim(); ++i)
                if (split.beta[i] != 0) beta_zero = false;
            CHECK(beta_zero);
        }
    }
}

TEST_CASE("level-r representatives agree with the recursive construction") {
    // eps_r = eps_{r-1} + M^{r-1} eps_1' generates the same residue classes
    DilationMatrix shear(2, {2, 1, 0, 2});
    const auto reps1 = coset_representatives(shear, 1);
    const auto reps2 = coset_representatives(shear, 2);
    std::vector<MultiIndex> recursive;
    for (const auto& a : reps1)
        for (const auto& b : reps1) recursive.push_back(a + shear.apply(b));
    REQUIRE(recursive.size() == reps2.size());
    // every recursive representative reduces to a distinct canonical one
    std::vector<MultiIndex> reduced;
    for (const auto& x : recursive) reduced.push_back(coset_decompose(x, shear, 2).eps);
    std::sort(reduced.begin(), reduced.end());
    reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
    CHECK(reduced == reps2);
}
