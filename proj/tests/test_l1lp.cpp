#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "subdiv/certify.hpp"
#include "subdiv/l1lp.hpp"
#include "test_oracles.hpp"
#include "test_support.hpp"

using namespace subdiv;
using testsup::fixture;

TEST_CASE("delta matrix of the 1d backward difference") {
    const DifferenceOperator T = DifferenceOperator::nabla(1);
    const ConstraintMatrix D = build_delta_matrix(T, Box{MultiIndex{-1}, MultiIndex{0}});
    REQUIRE(D.row_count() == 2);
    REQUIRE(D.col_count() == 3);
    // rows over beta = -1, 0; columns c(-1), c(-2), c(0) in first-touch order
    std::vector<std::vector<Rational>> dense(2, std::vector<Rational>(3));
    for (int i = 0; i < 2; ++i)
        for (const auto& [c, v] : D.row(i)) dense[i][c] = v;
    CHECK(dense[0] == std::vector<Rational>{Rational(1), Rational(-1), Rational(0)});
    CHECK(dense[1] == std::vector<Rational>{Rational(-1), Rational(0), Rational(1)});
}

TEST_CASE("delta matrix of the second difference at one point") {
    const DifferenceOperator T = DifferenceOperator::nabla_k(1, 2);
    const ConstraintMatrix D = build_delta_matrix(T, Box{MultiIndex{0}, MultiIndex{0}});
    REQUIRE(D.row_count() == 1);
    REQUIRE(D.col_count() == 3);
    std::vector<Rational> row(3);
    for (const auto& [c, v] : D.row(0)) row[c] = v;
    CHECK(row == std::vector<Rational>{Rational(1), Rational(-2), Rational(1)});
}

namespace {

struct Subproblem {
    LpData data;
    ConstraintMatrix delta;
};

Subproblem printed_r2_subproblem() {
    const Mask B = parse_mask_file(fixture("boxspline_202_bstar.mask"));
    LpData data = build_lp_data(B, 2, MultiIndex{2, 1}, 1);
    ConstraintMatrix delta = build_delta_matrix(DifferenceOperator::nabla(2), data.K);
    return {std::move(data), std::move(delta)};
}

}  // namespace

TEST_CASE("box lp on the printed level-2 subproblem") {
    const Subproblem sub = printed_r2_subproblem();
    const LpSolution sol = solve_box_lp(sub.data.d, sub.delta);
    CHECK(sol.value == Rational(6, 16));
    CHECK(sol.value < sub.data.l1_norm());  // strictly below ||d||_1 = 1/2
}

TEST_CASE("nullspace distance agrees on the printed subproblem") {
    const Subproblem sub = printed_r2_subproblem();
    const LpSolution sol = l1_nullspace_distance(sub.data.d, sub.delta);
    CHECK(sol.value == Rational(6, 16));
    Rational dstar_l1(0);
    for (const auto& v : sol.d_star) dstar_l1 += v.abs();
    CHECK(dstar_l1 == Rational(6, 16));
}

TEST_CASE("printed optimal weights are feasible with the optimal value") {
    // the published optimizer for the (eps=(2,1), j=2) level-2 subproblem
    const Subproblem sub = printed_r2_subproblem();
    RatVector printed(sub.data.d.size());
    auto set_at = [&](long b1, long b2, int mu, const Rational& v) {
        const MultiIndex beta{b1, b2};
        for (std::size_t i = 0; i < sub.data.betas.size(); ++i)
            if (sub.data.betas[i] == beta) {
                printed[i * sub.data.q + mu] = v;
                return;
            }
        FAIL("beta outside the vertex box");
    };
    set_at(0, -1, 0, Rational(1, 16));
    set_at(-1, -1, 0, Rational(-1, 16));
    set_at(0, 0, 1, Rational(1, 16));
    set_at(-1, 0, 1, Rational(3, 16));
    // value: ||printed||_1 = 6/16 = z*
    Rational l1(0);
    for (const auto& v : printed) l1 += v.abs();
    CHECK(l1 == Rational(6, 16));
    // feasibility: printed - d lies in the nullspace of Delta^T
    RatVector g(sub.data.d.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = sub.data.d[i] - printed[i];
    for (const auto& v : sub.delta.transpose_apply(g)) CHECK(v.is_zero());
}

TEST_CASE("trivial lp inputs") {
    const DifferenceOperator T = DifferenceOperator::nabla(2);
    const ConstraintMatrix D = build_delta_matrix(T, Box{MultiIndex{-1, -1}, MultiIndex{0, 0}});
    const RatVector zero(D.row_count());
    const LpSolution sol = solve_box_lp(zero, D);
    CHECK(sol.value.is_zero());
    for (const auto& v : sol.g) CHECK(v.is_zero());
    const LpSolution sol2 = l1_nullspace_distance(zero, D);
    CHECK(sol2.value.is_zero());
}

TEST_CASE("distance vanishes exactly on the nullspace") {
    const DifferenceOperator T = DifferenceOperator::nabla(1);
    const ConstraintMatrix D = build_delta_matrix(T, Box{MultiIndex{-1}, MultiIndex{0}});
    // rows are (nabla c)(-1), (nabla c)(0); a telescoping weight vector kills Delta^T
    // columns: c(-1), c(-2), c(0); Delta^T d = (d0 - d1, -d0, d1)
    // nullspace of Delta^T is trivial here, so use d = 0 plus a genuine one:
    // duplicate rows via a box with overlap would be needed; instead check z* = 0 iff d = 0
    const LpSolution sol = l1_nullspace_distance(RatVector{Rational(0), Rational(0)}, D);
    CHECK(sol.value.is_zero());
    for (const auto& v : sol.d_star) CHECK(v.is_zero());

    // with duplicated constraint rows the nullspace is nontrivial
    const DifferenceOperator T2 = DifferenceOperator::directional(1, {MultiIndex{1}, MultiIndex{1}});
    const ConstraintMatrix D2 = build_delta_matrix(T2, Box{MultiIndex{0}, MultiIndex{0}});
    REQUIRE(D2.row_count() == 2);
    const RatVector in_null{Rational(1), Rational(-1)};  // rows identical, difference annihilates
    for (const auto& v : D2.transpose_apply(in_null)) CHECK(v.is_zero());
    const LpSolution sol2 = l1_nullspace_distance(in_null, D2);
    CHECK(sol2.value.is_zero());
    for (const auto& v : sol2.d_star) CHECK(v.is_zero());
}

TEST_CASE("univariate data is already optimal") {
    const DifferenceOperator T = DifferenceOperator::nabla(1);
    const ConstraintMatrix D = build_delta_matrix(T, Box{MultiIndex{-2}, MultiIndex{0}});
    const RatVector d{Rational(1, 2), Rational(-1, 3), Rational(2)};
    const LpSolution sol = l1_nullspace_distance(d, D);
    CHECK(sol.value == Rational(1, 2) + Rational(1, 3) + Rational(2));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(sol.d_star[i] == d[i]);
    for (const auto& v : sol.g) CHECK(v.is_zero());
}

TEST_CASE("assembled optimal mask for the shear-dilation spline") {
    const Mask a = parse_mask_file(fixture("boxspline_202_shear.mask"));
    const DifferenceOperator T = DifferenceOperator::nabla(2);
    const Mask B = construct_difference_mask(a, T, 1, default_difference_support(a, T, 1));
    const Mask Br = iterate_mask(B, 1);

    std::vector<OptimalPiece> pieces;
    Rational best(0);
    for (const MultiIndex& eps : coset_representatives(a.dilation(), 1))
        for (int j = 0; j < 2; ++j) {
            LpData data = build_lp_data_from_iterated(Br, a.dilation(), 1, eps, j);
            ConstraintMatrix delta = build_delta_matrix(T, data.K);
            LpSolution sol = l1_nullspace_distance(data.d, delta);
            if (sol.value > best) best = sol.value;
            pieces.push_back(OptimalPiece{eps, j, data.K, data.q, sol.d_star});
        }
    CHECK(best == Rational(3, 4));
    const Mask bstar = assemble_optimal_mask(pieces, a.dilation(), 1, 2);
    CHECK(operator_norm(bstar, 1) == Rational(3, 4));
    CHECK(verify_intertwining(a, bstar, T, 1));

    // zero pieces produce the zero mask
    std::vector<OptimalPiece> zero_pieces;
    for (const MultiIndex& eps : coset_representatives(a.dilation(), 1))
        for (int j = 0; j < 2; ++j)
            zero_pieces.push_back(OptimalPiece{eps, j, Box{MultiIndex{-1, -1}, MultiIndex{0, 0}}, 2,
                                               RatVector(8)});
    const Mask zmask = assemble_optimal_mask(zero_pieces, a.dilation(), 1, 2);
    CHECK(operator_norm(zmask, 1).is_zero());
}

TEST_CASE("scale equivariance of the lp routes") {
    const Subproblem sub = printed_r2_subproblem();
    const LpSolution base = l1_nullspace_distance(sub.data.d, sub.delta);
    for (const Rational lambda : {Rational(2), Rational(3, 7), Rational(16)}) {
        RatVector scaled(sub.data.d.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = sub.data.d[i] * lambda;
        const LpSolution sol = solve_box_lp(scaled, sub.delta);
        CHECK(sol.value == lambda * Rational(6, 16));
        const LpSolution sol2 = l1_nullspace_distance(scaled, sub.delta);
        CHECK(sol2.value == lambda * Rational(6, 16));
        // positive scaling leaves the pivot choices unchanged, so the
        // returned vertex scales along with the value
        for (std::size_t i = 0; i < scaled.size(); ++i) CHECK(sol2.d_star[i] == lambda * base.d_star[i]);
    }
}

TEST_CASE("iteration counts stay far below the combinatorial bound") {
    const Subproblem sub = printed_r2_subproblem();
    const LpSolution a = solve_box_lp(sub.data.d, sub.delta);
    const LpSolution b = l1_nullspace_distance(sub.data.d, sub.delta);
    CHECK(a.iterations < 10000);
    CHECK(b.iterations < 10000);
}
