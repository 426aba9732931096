#pragma once

#include <utility>
#include <vector>

#include "subdiv/difference.hpp"
#include "subdiv/mask.hpp"

namespace subdiv {

/// Sparse rational matrix Delta of the box-constrained problems:
/// row (beta in K, operator row mu) encodes (T c)(beta)_mu over the free
/// variables c(gamma)[channel].
class ConstraintMatrix {
public:
    int row_count() const { return static_cast<int>(rows_.size()); }
    int col_count() const { return static_cast<int>(col_labels_.size()); }
    const std::vector<std::pair<int, Rational>>& row(int i) const { return rows_[i]; }
    const std::vector<std::pair<MultiIndex, int>>& row_labels() const { return row_labels_; }
    const std::vector<std::pair<MultiIndex, int>>& col_labels() const { return col_labels_; }

    /// Delta^T d, exact.
    RatVector transpose_apply(const RatVector& d) const;
    /// Delta x, exact.
    RatVector apply(const RatVector& x) const;

    friend ConstraintMatrix build_delta_matrix(const DifferenceOperator& T, const Box& K);

private:
    std::vector<std::vector<std::pair<int, Rational>>> rows_;
    std::vector<std::pair<MultiIndex, int>> row_labels_;  // (beta, mu)
    std::vector<std::pair<MultiIndex, int>> col_labels_;  // (gamma, channel)
};

/// Rows ordered by (beta lexicographic, mu); columns appear in first-touch
/// order of that scan, so the layout is deterministic and row index equals
/// the LpData index beta_index * q + mu.
ConstraintMatrix build_delta_matrix(const DifferenceOperator& T, const Box& K);

struct LpSolution {
    Rational value;              // z*
    RatVector x;                 // maximizer of the box problem (free variables)
    RatVector g;                 // dual certificate, g^T Delta = 0
    RatVector d_star;            // d - g, ||d*||_1 = z*
    std::vector<int> basis;      // final simplex basis (reproducibility)
    long iterations = 0;

    bool d_star_integral() const {
        for (const auto& v : d_star)
            if (!v.is_integer()) return false;
        return true;
    }
};

/// z* = max{ d^T (Delta x) : -1 <= Delta x <= 1 }, solved as a primal
/// simplex over split variables and slacks (slack basis is feasible, no
/// phase 1). The dual multipliers of the two constraint blocks give d* and
/// g. Bland's rule throughout; exact rationals.
LpSolution solve_box_lp(const RatVector& d, const ConstraintMatrix& delta);

/// z* = min{ ||d - g||_1 : g^T Delta = 0 }, solved in the split form
/// min 1^T(w + y) s.t. Delta^T (w - y) = Delta^T d, w, y >= 0 by a
/// two-phase simplex. Same optimal value as solve_box_lp on (d, Delta);
/// the equality duals recover the box maximizer x.
LpSolution l1_nullspace_distance(const RatVector& d, const ConstraintMatrix& delta);

/// One solved restricted-norm subproblem, ready for reassembly.
struct OptimalPiece {
    MultiIndex eps;
    int j;
    Box K;
    int q;
    RatVector d_star;  // LpData indexing: beta_index * q + mu
};

/// B*(eps - M^r beta) row j, column mu := d*_{(beta,mu)} over all pieces.
/// The index map is injective per coset, so assignments never collide
/// (asserted). Result carries dilation M^r; its operator norm equals
/// max ||d*||_1 by construction.
Mask assemble_optimal_mask(const std::vector<OptimalPiece>& pieces, const DilationMatrix& M, int r, int s);

}  // namespace subdiv
