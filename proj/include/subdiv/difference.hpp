#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiv/mask.hpp"

namespace subdiv {

/// Finitely supported matrix-valued correlation stencil:
/// (T c)(alpha) = sum_beta T(beta) c(alpha - beta), T(beta) a q x n block.
class DifferenceOperator {
public:
    DifferenceOperator(int s, int n, int q) : s_(s), n_(n), q_(q) {}

    /// Backward difference. Scalar input: q = s, row l is delta_0 - delta_{e_l}.
    /// Vector input (n > 1): q = s*n, direction-major -- row l*n + i applies
    /// nabla_l to channel i.
    static DifferenceOperator nabla(int s, int n = 1);

    /// k-th order backward difference, rows indexed by mu in N_0^s, |mu| = k,
    /// in decreasing lexicographic order ((2,0),(1,1),(0,2) for s = k = 2).
    static DifferenceOperator nabla_k(int s, int k);

    /// First differences along arbitrary nonzero directions: row per xi,
    /// stencil delta_0 - delta_xi. Scalar input only.
    static DifferenceOperator directional(int s, const std::vector<MultiIndex>& directions);

    /// Products of directional differences, one row per pair (i < j) in
    /// lexicographic pair order. Scalar input only.
    static DifferenceOperator directional_pairs(int s, const std::vector<MultiIndex>& directions);

    /// 4 x 2 block preset for two-channel schemes: rows are
    /// (nabla_1 c_1, c_2, nabla_2 c_1, c_2).
    static DifferenceOperator gradient_identity_block();

    int dim() const { return s_; }
    int input_size() const { return n_; }
    int rows() const { return q_; }

    void set_tap(const MultiIndex& beta, RatMatrix block);
    RatMatrix tap(const MultiIndex& beta) const;
    const std::map<MultiIndex, RatMatrix>& taps() const { return t_; }

    /// Largest coordinate reach of any tap offset (for box padding).
    long stencil_extent() const;

    /// When every row j is delta_0 - delta_{xi_j} acting on a single scalar
    /// channel (n = 1), returns the direction list; otherwise nullopt. These
    /// are exactly the operators whose restricted-norm subproblems are
    /// minimum cost network flow problems.
    std::optional<std::vector<MultiIndex>> first_order_directions() const;

    Sequence apply(const Sequence& c) const;

private:
    int s_, n_, q_;
    std::map<MultiIndex, RatMatrix> t_;
};

/// (T c), exact.
Sequence difference_apply(const DifferenceOperator& T, const Sequence& c);

/// Number of rows of nabla_k: C(s+k-1, s-1).
long nabla_k_row_count(int s, int k);

struct NoSolutionError : std::runtime_error {
    NoSolutionError(std::string msg, bool sum_rules_ok_, std::vector<std::pair<MultiIndex, Rational>> sums)
        : std::runtime_error(std::move(msg)), sum_rules_ok(sum_rules_ok_), coset_sums(std::move(sums)) {}
    bool sum_rules_ok;
    std::vector<std::pair<MultiIndex, Rational>> coset_sums;
};

/// Solves T S_A^r = S_B T for a q x q mask B supported in support_box,
/// by exact Gaussian elimination on the linear system obtained from unit
/// sequences over one M^r period. Free unknowns are set to zero, so the
/// returned representative is deterministic and of small support. The
/// result carries dilation M^r. Throws NoSolutionError when the system is
/// infeasible for this box; for scalar masks the error reports whether
/// order-1 sum rules hold, which separates "no B exists" from "box too
/// small".
Mask construct_difference_mask(const Mask& A, const DifferenceOperator& T, int r, const Box& support_box);

/// Default support box used by the CLI: hull of supp(A^[r]) padded by the
/// stencil extent of T.
Box default_difference_support(const Mask& A, const DifferenceOperator& T, int r);

/// Finite equivalent of the operator identity T S_A^r = S_B T.
///
/// Checking on e = delta_beta v_i for beta over one M^r period suffices:
/// both sides commute with shifts by M^r gamma (S_A^r shift_gamma =
/// shift_{M^r gamma} S_A^r, and T commutes with all shifts), and every unit
/// sequence is such a shift of a period representative; linearity and finite
/// supports extend the identity to all of l_0. We test the period box
/// enlarged by the stencil widths anyway, which only adds redundant checks.
bool verify_intertwining(const Mask& A, const Mask& B, const DifferenceOperator& T, int r);

/// A constructed or user-supplied difference relation, verified on creation.
struct DifferenceScheme {
    enum class Provenance { user_supplied, solved, optimal };

    Mask source;             // A
    DifferenceOperator op;   // T
    int level;               // r
    Mask difference;         // B with dilation M^r
    Provenance provenance;

    static DifferenceScheme make(Mask A, DifferenceOperator T, int r, Mask B, Provenance p);
};

/// Objective data of one restricted-norm subproblem (eps, j):
/// d[(beta, mu)] = B^[r]_{j,mu}(eps - M^r beta) over the adaptive vertex box
/// K = hull{beta : eps' - M^r beta in supp B^[r] for some eps' in Xi_r}.
/// Zero entries are kept so the index set doubles as a graph edge list.
struct LpData {
    Box K;
    std::vector<MultiIndex> betas;  // K.points(), lexicographic
    int q;
    std::vector<Rational> d;  // index = beta_index * q + mu

    Rational l1_norm() const {
        Rational sum(0);
        for (const auto& x : d) sum += x.abs();
        return sum;
    }
    bool integral() const {
        for (const auto& x : d)
            if (!x.is_integer()) return false;
        return true;
    }
};

LpData build_lp_data(const Mask& B, int r, const MultiIndex& eps, int j);

/// Same, with B^[r] precomputed (iterated with respect to dilation M).
LpData build_lp_data_from_iterated(const Mask& Br, const DilationMatrix& M, int r, const MultiIndex& eps,
                                   int j);

}  // namespace subdiv
