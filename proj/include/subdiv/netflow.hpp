#pragma once

#include <map>
#include <optional>
#include <vector>

#include "subdiv/multi_index.hpp"

namespace subdiv {

/// Directed graph on a finite subset of Z^s with edges (beta, beta - xi)
/// for a fixed direction list. The flow problems run on the symmetric
/// closure (both orientations of every edge carry a flow variable).
class LatticeGraph {
public:
    /// V = K union {beta - xi}; E = {(beta, beta - xi) : beta in K}.
    /// Edge order: K points lexicographic, directions in the given order,
    /// so edge index = beta_index * directions.size() + dir_index.
    static LatticeGraph difference_graph(const Box& K, const std::vector<MultiIndex>& directions);

    /// Explicit vertex and edge lists (graph files, ad-hoc instances).
    static LatticeGraph from_lists(std::vector<MultiIndex> vertices,
                                   std::vector<std::pair<MultiIndex, MultiIndex>> edges);

    int dim() const { return s_; }
    int vertex_count() const { return static_cast<int>(verts_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<MultiIndex>& vertices() const { return verts_; }
    const MultiIndex& vertex(int i) const { return verts_[i]; }
    int vertex_index(const MultiIndex& v) const;
    std::pair<int, int> edge(int e) const { return edges_[e]; }

    /// True when every edge step is +-(unit vector); the monotone-path
    /// theorem and the signed closed form require this.
    bool unit_steps() const { return unit_steps_; }
    /// Direction class of an edge: index into the distinct step list.
    int edge_class(int e) const { return edge_class_[e]; }
    const std::vector<MultiIndex>& step_directions() const { return steps_; }

    /// The box K of edge sources when built by difference_graph. Every
    /// lattice move from a core vertex is an edge, so the path-shortening
    /// exchange stays inside the graph there: an optimal flow whose support
    /// vertices all lie in the core has monotone support paths. Flows
    /// touching the rim V \ K can be forced into sign-switching detours.
    const std::optional<Box>& core_box() const { return core_; }

    bool connected() const;

private:
    LatticeGraph() = default;
    void finalize();

    int s_ = 0;
    std::vector<MultiIndex> verts_;  // sorted lexicographically
    std::map<MultiIndex, int> index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<int> edge_class_;
    std::vector<MultiIndex> steps_;  // distinct u - v steps
    std::optional<Box> core_;
    bool unit_steps_ = false;
};

/// Weights d on E, by edge index.
struct EdgeWeights {
    std::vector<Rational> d;

    Rational l1_norm() const {
        Rational s(0);
        for (const auto& x : d) s += x.abs();
        return s;
    }
    bool integral() const {
        for (const auto& x : d)
            if (!x.is_integer()) return false;
        return true;
    }
};

/// Primal-dual solution of Flow(d). forward[e]/reverse[e] are the flows on
/// the two orientations of edge e; potentials are dual-optimal for
/// max{sum b_v x_v : |x_u - x_v| <= 1}; value = total flow = dual objective.
struct FlowSolution {
    std::vector<Rational> forward, reverse;
    std::vector<Rational> potential;
    Rational value;
    long augmentations = 0;
    long cancellations = 0;

    bool integral() const {
        for (const auto& x : forward)
            if (!x.is_integer()) return false;
        for (const auto& x : reverse)
            if (!x.is_integer()) return false;
        return true;
    }
};

LatticeGraph build_difference_graph(const Box& K, const std::vector<MultiIndex>& directions);

/// b_v = sum_{(v,u)} d_vu - sum_{(u,v)} d_uv; always sums to zero.
std::vector<Rational> divergence(const LatticeGraph& G, const EdgeWeights& d);

/// Successive shortest path with Dijkstra on reduced costs. Uncapacitated
/// forward arcs of the symmetric closure; residual backward arcs capped by
/// current flow. Deterministic: v+ is the lexicographically smallest
/// surplus vertex, v- the lexicographically largest deficit vertex, and
/// Dijkstra pops the smallest-index vertex among equal distances.
/// Preconditions: sum b = 0, underlying graph connected. Integral b gives
/// integral flow and potentials. Self-checks at exit: flow balance, primal
/// value = dual objective, and no edge with both orientations positive.
FlowSolution solve_min_cost_flow(const LatticeGraph& G, const std::vector<Rational>& b);

/// Optimal value of max{sum_E d_uv (x_u - x_v) : |x_u - x_v| <= 1}; equals
/// the Flow(d) value by duality.
Rational solve_dual_value(const LatticeGraph& G, const EdgeWeights& d);

/// d*_uv = f_uv - f_vu on E. Preserves divergence; ||d*||_1 = flow value.
EdgeWeights extract_optimal_d(const LatticeGraph& G, const FlowSolution& f);

/// True when every maximal path in supp(f) uses, per coordinate, only steps
/// of one sign.
bool check_monotone_support(const LatticeGraph& G, const FlowSolution& f);

/// Closed form when each direction class carries one sign of d (unit-step
/// graphs only): flow |d| oriented by the sign, x(v) = sum_i kappa_i v_i,
/// value ||d||_1. Returns nothing when the sign pattern is mixed.
std::optional<FlowSolution> signed_d_fast_path(const LatticeGraph& G, const EdgeWeights& d);

struct UnivariateResult {
    Rational value;      // ||d||_1
    EdgeWeights d_star;  // = d
    std::vector<Rational> potential;
};

/// s = 1 on a path graph: the maximizer has differences sgn(d) edge by edge,
/// so the optimum is ||d||_1 and d is already optimal.
std::optional<UnivariateResult> univariate_fast_path(const LatticeGraph& G, const EdgeWeights& d);

}  // namespace subdiv
