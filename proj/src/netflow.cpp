#include "subdiv/netflow.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

namespace subdiv {

void LatticeGraph::finalize() {
    unit_steps_ = true;
    for (const auto& step : steps_) {
        int nonzero = 0;
        for (int i = 0; i < s_; ++i)
            if (step[i] != 0) {
                ++nonzero;
                if (step[i] != 1 && step[i] != -1) nonzero = 2;
            }
        if (nonzero != 1) unit_steps_ = false;
    }
}

LatticeGraph LatticeGraph::difference_graph(const Box& K, const std::vector<MultiIndex>& directions) {
    if (directions.empty()) throw std::invalid_argument("difference_graph: no directions");
    LatticeGraph G;
    G.s_ = K.dim();
    std::set<MultiIndex> vs;
    const std::vector<MultiIndex> kpts = K.points();
    for (const MultiIndex& b : kpts) {
        vs.insert(b);
        for (const MultiIndex& xi : directions) vs.insert(b - xi);
    }
    G.verts_.assign(vs.begin(), vs.end());
    for (std::size_t i = 0; i < G.verts_.size(); ++i) G.index_[G.verts_[i]] = static_cast<int>(i);
    G.steps_ = directions;
    G.core_ = K;
    for (const MultiIndex& b : kpts)
        for (std::size_t di = 0; di < directions.size(); ++di) {
            G.edges_.emplace_back(G.index_.at(b), G.index_.at(b - directions[di]));
            G.edge_class_.push_back(static_cast<int>(di));
        }
    G.finalize();
    if (!G.connected()) throw std::invalid_argument("difference_graph: disconnected graph");
    return G;
}

LatticeGraph LatticeGraph::from_lists(std::vector<MultiIndex> vertices,
                                      std::vector<std::pair<MultiIndex, MultiIndex>> edges) {
    if (vertices.empty()) throw std::invalid_argument("LatticeGraph: empty vertex set");
    LatticeGraph G;
    G.s_ = vertices[0].dim();
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    G.verts_ = std::move(vertices);
    for (std::size_t i = 0; i < G.verts_.size(); ++i) G.index_[G.verts_[i]] = static_cast<int>(i);
    std::map<MultiIndex, int> step_index;
    for (const auto& [u, v] : edges) {
        auto iu = G.index_.find(u), iv = G.index_.find(v);
        if (iu == G.index_.end() || iv == G.index_.end())
            throw std::invalid_argument("LatticeGraph: edge endpoint not in vertex set");
        const MultiIndex step = u - v;
        auto [it, fresh] = step_index.try_emplace(step, static_cast<int>(G.steps_.size()));
        if (fresh) G.steps_.push_back(step);
        G.edges_.emplace_back(iu->second, iv->second);
        G.edge_class_.push_back(it->second);
    }
    G.finalize();
    return G;
}

int LatticeGraph::vertex_index(const MultiIndex& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw std::invalid_argument("LatticeGraph: unknown vertex " + v.str());
    return it->second;
}

bool LatticeGraph::connected() const {
    if (verts_.empty()) return true;
    std::vector<std::vector<int>> adj(verts_.size());
    for (const auto& [u, v] : edges_) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(verts_.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : adj[u])
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
    }
    for (char c : seen)
        if (!c) return false;
    return true;
}

LatticeGraph build_difference_graph(const Box& K, const std::vector<MultiIndex>& directions) {
    return LatticeGraph::difference_graph(K, directions);
}

std::vector<Rational> divergence(const LatticeGraph& G, const EdgeWeights& d) {
    if (static_cast<int>(d.d.size()) != G.edge_count())
        throw std::invalid_argument("divergence: weight count mismatch");
    std::vector<Rational> b(G.vertex_count());
    for (int e = 0; e < G.edge_count(); ++e) {
        auto [u, v] = G.edge(e);
        b[u] += d.d[e];
        b[v] -= d.d[e];
    }
    return b;
}

namespace {

// oriented arc bookkeeping: for edge e of E, orientation 0 is (u,v), 1 is (v,u)
struct ArcRef {
    int edge;
    int orient;  // flow arc being increased
    bool backward;  // true when traversing against an existing flow
};

}  // namespace

FlowSolution solve_min_cost_flow(const LatticeGraph& G, const std::vector<Rational>& b) {
    const int nv = G.vertex_count();
    const int ne = G.edge_count();
    if (static_cast<int>(b.size()) != nv) throw std::invalid_argument("solve_min_cost_flow: bad divergence size");
    {
        Rational total(0);
        for (const auto& x : b) total += x;
        if (!total.is_zero()) throw std::invalid_argument("solve_min_cost_flow: divergences must sum to zero");
    }
    if (!G.connected()) throw std::invalid_argument("solve_min_cost_flow: graph must be connected");

    FlowSolution sol;
    sol.forward.assign(ne, Rational(0));
    sol.reverse.assign(ne, Rational(0));
    sol.potential.assign(nv, Rational(0));
    sol.value = Rational(0);

    // adjacency of the symmetric closure: per vertex, (neighbor, edge, orient)
    struct Adj {
        int to, edge, orient;
    };
    std::vector<std::vector<Adj>> adj(nv);
    for (int e = 0; e < ne; ++e) {
        auto [u, v] = G.edge(e);
        adj[u].push_back({v, e, 0});
        adj[v].push_back({u, e, 1});
    }

    std::vector<Rational> surplus(b);
    std::vector<long> pi(nv, 0);  // costs are +-1, so distances and potentials stay integral

    auto flow_on = [&](int e, int o) -> Rational& { return o == 0 ? sol.forward[e] : sol.reverse[e]; };

    const long INF = std::numeric_limits<long>::max() / 4;
    long guard = 0;
    for (;;) {
        int vplus = -1, vminus = -1;
        for (int v = 0; v < nv; ++v)
            if (surplus[v].sign() > 0) {
                vplus = v;
                break;
            }
        if (vplus < 0) break;
        for (int v = nv - 1; v >= 0; --v)
            if (surplus[v].sign() < 0) {
                vminus = v;
                break;
            }
        assert(vminus >= 0 && "sum b = 0 guarantees a deficit vertex");
        if (++guard > 4L * nv * nv + 16L * ne + 1024)
            throw std::logic_error("solve_min_cost_flow: iteration guard tripped");

        // Dijkstra from vplus over residual arcs, reduced costs c - pi(u) + pi(v)
        std::vector<long> dist(nv, INF);
        std::vector<ArcRef> parent(nv, ArcRef{-1, -1, false});
        std::vector<int> parent_vertex(nv, -1);
        std::vector<char> done(nv, 0);
        dist[vplus] = 0;
        for (;;) {
            int u = -1;
            for (int v = 0; v < nv; ++v)
                if (!done[v] && dist[v] < INF && (u < 0 || dist[v] < dist[u])) u = v;
            if (u < 0) break;
            done[u] = 1;
            for (const Adj& a : adj[u]) {
                // forward residual arc (uncapacitated), cost 1
                long cf = 1 - pi[u] + pi[a.to];
                assert(cf >= 0 && "reduced costs must stay nonnegative");
                if (dist[u] + cf < dist[a.to]) {
                    dist[a.to] = dist[u] + cf;
                    parent[a.to] = ArcRef{a.edge, a.orient, false};
                    parent_vertex[a.to] = u;
                }
                // backward residual arc against flow on the opposite orientation
                if (flow_on(a.edge, 1 - a.orient).sign() > 0) {
                    long cb = -1 - pi[u] + pi[a.to];
                    assert(cb >= 0 && "reduced costs must stay nonnegative");
                    if (dist[u] + cb < dist[a.to]) {
                        dist[a.to] = dist[u] + cb;
                        parent[a.to] = ArcRef{a.edge, 1 - a.orient, true};
                        parent_vertex[a.to] = u;
                    }
                }
            }
        }
        assert(dist[vminus] < INF && "connected symmetric closure reaches every vertex");
        for (int v = 0; v < nv; ++v)
            if (dist[v] < INF) pi[v] -= dist[v];

        // gamma = min(surplus, deficit, residual capacity along the path)
        Rational gamma = surplus[vplus];
        if (-surplus[vminus] < gamma) gamma = -surplus[vminus];
        for (int v = vminus; v != vplus; v = parent_vertex[v]) {
            const ArcRef& arc = parent[v];
            if (arc.backward && flow_on(arc.edge, arc.orient) < gamma) gamma = flow_on(arc.edge, arc.orient);
        }
        assert(gamma.sign() > 0);
        for (int v = vminus; v != vplus; v = parent_vertex[v]) {
            const ArcRef& arc = parent[v];
            if (arc.backward) {
                flow_on(arc.edge, arc.orient) -= gamma;
                ++sol.cancellations;
            } else {
                flow_on(arc.edge, arc.orient) += gamma;
            }
        }
        surplus[vplus] -= gamma;
        surplus[vminus] += gamma;
        ++sol.augmentations;
    }

    for (int v = 0; v < nv; ++v) sol.potential[v] = Rational(pi[v]);
    for (int e = 0; e < ne; ++e) sol.value += sol.forward[e] + sol.reverse[e];

    // exit self-checks: optimality certificates, all exact
    {
        std::vector<Rational> net(nv);
        for (int e = 0; e < ne; ++e) {
            auto [u, v] = G.edge(e);
            net[u] += sol.forward[e] - sol.reverse[e];
            net[v] += sol.reverse[e] - sol.forward[e];
            assert(!(sol.forward[e].sign() > 0 && sol.reverse[e].sign() > 0) &&
                   "no optimal flow uses both orientations of an edge");
        }
        Rational dual(0);
        for (int v = 0; v < nv; ++v) {
            assert(net[v] == b[v] && "flow balance");
            dual += b[v] * sol.potential[v];
        }
        assert(dual == sol.value && "primal value must equal dual objective");
        for (int e = 0; e < ne; ++e) {
            auto [u, v] = G.edge(e);
            Rational diff = (sol.potential[u] - sol.potential[v]).abs();
            assert(diff <= Rational(1) && "dual feasibility");
            (void)diff;
        }
        // Monotone support is not asserted here: flows forced through rim
        // vertices (outside the core box) can have to switch direction, as
        // the exchange that would shorten such a path needs edges the graph
        // does not contain. check_monotone_support covers the cases where
        // the support stays in the core.
    }
    return sol;
}

Rational solve_dual_value(const LatticeGraph& G, const EdgeWeights& d) {
    return solve_min_cost_flow(G, divergence(G, d)).value;
}

EdgeWeights extract_optimal_d(const LatticeGraph& G, const FlowSolution& f) {
    EdgeWeights out;
    out.d.resize(G.edge_count());
    for (int e = 0; e < G.edge_count(); ++e) out.d[e] = f.forward[e] - f.reverse[e];
    return out;
}

bool check_monotone_support(const LatticeGraph& G, const FlowSolution& f) {
    // Per coordinate k, a maximal path in supp(f) may not contain both a
    // k-increasing and a k-decreasing step. Walk every maximal path.
    const int nv = G.vertex_count();
    struct Arc {
        int to;
        MultiIndex step;  // head - tail of the traversed arc
    };
    std::vector<std::vector<Arc>> out(nv);
    std::vector<int> indeg(nv, 0);
    for (int e = 0; e < G.edge_count(); ++e) {
        auto [u, v] = G.edge(e);
        if (f.forward[e].sign() > 0) {
            out[u].push_back({v, G.vertex(v) - G.vertex(u)});
            ++indeg[v];
        }
        if (f.reverse[e].sign() > 0) {
            out[v].push_back({u, G.vertex(u) - G.vertex(v)});
            ++indeg[u];
        }
    }
    const int s = G.dim();
    // depth-first over support paths from each source, tracking per-coordinate signs
    struct Frame {
        int v;
        std::vector<int> sign;  // -1, 0, +1 per coordinate
    };
    for (int v0 = 0; v0 < nv; ++v0) {
        if (indeg[v0] != 0 || out[v0].empty()) continue;
        std::vector<Frame> stack{{v0, std::vector<int>(s, 0)}};
        while (!stack.empty()) {
            Frame fr = std::move(stack.back());
            stack.pop_back();
            for (const Arc& a : out[fr.v]) {
                std::vector<int> sgn = fr.sign;
                for (int k = 0; k < s; ++k) {
                    if (a.step[k] == 0) continue;
                    const int dir = a.step[k] > 0 ? 1 : -1;
                    if (sgn[k] == -dir) return false;
                    sgn[k] = dir;
                }
                stack.push_back({a.to, std::move(sgn)});
            }
        }
    }
    return true;
}

std::optional<FlowSolution> signed_d_fast_path(const LatticeGraph& G, const EdgeWeights& d) {
    if (!G.unit_steps()) return std::nullopt;
    const int nclasses = static_cast<int>(G.step_directions().size());
    std::vector<int> kappa(nclasses, 0);
    for (int e = 0; e < G.edge_count(); ++e) {
        const int sgn = d.d[e].sign();
        if (sgn == 0) continue;
        int& k = kappa[G.edge_class(e)];
        if (k == 0)
            k = sgn;
        else if (k != sgn)
            return std::nullopt;
    }
    for (int& k : kappa)
        if (k == 0) k = 1;

    FlowSolution sol;
    sol.forward.assign(G.edge_count(), Rational(0));
    sol.reverse.assign(G.edge_count(), Rational(0));
    sol.potential.assign(G.vertex_count(), Rational(0));
    sol.value = Rational(0);
    for (int e = 0; e < G.edge_count(); ++e) {
        if (kappa[G.edge_class(e)] > 0)
            sol.forward[e] = d.d[e];
        else
            sol.reverse[e] = -d.d[e];
        sol.value += d.d[e].abs();
    }
    // x(v) = sum_i kappa_i' v_i where kappa_i' is the sign attached to the
    // coordinate that the class steps along, oriented so that x increases by
    // one across every weighted edge.
    std::vector<int> coord_sign(G.dim(), 1);
    for (int c = 0; c < nclasses; ++c) {
        const MultiIndex& step = G.step_directions()[c];
        for (int k = 0; k < G.dim(); ++k)
            if (step[k] != 0) coord_sign[k] = step[k] > 0 ? kappa[c] : -kappa[c];
    }
    for (int v = 0; v < G.vertex_count(); ++v) {
        long x = 0;
        for (int k = 0; k < G.dim(); ++k) x += coord_sign[k] * G.vertex(v)[k];
        sol.potential[v] = Rational(x);
    }
    return sol;
}

std::optional<UnivariateResult> univariate_fast_path(const LatticeGraph& G, const EdgeWeights& d) {
    if (G.dim() != 1 || !G.unit_steps()) return std::nullopt;
    // path graph: vertices consecutive, exactly one edge between neighbors
    for (int i = 1; i < G.vertex_count(); ++i)
        if (G.vertex(i)[0] != G.vertex(i - 1)[0] + 1) return std::nullopt;
    if (G.edge_count() != G.vertex_count() - 1) return std::nullopt;

    UnivariateResult res;
    res.value = d.l1_norm();
    res.d_star = d;
    res.potential.assign(G.vertex_count(), Rational(0));
    // maximizer: differences sgn(d) edge by edge, anchored at the left end
    std::vector<Rational> diff_at(G.vertex_count());  // x(v) - x(v-1) across edge into v
    std::vector<int> covered(G.vertex_count(), 0);
    for (int e = 0; e < G.edge_count(); ++e) {
        auto [u, v] = G.edge(e);
        // vertices are sorted, so index order equals coordinate order
        const int hi = std::max(u, v);
        if (covered[hi]++) return std::nullopt;  // parallel edges: not a plain path
        const int sgn = d.d[e].sign();
        diff_at[hi] = Rational(u > v ? sgn : -sgn);
    }
    for (int i = 1; i < G.vertex_count(); ++i) res.potential[i] = res.potential[i - 1] + diff_at[i];
    return res;
}

}  // namespace subdiv
