#include "subdiv/l1lp.hpp"

#include <cassert>
#include <map>

namespace subdiv {

RatVector ConstraintMatrix::transpose_apply(const RatVector& d) const {
    RatVector out(col_count());
    for (int i = 0; i < row_count(); ++i) {
        if (d[i].is_zero()) continue;
        for (const auto& [c, v] : rows_[i]) out[c] += d[i] * v;
    }
    return out;
}

RatVector ConstraintMatrix::apply(const RatVector& x) const {
    RatVector out(row_count());
    for (int i = 0; i < row_count(); ++i)
        for (const auto& [c, v] : rows_[i]) out[i] += v * x[c];
    return out;
}

ConstraintMatrix build_delta_matrix(const DifferenceOperator& T, const Box& K) {
    ConstraintMatrix D;
    std::map<std::pair<MultiIndex, int>, int> col_index;
    for (const MultiIndex& beta : K.points()) {
        for (int mu = 0; mu < T.rows(); ++mu) {
            std::vector<std::pair<int, Rational>> row;
            std::map<int, Rational> acc;
            for (const auto& [off, block] : T.taps()) {
                for (int ch = 0; ch < T.input_size(); ++ch) {
                    if (block(mu, ch).is_zero()) continue;
                    const std::pair<MultiIndex, int> key{beta - off, ch};
                    auto it = col_index.find(key);
                    if (it == col_index.end()) {
                        it = col_index.emplace(key, static_cast<int>(D.col_labels_.size())).first;
                        D.col_labels_.push_back(key);
                    }
                    acc[it->second] += block(mu, ch);
                }
            }
            for (auto& [c, v] : acc)
                if (!v.is_zero()) row.emplace_back(c, v);
            D.rows_.push_back(std::move(row));
            D.row_labels_.emplace_back(beta, mu);
        }
    }
    return D;
}

namespace {

// Dense exact simplex: max c^T x, A x = b, x >= 0, starting from a feasible
// basis whose columns are unit in their rows. Bland's rule, so no cycling.
struct Tableau {
    int m, n;
    std::vector<RatVector> rows;  // m rows of length n + 1 (rhs last)
    RatVector cost;               // length n
    std::vector<int> basis;       // size m
    std::vector<char> blocked;    // columns barred from entering
    long iterations = 0;
    long iteration_cap;

    Tableau(int m_, int n_) : m(m_), n(n_), rows(m_, RatVector(n_ + 1)), cost(n_), blocked(n_, 0) {
        // cap = C(n, m) clamped; Bland guarantees no basis repeats
        double bound = 1;
        for (int i = 1; i <= m && bound < 1e8; ++i) bound *= static_cast<double>(n - m + i) / i;
        iteration_cap = bound < 1e8 ? static_cast<long>(bound) + 16 : 100000000L;
    }

    void pivot(int row, int col) {
        const Rational p = rows[row][col];
        for (auto& v : rows[row]) v /= p;
        for (int i = 0; i < m; ++i) {
            if (i == row || rows[i][col].is_zero()) continue;
            const Rational f = rows[i][col];
            for (int j = 0; j <= n; ++j) rows[i][j] -= f * rows[row][j];
        }
        basis[row] = col;
    }

    // reduced cost of column j under the current basis
    RatVector reduced_costs() const {
        RatVector rc(cost);
        for (int i = 0; i < m; ++i) {
            const Rational cb = cost[basis[i]];
            if (cb.is_zero()) continue;
            for (int j = 0; j < n; ++j) rc[j] -= cb * rows[i][j];
        }
        return rc;
    }

    void run() {
        for (;;) {
            if (++iterations > iteration_cap) throw std::logic_error("simplex: iteration cap exceeded");
            const RatVector rc = reduced_costs();
            int enter = -1;
            for (int j = 0; j < n; ++j)
                if (!blocked[j] && rc[j].sign() > 0) {
                    enter = j;
                    break;  // Bland: smallest index
                }
            if (enter < 0) return;
            int leave = -1;
            Rational best;
            for (int i = 0; i < m; ++i) {
                if (rows[i][enter].sign() <= 0) continue;
                const Rational ratio = rows[i][n] / rows[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) throw std::logic_error("simplex: unbounded problem");
            pivot(leave, enter);
        }
    }

    Rational objective() const {
        Rational z(0);
        for (int i = 0; i < m; ++i) z += cost[basis[i]] * rows[i][n];
        return z;
    }

    RatVector primal() const {
        RatVector x(n);
        for (int i = 0; i < m; ++i) x[basis[i]] = rows[i][n];
        return x;
    }
};

}  // namespace

LpSolution solve_box_lp(const RatVector& d, const ConstraintMatrix& delta) {
    const int m = delta.row_count();
    const int n = delta.col_count();
    if (static_cast<int>(d.size()) != m) throw std::invalid_argument("solve_box_lp: dimension mismatch");
    const RatVector obj = delta.transpose_apply(d);  // Delta^T d

    // variables: x+ (n), x- (n), s+ (m), s- (m)
    Tableau t(2 * m, 2 * n + 2 * m);
    for (int i = 0; i < m; ++i) {
        for (const auto& [c, v] : delta.row(i)) {
            t.rows[i][c] = v;
            t.rows[i][n + c] = -v;
            t.rows[m + i][c] = -v;
            t.rows[m + i][n + c] = v;
        }
        t.rows[i][2 * n + i] = Rational(1);
        t.rows[m + i][2 * n + m + i] = Rational(1);
        t.rows[i][2 * n + 2 * m] = Rational(1);      // rhs
        t.rows[m + i][2 * n + 2 * m] = Rational(1);  // rhs
    }
    for (int j = 0; j < n; ++j) {
        t.cost[j] = obj[j];
        t.cost[n + j] = -obj[j];
    }
    t.basis.resize(2 * m);
    for (int i = 0; i < 2 * m; ++i) t.basis[i] = 2 * n + i;
    t.run();

    LpSolution sol;
    sol.value = t.objective();
    sol.iterations = t.iterations;
    sol.basis = t.basis;
    const RatVector prim = t.primal();
    sol.x.resize(n);
    for (int j = 0; j < n; ++j) sol.x[j] = prim[j] - prim[n + j];
    // duals of the two blocks from the slack reduced costs
    const RatVector rc = t.reduced_costs();
    sol.d_star.resize(m);
    sol.g.resize(m);
    for (int i = 0; i < m; ++i) {
        const Rational lam_plus = -rc[2 * n + i];
        const Rational lam_minus = -rc[2 * n + m + i];
        assert(lam_plus.sign() >= 0 && lam_minus.sign() >= 0 && "dual feasibility of the block multipliers");
        sol.d_star[i] = lam_plus - lam_minus;
        sol.g[i] = d[i] - sol.d_star[i];
    }

    // exact certificates
    {
        Rational dstar_l1(0), d_l1(0);
        for (int i = 0; i < m; ++i) {
            dstar_l1 += sol.d_star[i].abs();
            d_l1 += d[i].abs();
        }
        assert(dstar_l1 == sol.value && "||d*||_1 equals the optimal value");
        assert(sol.value.sign() >= 0 && sol.value <= d_l1 && "0 <= z* <= ||d||_1");
        const RatVector gtd = delta.transpose_apply(sol.g);
        for (const auto& v : gtd) assert(v.is_zero() && "g^T Delta = 0");
        const RatVector dx = delta.apply(sol.x);
        Rational primal_val(0);
        for (int i = 0; i < m; ++i) {
            assert(dx[i].abs() <= Rational(1) && "box feasibility of the maximizer");
            primal_val += d[i] * dx[i];
        }
        assert(primal_val == sol.value && "maximizer attains z*");
        (void)d_l1;
    }
    return sol;
}

LpSolution l1_nullspace_distance(const RatVector& d, const ConstraintMatrix& delta) {
    const int m = delta.row_count();
    const int n = delta.col_count();
    if (static_cast<int>(d.size()) != m)
        throw std::invalid_argument("l1_nullspace_distance: dimension mismatch");
    RatVector rhs = delta.transpose_apply(d);  // Delta^T d, one equation per column of Delta

    // min 1^T (w + y) s.t. Delta^T w - Delta^T y = Delta^T d, w, y >= 0.
    // Variables: w (m), y (m), artificials (n). Maximize the negated cost.
    const int nv = 2 * m + n;
    Tableau t(n, nv);
    std::vector<int> row_sign(n, 1);
    for (int j = 0; j < n; ++j) row_sign[j] = rhs[j].sign() < 0 ? -1 : 1;
    for (int i = 0; i < m; ++i)
        for (const auto& [c, v] : delta.row(i)) {
            const Rational sv = row_sign[c] < 0 ? -v : v;
            t.rows[c][i] = sv;
            t.rows[c][m + i] = -sv;
        }
    for (int j = 0; j < n; ++j) {
        t.rows[j][2 * m + j] = Rational(1);
        t.rows[j][nv] = row_sign[j] < 0 ? -rhs[j] : rhs[j];
    }
    t.basis.resize(n);
    for (int j = 0; j < n; ++j) t.basis[j] = 2 * m + j;

    // phase 1: drive the artificials to zero
    for (int j = 0; j < n; ++j) t.cost[2 * m + j] = Rational(-1);
    t.run();
    if (!t.objective().is_zero())
        throw std::logic_error("l1_nullspace_distance: equality system infeasible");
    // pivot any residual artificial out of the basis (degenerate rows)
    for (int i = 0; i < n; ++i) {
        if (t.basis[i] < 2 * m) continue;
        int enter = -1;
        for (int j = 0; j < 2 * m; ++j)
            if (!t.rows[i][j].is_zero()) {
                enter = j;
                break;
            }
        if (enter >= 0) t.pivot(i, enter);
        // a row with no w/y coefficients keeps its artificial basic at zero
    }

    // phase 2: artificials barred from entering; their reduced costs expose the duals
    for (int j = 0; j < nv; ++j) t.cost[j] = Rational(0);
    for (int i = 0; i < 2 * m; ++i) t.cost[i] = Rational(-1);
    for (int j = 0; j < n; ++j) t.blocked[2 * m + j] = 1;
    const long phase1_iters = t.iterations;
    t.run();

    LpSolution sol;
    sol.value = -t.objective();
    sol.iterations = t.iterations;
    sol.basis = t.basis;
    const RatVector prim = t.primal();
    sol.d_star.resize(m);
    sol.g.resize(m);
    Rational wy_sum(0);
    for (int i = 0; i < m; ++i) {
        const Rational& w = prim[i];
        const Rational& y = prim[m + i];
        assert((w.is_zero() || y.is_zero()) && "optimal w and y have disjoint supports");
        wy_sum += w + y;
        sol.d_star[i] = w - y;
        sol.g[i] = d[i] - sol.d_star[i];
    }
    assert(wy_sum == sol.value);

    // box maximizer from the equality duals: x_j = -(reduced cost of artificial j), sign-adjusted
    const RatVector rc = t.reduced_costs();
    sol.x.resize(n);
    for (int j = 0; j < n; ++j) {
        sol.x[j] = -rc[2 * m + j];
        if (row_sign[j] < 0) sol.x[j] = -sol.x[j];
        sol.x[j] = -sol.x[j];  // the min problem's duals solve the max problem negated
    }

    {
        Rational dstar_l1(0);
        for (const auto& v : sol.d_star) dstar_l1 += v.abs();
        assert(dstar_l1 == sol.value && "||d*||_1 equals the optimal value");
        const RatVector gtd = delta.transpose_apply(sol.g);
        for (const auto& v : gtd) assert(v.is_zero() && "g^T Delta = 0");
        const RatVector dx = delta.apply(sol.x);
        Rational primal_val(0);
        for (int i = 0; i < m; ++i) {
            assert(dx[i].abs() <= Rational(1) && "box feasibility of the recovered maximizer");
            primal_val += d[i] * dx[i];
        }
        assert(primal_val == sol.value && "recovered maximizer attains z*");
        (void)phase1_iters;
    }
    return sol;
}

Mask assemble_optimal_mask(const std::vector<OptimalPiece>& pieces, const DilationMatrix& M, int r, int s) {
    if (pieces.empty()) throw std::invalid_argument("assemble_optimal_mask: no pieces");
    const int q = pieces[0].q;
    const DilationMatrix Mr = r == 1 ? M : M.power(r);
    Mask B(s, q, q, Mr);
    std::map<std::pair<MultiIndex, int>, char> assigned;  // (position, j*q + mu)
    for (const OptimalPiece& piece : pieces) {
        const std::vector<MultiIndex> betas = piece.K.points();
        for (std::size_t bi = 0; bi < betas.size(); ++bi)
            for (int mu = 0; mu < q; ++mu) {
                const Rational& v = piece.d_star[bi * q + mu];
                if (v.is_zero()) continue;
                const MultiIndex pos = piece.eps - Mr.apply(betas[bi]);
                const bool fresh = assigned.emplace(std::make_pair(pos, piece.j * q + mu), 1).second;
                assert(fresh && "coset index map assigns each entry once");
                (void)fresh;
                RatMatrix mat = B.at(pos);
                mat(piece.j, mu) = v;
                B.set(pos, std::move(mat));
            }
    }
    return B;
}

}  // namespace subdiv
