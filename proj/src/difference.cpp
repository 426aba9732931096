#include "subdiv/difference.hpp"

#include <algorithm>
#include <set>

namespace subdiv {

namespace {

// scalar stencil: map offset -> coefficient
using Stencil = std::map<MultiIndex, Rational>;

Stencil stencil_delta(int s) { return {{MultiIndex::zero(s), Rational(1)}}; }

Stencil stencil_nabla(int s, const MultiIndex& xi) {
    Stencil t;
    t[MultiIndex::zero(s)] = Rational(1);
    t[xi] += Rational(-1);
    return t;
}

Stencil stencil_mul(const Stencil& a, const Stencil& b) {
    Stencil out;
    for (const auto& [ba, va] : a)
        for (const auto& [bb, vb] : b) out[ba + bb] += va * vb;
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

}  // namespace

DifferenceOperator DifferenceOperator::nabla(int s, int n) {
    DifferenceOperator T(s, n, s * n);
    for (int l = 0; l < s; ++l)
        for (int i = 0; i < n; ++i) {
            const int row = l * n + i;
            RatMatrix at0 = T.tap(MultiIndex::zero(s));
            at0(row, i) += Rational(1);
            T.set_tap(MultiIndex::zero(s), std::move(at0));
            RatMatrix atE = T.tap(MultiIndex::unit(s, l));
            atE(row, i) += Rational(-1);
            T.set_tap(MultiIndex::unit(s, l), std::move(atE));
        }
    return T;
}

long nabla_k_row_count(int s, int k) {
    // C(s+k-1, s-1)
    long num = 1, den = 1;
    for (int i = 1; i <= s - 1; ++i) {
        num *= s + k - i;
        den *= i;
    }
    return num / den;
}

DifferenceOperator DifferenceOperator::nabla_k(int s, int k) {
    if (k < 1) throw std::invalid_argument("nabla_k: k must be positive");
    std::vector<std::vector<int>> mus;
    std::vector<int> mu(s, 0);
    // enumerate |mu| = k, then sort descending lexicographically
    auto rec = [&](auto&& self, int pos, int rest) -> void {
        if (pos == s - 1) {
            mu[pos] = rest;
            mus.push_back(mu);
            return;
        }
        for (int v = rest; v >= 0; --v) {
            mu[pos] = v;
            self(self, pos + 1, rest - v);
        }
    };
    rec(rec, 0, k);
    std::sort(mus.begin(), mus.end(), std::greater<>());
    DifferenceOperator T(s, 1, static_cast<int>(mus.size()));
    for (std::size_t row = 0; row < mus.size(); ++row) {
        Stencil st = stencil_delta(s);
        for (int l = 0; l < s; ++l)
            for (int c = 0; c < mus[row][l]; ++c) st = stencil_mul(st, stencil_nabla(s, MultiIndex::unit(s, l)));
        for (const auto& [off, coef] : st) {
            RatMatrix block = T.tap(off);
            block(static_cast<int>(row), 0) += coef;
            T.set_tap(off, std::move(block));
        }
    }
    if (static_cast<long>(mus.size()) != nabla_k_row_count(s, k))
        throw std::logic_error("nabla_k: row count mismatch");
    return T;
}

DifferenceOperator DifferenceOperator::directional(int s, const std::vector<MultiIndex>& dirs) {
    if (dirs.empty()) throw std::invalid_argument("directional: at least one direction required");
    DifferenceOperator T(s, 1, static_cast<int>(dirs.size()));
    for (std::size_t row = 0; row < dirs.size(); ++row) {
        for (const auto& [off, coef] : stencil_nabla(s, dirs[row])) {
            RatMatrix block = T.tap(off);
            block(static_cast<int>(row), 0) += coef;
            T.set_tap(off, std::move(block));
        }
    }
    return T;
}

DifferenceOperator DifferenceOperator::directional_pairs(int s, const std::vector<MultiIndex>& dirs) {
    if (dirs.size() < 2) throw std::invalid_argument("directional_pairs: at least two directions required");
    std::vector<Stencil> rows;
    for (std::size_t i = 0; i < dirs.size(); ++i)
        for (std::size_t j = i + 1; j < dirs.size(); ++j)
            rows.push_back(stencil_mul(stencil_nabla(s, dirs[i]), stencil_nabla(s, dirs[j])));
    DifferenceOperator T(s, 1, static_cast<int>(rows.size()));
    for (std::size_t row = 0; row < rows.size(); ++row)
        for (const auto& [off, coef] : rows[row]) {
            RatMatrix block = T.tap(off);
            block(static_cast<int>(row), 0) += coef;
            T.set_tap(off, std::move(block));
        }
    return T;
}

DifferenceOperator DifferenceOperator::gradient_identity_block() {
    DifferenceOperator T(2, 2, 4);
    RatMatrix at0(4, 2), atE1(4, 2), atE2(4, 2);
    at0(0, 0) = Rational(1);   // nabla_1 c1
    at0(1, 1) = Rational(1);   // c2
    at0(2, 0) = Rational(1);   // nabla_2 c1
    at0(3, 1) = Rational(1);   // c2
    atE1(0, 0) = Rational(-1);
    atE2(2, 0) = Rational(-1);
    T.set_tap(MultiIndex::zero(2), std::move(at0));
    T.set_tap(MultiIndex::unit(2, 0), std::move(atE1));
    T.set_tap(MultiIndex::unit(2, 1), std::move(atE2));
    return T;
}

void DifferenceOperator::set_tap(const MultiIndex& beta, RatMatrix block) {
    if (block.rows() != q_ || block.cols() != n_)
        throw std::invalid_argument("DifferenceOperator::set_tap: shape mismatch");
    if (block.is_zero())
        t_.erase(beta);
    else
        t_[beta] = std::move(block);
}

RatMatrix DifferenceOperator::tap(const MultiIndex& beta) const {
    auto it = t_.find(beta);
    if (it == t_.end()) return RatMatrix(q_, n_);
    return it->second;
}

long DifferenceOperator::stencil_extent() const {
    long ext = 0;
    for (const auto& [off, block] : t_)
        for (int i = 0; i < s_; ++i) ext = std::max(ext, std::abs(off[i]));
    return ext;
}

std::optional<std::vector<MultiIndex>> DifferenceOperator::first_order_directions() const {
    if (n_ != 1 || q_ == 0) return std::nullopt;
    const MultiIndex zero = MultiIndex::zero(s_);
    std::vector<MultiIndex> dirs(q_, zero);
    std::vector<int> plus(q_, 0), minus(q_, 0);
    for (const auto& [off, block] : t_)
        for (int j = 0; j < q_; ++j) {
            const Rational& c = block(j, 0);
            if (c.is_zero()) continue;
            if (off == zero && c == Rational(1))
                ++plus[j];
            else if (off != zero && c == Rational(-1)) {
                ++minus[j];
                dirs[j] = off;
            } else
                return std::nullopt;
        }
    for (int j = 0; j < q_; ++j)
        if (plus[j] != 1 || minus[j] != 1) return std::nullopt;
    return dirs;
}

Sequence DifferenceOperator::apply(const Sequence& c) const {
    if (c.dim() != s_ || c.size() != n_)
        throw std::invalid_argument("DifferenceOperator::apply: dimension mismatch");
    std::map<MultiIndex, RatVector> acc;
    for (const auto& [pos, cv] : c.entries())
        for (const auto& [off, block] : t_) {
            const MultiIndex alpha = pos + off;
            auto [it, fresh] = acc.try_emplace(alpha, q_);
            for (int j = 0; j < q_; ++j)
                for (int i = 0; i < n_; ++i)
                    if (!block(j, i).is_zero()) it->second[j] += block(j, i) * cv[i];
        }
    Sequence out(s_, q_);
    for (auto& [pos, v] : acc) out.set(pos, std::move(v));
    return out;
}

Sequence difference_apply(const DifferenceOperator& T, const Sequence& c) { return T.apply(c); }

namespace {

// One row of the linear system: sparse coefficients over the unknowns plus
// the right-hand side.
struct SysRow {
    std::map<int, Rational> coef;
    Rational rhs;
};

// Exact Gaussian elimination; unknown count nuk. Returns solution with free
// variables zero, or nullopt if inconsistent.
std::optional<std::vector<Rational>> solve_sparse(std::vector<SysRow>& rows, int nuk) {
    std::vector<int> pivot_of_col(nuk, -1);
    std::vector<std::map<int, Rational>> reduced;  // normalized pivot rows
    std::vector<Rational> reduced_rhs;
    std::vector<int> reduced_pivcol;
    for (auto& row : rows) {
        // reduce against existing pivots
        for (std::size_t k = 0; k < reduced.size(); ++k) {
            auto it = row.coef.find(reduced_pivcol[k]);
            if (it == row.coef.end() || it->second.is_zero()) continue;
            const Rational f = it->second;
            for (const auto& [c, v] : reduced[k]) {
                Rational& slot = row.coef[c];
                slot -= f * v;
                if (slot.is_zero()) row.coef.erase(c);
            }
            row.rhs -= f * reduced_rhs[k];
        }
        int piv = -1;
        for (const auto& [c, v] : row.coef)
            if (!v.is_zero()) {
                piv = c;
                break;
            }
        if (piv < 0) {
            if (!row.rhs.is_zero()) return std::nullopt;
            continue;
        }
        const Rational p = row.coef[piv];
        std::map<int, Rational> norm;
        for (const auto& [c, v] : row.coef)
            if (!v.is_zero()) norm[c] = v / p;
        Rational nrhs = row.rhs / p;
        // back-substitute into earlier pivot rows
        for (std::size_t k = 0; k < reduced.size(); ++k) {
            auto it = reduced[k].find(piv);
            if (it == reduced[k].end()) continue;
            const Rational f = it->second;
            for (const auto& [c, v] : norm) {
                Rational& slot = reduced[k][c];
                slot -= f * v;
                if (slot.is_zero()) reduced[k].erase(c);
            }
            reduced_rhs[k] -= f * nrhs;
        }
        pivot_of_col[piv] = static_cast<int>(reduced.size());
        reduced.push_back(std::move(norm));
        reduced_rhs.push_back(std::move(nrhs));
        reduced_pivcol.push_back(piv);
    }
    std::vector<Rational> sol(nuk);
    for (std::size_t k = 0; k < reduced.size(); ++k) sol[reduced_pivcol[k]] = reduced_rhs[k];
    return sol;
}

}  // namespace

Box default_difference_support(const Mask& A, const DifferenceOperator& T, int r) {
    const Mask Ar = iterate_mask(A, r);
    auto box = Ar.support_box();
    if (!box) throw std::invalid_argument("default_difference_support: zero mask");
    return box->expanded(T.stencil_extent() + 1);
}

Mask construct_difference_mask(const Mask& A, const DifferenceOperator& T, int r, const Box& support_box) {
    if (A.cols() != T.input_size() || A.dim() != T.dim())
        throw std::invalid_argument("construct_difference_mask: dimension mismatch");
    const int s = A.dim();
    const int q = T.rows();
    const Mask Ar = iterate_mask(A, r);
    const DilationMatrix Mr = Ar.dilation();
    const std::vector<MultiIndex> box_pts = support_box.points();
    std::map<MultiIndex, int> box_index;
    for (std::size_t i = 0; i < box_pts.size(); ++i) box_index[box_pts[i]] = static_cast<int>(i);
    const int nuk = static_cast<int>(box_pts.size()) * q;

    Mask B(s, q, q, Mr);
    const std::vector<MultiIndex> reps = coset_representatives(A.dilation(), r);
    for (int j = 0; j < q; ++j) {
        std::vector<SysRow> rows;
        for (const MultiIndex& rep : reps) {
            for (int ch = 0; ch < A.rows(); ++ch) {
                const Sequence e = Sequence::delta(s, A.rows(), rep, ch);
                const Sequence lhs = T.apply(apply_subdivision(Ar, e));
                const Sequence Te = T.apply(e);
                std::set<MultiIndex> outpos;
                for (const auto& [pos, v] : lhs.entries())
                    if (!v[j].is_zero()) outpos.insert(pos);
                for (const MultiIndex& alpha : box_pts)
                    for (const auto& [gamma, tv] : Te.entries()) outpos.insert(alpha + Mr.apply(gamma));
                for (const MultiIndex& pos : outpos) {
                    SysRow row;
                    for (const auto& [gamma, tv] : Te.entries()) {
                        const MultiIndex ap = pos - Mr.apply(gamma);
                        auto it = box_index.find(ap);
                        if (it == box_index.end()) continue;
                        for (int l = 0; l < q; ++l)
                            if (!tv[l].is_zero()) row.coef[it->second * q + l] += tv[l];
                    }
                    row.rhs = lhs.at(pos)[j];
                    rows.push_back(std::move(row));
                }
            }
        }
        auto sol = solve_sparse(rows, nuk);
        if (!sol) {
            bool ok = false;
            std::vector<std::pair<MultiIndex, Rational>> sums;
            if (A.rows() == 1 && A.cols() == 1) {
                SumRuleReport rep = check_sum_rules_order1(A);
                ok = rep.satisfied;
                sums = std::move(rep.coset_sums);
            }
            throw NoSolutionError(ok ? "construct_difference_mask: no solution in this support box"
                                     : "construct_difference_mask: sum rules of order 1 fail",
                                  ok, std::move(sums));
        }
        for (std::size_t bi = 0; bi < box_pts.size(); ++bi)
            for (int l = 0; l < q; ++l) {
                const Rational& v = (*sol)[bi * q + l];
                if (v.is_zero()) continue;
                RatMatrix mat = B.at(box_pts[bi]);
                mat(j, l) = v;
                B.set(box_pts[bi], std::move(mat));
            }
    }
    return B;
}

bool verify_intertwining(const Mask& A, const Mask& B, const DifferenceOperator& T, int r) {
    if (B.rows() != T.rows() || B.cols() != T.rows() || A.cols() != T.input_size()) return false;
    const Mask Ar = iterate_mask(A, r);
    if (!(B.dilation() == Ar.dilation())) return false;
    Box period = Box::hull(coset_representatives(A.dilation(), r));
    period = period.expanded(T.stencil_extent());
    for (const MultiIndex& beta : period.points())
        for (int ch = 0; ch < A.rows(); ++ch) {
            const Sequence e = Sequence::delta(A.dim(), A.rows(), beta, ch);
            const Sequence lhs = T.apply(apply_subdivision(Ar, e));
            const Sequence rhs = apply_subdivision(B, T.apply(e));
            if (!(lhs == rhs)) return false;
        }
    return true;
}

DifferenceScheme DifferenceScheme::make(Mask A, DifferenceOperator T, int r, Mask B, Provenance p) {
    if (!verify_intertwining(A, B, T, r))
        throw std::invalid_argument("DifferenceScheme: intertwining identity fails");
    return DifferenceScheme{std::move(A), std::move(T), r, std::move(B), p};
}

LpData build_lp_data_from_iterated(const Mask& Br, const DilationMatrix& M, int r, const MultiIndex& eps,
                                   int j) {
    std::vector<MultiIndex> kpts;
    for (const auto& [pos, mat] : Br.entries()) {
        CosetSplit split = coset_decompose(pos, M, r);
        kpts.push_back(-split.beta);
    }
    if (kpts.empty()) kpts.push_back(MultiIndex::zero(Br.dim()));
    LpData data;
    data.K = Box::hull(kpts);
    data.betas = data.K.points();
    data.q = Br.cols();
    data.d.resize(data.betas.size() * static_cast<std::size_t>(data.q));
    const DilationMatrix Mr = r == 1 ? M : M.power(r);
    for (std::size_t bi = 0; bi < data.betas.size(); ++bi) {
        const RatMatrix mat = Br.at(eps - Mr.apply(data.betas[bi]));
        for (int mu = 0; mu < data.q; ++mu) data.d[bi * data.q + mu] = mat(j, mu);
    }
    return data;
}

LpData build_lp_data(const Mask& B, int r, const MultiIndex& eps, int j) {
    return build_lp_data_from_iterated(iterate_mask(B, r), B.dilation(), r, eps, j);
}

}  // namespace subdiv
