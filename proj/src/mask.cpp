#include "subdiv/mask.hpp"

#include <stdexcept>

namespace subdiv {

void Sequence::set(const MultiIndex& pos, RatVector v) {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("Sequence::set: size mismatch");
    bool zero = true;
    for (const auto& x : v)
        if (!x.is_zero()) {
            zero = false;
            break;
        }
    if (zero)
        e_.erase(pos);
    else
        e_[pos] = std::move(v);
}

RatVector Sequence::at(const MultiIndex& pos) const {
    auto it = e_.find(pos);
    if (it == e_.end()) return RatVector(n_);
    return it->second;
}

Sequence Sequence::delta(int s, int n, const MultiIndex& pos, int channel) {
    Sequence c(s, n);
    RatVector v(n);
    v.at(channel) = Rational(1);
    c.set(pos, std::move(v));
    return c;
}

Mask Mask::delta_identity(int s, int n, const DilationMatrix& dilation) {
    Mask m(s, n, n, dilation);
    m.set(MultiIndex::zero(s), RatMatrix::identity(n));
    return m;
}

void Mask::set(const MultiIndex& pos, RatMatrix value) {
    if (value.rows() != n_ || value.cols() != m_) throw std::invalid_argument("Mask::set: shape mismatch");
    if (value.is_zero())
        e_.erase(pos);
    else
        e_[pos] = std::move(value);
}

void Mask::add(const MultiIndex& pos, const RatMatrix& value) {
    auto it = e_.find(pos);
    if (it == e_.end()) {
        set(pos, value);
    } else {
        RatMatrix sum = it->second + value;
        if (sum.is_zero())
            e_.erase(it);
        else
            it->second = std::move(sum);
    }
}

RatMatrix Mask::at(const MultiIndex& pos) const {
    auto it = e_.find(pos);
    if (it == e_.end()) return RatMatrix(n_, m_);
    return it->second;
}

std::optional<Box> Mask::support_box() const {
    if (e_.empty()) return std::nullopt;
    std::vector<MultiIndex> pts;
    pts.reserve(e_.size());
    for (const auto& [pos, mat] : e_) pts.push_back(pos);
    return Box::hull(pts);
}

Mask Mask::scaled(const Rational& c) const {
    Mask out(s_, n_, m_, dil_);
    if (c.is_zero()) return out;
    for (const auto& [pos, mat] : e_) out.set(pos, mat.scaled(c));
    return out;
}

Sequence apply_subdivision(const Mask& A, const Sequence& c) {
    if (A.cols() != c.size() || A.dim() != c.dim())
        throw std::invalid_argument("apply_subdivision: dimension mismatch");
    std::map<MultiIndex, RatVector> acc;
    for (const auto& [beta, cv] : c.entries()) {
        const MultiIndex shift = A.dilation().apply(beta);
        for (const auto& [pos, mat] : A.entries()) {
            const MultiIndex alpha = pos + shift;
            auto [it, fresh] = acc.try_emplace(alpha, A.rows());
            RatVector& out = it->second;
            for (int i = 0; i < A.rows(); ++i)
                for (int j = 0; j < A.cols(); ++j)
                    if (!mat(i, j).is_zero()) out[i] += mat(i, j) * cv[j];
        }
    }
    Sequence result(A.dim(), A.rows());
    for (auto& [pos, v] : acc) result.set(pos, std::move(v));
    return result;
}

Mask iterate_mask(const Mask& A, int r) {
    if (A.rows() != A.cols()) throw std::invalid_argument("iterate_mask: mask must be square");
    if (r < 0) throw std::invalid_argument("iterate_mask: r must be nonnegative");
    Mask cur = Mask::delta_identity(A.dim(), A.rows(), A.dilation());
    for (int k = 0; k < r; ++k) {
        Mask next(A.dim(), A.rows(), A.cols(), A.dilation());
        for (const auto& [beta, Ab] : cur.entries()) {
            const MultiIndex shift = A.dilation().apply(beta);
            for (const auto& [gamma, Ag] : A.entries()) next.add(gamma + shift, Ag * Ab);
        }
        cur = std::move(next);
    }
    if (r >= 1) {
        Mask out(A.dim(), A.rows(), A.cols(), A.dilation().power(r));
        for (const auto& [pos, mat] : cur.entries()) out.set(pos, mat);
        return out;
    }
    return cur;
}

SumRuleReport check_sum_rules_order1(const Mask& a) {
    if (a.rows() != 1 || a.cols() != 1)
        throw std::invalid_argument("check_sum_rules_order1: scalar mask required");
    std::map<MultiIndex, Rational> sums;
    for (const MultiIndex& eps : coset_representatives(a.dilation(), 1)) sums[eps] = Rational(0);
    for (const auto& [pos, mat] : a.entries()) {
        CosetSplit split = coset_decompose(pos, a.dilation(), 1);
        sums[split.eps] += mat(0, 0);
    }
    SumRuleReport rep;
    rep.satisfied = true;
    const Rational& first = sums.begin()->second;
    for (const auto& [eps, sum] : sums) {
        if (sum != first) rep.satisfied = false;
        rep.coset_sums.emplace_back(eps, sum);
    }
    return rep;
}

Rational operator_norm(const Mask& B, int r) {
    if (B.rows() != B.cols()) throw std::invalid_argument("operator_norm: mask must be square");
    const Mask Br = iterate_mask(B, r);
    std::map<MultiIndex, RatMatrix> acc;  // per coset: sum of |B^[r]| blocks
    for (const auto& [pos, mat] : Br.entries()) {
        CosetSplit split = coset_decompose(pos, B.dilation(), r);
        auto [it, fresh] = acc.try_emplace(split.eps, B.rows(), B.cols());
        for (int i = 0; i < B.rows(); ++i)
            for (int j = 0; j < B.cols(); ++j) it->second(i, j) += mat(i, j).abs();
    }
    Rational best(0);
    for (const auto& [eps, mat] : acc)
        for (int i = 0; i < B.rows(); ++i) {
            Rational row(0);
            for (int j = 0; j < B.cols(); ++j) row += mat(i, j);
            if (row > best) best = row;
        }
    return best;
}

}  // namespace subdiv
