#pragma once

#include <map>
#include <optional>
#include <vector>

#include "subdiv/lattice.hpp"
#include "subdiv/multi_index.hpp"

namespace subdiv {

/// Finitely supported vector sequence Z^s -> Q^n. Zero entries are pruned,
/// so support() is exact.
class Sequence {
public:
    Sequence(int s, int n) : s_(s), n_(n) {}

    int dim() const { return s_; }
    int size() const { return n_; }

    void set(const MultiIndex& pos, RatVector v);
    /// Zero vector outside the stored support.
    RatVector at(const MultiIndex& pos) const;
    const std::map<MultiIndex, RatVector>& entries() const { return e_; }
    bool operator==(const Sequence& o) const { return s_ == o.s_ && n_ == o.n_ && e_ == o.e_; }

    static Sequence delta(int s, int n, const MultiIndex& pos, int channel);

private:
    int s_, n_;
    std::map<MultiIndex, RatVector> e_;
};

/// Finitely supported matrix mask Z^s -> Q^{n x m}, carrying its dilation
/// matrix. Lookups outside the support return the zero matrix; explicit
/// zeros are pruned on insertion so equality is exact entrywise equality.
class Mask {
public:
    Mask(int s, int n, int m, DilationMatrix dilation)
        : s_(s), n_(n), m_(m), dil_(std::move(dilation)) {}

    static Mask delta_identity(int s, int n, const DilationMatrix& dilation);

    int dim() const { return s_; }
    int rows() const { return n_; }
    int cols() const { return m_; }
    const DilationMatrix& dilation() const { return dil_; }

    void set(const MultiIndex& pos, RatMatrix value);
    void add(const MultiIndex& pos, const RatMatrix& value);
    RatMatrix at(const MultiIndex& pos) const;
    const std::map<MultiIndex, RatMatrix>& entries() const { return e_; }
    std::optional<Box> support_box() const;
    Mask scaled(const Rational& c) const;

    bool operator==(const Mask& o) const {
        return s_ == o.s_ && n_ == o.n_ && m_ == o.m_ && dil_ == o.dil_ && e_ == o.e_;
    }

private:
    int s_, n_, m_;
    DilationMatrix dil_;
    std::map<MultiIndex, RatMatrix> e_;
};

/// (S_A c)(alpha) = sum_beta A(alpha - M beta) c(beta).
Sequence apply_subdivision(const Mask& A, const Sequence& c);

/// Mask of the r-fold operator S_A^r, with dilation M^r. r = 0 gives
/// delta_{I_n}. The recursion composes one subdivision step on the left:
/// A^[k+1](gamma + M beta) += A(gamma) A^[k](beta).
Mask iterate_mask(const Mask& A, int r);

struct SumRuleReport {
    bool satisfied;
    std::vector<std::pair<MultiIndex, Rational>> coset_sums;  // one per representative
};
/// Order-1 sum rules of a scalar mask: all |det M| coset sums equal.
SumRuleReport check_sum_rules_order1(const Mask& a);

/// max over eps in Xi_r of the row-sum norm of sum_beta |B^[r](eps - M^r beta)|.
Rational operator_norm(const Mask& B, int r);

}  // namespace subdiv
