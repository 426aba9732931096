#pragma once

#include <vector>

#include "subdiv/multi_index.hpp"
#include "subdiv/rational.hpp"

namespace subdiv {

/// Integer dilation matrix M with |det M| >= 2 and all eigenvalues larger
/// than one in modulus. Expansiveness is established at construction by
/// checking that some power of M^-1 has induced infinity-norm below 1
/// (sufficient: the norm is submultiplicative), avoiding any floating point.
class DilationMatrix {
public:
    /// entries row-major, size s*s. Throws std::invalid_argument if the
    /// matrix is singular, |det| < 2, or the expansiveness test fails.
    DilationMatrix(int s, std::vector<long> entries_row_major);

    int dim() const { return s_; }
    long entry(int i, int j) const { return m_[static_cast<std::size_t>(i) * s_ + j]; }
    long det() const { return det_; }
    long det_abs() const { return det_ < 0 ? -det_ : det_; }

    MultiIndex apply(const MultiIndex& v) const;

    /// M^r as a dilation matrix (r >= 1).
    DilationMatrix power(int r) const;

    /// M^-1 v, exact.
    RatVector apply_inverse(const RatVector& v) const;
    RatVector apply_inverse(const MultiIndex& v) const;

    bool operator==(const DilationMatrix& o) const { return s_ == o.s_ && m_ == o.m_; }

    std::string str() const;  // "a,b,c,d" row-major

private:
    int s_;
    std::vector<long> m_;
    long det_;
    std::vector<Rational> inv_;  // M^-1 row-major
};

/// Canonical representatives of Z^s / M^r Z^s: the |det M|^r integer points
/// of the half-open parallelepiped M^r [0,1)^s, in lexicographic order.
/// Each residue class meets the parallelepiped in exactly one point.
std::vector<MultiIndex> coset_representatives(const DilationMatrix& M, int r);

/// Splits alpha = eps + M^r beta with eps the canonical representative.
struct CosetSplit {
    MultiIndex eps;
    MultiIndex beta;
};
CosetSplit coset_decompose(const MultiIndex& alpha, const DilationMatrix& M, int r);

}  // namespace subdiv
