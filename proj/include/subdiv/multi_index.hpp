#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiv/rational.hpp"

namespace subdiv {

/// Point of Z^s. Ordered lexicographically; the dimension s is fixed per
/// analysis context and is checked on every binary operation.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<long> coords) : c_(std::move(coords)) {}
    MultiIndex(std::initializer_list<long> coords) : c_(coords) {}

    static MultiIndex zero(int s) { return MultiIndex(std::vector<long>(s, 0)); }
    static MultiIndex unit(int s, int axis) {
        std::vector<long> v(s, 0);
        v.at(axis) = 1;
        return MultiIndex(std::move(v));
    }

    int dim() const { return static_cast<int>(c_.size()); }
    long operator[](int i) const { return c_[i]; }
    const std::vector<long>& coords() const { return c_; }

    MultiIndex operator+(const MultiIndex& o) const {
        check(o);
        std::vector<long> v(c_);
        for (int i = 0; i < dim(); ++i) v[i] += o.c_[i];
        return MultiIndex(std::move(v));
    }
    MultiIndex operator-(const MultiIndex& o) const {
        check(o);
        std::vector<long> v(c_);
        for (int i = 0; i < dim(); ++i) v[i] -= o.c_[i];
        return MultiIndex(std::move(v));
    }
    MultiIndex operator-() const {
        std::vector<long> v(c_);
        for (auto& x : v) x = -x;
        return MultiIndex(std::move(v));
    }

    bool operator==(const MultiIndex& o) const { return c_ == o.c_; }
    auto operator<=>(const MultiIndex& o) const { return c_ <=> o.c_; }

    /// "(a,b,...)" -- the form used by all file formats and reports.
    std::string str() const;

private:
    void check(const MultiIndex& o) const {
        if (o.dim() != dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    }
    std::vector<long> c_;
};

/// Axis-aligned box {lo, ..., hi} in Z^s (inclusive bounds).
struct Box {
    MultiIndex lo, hi;

    int dim() const { return lo.dim(); }
    bool contains(const MultiIndex& p) const {
        for (int i = 0; i < dim(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
    long volume() const {
        long v = 1;
        for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i] + 1;
        return v;
    }
    Box expanded(long margin) const {
        std::vector<long> l(lo.coords()), h(hi.coords());
        for (auto& x : l) x -= margin;
        for (auto& x : h) x += margin;
        return Box{MultiIndex(std::move(l)), MultiIndex(std::move(h))};
    }
    Box united(const Box& o) const {
        std::vector<long> l(lo.coords()), h(hi.coords());
        for (int i = 0; i < dim(); ++i) {
            l[i] = std::min(l[i], o.lo[i]);
            h[i] = std::max(h[i], o.hi[i]);
        }
        return Box{MultiIndex(std::move(l)), MultiIndex(std::move(h))};
    }
    /// All integer points, lexicographic order.
    std::vector<MultiIndex> points() const;

    static Box hull(const std::vector<MultiIndex>& pts);
};

/// Dense rows x cols matrix over Rational. Small (n, m <= 4 in practice).
class RatMatrix {
public:
    RatMatrix() : rows_(0), cols_(0) {}
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

    static RatMatrix identity(int n) {
        RatMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = Rational(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }
    RatMatrix operator+(const RatMatrix& o) const {
        RatMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }
    RatMatrix operator*(const RatMatrix& o) const {
        RatMatrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                if ((*this)(i, k).is_zero()) continue;
                for (int j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
            }
        return r;
    }
    RatMatrix scaled(const Rational& c) const {
        RatMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
        return r;
    }
    bool operator==(const RatMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

private:
    int rows_, cols_;
    std::vector<Rational> a_;
};

using RatVector = std::vector<Rational>;

}  // namespace subdiv
