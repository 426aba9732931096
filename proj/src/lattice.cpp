#include "subdiv/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace subdiv {

namespace {

// Exact determinant by fraction-free expansion; s is tiny.
long det_recursive(const std::vector<long>& m, std::vector<int> rows, std::vector<int> cols, int s) {
    if (rows.size() == 1) return m[static_cast<std::size_t>(rows[0]) * s + cols[0]];
    long acc = 0;
    long sign = 1;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        long pivot = m[static_cast<std::size_t>(rows[0]) * s + cols[k]];
        if (pivot != 0) {
            std::vector<int> r2(rows.begin() + 1, rows.end());
            std::vector<int> c2;
            for (std::size_t t = 0; t < cols.size(); ++t)
                if (t != k) c2.push_back(cols[t]);
            acc += sign * pivot * det_recursive(m, r2, c2, s);
        }
        sign = -sign;
    }
    return acc;
}

std::vector<Rational> invert(const std::vector<long>& m, int s) {
    // Gauss-Jordan on [M | I] in exact rationals.
    std::vector<std::vector<Rational>> a(s, std::vector<Rational>(2 * s));
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) a[i][j] = Rational(m[static_cast<std::size_t>(i) * s + j]);
        a[i][s + i] = Rational(1);
    }
    for (int col = 0; col < s; ++col) {
        int piv = -1;
        for (int i = col; i < s; ++i)
            if (!a[i][col].is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0) throw std::invalid_argument("DilationMatrix: singular matrix");
        std::swap(a[col], a[piv]);
        Rational p = a[col][col];
        for (auto& x : a[col]) x /= p;
        for (int i = 0; i < s; ++i) {
            if (i == col || a[i][col].is_zero()) continue;
            Rational f = a[i][col];
            for (int j = 0; j < 2 * s; ++j) a[i][j] -= f * a[col][j];
        }
    }
    std::vector<Rational> inv(static_cast<std::size_t>(s) * s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) inv[static_cast<std::size_t>(i) * s + j] = a[i][s + j];
    return inv;
}

Rational row_sum_norm(const std::vector<Rational>& m, int s) {
    Rational best(0);
    for (int i = 0; i < s; ++i) {
        Rational sum(0);
        for (int j = 0; j < s; ++j) sum += m[static_cast<std::size_t>(i) * s + j].abs();
        if (sum > best) best = sum;
    }
    return best;
}

std::vector<Rational> rat_mat_mul(const std::vector<Rational>& a, const std::vector<Rational>& b, int s) {
    std::vector<Rational> c(static_cast<std::size_t>(s) * s);
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < s; ++k) {
            const Rational& x = a[static_cast<std::size_t>(i) * s + k];
            if (x.is_zero()) continue;
            for (int j = 0; j < s; ++j)
                c[static_cast<std::size_t>(i) * s + j] += x * b[static_cast<std::size_t>(k) * s + j];
        }
    return c;
}

}  // namespace

DilationMatrix::DilationMatrix(int s, std::vector<long> entries) : s_(s), m_(std::move(entries)) {
    if (s_ < 1 || m_.size() != static_cast<std::size_t>(s_) * s_)
        throw std::invalid_argument("DilationMatrix: bad shape");
    std::vector<int> idx(s_);
    for (int i = 0; i < s_; ++i) idx[i] = i;
    det_ = det_recursive(m_, idx, idx, s_);
    if (det_ == 0) throw std::invalid_argument("DilationMatrix: singular matrix");
    if (det_abs() < 2) throw std::invalid_argument("DilationMatrix: |det M| must be at least 2");
    inv_ = invert(m_, s_);
    // spectral radius of M^-1 below 1 <=> some power has row-sum norm < 1
    std::vector<Rational> p = inv_;
    bool expanding = false;
    for (int k = 1; k <= 64; ++k) {
        if (row_sum_norm(p, s_) < Rational(1)) {
            expanding = true;
            break;
        }
        p = rat_mat_mul(p, inv_, s_);
    }
    if (!expanding) throw std::invalid_argument("DilationMatrix: expansiveness test failed (k <= 64)");
}

MultiIndex DilationMatrix::apply(const MultiIndex& v) const {
    std::vector<long> out(s_, 0);
    for (int i = 0; i < s_; ++i)
        for (int j = 0; j < s_; ++j) out[i] += entry(i, j) * v[j];
    return MultiIndex(std::move(out));
}

DilationMatrix DilationMatrix::power(int r) const {
    if (r < 1) throw std::invalid_argument("DilationMatrix::power: r must be positive");
    std::vector<long> acc(m_);
    for (int k = 1; k < r; ++k) {
        std::vector<long> next(static_cast<std::size_t>(s_) * s_, 0);
        for (int i = 0; i < s_; ++i)
            for (int t = 0; t < s_; ++t) {
                long x = acc[static_cast<std::size_t>(i) * s_ + t];
                if (x == 0) continue;
                for (int j = 0; j < s_; ++j) next[static_cast<std::size_t>(i) * s_ + j] += x * entry(t, j);
            }
        acc = std::move(next);
    }
    return DilationMatrix(s_, std::move(acc));
}

RatVector DilationMatrix::apply_inverse(const RatVector& v) const {
    RatVector out(s_);
    for (int i = 0; i < s_; ++i)
        for (int j = 0; j < s_; ++j) out[i] += inv_[static_cast<std::size_t>(i) * s_ + j] * v[j];
    return out;
}

RatVector DilationMatrix::apply_inverse(const MultiIndex& v) const {
    RatVector rv(s_);
    for (int i = 0; i < s_; ++i) rv[i] = Rational(v[i]);
    return apply_inverse(rv);
}

std::string DilationMatrix::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < m_.size(); ++i) {
        if (i) os << ',';
        os << m_[i];
    }
    return os.str();
}

std::vector<MultiIndex> coset_representatives(const DilationMatrix& M, int r) {
    if (r < 1) throw std::invalid_argument("coset_representatives: r must be positive");
    const DilationMatrix Mr = r == 1 ? M : M.power(r);
    const int s = M.dim();
    // bounding box of the parallelepiped corners M^r {0,1}^s
    std::vector<long> lo(s, 0), hi(s, 0);
    const long corners = 1L << s;
    for (long mask = 0; mask < corners; ++mask) {
        std::vector<long> t(s);
        for (int i = 0; i < s; ++i) t[i] = (mask >> i) & 1;
        MultiIndex c = Mr.apply(MultiIndex(std::move(t)));
        for (int i = 0; i < s; ++i) {
            lo[i] = std::min(lo[i], c[i]);
            hi[i] = std::max(hi[i], c[i]);
        }
    }
    for (int i = 0; i < s; ++i) {
        --lo[i];
        ++hi[i];
    }
    Box scan{MultiIndex(std::move(lo)), MultiIndex(std::move(hi))};
    std::vector<MultiIndex> reps;
    const Rational one(1);
    for (const MultiIndex& x : scan.points()) {
        RatVector t = Mr.apply_inverse(x);
        bool inside = true;
        for (int i = 0; i < s; ++i)
            if (t[i].sign() < 0 || t[i] >= one) {
                inside = false;
                break;
            }
        if (inside) reps.push_back(x);
    }
    std::sort(reps.begin(), reps.end());
    long expected = 1;
    for (int k = 0; k < r; ++k) expected *= M.det_abs();
    if (static_cast<long>(reps.size()) != expected)
        throw std::logic_error("coset_representatives: unexpected representative count");
    return reps;
}

CosetSplit coset_decompose(const MultiIndex& alpha, const DilationMatrix& M, int r) {
    const DilationMatrix Mr = r == 1 ? M : M.power(r);
    RatVector t = Mr.apply_inverse(alpha);
    std::vector<long> beta(M.dim());
    for (int i = 0; i < M.dim(); ++i) beta[i] = t[i].floor().to_long();
    MultiIndex b(std::move(beta));
    MultiIndex eps = alpha - Mr.apply(b);
    return CosetSplit{std::move(eps), std::move(b)};
}

}  // namespace subdiv
