#include "subdiv/multi_index.hpp"

#include <sstream>

namespace subdiv {

std::string MultiIndex::str() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim(); ++i) {
        if (i) os << ',';
        os << c_[i];
    }
    os << ')';
    return os.str();
}

std::vector<MultiIndex> Box::points() const {
    std::vector<MultiIndex> out;
    out.reserve(static_cast<std::size_t>(volume()));
    std::vector<long> cur(lo.coords());
    const int s = dim();
    for (;;) {
        out.emplace_back(cur);
        int i = s - 1;
        while (i >= 0) {
            if (++cur[i] <= hi[i]) break;
            cur[i] = lo[i];
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

Box Box::hull(const std::vector<MultiIndex>& pts) {
    if (pts.empty()) throw std::invalid_argument("Box::hull: empty point set");
    std::vector<long> lo(pts[0].coords()), hi(pts[0].coords());
    for (const auto& p : pts)
        for (int i = 0; i < p.dim(); ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    return Box{MultiIndex(std::move(lo)), MultiIndex(std::move(hi))};
}

}  // namespace subdiv
