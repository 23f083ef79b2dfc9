#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace sciencemap {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// 2-D positions for a set of nodes, canonicalized so that golden files are
// stable: centroid at the origin, principal axis along x, reflection signs
// fixed by the third moment.
struct MapLayout {
    std::vector<std::string> ids; // may be empty when nodes are plain indices
    std::vector<Vec2> positions;
    bool converged = false;
    double objective_value = 0.0;
    std::size_t iterations = 0;
    std::vector<double> objective_trace; // optimized objective per iteration

    std::size_t size() const { return positions.size(); }
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double mean_pairwise_distance(const std::vector<Vec2>& pos) {
    const std::size_t n = pos.size();
    if (n < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) sum += distance(pos[i], pos[j]);
    return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

namespace detail {

inline void center(std::vector<Vec2>& pos) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pos) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(pos.size());
    cy /= static_cast<double>(pos.size());
    for (auto& p : pos) {
        p.x -= cx;
        p.y -= cy;
    }
}

// Fix the sign of one axis: positive skew, falling back to the first node
// with a clearly nonzero coordinate.
template <typename Get>
inline bool needs_flip(const std::vector<Vec2>& pos, Get get) {
    double skew = 0.0;
    for (const auto& p : pos) {
        double v = get(p);
        skew += v * v * v;
    }
    if (std::abs(skew) > 1e-9) return skew < 0.0;
    for (const auto& p : pos) {
        double v = get(p);
        if (std::abs(v) > 1e-9) return v < 0.0;
    }
    return false;
}

} // namespace detail

inline void canonicalize(std::vector<Vec2>& pos) {
    if (pos.empty()) return;
    detail::center(pos);

    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (const auto& p : pos) {
        cxx += p.x * p.x;
        cxy += p.x * p.y;
        cyy += p.y * p.y;
    }
    if (cxx + cyy > 0.0) {
        double theta = 0.5 * std::atan2(2.0 * cxy, cxx - cyy);
        double c = std::cos(theta), s = std::sin(theta);
        for (auto& p : pos) {
            // rotate by -theta: principal axis to x
            double nx = c * p.x + s * p.y;
            double ny = -s * p.x + c * p.y;
            p.x = nx;
            p.y = ny;
        }
    }
    if (detail::needs_flip(pos, [](const Vec2& p) { return p.x; }))
        for (auto& p : pos) p.x = -p.x;
    if (detail::needs_flip(pos, [](const Vec2& p) { return p.y; }))
        for (auto& p : pos) p.y = -p.y;
}

} // namespace sciencemap
