#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "sciencemap/errors.hpp"
#include "sciencemap/layout.hpp"
#include "sciencemap/rng.hpp"
#include "sciencemap/similarity.hpp"

namespace sciencemap {

namespace detail {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }

    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }

    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline bool is_connected(const SimilarityMatrix& sim) {
    if (sim.size() < 2) return true;
    UnionFind uf(sim.size());
    for (const auto& [i, j, w] : sim.sorted_entries()) {
        (void)w;
        uf.unite(i, j);
    }
    std::size_t root = uf.find(0);
    for (std::size_t i = 1; i < sim.size(); ++i)
        if (uf.find(i) != root) return false;
    return true;
}

// Sum of squared pairwise distances, O(n) via the variance identity.
inline double sum_sq_all_pairs(const std::vector<Vec2>& pos) {
    double sx = 0, sy = 0, sq = 0;
    for (const auto& p : pos) {
        sx += p.x;
        sy += p.y;
        sq += p.x * p.x + p.y * p.y;
    }
    double n = static_cast<double>(pos.size());
    return n * sq - (sx * sx + sy * sy);
}

} // namespace detail

// Minimize Σ_{i<j} s_ij·d_ij² subject to mean pairwise distance 1, by
// iterative majorization: each step solves the weighted-Laplacian system of
// the quadratic term against a linearized distance-sum term, then rescales
// back onto the constraint surface. Disconnected inputs are tied together
// with a tiny uniform weight on every pair so the step system stays
// nonsingular; connected inputs are solved as given.
inline MapLayout vos_layout(const SimilarityMatrix& sim, std::uint64_t seed = 1,
                            std::size_t max_iter = 10000, double tol = 1e-6) {
    const std::size_t n = sim.size();
    if (n < 2) throw Degenerate(n);

    const auto entries = sim.sorted_entries();
    double eps = 0.0;
    if (!detail::is_connected(sim) || entries.empty()) {
        double mean_w = 1.0;
        if (!entries.empty()) {
            double sum = 0.0;
            for (const auto& [i, j, w] : entries) {
                (void)i;
                (void)j;
                sum += w;
            }
            mean_w = sum / static_cast<double>(entries.size());
        }
        eps = 1e-3 * mean_w;
    }

    // Laplacian of the (augmented) weights, one node pinned at the origin.
    Eigen::MatrixXd V = Eigen::MatrixXd::Constant(n, n, -eps);
    for (std::size_t i = 0; i < n; ++i) V(i, i) = eps * static_cast<double>(n - 1);
    for (const auto& [i, j, w] : entries) {
        V(i, j) -= w;
        V(j, i) -= w;
        V(i, i) += w;
        V(j, j) += w;
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(V.topLeftCorner(n - 1, n - 1));

    Rng rng(seed);
    std::vector<Vec2> pos(n);
    for (auto& p : pos) {
        p.x = rng.next_double(-0.5, 0.5);
        p.y = rng.next_double(-0.5, 0.5);
    }
    double d0 = mean_pairwise_distance(pos);
    if (d0 > 0.0)
        for (auto& p : pos) {
            p.x /= d0;
            p.y /= d0;
        }

    auto objective = [&](const std::vector<Vec2>& z) {
        double e = 0.0;
        for (const auto& [i, j, w] : entries) {
            double dx = z[i].x - z[j].x, dy = z[i].y - z[j].y;
            e += w * (dx * dx + dy * dy);
        }
        if (eps > 0.0) e += eps * detail::sum_sq_all_pairs(z);
        return e;
    };

    MapLayout out;
    Eigen::MatrixXd rhs(n - 1, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < max_iter; ++it) {
        double e = objective(pos);
        out.objective_trace.push_back(e);
        if (it > 0 && std::abs(prev - e) <= tol * std::max(prev, 1e-300)) {
            out.converged = true;
            break;
        }
        prev = e;

        double u = 4.0 * e / (static_cast<double>(n) * static_cast<double>(n - 1));
        for (std::size_t i = 0; i + 1 < n; ++i) rhs(i, 0) = rhs(i, 1) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double bx = 0.0, by = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                double dx = pos[i].x - pos[j].x, dy = pos[i].y - pos[j].y;
                double d = std::hypot(dx, dy);
                if (d < 1e-12) continue;
                bx += dx / d;
                by += dy / d;
            }
            if (i + 1 < n) {
                rhs(i, 0) = 0.5 * u * bx;
                rhs(i, 1) = 0.5 * u * by;
            }
        }
        Eigen::MatrixXd x = solver.solve(rhs);
        std::vector<Vec2> next(n);
        for (std::size_t i = 0; i + 1 < n; ++i) next[i] = {x(i, 0), x(i, 1)};
        next[n - 1] = {0.0, 0.0};

        double d = mean_pairwise_distance(next);
        if (d < 1e-300) break; // fully collapsed: give up, converged stays false
        for (auto& p : next) {
            p.x /= d;
            p.y /= d;
        }
        pos = std::move(next);
    }

    canonicalize(pos);
    out.positions = std::move(pos);
    out.iterations = out.objective_trace.size();
    double e = 0.0;
    for (const auto& [i, j, w] : entries) {
        double dx = out.positions[i].x - out.positions[j].x;
        double dy = out.positions[i].y - out.positions[j].y;
        e += w * (dx * dx + dy * dy);
    }
    out.objective_value = e;
    return out;
}

struct Clustering {
    std::vector<int> labels; // dense cluster ids from 1
    double resolution = 1.0;
    double quality = 0.0;
    int cluster_count = 0;
};

// V(c) = Σ_{i<j, same cluster} (s_ij − γ), evaluated from scratch in a
// deterministic order.
inline double cluster_quality(const SimilarityMatrix& sim, const std::vector<int>& labels,
                              double gamma) {
    double v = 0.0;
    for (const auto& [i, j, w] : sim.sorted_entries())
        if (labels[i] == labels[j]) v += w;
    std::map<int, long long> sizes;
    for (int c : labels) ++sizes[c];
    for (const auto& [c, sz] : sizes) {
        (void)c;
        v -= gamma * 0.5 * static_cast<double>(sz) * static_cast<double>(sz - 1);
    }
    return v;
}

namespace detail {

struct MoveState {
    std::vector<int> label;
    std::vector<long long> size; // indexed by label
    std::set<int> free_labels;

    int acquire_label() {
        int l = *free_labels.begin();
        free_labels.erase(free_labels.begin());
        return l;
    }
};

// One pass of single-node relocation in shuffled order; returns whether any
// node moved. Candidate targets are the clusters adjacent to the node plus
// an empty cluster (any other target is dominated by the empty one).
inline bool local_move_pass(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                            double gamma, MoveState& st, Rng& rng, double eps) {
    const std::size_t n = adj.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    bool moved = false;
    std::map<int, double> w_to;
    for (std::size_t v : order) {
        w_to.clear();
        for (const auto& [u, w] : adj[v]) w_to[st.label[u]] += w;
        int a = st.label[v];
        double base = w_to[a] - gamma * static_cast<double>(st.size[a] - 1);

        double best_gain = eps; // any accepted move strictly improves V
        int best = a;
        for (const auto& [b, w] : w_to) {
            if (b == a) continue;
            double gain = (w - gamma * static_cast<double>(st.size[b])) - base;
            if (gain > best_gain) {
                best_gain = gain;
                best = b;
            }
        }
        if (st.size[a] > 1 && -base > best_gain) best = -1;
        if (best == a) continue;

        int b = best == -1 ? st.acquire_label() : best;
        if (--st.size[a] == 0) st.free_labels.insert(a);
        ++st.size[b];
        st.label[v] = b;
        moved = true;
    }
    return moved;
}

// Merge whole clusters while any edge-connected pair has positive gain
// S_AB − γ·|A|·|B|. Works on a contracted cluster graph so repeated merges
// stay cheap.
inline bool merge_pass(const SimilarityMatrix& sim, double gamma, MoveState& st, double eps) {
    std::map<int, std::map<int, double>> cadj;
    for (const auto& [i, j, w] : sim.sorted_entries()) {
        int a = st.label[i], b = st.label[j];
        if (a == b) continue;
        cadj[a][b] += w;
        cadj[b][a] += w;
    }

    bool any = false;
    for (;;) {
        double best_gain = eps;
        std::pair<int, int> best{-1, -1};
        for (const auto& [a, row] : cadj)
            for (const auto& [b, w] : row) {
                if (b <= a) continue;
                double gain = w - gamma * static_cast<double>(st.size[a]) * static_cast<double>(st.size[b]);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = {a, b};
                }
            }
        if (best.first < 0) break;

        auto [a, b] = best;
        for (auto& l : st.label)
            if (l == b) l = a;
        st.size[a] += st.size[b];
        st.size[b] = 0;
        st.free_labels.insert(b);
        for (const auto& [c, w] : cadj[b]) {
            cadj[c].erase(b);
            if (c != a) {
                cadj[a][c] += w;
                cadj[c][a] += w;
            }
        }
        cadj.erase(b);
        any = true;
    }
    return any;
}

} // namespace detail

// Maximize V(c) = Σ_{i<j} δ(c_i,c_j)·(s_ij − γ): local moving to a local
// optimum, alternated with cluster merges, best of `restarts` seeded runs.
inline Clustering vos_cluster(const SimilarityMatrix& sim, double gamma,
                              std::size_t restarts = 10, std::uint64_t seed = 1) {
    if (gamma <= 0.0) throw ConfigError("resolution must be positive");
    if (restarts < 1) throw ConfigError("restarts must be >= 1");
    const std::size_t n = sim.size();
    Clustering best;
    best.resolution = gamma;
    if (n == 0) {
        best.quality = 0.0;
        return best;
    }

    const auto adj = sim.adjacency();
    const double eps = 1e-12 * std::max({1.0, sim.max_weight(), gamma});

    std::vector<int> best_labels;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(seed + r);
        detail::MoveState st;
        st.label.resize(n);
        std::iota(st.label.begin(), st.label.end(), 0);
        st.size.assign(n, 1);

        for (int round = 0; round < 100; ++round) {
            while (detail::local_move_pass(adj, gamma, st, rng, eps)) {
            }
            if (!detail::merge_pass(sim, gamma, st, eps)) break;
        }
        double v = cluster_quality(sim, st.label, gamma);
        if (v > best_v) {
            best_v = v;
            best_labels = st.label;
        }
    }

    // canonical ids: 1..k by decreasing size, ties by smallest member
    std::map<int, std::pair<long long, std::size_t>> info; // label -> (-size, first member)
    for (std::size_t i = 0; i < n; ++i) {
        auto it = info.find(best_labels[i]);
        if (it == info.end())
            info[best_labels[i]] = {-1, i};
        else
            it->second.first -= 1;
    }
    std::vector<std::pair<std::pair<long long, std::size_t>, int>> ordered;
    for (const auto& [l, key] : info) ordered.push_back({key, l});
    std::sort(ordered.begin(), ordered.end());
    std::map<int, int> rename;
    for (std::size_t k = 0; k < ordered.size(); ++k) rename[ordered[k].second] = static_cast<int>(k) + 1;

    best.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) best.labels[i] = rename[best_labels[i]];
    best.cluster_count = static_cast<int>(ordered.size());
    best.quality = cluster_quality(sim, best.labels, gamma);
    return best;
}

struct DensityField {
    std::size_t width = 0;
    std::size_t height = 0;
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    double bandwidth = 0;
    std::vector<double> values; // row-major, y*width + x

    double cell_width() const { return (max_x - min_x) / static_cast<double>(width); }
    double cell_height() const { return (max_y - min_y) / static_cast<double>(height); }

    // discrete integral of the field
    double mass() const {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum * cell_width() * cell_height();
    }
};

// Gaussian kernel density over the layout: cell value =
// Σ_k w_k · exp(−r²/2h²)/(2πh²), so the continuous integral is Σ w_k. The
// grid covers the node bounding box padded by 6 bandwidths per side, which
// keeps the discrete mass within truncation error of the total weight.
inline DensityField density_field(const MapLayout& layout, const std::vector<double>& weights,
                                  double bandwidth, std::size_t grid_w, std::size_t grid_h,
                                  bool force = false) {
    if (!layout.converged && !force)
        throw ConfigError("density field requires a converged layout (or force=true)");
    if (bandwidth <= 0.0) throw ConfigError("bandwidth must be positive");
    if (grid_w == 0 || grid_h == 0) throw ConfigError("grid dimensions must be positive");
    const std::size_t n = layout.size();
    if (!weights.empty() && weights.size() != n)
        throw ConfigError("weights must match node count");

    DensityField f;
    f.width = grid_w;
    f.height = grid_h;
    f.bandwidth = bandwidth;
    f.min_x = std::numeric_limits<double>::infinity();
    f.min_y = std::numeric_limits<double>::infinity();
    f.max_x = -std::numeric_limits<double>::infinity();
    f.max_y = -std::numeric_limits<double>::infinity();
    for (const auto& p : layout.positions) {
        f.min_x = std::min(f.min_x, p.x);
        f.min_y = std::min(f.min_y, p.y);
        f.max_x = std::max(f.max_x, p.x);
        f.max_y = std::max(f.max_y, p.y);
    }
    if (n == 0) {
        f.min_x = f.min_y = -1.0;
        f.max_x = f.max_y = 1.0;
    }
    const double pad = 6.0 * bandwidth;
    f.min_x -= pad;
    f.min_y -= pad;
    f.max_x += pad;
    f.max_y += pad;

    const double cw = f.cell_width(), ch = f.cell_height();
    const double norm = 1.0 / (2.0 * M_PI * bandwidth * bandwidth);
    const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
    f.values.assign(grid_w * grid_h, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = weights.empty() ? 1.0 : weights[k];
        if (w == 0.0) continue;
        const auto& p = layout.positions[k];
        for (std::size_t gy = 0; gy < grid_h; ++gy) {
            double cy = f.min_y + (static_cast<double>(gy) + 0.5) * ch;
            double dy2 = (cy - p.y) * (cy - p.y);
            for (std::size_t gx = 0; gx < grid_w; ++gx) {
                double cx = f.min_x + (static_cast<double>(gx) + 0.5) * cw;
                double r2 = (cx - p.x) * (cx - p.x) + dy2;
                f.values[gy * grid_w + gx] += w * norm * std::exp(-r2 * inv2h2);
            }
        }
    }
    return f;
}

} // namespace sciencemap
