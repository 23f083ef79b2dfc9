#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sciencemap/errors.hpp"
#include "sciencemap/hash.hpp"
#include "sciencemap/layout.hpp"
#include "sciencemap/rng.hpp"

namespace sciencemap {

// Category co-assignment graph of the selected sources: node weight counts
// sources carrying the category, edge weight counts sources carrying both.
struct CategoryGraph {
    std::vector<std::string> categories; // sorted
    std::vector<long long> node_weight;
    std::map<std::pair<std::size_t, std::size_t>, long long> edges; // i < j
    std::size_t skipped_sources = 0; // selected sources with no category

    std::size_t size() const { return categories.size(); }

    long long edge(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        auto it = edges.find({i, j});
        return it == edges.end() ? 0 : it->second;
    }
};

inline CategoryGraph build_category_graph(
    const std::vector<std::string>& selected,
    const std::map<std::string, std::vector<std::string>>& categories) {
    std::set<std::string> names;
    std::vector<std::vector<std::string>> per_source;
    CategoryGraph g;
    for (const auto& id : selected) {
        auto it = categories.find(id);
        if (it == categories.end() || it->second.empty()) {
            ++g.skipped_sources;
            continue;
        }
        std::vector<std::string> cats = it->second;
        std::sort(cats.begin(), cats.end());
        cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        names.insert(cats.begin(), cats.end());
        per_source.push_back(std::move(cats));
    }
    g.categories.assign(names.begin(), names.end());
    g.node_weight.assign(g.categories.size(), 0);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.categories.size(); ++i) index[g.categories[i]] = i;
    for (const auto& cats : per_source) {
        for (const auto& c : cats) ++g.node_weight[index[c]];
        for (std::size_t a = 0; a < cats.size(); ++a)
            for (std::size_t b = a + 1; b < cats.size(); ++b) {
                std::size_t i = index[cats[a]], j = index[cats[b]];
                if (i > j) std::swap(i, j);
                ++g.edges[{i, j}];
            }
    }
    return g;
}

// Classic Fruchterman–Reingold: attraction w·d²/k on edges, repulsion k²/d
// between all pairs, displacement capped by a linearly cooling temperature.
// Initial positions derive from each node's label hash mixed with the seed,
// which makes the result invariant under node relabeling.
inline MapLayout fr_layout(const CategoryGraph& graph, double k = 0.0,
                           std::size_t iterations = 500, std::uint64_t seed = 1) {
    const std::size_t n = graph.size();
    if (n < 2) throw Degenerate(n);
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (k < 0.0) throw ConfigError("ideal distance must be positive");
    if (k == 0.0) k = std::sqrt(1.0 / static_cast<double>(n)); // unit area default

    MapLayout out;
    out.ids = graph.categories;
    out.positions.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed ^ fnv1a64(graph.categories[i]));
        out.positions[i].x = rng.next_double(-0.5, 0.5);
        out.positions[i].y = rng.next_double(-0.5, 0.5);
    }

    const double t0 = 0.1;
    std::vector<Vec2> disp(n);
    double max_disp = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        double t = t0 * (1.0 - static_cast<double>(it) / static_cast<double>(iterations));
        for (auto& d : disp) d = {0.0, 0.0};

        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double dx = out.positions[i].x - out.positions[j].x;
                double dy = out.positions[i].y - out.positions[j].y;
                double d = std::hypot(dx, dy);
                double ux, uy;
                if (d < 1e-12) {
                    d = 1e-12;
                    ux = 1.0; // coincident nodes separate along a fixed axis
                    uy = 0.0;
                } else {
                    ux = dx / d;
                    uy = dy / d;
                }
                double rep = k * k / d;
                disp[i].x += ux * rep;
                disp[i].y += uy * rep;
                disp[j].x -= ux * rep;
                disp[j].y -= uy * rep;
            }

        for (const auto& [pair, w] : graph.edges) {
            auto [i, j] = pair;
            double dx = out.positions[i].x - out.positions[j].x;
            double dy = out.positions[i].y - out.positions[j].y;
            double d = std::hypot(dx, dy);
            if (d < 1e-12) continue;
            double att = static_cast<double>(w) * d * d / k;
            double ux = dx / d, uy = dy / d;
            disp[i].x -= ux * att;
            disp[i].y -= uy * att;
            disp[j].x += ux * att;
            disp[j].y += uy * att;
        }

        max_disp = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = std::hypot(disp[i].x, disp[i].y);
            if (d < 1e-300) continue;
            double step = std::min(d, t);
            out.positions[i].x += disp[i].x / d * step;
            out.positions[i].y += disp[i].y / d * step;
            max_disp = std::max(max_disp, step);
        }

        // trace records min pairwise distance per iteration (spread diagnostic)
        double mind = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                mind = std::min(mind, distance(out.positions[i], out.positions[j]));
        out.objective_trace.push_back(mind);
    }

    canonicalize(out.positions);
    out.converged = true;
    out.iterations = iterations;
    out.objective_value = max_disp;
    return out;
}

} // namespace sciencemap
