#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sciencemap/errors.hpp"
#include "sciencemap/layout.hpp"
#include "sciencemap/rng.hpp"
#include "sciencemap/similarity.hpp"
#include "sciencemap/text.hpp"
#include "sciencemap/vosmap.hpp"

namespace sciencemap {

// A highlighted subset drawn over a frozen base map: positions and clusters
// are copied verbatim, only per-node weight/styling differs.
struct OverlaySpec {
    MapLayout base;
    Clustering clusters;
    std::set<std::string> subset;
    std::vector<double> highlight; // per base node, 1 for subset members
};

inline OverlaySpec make_overlay(const MapLayout& base, const Clustering& clusters,
                                const std::set<std::string>& subset) {
    OverlaySpec o;
    o.base = base;
    o.clusters = clusters;
    o.subset = subset;
    o.highlight.assign(base.size(), 0.0);
    for (const auto& id : subset) {
        auto it = std::find(base.ids.begin(), base.ids.end(), id);
        if (it == base.ids.end()) throw UnknownNode(id);
        o.highlight[static_cast<std::size_t>(it - base.ids.begin())] = 1.0;
    }
    return o;
}

struct CohesionReport {
    double within_subset_strength = 0.0;
    double expected_strength = 0.0;
    double ratio = 0.0;
    double permutation_p = 1.0;
    std::size_t permutations = 0;
    std::map<int, std::size_t> subset_cluster_histogram;
};

namespace detail {

inline double subset_strength(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                              const std::vector<char>& in, const std::vector<std::size_t>& members) {
    double s = 0.0;
    for (std::size_t i : members)
        for (const auto& [j, w] : adj[i])
            if (j > i && in[j]) s += w;
    return s;
}

} // namespace detail

// Permutation test of subset cohesion: observed within-subset strength
// against uniformly random equal-size subsets. Each permutation draws from
// its own seed (seed + index) so the result is schedule-independent.
inline CohesionReport cohesion(const SimilarityMatrix& sim, const std::vector<std::size_t>& subset,
                               std::size_t permutations, std::uint64_t seed,
                               const Clustering* clusters = nullptr) {
    if (permutations < 100) throw ConfigError("cohesion requires at least 100 permutations");
    const std::size_t n = sim.size();
    for (std::size_t i : subset)
        if (i >= n) throw UnknownNode(std::to_string(i));

    const auto adj = sim.adjacency();
    std::vector<char> in(n, 0);
    for (std::size_t i : subset) in[i] = 1;
    CohesionReport r;
    r.permutations = permutations;
    // Sum in index order so the statistic depends on membership only; equal
    // sets must compare equal when the permutation reproduces the subset.
    std::vector<std::size_t> members(subset);
    std::sort(members.begin(), members.end());
    r.within_subset_strength = detail::subset_strength(adj, in, members);

    const std::size_t k = subset.size();
    double sum = 0.0;
    std::size_t at_least = 0;
    std::vector<char> mark(n, 0);
    for (std::size_t p = 0; p < permutations; ++p) {
        Rng rng(seed + p);
        std::vector<std::size_t> draw = rng.sample_indices(n, k);
        std::sort(draw.begin(), draw.end());
        std::fill(mark.begin(), mark.end(), 0);
        for (std::size_t i : draw) mark[i] = 1;
        double s = detail::subset_strength(adj, mark, draw);
        sum += s;
        if (s >= r.within_subset_strength) ++at_least;
    }
    r.expected_strength = sum / static_cast<double>(permutations);
    r.ratio = r.expected_strength > 0.0 ? r.within_subset_strength / r.expected_strength : 0.0;
    r.permutation_p = static_cast<double>(at_least) / static_cast<double>(permutations);

    if (clusters != nullptr)
        for (std::size_t i : subset) ++r.subset_cluster_histogram[clusters->labels[i]];
    return r;
}

// Subset members whose within-subset total link strength reaches the given
// quantile of the subset's strength distribution.
inline std::vector<std::size_t> core_extract(const SimilarityMatrix& sim,
                                             const std::vector<std::size_t>& subset,
                                             double quantile) {
    if (quantile <= 0.0 || quantile >= 1.0) throw ConfigError("quantile must be in (0,1)");
    if (subset.empty()) return {};
    const auto adj = sim.adjacency();
    std::vector<char> in(sim.size(), 0);
    for (std::size_t i : subset) in[i] = 1;

    std::vector<double> strength(subset.size(), 0.0);
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (const auto& [j, w] : adj[subset[a]])
            if (in[j]) strength[a] += w;

    std::vector<double> sorted = strength;
    std::sort(sorted.begin(), sorted.end());
    std::size_t idx = static_cast<std::size_t>(std::floor(quantile * static_cast<double>(subset.size())));
    if (idx >= subset.size()) idx = subset.size() - 1;
    double threshold = sorted[idx];

    std::vector<std::size_t> core;
    for (std::size_t a = 0; a < subset.size(); ++a)
        if (strength[a] >= threshold) core.push_back(subset[a]);
    return core;
}

struct CoreStats {
    std::set<std::string> core_set;
    std::map<std::string, double> category_share;                         // percent, exact
    std::map<std::pair<std::string, std::string>, double> overlap_share;  // (A,B): % of A-members also in B
};

inline CoreStats category_shares(const std::set<std::string>& core,
                                 const std::map<std::string, std::vector<std::string>>& categories) {
    if (core.empty()) throw EmptyCore();
    CoreStats stats;
    stats.core_set = core;

    std::map<std::string, std::set<std::string>> members; // category -> core members
    for (const auto& id : core) {
        auto it = categories.find(id);
        if (it == categories.end()) continue;
        for (const auto& cat : it->second) members[cat].insert(id);
    }
    const double total = static_cast<double>(core.size());
    for (const auto& [cat, ids] : members)
        stats.category_share[cat] = 100.0 * static_cast<double>(ids.size()) / total;

    for (const auto& [a, ids_a] : members)
        for (const auto& [b, ids_b] : members) {
            if (a == b) continue;
            std::size_t both = 0;
            for (const auto& id : ids_a)
                if (ids_b.count(id) > 0) ++both;
            stats.overlap_share[{a, b}] =
                100.0 * static_cast<double>(both) / static_cast<double>(ids_a.size());
        }
    return stats;
}

} // namespace sciencemap
