#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace sciencemap {

// Sparse symmetric non-negative weights between n entities. Zero entries are
// not stored; the diagonal is implicitly zero.
class SimilarityMatrix {
public:
    struct Entry {
        std::size_t i, j; // i < j
        double weight;
    };

    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::size_t n) : n_(n) {}

    std::size_t size() const { return n_; }
    std::size_t nonzero_count() const { return w_.size(); }
    bool empty() const { return w_.empty(); }

    void set(std::size_t i, std::size_t j, double weight) {
        check(i, j);
        if (i == j) return;
        if (weight == 0.0) {
            w_.erase(key(i, j));
        } else {
            w_[key(i, j)] = weight;
        }
    }

    void add(std::size_t i, std::size_t j, double weight) {
        check(i, j);
        if (i == j || weight == 0.0) return;
        w_[key(i, j)] += weight;
    }

    double at(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        auto it = w_.find(key(i, j));
        return it == w_.end() ? 0.0 : it->second;
    }

    // Entries sorted by (i, j); the deterministic iteration order for
    // exports and accumulation.
    std::vector<Entry> sorted_entries() const {
        std::vector<Entry> out;
        out.reserve(w_.size());
        for (const auto& [k, v] : w_)
            out.push_back({static_cast<std::size_t>(k >> 32),
                           static_cast<std::size_t>(k & 0xffffffffULL), v});
        std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        return out;
    }

    // Sum of weights incident to each node.
    std::vector<double> row_strengths() const {
        std::vector<double> s(n_, 0.0);
        for (const auto& [k, v] : w_) {
            s[k >> 32] += v;
            s[k & 0xffffffffULL] += v;
        }
        return s;
    }

    double max_weight() const {
        double m = 0.0;
        for (const auto& [k, v] : w_) {
            (void)k;
            m = std::max(m, v);
        }
        return m;
    }

    void scale(double factor) {
        for (auto& [k, v] : w_) {
            (void)k;
            v *= factor;
        }
    }

    // Adjacency as index/weight lists, sorted by neighbour index.
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
        std::vector<std::vector<std::pair<std::size_t, double>>> adj(n_);
        for (const auto& e : sorted_entries()) {
            adj[e.i].emplace_back(e.j, e.weight);
            adj[e.j].emplace_back(e.i, e.weight);
        }
        for (auto& row : adj)
            std::sort(row.begin(), row.end());
        return adj;
    }

private:
    static std::uint64_t key(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    }
    void check(std::size_t i, std::size_t j) const {
        if (i >= n_ || j >= n_) throw std::out_of_range("SimilarityMatrix index");
    }

    std::size_t n_ = 0;
    std::unordered_map<std::uint64_t, double> w_;
};

} // namespace sciencemap
