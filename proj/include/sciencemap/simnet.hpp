#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sciencemap/corpus.hpp"
#include "sciencemap/errors.hpp"
#include "sciencemap/similarity.hpp"

namespace sciencemap {

enum class Channel { Citation, CoCitation, Coupling };

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::Citation: return "citation";
        case Channel::CoCitation: return "cocitation";
        case Channel::Coupling: return "coupling";
    }
    return "unknown";
}

// Symmetric integer co-link counts between sources (upper triangle, i < j).
struct ChannelMatrix {
    Channel channel = Channel::Citation;
    std::size_t n = 0;
    std::unordered_map<std::uint64_t, long long> counts;

    static std::uint64_t key(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    }

    void add(std::size_t i, std::size_t j, long long c) {
        if (i == j || c == 0) return;
        counts[key(i, j)] += c;
    }

    long long at(std::size_t i, std::size_t j) const {
        if (i == j) return 0;
        auto it = counts.find(key(i, j));
        return it == counts.end() ? 0 : it->second;
    }

    bool empty() const { return counts.empty(); }

    std::vector<std::tuple<std::size_t, std::size_t, long long>> sorted_entries() const {
        std::vector<std::tuple<std::size_t, std::size_t, long long>> out;
        out.reserve(counts.size());
        for (const auto& [k, c] : counts)
            out.emplace_back(static_cast<std::size_t>(k >> 32),
                             static_cast<std::size_t>(k & 0xffffffffu), c);
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Directed citation links kept alongside the symmetric channel for audit
// exports.
struct DirectedCitations {
    std::map<std::pair<std::size_t, std::size_t>, long long> counts; // (from, to)
};

struct ReferenceResolution {
    std::size_t total = 0;
    std::size_t resolved = 0;

    double unresolved_ratio() const {
        return total == 0 ? 0.0 : static_cast<double>(total - resolved) / static_cast<double>(total);
    }
};

inline ReferenceResolution reference_resolution(const Corpus& corpus) {
    ReferenceResolution r;
    for (const auto& doc : corpus.documents()) {
        for (const auto& ref : doc.references) {
            ++r.total;
            if (corpus.find_document(ref) != nullptr) ++r.resolved;
        }
    }
    return r;
}

namespace detail {

// Source index of the document a reference resolves to, or npos.
inline std::size_t resolve_ref_source(const Corpus& corpus, const std::string& ref) {
    const DocumentRecord* doc = corpus.find_document(ref);
    if (doc == nullptr) return static_cast<std::size_t>(-1);
    return corpus.source_position(doc->source_id);
}

} // namespace detail

// Directed link i -> j for every resolved reference from a document of
// source i to a document of source j; symmetrized by summing directions.
inline ChannelMatrix citation_counts(const Corpus& corpus, DirectedCitations* directed = nullptr) {
    ChannelMatrix m;
    m.channel = Channel::Citation;
    m.n = corpus.sources().size();
    for (const auto& doc : corpus.documents()) {
        std::size_t i = corpus.source_position(doc.source_id);
        for (const auto& ref : doc.references) {
            std::size_t j = detail::resolve_ref_source(corpus, ref);
            if (j == static_cast<std::size_t>(-1) || j == i) continue;
            m.add(i, j, 1);
            if (directed != nullptr) directed->counts[{i, j}] += 1;
        }
    }
    return m;
}

// Sources cited together by one citing document: +1 per citing document per
// distinct cited-source pair.
inline ChannelMatrix cocitation_counts(const Corpus& corpus) {
    ChannelMatrix m;
    m.channel = Channel::CoCitation;
    m.n = corpus.sources().size();
    std::set<std::size_t> cited;
    for (const auto& doc : corpus.documents()) {
        cited.clear();
        for (const auto& ref : doc.references) {
            std::size_t j = detail::resolve_ref_source(corpus, ref);
            if (j != static_cast<std::size_t>(-1)) cited.insert(j);
        }
        for (auto it = cited.begin(); it != cited.end(); ++it) {
            auto jt = it;
            for (++jt; jt != cited.end(); ++jt) m.add(*it, *jt, 1);
        }
    }
    return m;
}

// Distinct cited identities shared by the reference lists of two sources.
// A reference that resolves to a corpus document is identified by that
// document's id; anything else keeps exact-string identity.
inline ChannelMatrix coupling_counts(const Corpus& corpus) {
    ChannelMatrix m;
    m.channel = Channel::Coupling;
    m.n = corpus.sources().size();

    std::map<std::string, std::set<std::size_t>> citing; // identity -> sources
    for (const auto& doc : corpus.documents()) {
        std::size_t i = corpus.source_position(doc.source_id);
        for (const auto& ref : doc.references) {
            const DocumentRecord* target = corpus.find_document(ref);
            citing[target != nullptr ? target->doc_id : ref].insert(i);
        }
    }
    for (const auto& [identity, srcs] : citing) {
        (void)identity;
        for (auto it = srcs.begin(); it != srcs.end(); ++it) {
            auto jt = it;
            for (++jt; jt != srcs.end(); ++jt) m.add(*it, *jt, 1);
        }
    }
    return m;
}

struct CombinedSimilarity {
    SimilarityMatrix matrix;
    std::array<double, 3> weights_used{0.0, 0.0, 0.0};
    std::vector<Channel> empty_channels;
};

namespace detail {

// Association strength of one channel, rescaled so its maximum is 1 (empty
// channels stay empty). Rescaling makes blending invariant to each
// channel's overall magnitude.
inline SimilarityMatrix normalized_strength(const ChannelMatrix& ch) {
    SimilarityMatrix s(ch.n);
    if (ch.empty()) return s;
    std::vector<double> total(ch.n, 0.0);
    for (const auto& [i, j, c] : ch.sorted_entries()) {
        total[i] += static_cast<double>(c);
        total[j] += static_cast<double>(c);
    }
    for (const auto& [i, j, c] : ch.sorted_entries())
        s.set(i, j, static_cast<double>(c) / (total[i] * total[j]));
    double mx = s.max_weight();
    if (mx > 0.0) s.scale(1.0 / mx);
    return s;
}

} // namespace detail

// Convex combination of the per-channel association strengths. Channel
// weights are renormalized to sum 1; weight on an empty channel is
// redistributed across the non-empty ones and the channel is reported.
inline CombinedSimilarity combine_channels(const std::array<ChannelMatrix, 3>& channels,
                                           std::array<double, 3> weights) {
    for (double w : weights)
        if (w < 0.0) throw ConfigError("channel weights must be non-negative");
    std::size_t n = 0;
    for (const auto& ch : channels) n = std::max(n, ch.n);

    CombinedSimilarity out;
    out.matrix = SimilarityMatrix(n);
    for (std::size_t k = 0; k < 3; ++k)
        if (channels[k].empty()) {
            out.empty_channels.push_back(channels[k].channel);
            weights[k] = 0.0;
        }
    double wsum = weights[0] + weights[1] + weights[2];
    if (wsum <= 0.0) return out; // nothing usable: empty combination
    for (double& w : weights) w /= wsum;
    out.weights_used = weights;

    for (std::size_t k = 0; k < 3; ++k) {
        if (weights[k] == 0.0) continue;
        SimilarityMatrix s = detail::normalized_strength(channels[k]);
        for (const auto& [i, j, v] : s.sorted_entries())
            out.matrix.add(i, j, weights[k] * v);
    }
    double mx = out.matrix.max_weight();
    if (mx > 0.0) out.matrix.scale(1.0 / mx);
    return out;
}

} // namespace sciencemap
