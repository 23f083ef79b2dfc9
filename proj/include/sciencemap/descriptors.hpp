#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "sciencemap/corpus.hpp"
#include "sciencemap/csv.hpp"
#include "sciencemap/errors.hpp"
#include "sciencemap/similarity.hpp"
#include "sciencemap/text.hpp"

namespace sciencemap {

using text::normalize_term;

struct TermStats {
    std::string term;      // normalized
    std::size_t occurrences = 0; // number of documents containing the term
};

// Sparse symmetric document co-occurrence counts between terms. The diagonal
// is not stored (defined zero).
class CooccurrenceMatrix {
public:
    explicit CooccurrenceMatrix(std::vector<TermStats> terms) : terms_(std::move(terms)) {}

    const std::vector<TermStats>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    void add(std::size_t i, std::size_t j, long long c = 1) {
        if (i == j) return;
        counts_[key(i, j)] += c;
    }

    long long at(std::size_t i, std::size_t j) const {
        if (i == j) return 0;
        auto it = counts_.find(key(i, j));
        return it == counts_.end() ? 0 : it->second;
    }

    struct Entry {
        std::size_t i, j;
        long long count;
    };

    std::vector<Entry> sorted_entries() const {
        std::vector<Entry> out;
        out.reserve(counts_.size());
        for (const auto& [k, v] : counts_)
            if (v != 0)
                out.push_back({static_cast<std::size_t>(k >> 32),
                               static_cast<std::size_t>(k & 0xffffffffULL), v});
        std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        });
        return out;
    }

private:
    static std::uint64_t key(std::size_t i, std::size_t j) {
        if (i > j) std::swap(i, j);
        return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    }

    std::vector<TermStats> terms_;
    std::unordered_map<std::uint64_t, long long> counts_;
};

// Alias pairs loaded from the rules file; each pair links an acronym or
// spelling variant with its expanded form, direction-free.
struct VariantRules {
    std::vector<std::pair<std::string, std::string>> pairs; // normalized
};

inline VariantRules load_variant_rules(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    VariantRules rules;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 2)
            throw MalformedRow(reader.record_line(), "expected variant,canonical");
        if (row[0] == "variant" && row[1] == "canonical") continue;
        std::string a = normalize_term(row[0]);
        std::string b = normalize_term(row[1]);
        if (a.empty() || b.empty())
            throw MalformedRow(reader.record_line(), "empty term in rules file");
        rules.pairs.emplace_back(std::move(a), std::move(b));
    }
    return rules;
}

inline VariantRules load_variant_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open variant rules file: " + path);
    return load_variant_rules(in);
}

struct DescriptorSet {
    std::string term_core;
    std::vector<std::string> primary;
    std::map<std::string, std::string> secondary; // variant -> canonical primary

    bool is_primary(const std::string& term) const {
        return std::find(primary.begin(), primary.end(), term) != primary.end();
    }

    // the primary term plus all of its variants
    std::vector<std::string> term_group(const std::string& primary_term) const {
        std::vector<std::string> group = {primary_term};
        for (const auto& [v, c] : secondary)
            if (c == primary_term) group.push_back(v);
        return group;
    }
};

// Union of normalized author and index keywords; a term counts once per
// document even when it appears in both keyword fields. Result sorted by term.
inline std::vector<TermStats> extract_keywords(const std::vector<DocumentRecord>& docs) {
    std::map<std::string, std::size_t> occ;
    for (const auto& d : docs)
        for (const auto& t : d.keyword_set) ++occ[t];
    std::vector<TermStats> out;
    out.reserve(occ.size());
    for (const auto& [t, c] : occ) out.push_back({t, c});
    return out;
}

// c_ij = number of documents containing both term i and term j.
inline CooccurrenceMatrix build_cooccurrence(const std::vector<DocumentRecord>& docs,
                                             std::vector<TermStats> terms) {
    std::unordered_map<std::string, std::size_t> index;
    index.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) index.emplace(terms[i].term, i);

    CooccurrenceMatrix m(std::move(terms));
    std::vector<std::size_t> present;
    for (const auto& d : docs) {
        present.clear();
        for (const auto& t : d.keyword_set) {
            auto it = index.find(t);
            if (it != index.end()) present.push_back(it->second);
        }
        for (std::size_t a = 0; a < present.size(); ++a)
            for (std::size_t b = a + 1; b < present.size(); ++b)
                m.add(present[a], present[b]);
    }
    return m;
}

// Association strength s_ij = c_ij / (w_i * w_j) with w the per-term
// document counts. Downstream uses are scale invariant.
inline SimilarityMatrix association_strength(const CooccurrenceMatrix& cooc) {
    SimilarityMatrix sim(cooc.term_count());
    const auto& terms = cooc.terms();
    for (const auto& e : cooc.sorted_entries()) {
        double wi = static_cast<double>(terms[e.i].occurrences);
        double wj = static_cast<double>(terms[e.j].occurrences);
        sim.set(e.i, e.j, static_cast<double>(e.count) / (wi * wj));
    }
    return sim;
}

// Rank by total link strength desc, tiebreak occurrences desc then term asc;
// filter by min_occurrence; return the top_n terms. The term core is always
// part of the result when it meets min_occurrence, displacing the weakest
// ranked term if necessary.
inline std::vector<std::string> select_primary(const SimilarityMatrix& sim,
                                               const std::vector<TermStats>& stats,
                                               const std::string& term_core,
                                               std::size_t min_occurrence,
                                               std::size_t top_n) {
    if (top_n == 0) throw ConfigError("top_n must be >= 1");
    const std::string core = normalize_term(term_core);
    std::vector<double> strength = sim.row_strengths();

    std::vector<std::size_t> eligible;
    std::size_t core_idx = stats.size();
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (stats[i].term == core) core_idx = i;
        if (stats[i].occurrences >= min_occurrence) eligible.push_back(i);
    }
    if (core_idx == stats.size() || stats[core_idx].occurrences < min_occurrence)
        throw CoreTermExcluded(core);

    std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
        if (strength[a] != strength[b]) return strength[a] > strength[b];
        if (stats[a].occurrences != stats[b].occurrences)
            return stats[a].occurrences > stats[b].occurrences;
        return stats[a].term < stats[b].term;
    });

    if (eligible.size() > top_n) eligible.resize(top_n);
    if (std::find(eligible.begin(), eligible.end(), core_idx) == eligible.end()) {
        eligible.pop_back();
        eligible.push_back(core_idx);
    }
    std::vector<std::string> out;
    out.reserve(eligible.size());
    for (std::size_t i : eligible) out.push_back(stats[i].term);
    return out;
}

// Hyphen-removed and space-removed spellings plus alias pairs from the rules
// file. Variants that coincide with a primary term are dropped; a variant
// claiming two primaries is an error.
inline DescriptorSet expand_secondary(const std::string& term_core,
                                      const std::vector<std::string>& primary,
                                      const VariantRules& rules) {
    DescriptorSet dset;
    dset.term_core = normalize_term(term_core);
    dset.primary = primary;
    std::set<std::string> primary_set(primary.begin(), primary.end());
    if (!primary_set.count(dset.term_core))
        throw DataError("term core '" + dset.term_core + "' is not a primary descriptor");

    auto propose = [&](const std::string& variant, const std::string& canonical) {
        if (variant.empty() || variant == canonical) return;
        if (primary_set.count(variant)) return; // never shadow a primary term
        auto it = dset.secondary.find(variant);
        if (it != dset.secondary.end()) {
            if (it->second != canonical) throw ConflictingAlias(variant, it->second, canonical);
            return;
        }
        dset.secondary.emplace(variant, canonical);
    };

    for (const auto& p : primary) {
        propose(text::remove_chars(p, '-'), p);
        propose(text::remove_chars(p, ' '), p);
        for (const auto& [a, b] : rules.pairs) {
            if (a == p) propose(b, p);
            if (b == p) propose(a, p);
        }
    }
    return dset;
}

} // namespace sciencemap
