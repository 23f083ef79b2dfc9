#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "sciencemap/corpus.hpp"
#include "sciencemap/descriptors.hpp"
#include "sciencemap/errors.hpp"
#include "sciencemap/text.hpp"

namespace sciencemap {

// Article volume per (source, canonical descriptor term). A term's count
// aggregates its primary form and all of its variants, deduplicated by
// doc_id, so one article counts once per term however many variants it hits.
struct CorrespondenceMatrix {
    std::vector<std::string> sources; // corpus order
    std::vector<std::string> terms;   // canonical primary terms
    std::vector<std::vector<long long>> counts; // [source][term]

    long long at(std::size_t source, std::size_t term) const {
        return counts[source][term];
    }
};

struct ParticipationRow {
    std::string source_id;
    long long tna = 0; // total articles of the source under the base filters
    long long nra = 0; // max over terms of the per-term article count
    double pp = 0.0;   // 100 * nra / tna
};

struct ParticipationResult {
    std::vector<ParticipationRow> rows;
    std::vector<std::string> zero_tna_sources; // excluded, reported
};

enum class Relatedness { Related, Unrelated, Unlabeled };

struct RelatednessLabels {
    std::map<std::string, Relatedness> by_source;

    Relatedness label_of(const std::string& source_id) const {
        auto it = by_source.find(source_id);
        return it == by_source.end() ? Relatedness::Unlabeled : it->second;
    }
};

struct BandRow {
    std::size_t band_index = 0;   // 1-based
    double threshold_percent = 0; // "> t" lower bound; a 100 threshold means PP == 100
    std::size_t included = 0;
    std::size_t errors = 0;       // included sources labeled unrelated
    long long error_percent = 0;  // round-half-up(100 * errors / included)
    long long avg_pp = 0;         // round-half-up mean PP of included
};

inline CorrespondenceMatrix correspondence(const Corpus& corpus, const DescriptorSet& dset,
                                           const CorpusQuery& base_query) {
    if (dset.primary.empty()) throw ConfigError("descriptor set is empty");
    CorrespondenceMatrix m;
    for (const auto& s : corpus.sources()) m.sources.push_back(s.source_id);
    m.terms = dset.primary;
    m.counts.assign(m.sources.size(), std::vector<long long>(m.terms.size(), 0));

    // normalized (term, tokens) groups, one per canonical term
    std::vector<std::vector<std::pair<std::string, std::vector<std::string>>>> groups;
    groups.reserve(m.terms.size());
    for (const auto& t : m.terms) {
        std::vector<std::pair<std::string, std::vector<std::string>>> g;
        for (const auto& v : dset.term_group(t)) {
            std::string norm = normalize_term(v);
            if (!norm.empty()) g.emplace_back(norm, text::tokenize(norm));
        }
        groups.push_back(std::move(g));
    }

    CorpusQuery filters = base_query;
    filters.term_set.clear();
    filters.limit.reset();
    for (const auto& d : corpus.documents()) {
        if (!matches_query(corpus, d, filters)) continue;
        std::size_t src = corpus.source_position(d.source_id);
        for (std::size_t t = 0; t < groups.size(); ++t) {
            for (const auto& [norm, toks] : groups[t]) {
                if (detail::doc_matches_term(d, norm, toks, base_query.fields_searched)) {
                    ++m.counts[src][t];
                    break; // one article counts once per term
                }
            }
        }
    }
    return m;
}

// NRA takes the maximum per-term count, which keeps NRA <= TNA because each
// per-term count is a distinct-document count under the same filters.
inline ParticipationResult participation_rows(const CorrespondenceMatrix& matrix,
                                              const Corpus& corpus,
                                              const CorpusQuery& base_query) {
    CorpusQuery filters = base_query;
    filters.term_set.clear();
    filters.limit.reset();

    std::vector<long long> tna(matrix.sources.size(), 0);
    for (const auto& d : corpus.documents())
        if (matches_query(corpus, d, filters))
            ++tna[corpus.source_position(d.source_id)];

    ParticipationResult result;
    for (std::size_t s = 0; s < matrix.sources.size(); ++s) {
        if (tna[s] == 0) {
            result.zero_tna_sources.push_back(matrix.sources[s]);
            continue;
        }
        long long nra = 0;
        for (long long c : matrix.counts[s]) nra = std::max(nra, c);
        ParticipationRow row;
        row.source_id = matrix.sources[s];
        row.tna = tna[s];
        row.nra = nra;
        row.pp = 100.0 * static_cast<double>(nra) / static_cast<double>(tna[s]);
        result.rows.push_back(std::move(row));
    }
    return result;
}

inline bool pp_in_band(double pp, double threshold) {
    return threshold == 100.0 ? pp == 100.0 : pp > threshold;
}

inline std::vector<BandRow> band_table(const std::vector<ParticipationRow>& rows,
                                       const RelatednessLabels& labels,
                                       const std::vector<double>& thresholds) {
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] < thresholds[i - 1]))
            throw ConfigError("band thresholds must be strictly descending");

    std::vector<BandRow> table;
    for (std::size_t b = 0; b < thresholds.size(); ++b) {
        BandRow band;
        band.band_index = b + 1;
        band.threshold_percent = thresholds[b];
        double pp_sum = 0.0;
        for (const auto& r : rows) {
            if (!pp_in_band(r.pp, thresholds[b])) continue;
            ++band.included;
            pp_sum += r.pp;
            Relatedness label = labels.label_of(r.source_id);
            if (label == Relatedness::Unlabeled) throw UnlabeledSource(r.source_id);
            if (label == Relatedness::Unrelated) ++band.errors;
        }
        if (band.included > 0) {
            band.error_percent = text::round_half_up(
                100.0 * static_cast<double>(band.errors) / static_cast<double>(band.included));
            band.avg_pp =
                text::round_half_up(pp_sum / static_cast<double>(band.included));
        }
        table.push_back(band);
    }
    return table;
}

// Smallest threshold whose band keeps the average participation at or above
// the bar; the table is on descending thresholds, so scan from the bottom.
inline double select_cutoff(const std::vector<BandRow>& table, double min_avg_pp) {
    if (table.empty()) throw ConfigError("band table is empty");
    for (auto it = table.rbegin(); it != table.rend(); ++it)
        if (static_cast<double>(it->avg_pp) >= min_avg_pp) return it->threshold_percent;
    throw NoBandQualifies(min_avg_pp);
}

// Sources in the cutoff band, minus those labeled unrelated. Unlabeled
// sources pass through; band_table is the place that enforces labeling.
inline std::vector<std::string> selected_publications(const std::vector<ParticipationRow>& rows,
                                                      const RelatednessLabels& labels,
                                                      double cutoff) {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (!pp_in_band(r.pp, cutoff)) continue;
        if (labels.label_of(r.source_id) == Relatedness::Unrelated) continue;
        out.push_back(r.source_id);
    }
    return out;
}

inline RelatednessLabels load_labels(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    RelatednessLabels labels;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 2)
            throw MalformedRow(reader.record_line(), "expected source_id,label");
        if (row[0] == "source_id" && row[1] == "label") continue;
        std::string v = normalize_term(row[1]);
        if (v == "related")
            labels.by_source[row[0]] = Relatedness::Related;
        else if (v == "unrelated")
            labels.by_source[row[0]] = Relatedness::Unrelated;
        else
            throw MalformedRow(reader.record_line(), "label must be related or unrelated");
    }
    return labels;
}

inline RelatednessLabels load_labels(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open labels file: " + path);
    return load_labels(in);
}

// Fallback for synthetic runs without a hand-labeled file.
inline RelatednessLabels heuristic_labels(const std::vector<ParticipationRow>& rows) {
    RelatednessLabels labels;
    for (const auto& r : rows)
        labels.by_source[r.source_id] =
            r.pp > 0.0 ? Relatedness::Related : Relatedness::Unrelated;
    return labels;
}

// One row of a published aggregate band table, for replaying reported
// error and average columns through the same formatter.
struct PublishedBand {
    double threshold = 0;
    std::size_t included = 0;
    std::size_t errors = 0;
    double avg_pp = 0;
};

inline std::vector<BandRow> format_published_bands(const std::vector<PublishedBand>& published) {
    std::vector<BandRow> table;
    for (std::size_t b = 0; b < published.size(); ++b) {
        const auto& p = published[b];
        BandRow band;
        band.band_index = b + 1;
        band.threshold_percent = p.threshold;
        band.included = p.included;
        band.errors = p.errors;
        if (p.included > 0)
            band.error_percent = text::round_half_up(
                100.0 * static_cast<double>(p.errors) / static_cast<double>(p.included));
        band.avg_pp = text::round_half_up(p.avg_pp);
        table.push_back(band);
    }
    return table;
}

// Aggregate band file: header `threshold,included,errors,avg_pp`.
inline std::vector<PublishedBand> load_published_bands(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    std::vector<PublishedBand> out;
    bool first = true;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 4)
            throw MalformedRow(reader.record_line(), "expected threshold,included,errors,avg_pp");
        if (first && row[0] == "threshold") {
            first = false;
            continue;
        }
        first = false;
        PublishedBand b;
        try {
            b.threshold = std::stod(row[0]);
            b.included = static_cast<std::size_t>(std::stoull(row[1]));
            b.errors = static_cast<std::size_t>(std::stoull(row[2]));
            b.avg_pp = std::stod(row[3]);
        } catch (const std::exception&) {
            throw MalformedRow(reader.record_line(), "non-numeric band cell");
        }
        out.push_back(b);
    }
    return out;
}

inline std::vector<PublishedBand> load_published_bands(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open band aggregate file: " + path);
    return load_published_bands(in);
}

inline std::vector<double> default_threshold_ladder() {
    std::vector<double> t;
    for (int v = 100; v >= 20; v -= 5) t.push_back(static_cast<double>(v));
    return t;
}

} // namespace sciencemap
