#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sciencemap/csv.hpp"
#include "sciencemap/errors.hpp"
#include "sciencemap/text.hpp"

namespace sciencemap {

enum class DocType { Article, ConferencePaper, Review, ConferenceReview, Other };
enum class SourceType { Journal, Proceeding };
enum class QueryOrder { CitationCountDesc, DocIdAsc };
enum class SearchField { Title, Abstract, Keywords };

inline std::string to_string(DocType t) {
    switch (t) {
        case DocType::Article: return "article";
        case DocType::ConferencePaper: return "conference_paper";
        case DocType::Review: return "review";
        case DocType::ConferenceReview: return "conference_review";
        default: return "other";
    }
}

inline std::string to_string(SourceType t) {
    return t == SourceType::Journal ? "journal" : "proceeding";
}

// Accepts the export vocabulary loosely: case-insensitive, separators ignored.
inline DocType parse_doc_type(std::string_view raw) {
    std::string k;
    for (unsigned char c : raw)
        if (std::isalnum(c)) k.push_back(static_cast<char>(std::tolower(c)));
    if (k == "article") return DocType::Article;
    if (k == "conferencepaper") return DocType::ConferencePaper;
    if (k == "review") return DocType::Review;
    if (k == "conferencereview") return DocType::ConferenceReview;
    return DocType::Other;
}

inline std::optional<SourceType> parse_source_type(std::string_view raw) {
    std::string k;
    for (unsigned char c : raw)
        if (std::isalnum(c)) k.push_back(static_cast<char>(std::tolower(c)));
    if (k == "journal") return SourceType::Journal;
    if (k == "proceeding" || k == "proceedings" || k == "conferenceproceeding" ||
        k == "conferenceproceedings" || k == "conferenceandproceeding")
        return SourceType::Proceeding;
    return std::nullopt;
}

struct DocumentRecord {
    std::string doc_id;
    std::string source_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> author_keywords; // raw, as exported
    std::vector<std::string> index_keywords;  // raw, as exported
    DocType doc_type = DocType::Other;
    int year = 0;
    std::string language; // lowercased tag
    std::vector<std::string> references; // doc_ids or raw reference strings
    long long citation_count = 0;

    // normalized caches filled at parse time
    std::vector<std::string> keyword_set;     // normalized union, sorted, deduped
    std::vector<std::string> title_tokens;
    std::vector<std::string> abstract_tokens;

    void rebuild_caches() {
        std::set<std::string> kws;
        for (const auto& k : author_keywords) {
            std::string n = text::normalize_term(k);
            if (!n.empty()) kws.insert(std::move(n));
        }
        for (const auto& k : index_keywords) {
            std::string n = text::normalize_term(k);
            if (!n.empty()) kws.insert(std::move(n));
        }
        keyword_set.assign(kws.begin(), kws.end());
        title_tokens = text::tokenize(title);
        abstract_tokens = text::tokenize(abstract);
    }

    bool has_keyword(const std::string& normalized_term) const {
        return std::binary_search(keyword_set.begin(), keyword_set.end(), normalized_term);
    }
};

struct SourceRecord {
    std::string source_id;
    std::string title;
    SourceType source_type = SourceType::Journal;
    std::vector<std::string> categories;
};

struct YearRange {
    int min = 1900;
    int max = 2100;
    bool contains(int y) const { return y >= min && y <= max; }
};

// Empty term_set means "no term constraint" (pure filter query); empty
// source_types / doc_types sets likewise impose no constraint.
struct CorpusQuery {
    std::vector<std::string> term_set;
    std::set<SearchField> fields_searched = {SearchField::Title, SearchField::Abstract,
                                             SearchField::Keywords};
    std::set<SourceType> source_types;
    std::set<DocType> doc_types;
    YearRange years;
    std::optional<std::string> language;
    std::optional<std::size_t> limit;
    QueryOrder order = QueryOrder::CitationCountDesc;
};

class Corpus {
public:
    const std::vector<DocumentRecord>& documents() const { return docs_; }
    const std::vector<SourceRecord>& sources() const { return sources_; }

    const DocumentRecord* find_document(const std::string& doc_id) const {
        auto it = doc_index_.find(doc_id);
        return it == doc_index_.end() ? nullptr : &docs_[it->second];
    }
    const SourceRecord* find_source(const std::string& source_id) const {
        auto it = source_index_.find(source_id);
        return it == source_index_.end() ? nullptr : &sources_[it->second];
    }
    std::size_t source_position(const std::string& source_id) const {
        return source_index_.at(source_id);
    }

    void add_document(DocumentRecord doc) {
        if (doc_index_.count(doc.doc_id)) throw DuplicateId(doc.doc_id);
        doc.rebuild_caches();
        doc_index_.emplace(doc.doc_id, docs_.size());
        docs_.push_back(std::move(doc));
    }

    // First definition wins; later rows may repeat the source.
    void add_source(SourceRecord src) {
        auto it = source_index_.find(src.source_id);
        if (it != source_index_.end()) return;
        source_index_.emplace(src.source_id, sources_.size());
        sources_.push_back(std::move(src));
    }

    // Returns the number of (source, category) pairs applied; pairs whose
    // source is not in the corpus are skipped and counted in `skipped`.
    std::size_t attach_categories(const std::multimap<std::string, std::string>& pairs,
                                  std::size_t* skipped = nullptr) {
        std::size_t applied = 0, miss = 0;
        for (const auto& [sid, cat] : pairs) {
            auto it = source_index_.find(sid);
            if (it == source_index_.end()) {
                ++miss;
                continue;
            }
            auto& cats = sources_[it->second].categories;
            if (std::find(cats.begin(), cats.end(), cat) == cats.end()) {
                cats.push_back(cat);
                ++applied;
            }
        }
        if (skipped) *skipped = miss;
        return applied;
    }

private:
    std::vector<DocumentRecord> docs_;
    std::vector<SourceRecord> sources_;
    std::unordered_map<std::string, std::size_t> doc_index_;
    std::unordered_map<std::string, std::size_t> source_index_;
};

enum class CorpusFormat { CsvV1 };

namespace detail {

inline const std::vector<std::string>& csv_v1_header() {
    static const std::vector<std::string> cols = {
        "doc_id",  "source_id", "source_title",    "source_type",   "doc_type",
        "year",    "language",  "title",           "abstract",      "author_keywords",
        "index_keywords",       "references",      "citation_count"};
    return cols;
}

inline long long parse_int(const std::string& s, std::size_t line, const char* what) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow(line, std::string(what) + " is not an integer: '" + s + "'");
    }
}

} // namespace detail

inline Corpus parse_corpus(std::istream& in, CorpusFormat format = CorpusFormat::CsvV1) {
    (void)format; // CsvV1 is the only format
    csv::Reader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw DataError("empty corpus file (missing header)");
    if (row != detail::csv_v1_header())
        throw DataError("corpus header does not match the CsvV1 column contract");

    Corpus corpus;
    // sources referenced by rows that do not define them (empty title+type)
    std::unordered_map<std::string, std::string> pending; // source_id -> first doc_id
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue; // blank line
        const std::size_t line = reader.record_line();
        if (row.size() != detail::csv_v1_header().size())
            throw MalformedRow(line, "expected 13 columns, got " + std::to_string(row.size()));

        DocumentRecord doc;
        doc.doc_id = row[0];
        doc.source_id = row[1];
        if (doc.doc_id.empty()) throw MalformedRow(line, "empty doc_id");
        if (doc.source_id.empty()) throw MalformedRow(line, "missing source_id");

        const std::string& source_title = row[2];
        const std::string& source_type_raw = row[3];
        if (source_title.empty() && source_type_raw.empty()) {
            // reference to a source defined elsewhere
            pending.emplace(doc.source_id, doc.doc_id);
        } else {
            auto st = parse_source_type(source_type_raw);
            if (!st)
                throw MalformedRow(line, "unknown source_type '" + source_type_raw + "'");
            corpus.add_source({doc.source_id, source_title, *st, {}});
        }

        doc.doc_type = parse_doc_type(row[4]);
        long long year = detail::parse_int(row[5], line, "year");
        if (year < 1900 || year > 2100)
            throw MalformedRow(line, "year out of range: " + row[5]);
        doc.year = static_cast<int>(year);
        doc.language = text::normalize_term(row[6]);
        doc.title = row[7];
        doc.abstract = row[8];
        for (auto& k : csv::split_multi(row[9]))
            if (!text::normalize_term(k).empty()) doc.author_keywords.push_back(std::move(k));
        for (auto& k : csv::split_multi(row[10]))
            if (!text::normalize_term(k).empty()) doc.index_keywords.push_back(std::move(k));
        doc.references = csv::split_multi(row[11]);
        long long cites = detail::parse_int(row[12], line, "citation_count");
        if (cites < 0) throw MalformedRow(line, "negative citation_count");
        doc.citation_count = cites;

        corpus.add_document(std::move(doc));
    }
    for (const auto& [sid, did] : pending)
        if (!corpus.find_source(sid)) throw UnknownSource(did, sid);
    return corpus;
}

inline Corpus parse_corpus(const std::string& path, CorpusFormat format = CorpusFormat::CsvV1) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);
    return parse_corpus(in, format);
}

// Sidecar format: `source_id,category`, one pair per row, no header.
inline std::multimap<std::string, std::string> load_categories(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    std::multimap<std::string, std::string> pairs;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 2)
            throw MalformedRow(reader.record_line(), "expected source_id,category");
        if (row[0] == "source_id" && row[1] == "category") continue; // tolerated header
        pairs.emplace(row[0], row[1]);
    }
    return pairs;
}

inline std::multimap<std::string, std::string> load_categories(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open categories file: " + path);
    return load_categories(in);
}

namespace detail {

inline bool doc_matches_filters(const DocumentRecord& d, const SourceRecord& s,
                                const CorpusQuery& q) {
    if (!q.years.contains(d.year)) return false;
    if (!q.doc_types.empty() && !q.doc_types.count(d.doc_type)) return false;
    if (!q.source_types.empty() && !q.source_types.count(s.source_type)) return false;
    if (q.language && d.language != text::normalize_term(*q.language)) return false;
    return true;
}

inline bool doc_matches_term(const DocumentRecord& d, const std::string& term_norm,
                             const std::vector<std::string>& term_tokens,
                             const std::set<SearchField>& fields) {
    if (fields.count(SearchField::Keywords) && d.has_keyword(term_norm)) return true;
    if (fields.count(SearchField::Title) &&
        text::contains_token_seq(d.title_tokens, term_tokens))
        return true;
    if (fields.count(SearchField::Abstract) &&
        text::contains_token_seq(d.abstract_tokens, term_tokens))
        return true;
    return false;
}

} // namespace detail

// True when the document passes the query's filters and term condition.
inline bool matches_query(const Corpus& corpus, const DocumentRecord& d, const CorpusQuery& q) {
    const SourceRecord* src = corpus.find_source(d.source_id);
    if (!src || !detail::doc_matches_filters(d, *src, q)) return false;
    if (q.term_set.empty()) return true;
    for (const auto& raw : q.term_set) {
        std::string norm = text::normalize_term(raw);
        if (norm.empty()) continue;
        if (detail::doc_matches_term(d, norm, text::tokenize(norm), q.fields_searched))
            return true;
    }
    return false;
}

inline std::vector<const DocumentRecord*> query_documents(const Corpus& corpus,
                                                          const CorpusQuery& q) {
    std::vector<const DocumentRecord*> hits;
    // normalize terms once
    std::vector<std::pair<std::string, std::vector<std::string>>> terms;
    for (const auto& raw : q.term_set) {
        std::string norm = text::normalize_term(raw);
        if (!norm.empty()) terms.emplace_back(norm, text::tokenize(norm));
    }
    for (const auto& d : corpus.documents()) {
        const SourceRecord* src = corpus.find_source(d.source_id);
        if (!src || !detail::doc_matches_filters(d, *src, q)) continue;
        if (!q.term_set.empty()) {
            bool hit = false;
            for (const auto& [norm, toks] : terms)
                if (detail::doc_matches_term(d, norm, toks, q.fields_searched)) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
        }
        hits.push_back(&d);
    }
    auto by_id = [](const DocumentRecord* a, const DocumentRecord* b) {
        return a->doc_id < b->doc_id;
    };
    if (q.order == QueryOrder::CitationCountDesc) {
        std::sort(hits.begin(), hits.end(), [&](const DocumentRecord* a, const DocumentRecord* b) {
            if (a->citation_count != b->citation_count)
                return a->citation_count > b->citation_count;
            return by_id(a, b);
        });
    } else {
        std::sort(hits.begin(), hits.end(), by_id);
    }
    if (q.limit && hits.size() > *q.limit) hits.resize(*q.limit);
    return hits;
}

inline std::size_t count_documents(const Corpus& corpus, const CorpusQuery& q) {
    CorpusQuery unlimited = q;
    unlimited.limit.reset();
    return query_documents(corpus, unlimited).size();
}

} // namespace sciencemap
