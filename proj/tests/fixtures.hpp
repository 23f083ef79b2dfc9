#pragma once

// Deterministic synthetic corpora and random graphs shared by the unit and
// acceptance tests.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sciencemap/corpus.hpp"
#include "sciencemap/csv.hpp"
#include "sciencemap/rng.hpp"
#include "sciencemap/similarity.hpp"

namespace fixtures {

using sciencemap::Rng;

inline const std::vector<std::string>& related_terms() {
    static const std::vector<std::string> terms = {
        "lms", "ict", "mooc", "b-learning", "m-learning", "e-assessment",
        "virtual learning environment", "distance education", "educational technology",
        "online course", "computer assisted learning", "learning analytics",
        "personal learning environment", "collaborative learning", "instructional design",
        "web based training", "digital literacy", "course management", "tutoring system",
        "open educational resources"};
    return terms;
}

inline const std::vector<std::string>& noise_terms() {
    static const std::vector<std::string> terms = {
        "genomics", "protein folding", "spectroscopy", "quantum dots", "fluid dynamics",
        "market regulation", "supply chain", "cardiology", "neural imaging", "soil chemistry",
        "plasma physics", "epidemiology", "crystallography", "macroeconomics", "paleontology",
        "photovoltaics", "robotics control", "signal processing", "volcanology", "microbiome"};
    return terms;
}

struct SyntheticCorpus {
    std::string corpus_csv;
    std::string categories_csv;
    std::string labels_csv;
    std::vector<std::string> source_ids;
    std::vector<int> source_class; // 0 unrelated, 1 related, 2 hybrid
};

// A corpus whose sources split into a related block (e-learning keywords,
// Education/Computer Science categories), a hybrid block, and an unrelated
// block, with references biased toward the same block so the similarity
// network carries a real cluster signal.
inline SyntheticCorpus make_synthetic_corpus(std::size_t n_docs, std::size_t n_sources,
                                             std::uint64_t seed) {
    Rng rng(seed);
    SyntheticCorpus out;

    const std::size_t related_end = n_sources * 35 / 100;
    const std::size_t hybrid_end = related_end + n_sources * 15 / 100;
    for (std::size_t s = 0; s < n_sources; ++s) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "src-%04zu", s);
        out.source_ids.emplace_back(buf);
        out.source_class.push_back(s < related_end ? 1 : (s < hybrid_end ? 2 : 0));
    }

    struct Doc {
        std::string id;
        std::size_t source;
        int cls; // topicality of this document
        std::vector<std::string> author_kw, index_kw;
        std::string title, abstract;
        int year;
        std::string language;
        std::string doc_type;
        long long cites;
        std::vector<std::string> refs;
    };

    auto pick = [&](const std::vector<std::string>& pool) -> const std::string& {
        return pool[rng.next_below(pool.size())];
    };

    std::vector<Doc> docs(n_docs);
    std::vector<std::size_t> related_docs, unrelated_docs;
    for (std::size_t d = 0; d < n_docs; ++d) {
        Doc& doc = docs[d];
        char buf[32];
        std::snprintf(buf, sizeof(buf), "doc-%06zu", d);
        doc.id = buf;
        doc.source = rng.next_below(n_sources);
        int scls = out.source_class[doc.source];
        doc.cls = scls == 1 ? 1 : (scls == 2 ? (rng.next_double() < 0.5 ? 1 : 0) : 0);

        const auto& pool = doc.cls == 1 ? related_terms() : noise_terms();
        std::set<std::string> kws;
        if (doc.cls == 1 && rng.next_double() < 0.6) kws.insert("e-learning");
        std::size_t want = 2 + rng.next_below(3);
        while (kws.size() < want) kws.insert(pick(pool));
        std::size_t half = 0;
        for (const auto& k : kws) {
            if (half++ % 2 == 0)
                doc.author_kw.push_back(k);
            else
                doc.index_kw.push_back(k);
        }
        const std::string& t1 = *kws.begin();
        const std::string& t2 = *kws.rbegin();
        doc.title = "A study of " + t1 + " approaches";
        doc.abstract = "This work examines " + t1 + " together with " + t2 +
                       " in an applied setting.";
        doc.year = 2002 + static_cast<int>(rng.next_below(15));
        doc.language = rng.next_double() < 0.9 ? "english" : "spanish";
        double r = rng.next_double();
        doc.doc_type = r < 0.55 ? "article"
                                : (r < 0.85 ? "conference paper"
                                            : (r < 0.95 ? "review" : "conference review"));
        doc.cites = static_cast<long long>(rng.next_below(40));
        if (doc.cls == 1)
            related_docs.push_back(d);
        else
            unrelated_docs.push_back(d);
    }

    // references: biased to the same topicality block, 30% raw strings
    for (std::size_t d = 0; d < n_docs; ++d) {
        Doc& doc = docs[d];
        std::size_t nref = 3 + rng.next_below(6);
        for (std::size_t r = 0; r < nref; ++r) {
            if (rng.next_double() < 0.3) {
                doc.refs.push_back("Author" + std::to_string(rng.next_below(500)) + " (" +
                                   std::to_string(1990 + rng.next_below(25)) +
                                   ") external work " + std::to_string(rng.next_below(1000)));
                continue;
            }
            const auto& pool = (rng.next_double() < 0.8) == (doc.cls == 1) ? related_docs
                                                                           : unrelated_docs;
            if (pool.empty()) continue;
            std::size_t target = pool[rng.next_below(pool.size())];
            if (target != d) doc.refs.push_back(docs[target].id);
        }
    }

    std::ostringstream corpus;
    corpus << "doc_id,source_id,source_title,source_type,doc_type,year,language,title,abstract,"
              "author_keywords,index_keywords,references,citation_count\n";
    auto join = [](const std::vector<std::string>& parts) {
        std::string s;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ';';
            s += parts[i];
        }
        return s;
    };
    for (const auto& doc : docs) {
        std::string source_title = "Venue " + out.source_ids[doc.source];
        std::string source_type = doc.source % 3 == 0 ? "proceeding" : "journal";
        sciencemap::csv::write_row(
            corpus, {doc.id, out.source_ids[doc.source], source_title, source_type, doc.doc_type,
                     std::to_string(doc.year), doc.language, doc.title, doc.abstract,
                     join(doc.author_kw), join(doc.index_kw), join(doc.refs),
                     std::to_string(doc.cites)});
    }
    out.corpus_csv = corpus.str();

    std::ostringstream cats, labels;
    labels << "source_id,label\n";
    for (std::size_t s = 0; s < n_sources; ++s) {
        int cls = out.source_class[s];
        if (cls == 1) {
            cats << out.source_ids[s] << ",Education\n";
            if (rng.next_double() < 0.6) cats << out.source_ids[s] << ",Computer Science\n";
            if (rng.next_double() < 0.25) cats << out.source_ids[s] << ",Documentation\n";
        } else if (cls == 2) {
            cats << out.source_ids[s] << ",Education\n";
            cats << out.source_ids[s] << ",Engineering\n";
        } else {
            static const char* pools[] = {"Medicine", "Physics",   "Chemistry",
                                          "Biology",  "Economics", "Engineering"};
            cats << out.source_ids[s] << ',' << pools[rng.next_below(6)] << '\n';
            if (rng.next_double() < 0.3)
                cats << out.source_ids[s] << ',' << pools[rng.next_below(6)] << '\n';
        }
        labels << out.source_ids[s] << ',' << (cls == 0 ? "unrelated" : "related") << '\n';
    }
    out.categories_csv = cats.str();
    out.labels_csv = labels.str();
    return out;
}

inline sciencemap::Corpus parse_synthetic(const SyntheticCorpus& fixture) {
    std::istringstream in(fixture.corpus_csv);
    sciencemap::Corpus corpus = sciencemap::parse_corpus(in);
    std::istringstream cat(fixture.categories_csv);
    corpus.attach_categories(sciencemap::load_categories(cat));
    return corpus;
}

// Random symmetric weighted graph with the given edge probability.
inline sciencemap::SimilarityMatrix random_graph(std::size_t n, double edge_prob, Rng& rng,
                                                 double wlo = 0.1, double whi = 1.0) {
    sciencemap::SimilarityMatrix sim(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.next_double() < edge_prob) sim.set(i, j, rng.next_double(wlo, whi));
    return sim;
}

// Random connected graph: random spanning tree plus extra random edges.
inline sciencemap::SimilarityMatrix random_connected_graph(std::size_t n, double extra_prob,
                                                           Rng& rng, double wlo = 0.1,
                                                           double whi = 1.0) {
    sciencemap::SimilarityMatrix sim(n);
    for (std::size_t i = 1; i < n; ++i)
        sim.set(rng.next_below(i), i, rng.next_double(wlo, whi));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (sim.at(i, j) == 0.0 && rng.next_double() < extra_prob)
                sim.set(i, j, rng.next_double(wlo, whi));
    return sim;
}

} // namespace fixtures
