#pragma once

#include <array>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sciencemap/categraph.hpp"
#include "sciencemap/csv.hpp"
#include "sciencemap/descriptors.hpp"
#include "sciencemap/layout.hpp"
#include "sciencemap/overlay.hpp"
#include "sciencemap/participation.hpp"
#include "sciencemap/simnet.hpp"
#include "sciencemap/svg.hpp"
#include "sciencemap/vosmap.hpp"

namespace sciencemap {

// Locale-independent, exactly round-trippable double formatting shared by
// every text artifact so reruns are byte-identical and parse-back is lossless.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- descriptor exports ---------------------------------------------------

// CSV `term_i,term_j,count`
inline void write_cooccurrence_csv(std::ostream& out, const CooccurrenceMatrix& cooc) {
    out << "term_i,term_j,count\n";
    const auto& terms = cooc.terms();
    for (const auto& e : cooc.sorted_entries())
        csv::write_row(out, {terms[e.i].term, terms[e.j].term, std::to_string(e.count)});
}

// stage artifact: the descriptor set with term roles
inline void write_descriptor_csv(std::ostream& out, const DescriptorSet& dset) {
    out << "term,type,canonical\n";
    for (const auto& t : dset.primary)
        csv::write_row(out, {t, "primary", t});
    for (const auto& [v, c] : dset.secondary)
        csv::write_row(out, {v, "secondary", c});
}

inline DescriptorSet read_descriptor_csv(std::istream& in, const std::string& term_core) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    DescriptorSet dset;
    dset.term_core = text::normalize_term(term_core);
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 3)
            throw MalformedRow(reader.record_line(), "expected term,type,canonical");
        if (row[0] == "term" && row[1] == "type") continue;
        if (row[1] == "primary")
            dset.primary.push_back(row[0]);
        else if (row[1] == "secondary")
            dset.secondary[row[0]] = row[2];
        else
            throw MalformedRow(reader.record_line(), "type must be primary or secondary");
    }
    return dset;
}

// VOSViewer-style network file: tab-separated `i	j	weight`, 1-based ids.
inline void write_network_file(std::ostream& out, const SimilarityMatrix& sim) {
    for (const auto& e : sim.sorted_entries())
        out << (e.i + 1) << '\t' << (e.j + 1) << '\t' << fmt_double(e.weight) << '\n';
}

// Companion map file: `id	label	weight`.
inline void write_map_file(std::ostream& out, const std::vector<std::string>& labels,
                           const std::vector<double>& weights) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << (i + 1) << '\t' << labels[i] << '\t'
            << fmt_double(i < weights.size() ? weights[i] : 0.0) << '\n';
}

inline std::vector<std::pair<std::string, double>> read_map_file(std::istream& in) {
    std::vector<std::pair<std::string, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw MalformedRow(line_no, "expected id\tlabel\tweight");
        try {
            rows.emplace_back(line.substr(t1 + 1, t2 - t1 - 1), std::stod(line.substr(t2 + 1)));
        } catch (const std::exception&) {
            throw MalformedRow(line_no, "non-numeric map weight");
        }
    }
    return rows;
}

inline SimilarityMatrix read_network_file(std::istream& in, std::size_t n) {
    SimilarityMatrix sim(n);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw MalformedRow(line_no, "expected i\tj\tweight");
        try {
            std::size_t i = std::stoull(line.substr(0, t1));
            std::size_t j = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
            if (i < 1 || j < 1) throw MalformedRow(line_no, "network ids are 1-based");
            sim.set(i - 1, j - 1, std::stod(line.substr(t2 + 1)));
        } catch (const MalformedRow&) {
            throw;
        } catch (const std::exception&) {
            throw MalformedRow(line_no, "non-numeric network cell");
        }
    }
    return sim;
}

// --- participation exports ------------------------------------------------

// CSV `source_id,TNA,NRA,PP`
inline void write_participation_csv(std::ostream& out, const ParticipationResult& result) {
    out << "source_id,TNA,NRA,PP\n";
    for (const auto& r : result.rows)
        csv::write_row(out, {r.source_id, std::to_string(r.tna), std::to_string(r.nra),
                             fmt_double(r.pp)});
}

inline ParticipationResult read_participation_csv(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    ParticipationResult result;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 4)
            throw MalformedRow(reader.record_line(), "expected source_id,TNA,NRA,PP");
        if (row[0] == "source_id") continue;
        ParticipationRow r;
        r.source_id = row[0];
        try {
            r.tna = std::stoll(row[1]);
            r.nra = std::stoll(row[2]);
            r.pp = std::stod(row[3]);
        } catch (const std::exception&) {
            throw MalformedRow(reader.record_line(), "non-numeric participation cell");
        }
        result.rows.push_back(std::move(r));
    }
    return result;
}

// Band table CSV mirroring the cut-off table columns.
inline void write_band_csv(std::ostream& out, const std::vector<BandRow>& table) {
    out << "threshold,included,errors,error_percent,avg_pp\n";
    for (const auto& b : table)
        csv::write_row(out, {fmt_double(b.threshold_percent), std::to_string(b.included),
                             std::to_string(b.errors), std::to_string(b.error_percent),
                             std::to_string(b.avg_pp)});
}

inline void write_selected_csv(std::ostream& out, const std::vector<std::string>& selected) {
    out << "source_id\n";
    for (const auto& s : selected) csv::write_row(out, {s});
}

inline std::vector<std::string> read_selected_csv(std::istream& in) {
    csv::Reader reader(in);
    std::vector<std::string> row;
    std::vector<std::string> out;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (row.size() != 1) throw MalformedRow(reader.record_line(), "expected source_id");
        if (row[0] == "source_id") continue;
        out.push_back(row[0]);
    }
    return out;
}

// --- simnet exports ---------------------------------------------------------

// CSV `source_i,source_j,count,channel`; citation rows are directed
// (cited-from, cited-to) so the raw direction stays auditable, the other
// channels are symmetric with i < j.
inline void write_channel_csv(std::ostream& out, const std::vector<std::string>& source_ids,
                              const DirectedCitations& directed, const ChannelMatrix& cocitation,
                              const ChannelMatrix& coupling) {
    out << "source_i,source_j,count,channel\n";
    for (const auto& [pair, c] : directed.counts)
        csv::write_row(out, {source_ids[pair.first], source_ids[pair.second],
                             std::to_string(c), "citation"});
    for (const auto& [i, j, c] : cocitation.sorted_entries())
        csv::write_row(out, {source_ids[i], source_ids[j], std::to_string(c), "cocitation"});
    for (const auto& [i, j, c] : coupling.sorted_entries())
        csv::write_row(out, {source_ids[i], source_ids[j], std::to_string(c), "coupling"});
}

// --- map exports ------------------------------------------------------------

// VOSViewer-style map file `id	label	x	y	cluster	weight`.
inline void write_layout_map_file(std::ostream& out, const MapLayout& layout,
                                  const Clustering* clusters,
                                  const std::vector<double>& weights) {
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const std::string& label =
            i < layout.ids.size() ? layout.ids[i] : std::to_string(i + 1);
        out << (i + 1) << '\t' << label << '\t' << fmt_double(layout.positions[i].x) << '\t'
            << fmt_double(layout.positions[i].y) << '\t'
            << (clusters != nullptr ? clusters->labels[i] : 0) << '\t'
            << fmt_double(i < weights.size() ? weights[i] : 0.0) << '\n';
    }
}

struct MapFileRow {
    std::string label;
    Vec2 position;
    int cluster = 0;
    double weight = 0.0;
};

inline std::vector<MapFileRow> read_layout_map_file(std::istream& in) {
    std::vector<MapFileRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t tab = line.find('\t', start);
            if (tab == std::string::npos) tab = line.size();
            cells.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (cells.size() != 6) throw MalformedRow(line_no, "expected 6 tab-separated map columns");
        MapFileRow r;
        r.label = cells[1];
        try {
            r.position.x = std::stod(cells[2]);
            r.position.y = std::stod(cells[3]);
            r.cluster = std::stoi(cells[4]);
            r.weight = std::stod(cells[5]);
        } catch (const std::exception&) {
            throw MalformedRow(line_no, "non-numeric map cell");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

// Grid CSV: one header line with the geometry, then the raster row by row.
inline void write_density_csv(std::ostream& out, const DensityField& f) {
    out << "width,height,min_x,min_y,max_x,max_y,bandwidth\n";
    out << f.width << ',' << f.height << ',' << fmt_double(f.min_x) << ',' << fmt_double(f.min_y)
        << ',' << fmt_double(f.max_x) << ',' << fmt_double(f.max_y) << ','
        << fmt_double(f.bandwidth) << '\n';
    for (std::size_t y = 0; y < f.height; ++y) {
        for (std::size_t x = 0; x < f.width; ++x) {
            if (x) out.put(',');
            out << fmt_double(f.values[y * f.width + x]);
        }
        out.put('\n');
    }
}

namespace detail {

// map coordinates -> pixel transform fitting a bbox into a canvas
struct PixelTransform {
    double min_x, min_y, scale, offset_x, offset_y;

    double px(double x) const { return offset_x + (x - min_x) * scale; }
    double py(double y) const { return offset_y + (y - min_y) * scale; }
};

inline PixelTransform fit_canvas(double min_x, double min_y, double max_x, double max_y,
                                 double canvas, double margin) {
    double span_x = max_x - min_x, span_y = max_y - min_y;
    double span = std::max({span_x, span_y, 1e-9});
    double scale = (canvas - 2.0 * margin) / span;
    return {min_x, min_y, scale, margin + (canvas - 2.0 * margin - span_x * scale) / 2.0,
            margin + (canvas - 2.0 * margin - span_y * scale) / 2.0};
}

inline const std::vector<std::string>& default_palette() {
    static const std::vector<std::string> colors = {
        "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e",
        "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
    return colors;
}

} // namespace detail

inline std::string cluster_color(int cluster) {
    const auto& palette = detail::default_palette();
    if (cluster < 1) return "#999999";
    return palette[static_cast<std::size_t>(cluster - 1) % palette.size()];
}

// Heat layer: density raster as colored cells with the nodes on top.
inline std::string render_density_svg(const MapLayout& layout, const DensityField& f,
                                      double canvas = 640.0) {
    svg::Document doc(canvas, canvas);
    auto t = detail::fit_canvas(f.min_x, f.min_y, f.max_x, f.max_y, canvas, 0.0);
    double vmax = 0.0;
    for (double v : f.values) vmax = std::max(vmax, v);
    double cw = f.cell_width() * t.scale, ch = f.cell_height() * t.scale;
    for (std::size_t y = 0; y < f.height; ++y)
        for (std::size_t x = 0; x < f.width; ++x) {
            double v = f.values[y * f.width + x];
            doc.rect(t.px(f.min_x + static_cast<double>(x) * f.cell_width()),
                     canvas - t.py(f.min_y + static_cast<double>(y + 1) * f.cell_height()),
                     cw + 0.05, ch + 0.05,
                     svg::heat_color(vmax > 0.0 ? v / vmax : 0.0));
        }
    for (const auto& p : layout.positions)
        doc.circle(t.px(p.x), canvas - t.py(p.y), 2.0, "#333333");
    return doc.finish();
}

// Overlay render: base nodes muted, subset nodes highlighted in their
// cluster color.
inline std::string render_overlay_svg(const OverlaySpec& overlay, double canvas = 640.0) {
    const MapLayout& base = overlay.base;
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    for (const auto& p : base.positions) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    svg::Document doc(canvas, canvas);
    doc.rect(0, 0, canvas, canvas, "#ffffff");
    auto t = detail::fit_canvas(min_x, min_y, max_x, max_y, canvas, 24.0);
    for (std::size_t i = 0; i < base.size(); ++i)
        if (overlay.highlight[i] == 0.0)
            doc.circle(t.px(base.positions[i].x), canvas - t.py(base.positions[i].y), 2.5,
                       "#cccccc");
    for (std::size_t i = 0; i < base.size(); ++i)
        if (overlay.highlight[i] > 0.0)
            doc.circle(t.px(base.positions[i].x), canvas - t.py(base.positions[i].y), 4.0,
                       cluster_color(overlay.clusters.labels.empty()
                                         ? 0
                                         : overlay.clusters.labels[i]),
                       "stroke=\"#333333\" stroke-width=\"0.8\"");
    return doc.finish();
}

// Category graph render: node size proportional to node weight, edges
// scaled by count, colors from the (partial) category color table.
inline std::string render_categraph_svg(const CategoryGraph& graph, const MapLayout& layout,
                                        const std::map<std::string, std::string>& colors = {},
                                        double canvas = 640.0) {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    for (const auto& p : layout.positions) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    svg::Document doc(canvas, canvas);
    doc.rect(0, 0, canvas, canvas, "#ffffff");
    auto t = detail::fit_canvas(min_x, min_y, max_x, max_y, canvas, 48.0);

    long long max_edge = 1, max_node = 1;
    for (const auto& [pair, c] : graph.edges) {
        (void)pair;
        max_edge = std::max(max_edge, c);
    }
    for (long long w : graph.node_weight) max_node = std::max(max_node, w);

    for (const auto& [pair, c] : graph.edges) {
        auto [i, j] = pair;
        doc.line(t.px(layout.positions[i].x), canvas - t.py(layout.positions[i].y),
                 t.px(layout.positions[j].x), canvas - t.py(layout.positions[j].y), "#aaaaaa",
                 0.5 + 3.0 * static_cast<double>(c) / static_cast<double>(max_edge));
    }
    const auto& palette = detail::default_palette();
    for (std::size_t i = 0; i < graph.size(); ++i) {
        auto it = colors.find(graph.categories[i]);
        std::string fill = it != colors.end() ? it->second : palette[i % palette.size()];
        double r = 4.0 + 14.0 * std::sqrt(static_cast<double>(graph.node_weight[i]) /
                                          static_cast<double>(max_node));
        double cx = t.px(layout.positions[i].x), cy = canvas - t.py(layout.positions[i].y);
        doc.circle(cx, cy, r, fill, "stroke=\"#333333\" stroke-width=\"0.8\"");
        doc.text(cx + r + 2.0, cy + 3.0, graph.categories[i], 11.0);
    }
    return doc.finish();
}

// --- JSON sidecars ----------------------------------------------------------

inline nlohmann::json cohesion_json(const CohesionReport& r) {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [cluster, count] : r.subset_cluster_histogram)
        hist[std::to_string(cluster)] = count;
    return {{"within_subset_strength", r.within_subset_strength},
            {"expected_strength", r.expected_strength},
            {"ratio", r.ratio},
            {"permutation_p", r.permutation_p},
            {"permutations", r.permutations},
            {"subset_cluster_histogram", hist}};
}

inline nlohmann::json core_stats_json(const CoreStats& stats) {
    nlohmann::json shares = nlohmann::json::object();
    for (const auto& [cat, pct] : stats.category_share)
        shares[cat] = {{"percent", pct}, {"percent_rounded", text::round_half_up(pct)}};
    nlohmann::json overlaps = nlohmann::json::object();
    for (const auto& [pair, pct] : stats.overlap_share)
        overlaps[pair.first + "|" + pair.second] = {{"percent", pct},
                                                    {"percent_rounded", text::round_half_up(pct)}};
    return {{"core_size", stats.core_set.size()},
            {"core_set", stats.core_set},
            {"category_shares", shares},
            {"overlap_shares", overlaps}};
}

inline nlohmann::json categraph_json(const CategoryGraph& graph, const MapLayout& layout) {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < graph.size(); ++i)
        nodes.push_back({{"category", graph.categories[i]},
                         {"weight", graph.node_weight[i]},
                         {"x", layout.positions[i].x},
                         {"y", layout.positions[i].y}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [pair, c] : graph.edges)
        edges.push_back({{"source", graph.categories[pair.first]},
                         {"target", graph.categories[pair.second]},
                         {"count", c}});
    return {{"nodes", nodes}, {"edges", edges}, {"skipped_sources", graph.skipped_sources}};
}

inline nlohmann::json band_table_json(const std::vector<BandRow>& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& b : table)
        rows.push_back({{"threshold", b.threshold_percent},
                        {"included", b.included},
                        {"errors", b.errors},
                        {"error_percent", b.error_percent},
                        {"avg_pp", b.avg_pp}});
    return rows;
}

} // namespace sciencemap
