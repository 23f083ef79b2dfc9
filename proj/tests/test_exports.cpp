#include <catch_amalgamated.hpp>

#include <sstream>

#include "fixtures.hpp"
#include "sciencemap/exports.hpp"

using namespace sciencemap;

TEST_CASE("fmt_double round-trips exactly") {
    double values[] = {0.0,  1.0,       1.0 / 3.0, 76.92307692307692, 1e-17,
                       -2.5, 1234567.75, 0.1,      9.869604401089358e-10};
    for (double v : values) {
        CAPTURE(v);
        CHECK(std::stod(fmt_double(v)) == v);
    }
}

TEST_CASE("network and map files round-trip") {
    Rng rng(66);
    auto sim = fixtures::random_graph(9, 0.5, rng);
    std::ostringstream net;
    write_network_file(net, sim);
    std::istringstream in(net.str());
    auto back = read_network_file(in, 9);
    REQUIRE(back.nonzero_count() == sim.nonzero_count());
    for (const auto& e : sim.sorted_entries()) CHECK(back.at(e.i, e.j) == e.weight);

    std::ostringstream mapf;
    write_map_file(mapf, {"alpha", "beta", "gamma"}, {1.5, 0.25, 3.0});
    std::istringstream min(mapf.str());
    auto rows = read_map_file(min);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].first == "alpha");
    CHECK(rows[0].second == 1.5);
    CHECK(rows[2].second == 3.0);

    std::istringstream bad("1\tonly-two-fields\n");
    CHECK_THROWS_AS(read_map_file(bad), MalformedRow);
    std::istringstream badnet("1\t2\tx\n");
    CHECK_THROWS_AS(read_network_file(badnet, 3), MalformedRow);
    std::istringstream zeronet("0\t2\t0.5\n");
    CHECK_THROWS_AS(read_network_file(zeronet, 3), MalformedRow);
}

TEST_CASE("layout map file round-trips positions exactly") {
    MapLayout layout;
    Rng rng(5);
    for (int i = 0; i < 7; ++i) {
        layout.ids.push_back("id-" + std::to_string(i));
        layout.positions.push_back({rng.next_double(-2, 2), rng.next_double(-2, 2)});
    }
    Clustering clusters;
    clusters.labels = {1, 2, 1, 3, 2, 1, 3};
    clusters.cluster_count = 3;
    std::vector<double> weights{0.5, 1.5, 2.0, 0.0, 3.25, 1.0, 0.75};

    std::ostringstream out;
    write_layout_map_file(out, layout, &clusters, weights);
    std::istringstream in(out.str());
    auto rows = read_layout_map_file(in);
    REQUIRE(rows.size() == 7);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CAPTURE(i);
        CHECK(rows[i].label == layout.ids[i]);
        CHECK(rows[i].position.x == layout.positions[i].x); // %.17g is lossless
        CHECK(rows[i].position.y == layout.positions[i].y);
        CHECK(rows[i].cluster == clusters.labels[i]);
        CHECK(rows[i].weight == weights[i]);
    }

    // cluster column written as 0 when no clustering is given
    std::ostringstream bare;
    write_layout_map_file(bare, layout, nullptr, weights);
    std::istringstream bin(bare.str());
    auto brows = read_layout_map_file(bin);
    for (const auto& r : brows) CHECK(r.cluster == 0);
}

TEST_CASE("participation, selected, and descriptor csv round-trip") {
    ParticipationResult result;
    result.rows = {{"s1", 30, 10, 100.0 / 3.0}, {"s2", 7, 7, 100.0}};
    std::ostringstream out;
    write_participation_csv(out, result);
    std::istringstream in(out.str());
    auto back = read_participation_csv(in);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0].source_id == "s1");
    CHECK(back.rows[0].tna == 30);
    CHECK(back.rows[0].nra == 10);
    CHECK(back.rows[0].pp == result.rows[0].pp);

    std::ostringstream sel;
    write_selected_csv(sel, {"s2", "s1"});
    std::istringstream sin(sel.str());
    CHECK(read_selected_csv(sin) == std::vector<std::string>{"s2", "s1"});

    DescriptorSet dset;
    dset.term_core = "e-learning";
    dset.primary = {"e-learning", "lms"};
    dset.secondary = {{"elearning", "e-learning"}};
    std::ostringstream dout;
    write_descriptor_csv(dout, dset);
    std::istringstream din(dout.str());
    auto dback = read_descriptor_csv(din, "e-learning");
    CHECK(dback.primary == dset.primary);
    CHECK(dback.secondary == dset.secondary);
    CHECK(dback.term_core == "e-learning");
}

TEST_CASE("band csv lists the cut-off table columns") {
    std::vector<ParticipationRow> rows = {{"a", 10, 10, 100.0}, {"b", 10, 4, 40.0}};
    RelatednessLabels labels;
    labels.by_source = {{"a", Relatedness::Related}, {"b", Relatedness::Unrelated}};
    auto table = band_table(rows, labels, {100.0, 30.0});
    std::ostringstream out;
    write_band_csv(out, table);
    std::string s = out.str();
    CHECK(s.find("threshold,included,errors,error_percent,avg_pp\n") == 0);
    CHECK(s.find("100,1,0,0,100") != std::string::npos);
    CHECK(s.find("30,2,1,50,70") != std::string::npos);
}

TEST_CASE("channel csv keeps citation direction and tags channels") {
    DirectedCitations directed;
    directed.counts[{0, 1}] = 3;
    directed.counts[{1, 0}] = 2;
    ChannelMatrix cocit;
    cocit.channel = Channel::CoCitation;
    cocit.n = 3;
    cocit.add(0, 2, 4);
    ChannelMatrix coup;
    coup.channel = Channel::Coupling;
    coup.n = 3;
    coup.add(1, 2, 1);
    std::ostringstream out;
    write_channel_csv(out, {"sA", "sB", "sC"}, directed, cocit, coup);
    std::string s = out.str();
    CHECK(s.find("source_i,source_j,count,channel\n") == 0);
    CHECK(s.find("sA,sB,3,citation\n") != std::string::npos);
    CHECK(s.find("sB,sA,2,citation\n") != std::string::npos);
    CHECK(s.find("sA,sC,4,cocitation\n") != std::string::npos);
    CHECK(s.find("sB,sC,1,coupling\n") != std::string::npos);
}

TEST_CASE("density csv carries geometry then raster rows") {
    MapLayout layout;
    layout.converged = true;
    layout.positions = {{0, 0}, {1, 1}};
    auto f = density_field(layout, {}, 0.25, 8, 4);
    std::ostringstream out;
    write_density_csv(out, f);
    std::istringstream in(out.str());
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "width,height,min_x,min_y,max_x,max_y,bandwidth");
    REQUIRE(std::getline(in, line));
    CHECK(line.substr(0, 4) == "8,4,");
    std::size_t raster_rows = 0;
    while (std::getline(in, line)) {
        ++raster_rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 7);
    }
    CHECK(raster_rows == 4);
}

TEST_CASE("svg primitives format numbers stably") {
    CHECK(svg::num(1.0) == "1.0000");
    CHECK(svg::num(-1e-9) == "0.0000");
    CHECK(svg::num(2.5) == "2.5000");
    CHECK(svg::escape("a<b&c>\"d\"") == "a&lt;b&amp;c&gt;&quot;d&quot;");
    CHECK(svg::heat_color(0.0) == "#ffffff");
    CHECK(svg::heat_color(1.0) == "#ff3c14");
}

TEST_CASE("overlay svg renders deterministically with highlighted subset") {
    MapLayout base;
    Rng rng(9);
    for (int i = 0; i < 12; ++i) {
        base.ids.push_back("n" + std::to_string(i));
        base.positions.push_back({rng.next_double(-1, 1), rng.next_double(-1, 1)});
    }
    base.converged = true;
    Clustering clusters;
    for (int i = 0; i < 12; ++i) clusters.labels.push_back(1 + i % 3);
    clusters.cluster_count = 3;
    auto overlay = make_overlay(base, clusters, {"n2", "n5", "n8"});
    auto svg1 = render_overlay_svg(overlay);
    auto svg2 = render_overlay_svg(overlay);
    CHECK(svg1 == svg2);
    CHECK(svg1.rfind("<svg", 0) == 0);
    CHECK(svg1.find("</svg>") != std::string::npos);
    // 9 muted + 3 highlighted circles
    std::size_t muted = 0, bold = 0, at = 0;
    while ((at = svg1.find("#cccccc", at)) != std::string::npos) {
        ++muted;
        at += 7;
    }
    at = 0;
    while ((at = svg1.find("stroke-width=\"0.8\"", at)) != std::string::npos) {
        ++bold;
        at += 10;
    }
    CHECK(muted == 9);
    CHECK(bold == 3);
}

TEST_CASE("density and categraph svg render deterministically") {
    MapLayout layout;
    layout.converged = true;
    layout.positions = {{0, 0}, {0.5, 0.2}, {-0.3, 0.4}};
    auto f = density_field(layout, {1.0, 2.0, 1.5}, 0.15, 24, 24);
    auto s1 = render_density_svg(layout, f);
    auto s2 = render_density_svg(layout, f);
    CHECK(s1 == s2);
    CHECK(s1.find("<rect") != std::string::npos);

    CategoryGraph g;
    g.categories = {"Computer Science", "Education & Training"};
    g.node_weight = {4, 9};
    g.edges[{0, 1}] = 3;
    auto gl = fr_layout(g, 0.0, 100, 2);
    auto c1 = render_categraph_svg(g, gl);
    CHECK(c1 == render_categraph_svg(g, gl));
    CHECK(c1.find("Education &amp; Training") != std::string::npos);
    CHECK(c1.find("<line") != std::string::npos);
}

TEST_CASE("json sidecars expose the reported fields") {
    CohesionReport r;
    r.within_subset_strength = 12.5;
    r.expected_strength = 4.0;
    r.ratio = 3.125;
    r.permutation_p = 0.003;
    r.permutations = 1000;
    r.subset_cluster_histogram = {{1, 20}, {3, 6}};
    auto j = cohesion_json(r);
    CHECK(j["ratio"] == 3.125);
    CHECK(j["permutations"] == 1000);
    CHECK(j["subset_cluster_histogram"]["1"] == 20);
    CHECK(j["subset_cluster_histogram"]["3"] == 6);

    CoreStats stats;
    stats.core_set = {"x", "y"};
    stats.category_share = {{"Education", 76.92307692307692}};
    stats.overlap_share = {{{"Education", "Computer Science"}, 65.0}};
    auto cj = core_stats_json(stats);
    CHECK(cj["core_size"] == 2);
    CHECK(cj["category_shares"]["Education"]["percent_rounded"] == 77);
    CHECK(cj["overlap_shares"]["Education|Computer Science"]["percent"] == 65.0);

    CategoryGraph g;
    g.categories = {"A", "B"};
    g.node_weight = {2, 5};
    g.edges[{0, 1}] = 4;
    g.skipped_sources = 1;
    MapLayout gl;
    gl.positions = {{0.0, 0.1}, {1.0, -0.2}};
    auto gj = categraph_json(g, gl);
    CHECK(gj["nodes"].size() == 2);
    CHECK(gj["nodes"][1]["weight"] == 5);
    CHECK(gj["edges"][0]["count"] == 4);
    CHECK(gj["skipped_sources"] == 1);

    BandRow b;
    b.threshold_percent = 25.0;
    b.included = 230;
    b.errors = 11;
    b.error_percent = 5;
    b.avg_pp = 51;
    auto bj = band_table_json({b});
    CHECK(bj[0]["included"] == 230);
    CHECK(bj[0]["error_percent"] == 5);
}
