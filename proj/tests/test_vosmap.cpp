#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sciencemap/vosmap.hpp"

using namespace sciencemap;

namespace {

double centroid_norm(const std::vector<Vec2>& pos) {
    double cx = 0, cy = 0;
    for (const auto& p : pos) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(pos.size());
    cy /= static_cast<double>(pos.size());
    return std::hypot(cx, cy);
}

double pure_objective(const SimilarityMatrix& sim, const std::vector<Vec2>& pos) {
    double e = 0.0;
    for (const auto& en : sim.sorted_entries()) {
        double dx = pos[en.i].x - pos[en.j].x, dy = pos[en.i].y - pos[en.j].y;
        e += en.weight * (dx * dx + dy * dy);
    }
    return e;
}

} // namespace

TEST_CASE("vos_layout: two nodes end up at unit distance") {
    SimilarityMatrix sim(2);
    sim.set(0, 1, 1.0);
    auto layout = vos_layout(sim, 7);
    REQUIRE(layout.size() == 2);
    CHECK(layout.converged);
    CHECK(distance(layout.positions[0], layout.positions[1]) == Catch::Approx(1.0).margin(1e-6));
    CHECK(centroid_norm(layout.positions) <= 1e-9);
}

TEST_CASE("vos_layout: three equal weights form an equilateral triangle") {
    SimilarityMatrix sim(3);
    sim.set(0, 1, 1.0);
    sim.set(1, 2, 1.0);
    sim.set(0, 2, 1.0);
    auto layout = vos_layout(sim, 3, 10000, 1e-10);
    REQUIRE(layout.converged);
    double d01 = distance(layout.positions[0], layout.positions[1]);
    double d12 = distance(layout.positions[1], layout.positions[2]);
    double d02 = distance(layout.positions[0], layout.positions[2]);
    CHECK(d01 == Catch::Approx(1.0).margin(1e-4));
    CHECK(d12 == Catch::Approx(1.0).margin(1e-4));
    CHECK(d02 == Catch::Approx(1.0).margin(1e-4));
    CHECK(mean_pairwise_distance(layout.positions) == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("vos_layout: objective is non-increasing and constraint holds") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto sim = fixtures::random_connected_graph(10, 0.3, rng);
        auto layout = vos_layout(sim, 100 + static_cast<std::uint64_t>(trial));
        CAPTURE(trial);
        REQUIRE(layout.converged);
        REQUIRE(layout.objective_trace.size() >= 2);
        for (std::size_t t = 1; t < layout.objective_trace.size(); ++t) {
            CAPTURE(t);
            REQUIRE(layout.objective_trace[t] <=
                    layout.objective_trace[t - 1] + 1e-9 * std::max(1.0, layout.objective_trace[t - 1]));
        }
        CHECK(mean_pairwise_distance(layout.positions) == Catch::Approx(1.0).margin(1e-6));
        CHECK(centroid_norm(layout.positions) <= 1e-9);
        CHECK(layout.objective_value == Catch::Approx(pure_objective(sim, layout.positions)));
        CHECK(layout.iterations == layout.objective_trace.size());
    }
}

TEST_CASE("vos_layout: scaling all weights leaves the optimum unchanged") {
    Rng rng(55);
    auto sim = fixtures::random_connected_graph(12, 0.4, rng);
    SimilarityMatrix scaled = sim;
    scaled.scale(3.7);
    auto a = vos_layout(sim, 9);
    auto b = vos_layout(scaled, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.positions[i].x == Catch::Approx(b.positions[i].x).margin(1e-9));
        CHECK(a.positions[i].y == Catch::Approx(b.positions[i].y).margin(1e-9));
    }
    CHECK(b.objective_value == Catch::Approx(3.7 * a.objective_value));
}

TEST_CASE("vos_layout beats random feasible configurations") {
    Rng rng(77);
    auto sim = fixtures::random_connected_graph(10, 0.35, rng);
    auto layout = vos_layout(sim, 4);
    REQUIRE(layout.converged);
    Rng search(4040);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Vec2> pos(10);
        for (auto& p : pos) {
            p.x = search.next_double(-1.0, 1.0);
            p.y = search.next_double(-1.0, 1.0);
        }
        double d = mean_pairwise_distance(pos);
        if (d <= 0.0) continue;
        for (auto& p : pos) {
            p.x /= d;
            p.y /= d;
        }
        REQUIRE(layout.objective_value <= pure_objective(sim, pos) + 1e-9);
    }
}

TEST_CASE("vos_layout handles disconnected and edgeless graphs") {
    SimilarityMatrix sim(6); // two triangles, no bridge
    sim.set(0, 1, 1.0);
    sim.set(1, 2, 1.0);
    sim.set(0, 2, 1.0);
    sim.set(3, 4, 1.0);
    sim.set(4, 5, 1.0);
    sim.set(3, 5, 1.0);
    auto layout = vos_layout(sim, 11);
    REQUIRE(layout.size() == 6);
    CHECK(layout.converged);
    CHECK(mean_pairwise_distance(layout.positions) == Catch::Approx(1.0).margin(1e-6));
    // the two components must not collapse onto each other
    CHECK(distance(layout.positions[0], layout.positions[3]) > 0.1);

    SimilarityMatrix edgeless(4);
    auto l2 = vos_layout(edgeless, 12);
    CHECK(l2.converged);
    CHECK(mean_pairwise_distance(l2.positions) == Catch::Approx(1.0).margin(1e-6));
    CHECK(l2.objective_value == 0.0); // no edges: reported objective is zero
}

TEST_CASE("vos_layout rejects degenerate inputs and is deterministic") {
    CHECK_THROWS_AS(vos_layout(SimilarityMatrix(0), 1), Degenerate);
    CHECK_THROWS_AS(vos_layout(SimilarityMatrix(1), 1), Degenerate);

    Rng rng(31);
    auto sim = fixtures::random_connected_graph(8, 0.4, rng);
    auto a = vos_layout(sim, 5);
    auto b = vos_layout(sim, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.positions[i].x == b.positions[i].x);
        CHECK(a.positions[i].y == b.positions[i].y);
    }
    CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("canonicalize: centroid at origin, principal axis on x, fixed signs") {
    Rng rng(88);
    std::vector<Vec2> pos(9);
    for (auto& p : pos) {
        p.x = rng.next_double(-3.0, 5.0);
        p.y = rng.next_double(2.0, 4.0);
    }
    canonicalize(pos);
    CHECK(centroid_norm(pos) <= 1e-9);
    double cxx = 0, cxy = 0, cyy = 0, sx3 = 0, sy3 = 0;
    for (const auto& p : pos) {
        cxx += p.x * p.x;
        cxy += p.x * p.y;
        cyy += p.y * p.y;
        sx3 += p.x * p.x * p.x;
        sy3 += p.y * p.y * p.y;
    }
    CHECK(std::abs(cxy) <= 1e-9 * (cxx + cyy));
    CHECK(cxx >= cyy); // variance concentrated on the x axis
    CHECK(sx3 >= -1e-9);
    CHECK(sy3 >= -1e-9);

    // idempotent up to sign convention
    auto again = pos;
    canonicalize(again);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        CHECK(again[i].x == Catch::Approx(pos[i].x).margin(1e-9));
        CHECK(again[i].y == Catch::Approx(pos[i].y).margin(1e-9));
    }
}

TEST_CASE("vos_cluster separates disjoint cliques at low resolution") {
    SimilarityMatrix sim(7);
    for (std::size_t i : {0, 1, 2})
        for (std::size_t j : {0, 1, 2})
            if (i < j) sim.set(i, j, 1.0);
    for (std::size_t i : {3, 4, 5, 6})
        for (std::size_t j : {3, 4, 5, 6})
            if (i < j) sim.set(i, j, 1.0);
    auto c = vos_cluster(sim, 0.05, 10, 1);
    CHECK(c.cluster_count == 2);
    CHECK(c.labels[0] == c.labels[1]);
    CHECK(c.labels[1] == c.labels[2]);
    CHECK(c.labels[3] == c.labels[4]);
    CHECK(c.labels[4] == c.labels[5]);
    CHECK(c.labels[5] == c.labels[6]);
    CHECK(c.labels[0] != c.labels[3]);
    // canonical ids: the size-4 cluster gets label 1
    CHECK(c.labels[3] == 1);
    CHECK(c.labels[0] == 2);
    CHECK(c.quality == Catch::Approx(cluster_quality(sim, c.labels, 0.05)).margin(1e-9));
}

TEST_CASE("vos_cluster at high resolution yields singletons") {
    SimilarityMatrix sim(4);
    sim.set(0, 1, 0.5);
    sim.set(2, 3, 0.4);
    auto c = vos_cluster(sim, 10.0, 5, 1);
    CHECK(c.cluster_count == 4);
    CHECK(c.labels == std::vector<int>{1, 2, 3, 4});
    CHECK(c.quality == 0.0);
}

TEST_CASE("vos_cluster validates inputs") {
    SimilarityMatrix sim(3);
    sim.set(0, 1, 1.0);
    CHECK_THROWS_AS(vos_cluster(sim, 0.0, 5, 1), ConfigError);
    CHECK_THROWS_AS(vos_cluster(sim, -1.0, 5, 1), ConfigError);
    CHECK_THROWS_AS(vos_cluster(sim, 0.5, 0, 1), ConfigError);
    auto empty = vos_cluster(SimilarityMatrix(0), 0.5, 5, 1);
    CHECK(empty.cluster_count == 0);
    CHECK(empty.labels.empty());
}

TEST_CASE("vos_cluster result is a local optimum under single-node moves") {
    Rng rng(606);
    for (int trial = 0; trial < 10; ++trial) {
        auto sim = fixtures::random_graph(12, 0.35, rng);
        double gamma = rng.next_double(0.05, 0.6);
        auto c = vos_cluster(sim, gamma, 8, 42);
        CAPTURE(trial, gamma);

        std::map<int, long long> size;
        for (int l : c.labels) ++size[l];
        auto adj = sim.adjacency();
        for (std::size_t v = 0; v < 12; ++v) {
            std::map<int, double> w_to;
            for (const auto& [u, w] : adj[v]) w_to[c.labels[u]] += w;
            int a = c.labels[v];
            double base = w_to[a] - gamma * static_cast<double>(size[a] - 1);
            for (const auto& [b, w] : w_to) {
                if (b == a) continue;
                double gain = (w - gamma * static_cast<double>(size[b])) - base;
                REQUIRE(gain <= 1e-9);
            }
            if (size[a] > 1) REQUIRE(-base <= 1e-9); // splitting off is no better
        }
        CHECK(c.quality == Catch::Approx(cluster_quality(sim, c.labels, gamma)).margin(1e-9));
    }
}

TEST_CASE("vos_cluster finds the exhaustive optimum on small graphs") {
    Rng rng(512);
    int optimal = 0;
    const int trials = 30;
    for (int trial = 0; trial < trials; ++trial) {
        std::size_t n = 4 + rng.next_below(5); // 4..8
        auto sim = fixtures::random_graph(n, 0.5, rng);
        double gamma = rng.next_double(0.05, 0.5);
        auto c = vos_cluster(sim, gamma, 20, 7);
        double opt = oracles::best_partition_quality(sim, gamma);
        CAPTURE(trial, n, gamma, c.quality, opt);
        REQUIRE(c.quality <= opt + 1e-9); // never exceeds the true optimum
        if (c.quality >= opt - 1e-9) ++optimal;
    }
    CHECK(optimal >= 28);
}

TEST_CASE("vos_cluster canonical labels: dense, size-descending, deterministic") {
    Rng rng(99);
    auto sim = fixtures::random_graph(15, 0.3, rng);
    auto c = vos_cluster(sim, 0.2, 6, 3);
    REQUIRE(c.cluster_count >= 1);
    std::map<int, long long> size;
    for (int l : c.labels) {
        CHECK(l >= 1);
        CHECK(l <= c.cluster_count);
        ++size[l];
    }
    CHECK(static_cast<int>(size.size()) == c.cluster_count);
    for (int l = 1; l < c.cluster_count; ++l) CHECK(size[l] >= size[l + 1]);

    auto c2 = vos_cluster(sim, 0.2, 6, 3);
    CHECK(c2.labels == c.labels);
}

TEST_CASE("density_field: single node mass and peak") {
    MapLayout layout;
    layout.positions = {{0.25, -0.5}};
    layout.converged = true;
    auto f = density_field(layout, {2.0}, 0.2, 96, 96);
    CHECK(f.mass() == Catch::Approx(2.0).epsilon(1e-3));
    // the hottest cell sits at the node
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.values.size(); ++i)
        if (f.values[i] > f.values[best]) best = i;
    double bx = f.min_x + (static_cast<double>(best % f.width) + 0.5) * f.cell_width();
    double by = f.min_y + (static_cast<double>(best / f.width) + 0.5) * f.cell_height();
    CHECK(bx == Catch::Approx(0.25).margin(f.cell_width()));
    CHECK(by == Catch::Approx(-0.5).margin(f.cell_height()));
}

TEST_CASE("density_field is linear in the weights") {
    MapLayout layout;
    layout.converged = true;
    Rng rng(7);
    for (int i = 0; i < 10; ++i)
        layout.positions.push_back({rng.next_double(-1, 1), rng.next_double(-1, 1)});
    std::vector<double> wa, wb, wsum;
    for (int i = 0; i < 10; ++i) {
        wa.push_back(rng.next_double(0, 3));
        wb.push_back(rng.next_double(0, 3));
        wsum.push_back(wa.back() + wb.back());
    }
    auto fa = density_field(layout, wa, 0.15, 64, 48);
    auto fb = density_field(layout, wb, 0.15, 64, 48);
    auto fs = density_field(layout, wsum, 0.15, 64, 48);
    REQUIRE(fa.values.size() == fs.values.size());
    for (std::size_t i = 0; i < fs.values.size(); ++i)
        REQUIRE(fs.values[i] == Catch::Approx(fa.values[i] + fb.values[i]).margin(1e-9));
    double total = 0;
    for (double w : wsum) total += w;
    CHECK(fs.mass() == Catch::Approx(total).epsilon(1e-3));
}

TEST_CASE("density_field: coincident nodes add up") {
    MapLayout one;
    one.converged = true;
    one.positions = {{0.1, 0.2}};
    MapLayout two;
    two.converged = true;
    two.positions = {{0.1, 0.2}, {0.1, 0.2}};
    auto f1 = density_field(one, {2.0}, 0.1, 32, 32);
    auto f2 = density_field(two, {1.0, 1.0}, 0.1, 32, 32);
    REQUIRE(f1.values.size() == f2.values.size());
    for (std::size_t i = 0; i < f1.values.size(); ++i)
        REQUIRE(f2.values[i] == Catch::Approx(f1.values[i]).margin(1e-12));
}

TEST_CASE("density_field validates inputs") {
    MapLayout layout;
    layout.positions = {{0, 0}, {1, 0}};
    layout.converged = false;
    CHECK_THROWS_AS(density_field(layout, {}, 0.1, 8, 8), ConfigError);
    CHECK_NOTHROW(density_field(layout, {}, 0.1, 8, 8, true));
    layout.converged = true;
    CHECK_THROWS_AS(density_field(layout, {}, 0.0, 8, 8), ConfigError);
    CHECK_THROWS_AS(density_field(layout, {}, 0.1, 0, 8), ConfigError);
    CHECK_THROWS_AS(density_field(layout, {1.0}, 0.1, 8, 8), ConfigError);
}
