// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "generators.hpp"
#include "oracles.hpp"
#include "streamcc/dissimilarity.hpp"
#include "streamcc/error.hpp"

using namespace streamcc;

namespace {

std::vector<std::vector<oracle::cd>> nested(const DelayDomainCsi& d) {
    std::vector<std::vector<oracle::cd>> out(d.antennas());
    for (std::size_t b = 0; b < d.antennas(); ++b)
        out[b].assign(d.taps().row(static_cast<Eigen::Index>(b)).begin(),
                      d.taps().row(static_cast<Eigen::Index>(b)).end());
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ranges(const ApPartition& p) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& r : p.ranges()) out.emplace_back(r.first, r.count);
    return out;
}

DissimilarityMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    DissimilarityMatrix d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    d.values.resize(n, n);
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) d.values(i, j++) = v;
        ++i;
    }
    return d;
}

// Undirected graph from an edge list (duplicates not allowed).
KnnGraph graph(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    KnnGraph g;
    g.k = 1;
    g.adjacency.resize(n);
    for (const auto& [a, b, w] : edges) {
        g.adjacency[a].push_back({b, w});
        g.adjacency[b].push_back({a, w});
    }
    for (auto& adj : g.adjacency)
        std::sort(adj.begin(), adj.end(), [](const KnnEdge& x, const KnnEdge& y) { return x.to < y.to; });
    return g;
}

struct WarningCapture {
    std::vector<std::string> messages;
    WarningCapture() {
        log::set_warning_sink([this](const std::string& m) { messages.push_back(m); });
    }
    ~WarningCapture() { log::set_warning_sink({}); }
};

}  // namespace

TEST_SUITE("dissimilarity") {

TEST_CASE("adp examples") {
    SUBCASE("orthogonal single tap") {
        ComplexGrid a(2, 1), b(2, 1);
        a << 1.0, 0.0;
        b << 0.0, 1.0;
        CHECK(adp_dissimilarity(DelayDomainCsi(a), DelayDomainCsi(b), ApPartition::single(2)) == 1.0);
    }
    SUBCASE("one equal tap, one orthogonal tap") {
        // Columns are the per-tap antenna vectors.
        ComplexGrid a(2, 2), b(2, 2);
        a << 1.0, 1.0, 0.0, 0.0;
        b << 1.0, 0.0, 0.0, 1.0;
        CHECK(adp_dissimilarity(DelayDomainCsi(a), DelayDomainCsi(b), ApPartition::single(2)) == 1.0);
    }
    SUBCASE("zero tap vectors count as maximally dissimilar") {
        ComplexGrid a(2, 2), b(2, 2);
        a << 1.0, 0.0, 0.0, 0.0;
        b << 1.0, 1.0, 0.0, 0.0;
        CHECK(adp_dissimilarity(DelayDomainCsi(a), DelayDomainCsi(b), ApPartition::single(2)) == 1.0);
    }
}

TEST_CASE("property: adp matches the term-by-term oracle") {
    gen::Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t aps = 1 + trial % 4, per = 1 + trial % 3, c = 1 + trial % 5;
        const ApPartition part = ApPartition::uniform(aps, per);
        const auto a = gen::delay(rng, aps * per, c), b = gen::delay(rng, aps * per, c);
        const double got = adp_dissimilarity(a, b, part);
        const double ref = oracle::adp(nested(a), nested(b), ranges(part));
        CHECK(std::abs(got - ref) <= 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= static_cast<double>(aps * c) + 1e-12);
        CHECK(std::abs(adp_dissimilarity(a, a, part)) <= 1e-12);
        CHECK(std::abs(got - adp_dissimilarity(b, a, part)) <= 1e-12);
    }
}

TEST_CASE("property: adp ignores global phase and positive scaling") {
    gen::Rng rng(32);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi), scale(1e-3, 1e3);
    const ApPartition part = ApPartition::uniform(2, 4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = gen::delay(rng, 8, 6), b = gen::delay(rng, 8, 6);
        const ComplexGrid rotated = a.taps() * std::polar(scale(rng), phase(rng));
        CHECK(std::abs(adp_dissimilarity(DelayDomainCsi(rotated), b, part) - adp_dissimilarity(a, b, part)) <=
              1e-9);
    }
}

TEST_CASE("adp matrix agrees with pairwise evaluation") {
    gen::Rng rng(33);
    std::vector<DelayDomainCsi> set;
    for (int i = 0; i < 30; ++i) set.push_back(gen::delay(rng, 8, 4));
    const ApPartition part = ApPartition::uniform(4, 2);
    const auto m = adp_matrix(set, part);
    CHECK(m.kind == DissimilarityKind::adp);
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(m(i, i) == 0.0);
        for (std::size_t j = 0; j < set.size(); ++j) {
            CHECK(m(i, j) == m(j, i));
            if (i != j) CHECK(std::abs(m(i, j) - adp_dissimilarity(set[i], set[j], part)) <= 1e-12);
        }
    }
}

TEST_CASE("adp matrix and knn rows across tile boundaries") {
    // More samples than one 256-row tile, with one all-zero AP block.
    gen::Rng rng(37);
    std::vector<DelayDomainCsi> set;
    for (int i = 0; i < 300; ++i) {
        ComplexGrid taps = gen::complex_grid(rng, 4, 2);
        if (i % 7 == 0) taps.block(0, 1, 2, 1).setZero();
        set.emplace_back(taps);
    }
    const ApPartition part = ApPartition::uniform(2, 2);
    const auto m = adp_matrix(set, part);
    std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        CHECK(std::abs(m(i, j) - adp_dissimilarity(set[i], set[j], part)) <= 1e-12);
    }
    const auto g = build_knn_graph(set, 5, part);
    const auto g2 = build_knn_graph(m, 5);
    for (std::size_t i = 0; i < set.size(); ++i) {
        REQUIRE(g.degree(i) == g2.degree(i));
        for (std::size_t e = 0; e < g.degree(i); ++e) CHECK(g.adjacency[i][e].to == g2.adjacency[i][e].to);
    }
}

TEST_CASE("adp rejects shape mismatches") {
    gen::Rng rng(34);
    CHECK_THROWS_AS(adp_dissimilarity(gen::delay(rng, 4, 2), gen::delay(rng, 4, 3), ApPartition::single(4)),
                    DimensionError);
    CHECK_THROWS_AS(adp_dissimilarity(gen::delay(rng, 4, 2), gen::delay(rng, 4, 2), ApPartition::single(3)),
                    DimensionError);
}

TEST_CASE("knn graph of two nodes is one edge") {
    const auto g = build_knn_graph(from_rows({{0.0, 0.4}, {0.4, 0.0}}), 1);
    REQUIRE(g.node_count() == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.adjacency[0][0].to == 1);
    CHECK(g.adjacency[0][0].weight == 0.4);
}

TEST_CASE("knn graph of three collinear samples") {
    const auto g = build_knn_graph(from_rows({{0.0, 0.1, 0.3}, {0.1, 0.0, 0.2}, {0.3, 0.2, 0.0}}), 1);
    CHECK(g.edge_count() == 2);
    REQUIRE(g.degree(0) == 1);
    REQUIRE(g.degree(1) == 2);
    REQUIRE(g.degree(2) == 1);
    CHECK(g.adjacency[0][0].to == 1);
    CHECK(g.adjacency[2][0].to == 1);
    CHECK(g.adjacency[2][0].weight == 0.2);
}

TEST_CASE("knn ties resolve by index") {
    const auto g = build_knn_graph(from_rows({{0.0, 0.5, 0.5}, {0.5, 0.0, 0.9}, {0.5, 0.9, 0.0}}), 1);
    // Node 0 picks node 1, node 1 picks 0, node 2 picks 0.
    CHECK(g.edge_count() == 2);
    CHECK(g.degree(0) == 2);
}

TEST_CASE("knn graph rejects bad k") {
    gen::Rng rng(35);
    std::vector<DelayDomainCsi> set = {gen::delay(rng, 2, 2), gen::delay(rng, 2, 2)};
    CHECK_THROWS_AS(build_knn_graph(set, 2, ApPartition::single(2)), ParameterError);
    CHECK_THROWS_AS(build_knn_graph(set, 0, ApPartition::single(2)), ParameterError);
    CHECK_THROWS_AS(build_knn_graph(std::span(set).first(1), 1, ApPartition::single(2)), ParameterError);
}

TEST_CASE("property: knn graph structure on random sets") {
    gen::Rng rng(36);
    std::vector<DelayDomainCsi> set;
    for (int i = 0; i < 50; ++i) set.push_back(gen::delay(rng, 4, 3));
    const ApPartition part = ApPartition::uniform(2, 2);
    const auto m = adp_matrix(set, part);
    for (std::size_t k : {1u, 3u, 10u}) {
        const auto g = build_knn_graph(set, k, part);
        const auto g2 = build_knn_graph(m, k);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            CHECK(g.degree(i) >= k);
            REQUIRE(g.degree(i) == g2.degree(i));
            for (std::size_t e = 0; e < g.degree(i); ++e) {
                const auto& edge = g.adjacency[i][e];
                CHECK(edge.to == g2.adjacency[i][e].to);
                CHECK(std::abs(edge.weight - m(i, edge.to)) <= 1e-12);
                if (e > 0) CHECK(g.adjacency[i][e - 1].to < edge.to);
                // Symmetric storage.
                const auto& back = g.adjacency[edge.to];
                CHECK(std::any_of(back.begin(), back.end(), [&](const KnnEdge& b) { return b.to == i; }));
            }
            // Every selected neighbor is among the k smallest by (value, index).
            std::vector<std::size_t> order;
            for (std::size_t j = 0; j < set.size(); ++j)
                if (j != i) order.push_back(j);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return m(i, a) < m(i, b) || (m(i, a) == m(i, b) && a < b);
            });
            for (std::size_t r = 0; r < k; ++r) {
                const auto& adj = g.adjacency[i];
                CHECK(std::any_of(adj.begin(), adj.end(), [&](const KnnEdge& x) { return x.to == order[r]; }));
            }
        }
    }
}

TEST_CASE("geodesic on a path graph") {
    const auto d = geodesic_all_pairs(graph(3, {{0, 1, 0.1}, {1, 2, 0.2}}));
    CHECK(d.kind == DissimilarityKind::geodesic);
    CHECK(d(0, 2) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d(2, 0) == d(0, 2));
    for (std::size_t i = 0; i < 3; ++i) CHECK(d(i, i) == 0.0);
}

TEST_CASE("property: dijkstra equals floyd-warshall exactly") {
    gen::Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 11;
        // Dyadic weights make every path sum exact in floating point.
        std::uniform_int_distribution<int> w(1, 256);
        std::bernoulli_distribution keep(0.35);
        std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
        Eigen::MatrixXd dense = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                                          std::numeric_limits<double>::infinity());
        for (std::size_t i = 1; i < n; ++i) {
            // A random spanning tree keeps the graph connected.
            const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
            const double x = w(rng) / 64.0;
            edges.emplace_back(parent, i, x);
            dense(static_cast<Eigen::Index>(parent), static_cast<Eigen::Index>(i)) = x;
            dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(parent)) = x;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (std::isfinite(dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) || !keep(rng))
                    continue;
                const double x = w(rng) / 64.0;
                edges.emplace_back(i, j, x);
                dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
                dense(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = x;
            }
        const auto got = geodesic_all_pairs(graph(n, edges));
        const auto ref = oracle::floyd_warshall(dense);
        CHECK(got.values == ref);
        GeodesicOptions threaded;
        threaded.threads = 3;
        CHECK(geodesic_all_pairs(graph(n, edges), threaded).values == got.values);
    }
}

TEST_CASE("disconnected components get the documented fill and a warning") {
    WarningCapture capture;
    const auto g = graph(4, {{0, 1, 1.0}, {2, 3, 2.0}});
    CHECK(connected_components(g) == 2);
    const auto d = geodesic_all_pairs(g);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(2, 3) == 2.0);
    CHECK(d(0, 2) == 3.0);
    CHECK(d(3, 1) == 3.0);
    CHECK_FALSE(capture.messages.empty());
    CHECK(std::isinf(dijkstra(g, 0)[3]));
}

TEST_CASE("negative or non-finite weights are rejected") {
    CHECK_THROWS_AS(geodesic_all_pairs(graph(2, {{0, 1, -0.5}})), NumericError);
    CHECK_THROWS_AS(geodesic_all_pairs(graph(2, {{0, 1, std::numeric_limits<double>::quiet_NaN()}})),
                    NumericError);
}

}  // TEST_SUITE
