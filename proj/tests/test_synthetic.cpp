// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "streamcc/csi.hpp"
#include "streamcc/error.hpp"
#include "streamcc/synthetic.hpp"

using namespace streamcc;

namespace {

SyntheticScenario quiet(SyntheticScenario s) {
    s.noise_std = 0.0;
    return s;
}

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("default scenarios") {
    const auto train = SyntheticScenario::default_training();
    CHECK(train.antennas() == 32);
    CHECK(train.subcarriers == 256);
    CHECK(train.trajectory_length() == doctest::Approx(26.0));
    CHECK(train.sample_count() == 17500);
    CHECK(train.partition() == ApPartition::uniform(4, 8));
    const auto test = SyntheticScenario::default_test();
    CHECK(test.sample_count() == static_cast<std::uint64_t>(std::floor(24.0 / 0.26 * 20.0 + 1e-9)));
    CHECK(train.position_at(0.0) == Eigen::Vector3d(1, 9, 1));
    CHECK((train.position_at(100.0) - Eigen::Vector3d(19, 1, 1)).norm() < 1e-9);
    CHECK((train.position_at(8.0 / 0.26) - Eigen::Vector3d(1, 1, 1)).norm() < 1e-9);
}

TEST_CASE("static UE without noise streams identical matrices") {
    auto s = quiet(SyntheticScenario::default_training());
    s.waypoints = {{4.0, 3.0, 1.0}};
    s.max_samples = 5;
    auto src = synthesize_stream(s, 1);
    const auto first = src->next();
    REQUIRE(first);
    int count = 1;
    while (auto item = src->next()) {
        CHECK(item->csi.entries() == first->csi.entries());
        ++count;
    }
    CHECK(count == 5);
}

TEST_CASE("single line-of-sight ray has flat magnitude and a linear phase") {
    SyntheticScenario s = quiet(SyntheticScenario::default_training());
    s.access_points = {{{0.0, 0.0, 0.0}, Eigen::Vector3d::UnitX()}};
    s.antennas_per_ap = 1;
    s.scatterers.clear();
    const Eigen::Vector3d ue(30.0, 40.0, 0.0);  // 50 m
    const ComplexGrid h = synthesize_channel(s, ue);
    const double tau = 50.0 / kSpeedOfLight;
    const double df = s.bandwidth_hz / static_cast<double>(s.subcarriers);
    for (Eigen::Index w = 0; w < h.cols(); ++w) CHECK(std::abs(std::abs(h(0, w)) - 1.0 / 50.0) < 1e-12);
    for (Eigen::Index w = 0; w + 1 < h.cols(); ++w) {
        const double slope = std::arg(h(0, w + 1) / h(0, w));
        CHECK(std::abs(wrap(slope - (-2.0 * std::numbers::pi * df * tau))) < 1e-6);
    }
    // Absolute phase at the first subcarrier.
    const double f0 = s.carrier_hz - static_cast<double>(s.subcarriers / 2) * df;
    CHECK(std::abs(wrap(std::arg(h(0, 0)) + 2.0 * std::numbers::pi * f0 * tau)) < 1e-6);
}

TEST_CASE("nearby positions give more similar features than distant ones") {
    SyntheticScenario s = quiet(SyntheticScenario::default_training());
    s.scatterers.clear();
    auto feature_at = [&](const Eigen::Vector3d& p) {
        return extract_feature(to_delay_domain(CsiMatrix(synthesize_channel(s, p)), 16));
    };
    const auto a = feature_at({5.0, 5.0, 1.0});
    const auto near = feature_at({5.1, 5.0, 1.0});
    const auto far = feature_at({15.0, 5.0, 1.0});
    CHECK(cosine_similarity(a, far) < cosine_similarity(a, near));
}

TEST_CASE("noise has the configured relative level") {
    auto s = SyntheticScenario::default_training();
    s.waypoints = {{6.0, 4.0, 1.0}};
    s.max_samples = 20;
    const ComplexGrid clean = synthesize_channel(s, s.waypoints.front());
    auto src = synthesize_stream(s, 9);
    double err = 0.0, count = 0.0;
    while (auto item = src->next()) {
        err += (item->csi.entries() - clean).cwiseAbs2().sum();
        count += static_cast<double>(clean.size());
    }
    const double rms = std::sqrt(clean.cwiseAbs2().mean());
    CHECK(std::sqrt(err / count) / rms == doctest::Approx(s.noise_std).epsilon(0.02));
}

TEST_CASE("streams are seeded and carry positions and timestamps") {
    auto s = SyntheticScenario::default_training();
    s.max_samples = 4;
    auto a = synthesize_stream(s, 3), b = synthesize_stream(s, 3), c = synthesize_stream(s, 4);
    for (int i = 0; i < 4; ++i) {
        const auto x = a->next(), y = b->next(), z = c->next();
        CHECK(x->csi.entries() == y->csi.entries());
        CHECK_FALSE(x->csi.entries() == z->csi.entries());
        CHECK(x->csi.sample_index() == static_cast<std::uint64_t>(i));
        CHECK(*x->csi.timestamp() == doctest::Approx(i / 175.0));
        CHECK(x->position->dim() == 3);
    }
    CHECK_FALSE(a->next().has_value());
}

TEST_CASE("UE on top of an antenna is clamped with a warning") {
    std::vector<std::string> warnings;
    log::set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
    auto s = quiet(SyntheticScenario::default_training());
    const auto h = synthesize_channel(s, s.antenna_positions().front());
    log::set_warning_sink({});
    CHECK(h.allFinite());
    CHECK(warnings.size() == 1);
}

TEST_CASE("invalid scenarios are rejected") {
    auto s = SyntheticScenario::default_training();
    s.noise_std = -1.0;
    CHECK_THROWS_AS(s.validate(), ParameterError);
    s = SyntheticScenario::default_training();
    s.access_points.clear();
    CHECK_THROWS_AS(s.validate(), ParameterError);
}

}  // TEST_SUITE
