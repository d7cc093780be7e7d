// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

constexpr double kMinDistance = 0.1;

std::vector<Scatterer> default_scatterers() {
    return {
        {{5.0, 7.0, 2.0}, 0.6},  {{15.0, 8.0, 1.5}, 0.5}, {{8.0, 3.0, 1.0}, 0.4},
        {{17.0, 4.0, 2.0}, 0.5}, {{3.0, 5.0, 0.5}, 0.3},  {{12.0, 5.5, 3.0}, 0.4},
    };
}

std::vector<AccessPoint> default_access_points() {
    return {
        {{10.0, 10.5, 2.5}, Eigen::Vector3d::UnitX()},
        {{10.0, -0.5, 2.5}, Eigen::Vector3d::UnitX()},
        {{-0.5, 5.0, 2.5}, Eigen::Vector3d::UnitY()},
        {{20.5, 5.0, 2.5}, Eigen::Vector3d::UnitY()},
    };
}

ComplexGrid channel_impl(const SyntheticScenario& s, const std::vector<Eigen::Vector3d>& antennas,
                         const Eigen::Vector3d& ue, bool& clamped) {
    const auto w_count = static_cast<Eigen::Index>(s.subcarriers);
    const double spacing = s.bandwidth_hz / static_cast<double>(s.subcarriers);
    const double f_first = s.carrier_hz - static_cast<double>(s.subcarriers / 2) * spacing;
    ComplexGrid h = ComplexGrid::Zero(static_cast<Eigen::Index>(antennas.size()), w_count);

    auto add_path = [&](Eigen::Index row, double length, double gain) {
        const double tau = length / kSpeedOfLight;
        const double amp = gain / length;
        const Complex start = std::polar(amp, -2.0 * std::numbers::pi * f_first * tau);
        const Complex step = std::polar(1.0, -2.0 * std::numbers::pi * spacing * tau);
        // Four interleaved real-arithmetic recurrences: w, w+4, w+8, ... share step^4.
        const Complex step4 = step * step * step * step;
        double re[4], im[4];
        Complex p = start;
        for (int j = 0; j < 4; ++j, p *= step) {
            re[j] = p.real();
            im[j] = p.imag();
        }
        const double sr = step4.real(), si = step4.imag();
        auto* out = reinterpret_cast<double*>(h.row(row).data());
        Eigen::Index w = 0;
        for (; w + 4 <= w_count; w += 4) {
            for (int j = 0; j < 4; ++j) {
                out[2 * (w + j)] += re[j];
                out[2 * (w + j) + 1] += im[j];
                const double next_re = re[j] * sr - im[j] * si;
                im[j] = re[j] * si + im[j] * sr;
                re[j] = next_re;
            }
        }
        for (int j = 0; w < w_count; ++w, ++j) {
            out[2 * w] += re[j];
            out[2 * w + 1] += im[j];
        }
    };

    for (std::size_t a = 0; a < antennas.size(); ++a) {
        const auto row = static_cast<Eigen::Index>(a);
        double los = (ue - antennas[a]).norm();
        if (los < kMinDistance) {
            los = kMinDistance;
            clamped = true;
        }
        add_path(row, los, 1.0);
        for (const auto& sc : s.scatterers) {
            const double length =
                std::max(kMinDistance, (ue - sc.position).norm() + (sc.position - antennas[a]).norm());
            add_path(row, length, sc.gain);
        }
    }
    return h;
}

}  // namespace

SyntheticScenario SyntheticScenario::default_training() {
    SyntheticScenario s;
    s.access_points = default_access_points();
    s.scatterers = default_scatterers();
    s.waypoints = {{1.0, 9.0, 1.0}, {1.0, 1.0, 1.0}, {19.0, 1.0, 1.0}};
    s.speed_mps = 0.26;
    s.sample_rate_hz = 175.0;  // 26 m at 0.26 m/s for 100 s -> 17500 samples
    return s;
}

SyntheticScenario SyntheticScenario::default_test() {
    SyntheticScenario s = default_training();
    s.waypoints = {{18.5, 1.5, 1.0}, {1.5, 1.5, 1.0}, {1.5, 8.5, 1.0}};
    s.sample_rate_hz = 20.0;
    return s;
}

void SyntheticScenario::validate() const {
    if (access_points.empty()) throw ParameterError("scenario needs at least one access point");
    if (antennas_per_ap == 0) throw ParameterError("antennas_per_ap must be positive");
    if (waypoints.empty()) throw ParameterError("scenario needs a trajectory");
    if (!(speed_mps > 0.0) || !(sample_rate_hz > 0.0)) throw ParameterError("speed and sample rate must be positive");
    if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0) || subcarriers == 0)
        throw ParameterError("carrier, bandwidth and subcarrier count must be positive");
    if (!(noise_std >= 0.0)) throw ParameterError("noise_std must be nonnegative");
    if (!(antenna_spacing_m >= 0.0)) throw ParameterError("antenna spacing must be nonnegative");
    if (waypoints.size() > 1 && !(trajectory_length() > 0.0))
        throw ParameterError("trajectory length must be positive");
}

double SyntheticScenario::trajectory_length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) total += (waypoints[i] - waypoints[i - 1]).norm();
    return total;
}

std::uint64_t SyntheticScenario::sample_count() const {
    // A single waypoint is a static UE; it streams max_samples items.
    if (waypoints.size() < 2) return max_samples;
    const double duration = trajectory_length() / speed_mps;
    auto n = static_cast<std::uint64_t>(std::floor(duration * sample_rate_hz + 1e-9));
    n = std::max<std::uint64_t>(n, 1);
    return max_samples > 0 ? std::min(n, max_samples) : n;
}

Eigen::Vector3d SyntheticScenario::position_at(double seconds) const {
    double remaining = std::max(0.0, seconds) * speed_mps;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const Eigen::Vector3d seg = waypoints[i] - waypoints[i - 1];
        const double len = seg.norm();
        if (remaining <= len && len > 0.0) return waypoints[i - 1] + seg * (remaining / len);
        remaining -= len;
    }
    return waypoints.back();
}

std::vector<Eigen::Vector3d> SyntheticScenario::antenna_positions() const {
    const double spacing =
        antenna_spacing_m > 0.0 ? antenna_spacing_m : 0.5 * kSpeedOfLight / carrier_hz;
    std::vector<Eigen::Vector3d> out;
    out.reserve(antennas());
    const double center = 0.5 * static_cast<double>(antennas_per_ap - 1);
    for (const auto& ap : access_points) {
        const Eigen::Vector3d axis = ap.array_axis.normalized();
        for (std::size_t i = 0; i < antennas_per_ap; ++i)
            out.push_back(ap.position + (static_cast<double>(i) - center) * spacing * axis);
    }
    return out;
}

ComplexGrid synthesize_channel(const SyntheticScenario& s, const Eigen::Vector3d& ue) {
    s.validate();
    bool clamped = false;
    ComplexGrid h = channel_impl(s, s.antenna_positions(), ue, clamped);
    if (clamped) log::warn("UE within 0.1 m of an antenna; distance clamped");
    return h;
}

SyntheticStreamSource::SyntheticStreamSource(SyntheticScenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), rng_(seed) {
    scenario_.validate();
    antennas_ = scenario_.antenna_positions();
    count_ = scenario_.sample_count();
}

std::optional<StreamItem> SyntheticStreamSource::next() {
    if (next_ >= count_) return std::nullopt;
    const std::uint64_t n = next_++;
    const double t = static_cast<double>(n) / scenario_.sample_rate_hz;
    const Eigen::Vector3d ue = scenario_.position_at(t);

    bool clamped = false;
    ComplexGrid h = channel_impl(scenario_, antennas_, ue, clamped);
    if (clamped && !warned_clamp_) {
        log::warn("UE within 0.1 m of an antenna at sample " + std::to_string(n) + "; distance clamped");
        warned_clamp_ = true;
    }
    if (scenario_.noise_std > 0.0) {
        const double rms = std::sqrt(h.cwiseAbs2().mean());
        const double sigma = scenario_.noise_std * rms / std::numbers::sqrt2;
        std::normal_distribution<double> noise(0.0, sigma);
        Complex* data = h.data();
        for (Eigen::Index i = 0; i < h.size(); ++i) {
            const double re = noise(rng_);
            const double im = noise(rng_);
            data[i] += Complex(re, im);
        }
    }
    return StreamItem{CsiMatrix(std::move(h), n, t), GroundTruthPosition(ue)};
}

std::unique_ptr<SyntheticStreamSource> synthesize_stream(const SyntheticScenario& s, std::uint64_t seed) {
    return std::make_unique<SyntheticStreamSource>(s, seed);
}

}  // namespace streamcc
