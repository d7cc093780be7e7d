// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Geometric ray-sum channel generator standing in for a measured CSI stream.
//
// Each access point carries a uniform linear array. For antenna a and path p
// (line of sight, or a single bounce off a fixed scatterer) with length L and
// delay tau = L / c, subcarrier w at frequency f_w contributes
//
//     gain_p / L * exp(-j 2 pi f_w tau)
//
// and complex Gaussian noise with standard deviation noise_std * rms(H) is
// added per entry.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "streamcc/csi.hpp"
#include "streamcc/io.hpp"

namespace streamcc {

inline constexpr double kSpeedOfLight = 299'792'458.0;

struct AccessPoint {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    /// Unit vector along the antenna array.
    Eigen::Vector3d array_axis = Eigen::Vector3d::UnitX();
};

struct Scatterer {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double gain = 1.0;
};

struct SyntheticScenario {
    std::vector<AccessPoint> access_points;
    std::size_t antennas_per_ap = 8;
    /// 0 selects half a carrier wavelength.
    double antenna_spacing_m = 0.0;
    /// UE trajectory polyline, traversed at constant speed from the first waypoint.
    std::vector<Eigen::Vector3d> waypoints;
    double speed_mps = 0.26;
    double sample_rate_hz = 175.0;
    double carrier_hz = 1.272e9;
    double bandwidth_hz = 50e6;
    std::size_t subcarriers = 256;
    /// Relative to the per-sample RMS channel magnitude.
    double noise_std = 0.05;
    std::vector<Scatterer> scatterers;
    /// Caps the stream length; 0 streams the whole trajectory.
    std::uint64_t max_samples = 0;

    /// Four 8-antenna APs around a 20 m x 10 m area, L-shaped trajectory from
    /// the top-left to the bottom-right corner, about 17500 samples.
    static SyntheticScenario default_training();
    /// Same area and APs, a second L-shaped pass offset 0.5 m inward,
    /// traversed in reverse at a lower sample rate.
    static SyntheticScenario default_test();

    void validate() const;
    std::size_t antennas() const noexcept { return access_points.size() * antennas_per_ap; }
    ApPartition partition() const { return ApPartition::uniform(access_points.size(), antennas_per_ap); }
    double trajectory_length() const;
    std::uint64_t sample_count() const;
    Eigen::Vector3d position_at(double seconds) const;
    /// Antenna positions, AP-major.
    std::vector<Eigen::Vector3d> antenna_positions() const;
};

/// Noise-free channel at one UE position.
ComplexGrid synthesize_channel(const SyntheticScenario& s, const Eigen::Vector3d& ue);

class SyntheticStreamSource final : public StreamSource {
public:
    SyntheticStreamSource(SyntheticScenario scenario, std::uint64_t seed);

    std::optional<StreamItem> next() override;
    std::optional<std::uint64_t> size_hint() const override { return count_; }
    const SyntheticScenario& scenario() const noexcept { return scenario_; }

private:
    SyntheticScenario scenario_;
    std::vector<Eigen::Vector3d> antennas_;
    std::mt19937_64 rng_;
    std::uint64_t count_;
    std::uint64_t next_ = 0;
    bool warned_clamp_ = false;
};

std::unique_ptr<SyntheticStreamSource> synthesize_stream(const SyntheticScenario& s, std::uint64_t seed);

}  // namespace streamcc
