// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// CSI domain types and the delay-domain feature pipeline:
//
//   CsiMatrix (B x W, frequency domain)
//     -> to_delay_domain: length-W inverse DFT per antenna, keep first C taps
//     -> extract_feature: vectorize antenna-major, |.|, scale to unit norm
//
// The inverse DFT carries the 1/W factor, the forward transform is unscaled.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace streamcc {

using Complex = std::complex<double>;

/// Row-major complex grid, one row per receive antenna.
using ComplexGrid = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Contiguous block of antennas belonging to one access point.
struct AntennaRange {
    std::size_t first = 0;
    std::size_t count = 0;

    bool operator==(const AntennaRange&) const = default;
};

/// Partition of the antenna axis into access points. The ADP dissimilarity
/// is evaluated per access point and summed.
class ApPartition {
public:
    ApPartition() = default;
    explicit ApPartition(std::vector<AntennaRange> ranges);

    /// One access point spanning all `antennas`.
    static ApPartition single(std::size_t antennas);
    /// `aps` access points with `antennas_per_ap` consecutive antennas each.
    static ApPartition uniform(std::size_t aps, std::size_t antennas_per_ap);

    const std::vector<AntennaRange>& ranges() const noexcept { return ranges_; }
    std::size_t size() const noexcept { return ranges_.size(); }
    bool empty() const noexcept { return ranges_.empty(); }

    /// Throws DimensionError unless the ranges tile [0, antennas) exactly.
    void validate(std::size_t antennas) const;

    bool operator==(const ApPartition&) const = default;

private:
    std::vector<AntennaRange> ranges_;
};

/// Frequency-domain channel estimate of one sample: B antennas x W subcarriers.
class CsiMatrix {
public:
    CsiMatrix() = default;
    /// Throws DimensionError on an empty grid and NumericError on non-finite entries.
    explicit CsiMatrix(ComplexGrid entries, std::uint64_t sample_index = 0,
                       std::optional<double> timestamp = std::nullopt);

    const ComplexGrid& entries() const noexcept { return entries_; }
    std::size_t antennas() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t subcarriers() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
    std::uint64_t sample_index() const noexcept { return sample_index_; }
    const std::optional<double>& timestamp() const noexcept { return timestamp_; }

private:
    ComplexGrid entries_;
    std::uint64_t sample_index_ = 0;
    std::optional<double> timestamp_;
};

/// First C delay taps of the inverse-DFT'd CSI, B x C.
class DelayDomainCsi {
public:
    DelayDomainCsi() = default;
    explicit DelayDomainCsi(ComplexGrid taps);

    const ComplexGrid& taps() const noexcept { return taps_; }
    std::size_t antennas() const noexcept { return static_cast<std::size_t>(taps_.rows()); }
    std::size_t tap_count() const noexcept { return static_cast<std::size_t>(taps_.cols()); }

private:
    ComplexGrid taps_;
};

/// Nonnegative unit-norm real vector of length B*C.
class CsiFeature {
public:
    CsiFeature() = default;
    /// Validates nonnegativity, finiteness and unit norm (1e-6).
    explicit CsiFeature(Eigen::VectorXd values);

    const Eigen::VectorXd& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }

private:
    Eigen::VectorXd values_;
};

/// Ground-truth UE coordinates in meters (2-D or 3-D). Evaluation only.
class GroundTruthPosition {
public:
    GroundTruthPosition() = default;
    explicit GroundTruthPosition(Eigen::VectorXd coords);

    const Eigen::VectorXd& coords() const noexcept { return coords_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(coords_.size()); }

private:
    Eigen::VectorXd coords_;
};

/// Inverse DFT (1/W scaled) along the subcarrier axis of every antenna row,
/// truncated to the first `c_taps` taps.
DelayDomainCsi to_delay_domain(const CsiMatrix& h, std::size_t c_taps);

/// Antenna-major vectorization (all taps of antenna 0, then antenna 1, ...),
/// entrywise magnitude, unit Euclidean norm. Throws ZeroFeatureError for an
/// all-zero input.
CsiFeature extract_feature(const DelayDomainCsi& dd);

/// |<a,b>| / (|a| |b|). Throws NumericError on zero norm, DimensionError on
/// length mismatch.
double cosine_similarity(const CsiFeature& a, const CsiFeature& b);

}  // namespace streamcc
