// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Chart quality metrics. Point sets are n x dim matrices, one point per row.
//
//   TW(k)  trustworthiness: chart neighbors that are not ground-truth neighbors,
//          weighted by their ground-truth rank excess over k.
//   CT(k)  continuity: the same with the roles of the two spaces swapped.
//   KS     Kruskal stress after the least-squares chart scale factor.
//   RD     Rajski distance 1 - I(X;Y)/H(X,Y) of the joint histogram of
//          pairwise distances.
//
// Ranks count from 1 (nearest) and distance ties are broken by point index.

#include <cstddef>
#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace streamcc {

struct MetricOptions {
    /// Neighborhood size; 0 selects floor(0.05 n) (at least 1).
    std::size_t neighborhood_k = 0;
    std::size_t histogram_bins = 128;
    /// Pairs beyond this count are subsampled for RD.
    std::size_t max_rd_pairs = 1'000'000;
    std::uint64_t rd_seed = 0;

    std::size_t resolved_k(std::size_t n) const;
};

struct MetricReport {
    double tw = 0.0;
    double ct = 0.0;
    double ks = 0.0;
    double rd = 0.0;
    std::size_t neighborhood_k = 0;
    std::size_t histogram_bins = 0;
    std::size_t sample_count = 0;

    /// One `key = value` line per field.
    std::string to_key_value() const;
    static std::string csv_header();
    std::string to_csv_row(const std::string& label) const;
};

double trustworthiness(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k);
double continuity(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k);

struct NeighborhoodScores {
    double tw = 0.0;
    double ct = 0.0;
};

/// TW and CT from a single pass over the rank structure.
NeighborhoodScores neighborhood_scores(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart,
                                       std::size_t k);

/// Throws NumericError when all ground-truth points coincide.
double kruskal_stress(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart);

double rajski_distance(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t bins,
                       std::size_t max_pairs = 1'000'000, std::uint64_t seed = 0);

/// RD of a joint count table (rows: X bins, columns: Y bins). An all-mass-in-
/// one-cell table has zero joint entropy; RD is reported as 0 with a warning.
double rajski_from_joint_counts(const Eigen::MatrixXd& counts);

MetricReport evaluate_chart(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart,
                            const MetricOptions& options = {});

}  // namespace streamcc
