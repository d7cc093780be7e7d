// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Siamese channel-charting network: a fully connected ReLU stack with a
// linear 2-D output, trained so that chart distances match geodesic
// dissimilarities in the least-squares sense. Forward pass, backprop and Adam
// are implemented directly on Eigen matrices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "streamcc/csi.hpp"
#include "streamcc/dissimilarity.hpp"

namespace streamcc {

enum class Activation : std::uint8_t { relu = 0, linear = 1 };

struct DenseLayer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out
    Activation activation = Activation::relu;

    std::size_t inputs() const noexcept { return static_cast<std::size_t>(weight.cols()); }
    std::size_t outputs() const noexcept { return static_cast<std::size_t>(weight.rows()); }
};

class ChartModel {
public:
    ChartModel() = default;
    /// Throws DimensionError when consecutive layer shapes do not chain.
    explicit ChartModel(std::vector<DenseLayer> layers);

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t parameter_count() const;
    bool all_finite() const;

    bool operator==(const ChartModel& other) const;

private:
    std::vector<DenseLayer> layers_;
};

/// Hidden/output widths of the charting network.
inline constexpr std::size_t kChartWidths[] = {256, 128, 64, 32, 16, 2};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// ReLU on every layer but the last, which is linear.
ChartModel init_glorot(std::size_t input_dim, std::span<const std::size_t> widths,
                       std::uint64_t seed);
/// init_glorot with kChartWidths.
ChartModel init_glorot(std::size_t input_dim, std::uint64_t seed);

/// Packs features as the columns of a D' x n matrix.
Eigen::MatrixXd stack_features(std::span<const CsiFeature> features);

Eigen::VectorXd forward(const ChartModel& model, const CsiFeature& f);
Eigen::VectorXd forward(const ChartModel& model, const Eigen::VectorXd& input);
/// Column-wise forward pass: D' x n in, output_dim x n out.
Eigen::MatrixXd forward_batch(const ChartModel& model, const Eigen::MatrixXd& inputs);

struct PairIndex {
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Every i < j of n samples.
std::vector<PairIndex> all_pairs(std::size_t n);

/// Sum over listed pairs of (d_ij - |g(f_i) - g(f_j)|)^2. `features` holds one
/// sample per column.
double siamese_loss(const ChartModel& model, const Eigen::MatrixXd& features,
                    const DissimilarityMatrix& dmat, std::span<const PairIndex> pairs);

/// Parameter-shaped gradient buffer.
struct ModelGradient {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;

    static ModelGradient zeros_like(const ChartModel& model);
};

/// Same sum as siamese_loss, plus its gradient (overwrites `grad`). At a zero
/// chart distance the distance term contributes a zero subgradient.
double siamese_loss_and_gradient(const ChartModel& model, const Eigen::MatrixXd& features,
                                 const DissimilarityMatrix& dmat, std::span<const PairIndex> pairs,
                                 ModelGradient& grad);

struct TrainConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_pairs = 1024;
    std::size_t epochs = 200;
    /// 0 selects ceil(16 n / batch_pairs).
    std::size_t steps_per_epoch = 0;
    std::uint64_t rng_seed = 0;

    void validate() const;
    std::size_t resolved_steps_per_epoch(std::size_t n) const;
};

struct TrainReport {
    std::vector<double> epoch_loss;  // mean per-pair loss of each epoch
    double final_loss = 0.0;
    double seconds = 0.0;
    std::size_t steps = 0;
};

struct TrainResult {
    ChartModel model;
    TrainReport report;
};

/// Adam on uniformly sampled pair mini-batches (distinct pairs within a
/// batch). Throws NumericError if the loss turns non-finite.
TrainResult train(ChartModel model, const Eigen::MatrixXd& features,
                  const DissimilarityMatrix& dmat, const TrainConfig& cfg);

}  // namespace streamcc
