// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/chart.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

void apply_activation(Eigen::MatrixXd& z, Activation act) {
    if (act == Activation::relu) z = z.cwiseMax(0.0);
}

void check_pairs(std::span<const PairIndex> pairs, std::size_t n, const DissimilarityMatrix& dmat) {
    if (dmat.size() != n)
        throw DimensionError("dissimilarity matrix is " + std::to_string(dmat.size()) +
                             " wide, feature set has " + std::to_string(n) + " samples");
    for (const auto& p : pairs)
        if (p.i >= n || p.j >= n) throw ParameterError("pair index out of range");
}

// Gathers the distinct samples referenced by `pairs` and remaps the pairs onto
// the gathered columns.
struct PairBatch {
    std::vector<std::size_t> columns;
    std::vector<PairIndex> local;
};

PairBatch gather(std::span<const PairIndex> pairs, std::size_t n) {
    PairBatch b;
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    auto local_of = [&](std::size_t g) {
        if (slot[g] == std::numeric_limits<std::size_t>::max()) {
            slot[g] = b.columns.size();
            b.columns.push_back(g);
        }
        return slot[g];
    };
    b.local.reserve(pairs.size());
    for (const auto& p : pairs) {
        const std::size_t li = local_of(p.i);
        const std::size_t lj = local_of(p.j);
        b.local.push_back({li, lj});
    }
    return b;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& features, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd x(features.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) = features.col(static_cast<Eigen::Index>(cols[c]));
    return x;
}

// Loss and gradient with respect to the gathered chart points.
double output_loss(const Eigen::MatrixXd& y, std::span<const PairIndex> local,
                   std::span<const PairIndex> global, const DissimilarityMatrix& dmat,
                   Eigen::MatrixXd* dy) {
    double loss = 0.0;
    if (dy != nullptr) dy->setZero(y.rows(), y.cols());
    for (std::size_t p = 0; p < local.size(); ++p) {
        const auto li = static_cast<Eigen::Index>(local[p].i);
        const auto lj = static_cast<Eigen::Index>(local[p].j);
        const Eigen::VectorXd diff = y.col(li) - y.col(lj);
        const double r = diff.norm();
        const double e = dmat(global[p].i, global[p].j) - r;
        loss += e * e;
        if (dy != nullptr && r > 0.0) {
            const Eigen::VectorXd g = (-2.0 * e / r) * diff;
            dy->col(li) += g;
            dy->col(lj) -= g;
        }
    }
    return loss;
}

double loss_and_gradient_impl(const ChartModel& model, const Eigen::MatrixXd& features,
                              const DissimilarityMatrix& dmat, std::span<const PairIndex> pairs,
                              ModelGradient& grad, double scale) {
    const auto& layers = model.layers();
    const PairBatch batch = gather(pairs, static_cast<std::size_t>(features.cols()));

    // Forward, keeping every layer's input and pre-activation.
    std::vector<Eigen::MatrixXd> inputs;
    std::vector<Eigen::MatrixXd> pre;
    inputs.reserve(layers.size());
    pre.reserve(layers.size());
    inputs.push_back(gather_columns(features, batch.columns));
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = layers[l].weight * inputs.back();
        z.colwise() += layers[l].bias;
        pre.push_back(z);
        apply_activation(z, layers[l].activation);
        inputs.push_back(std::move(z));  // the last one holds the chart points
    }

    Eigen::MatrixXd upstream;
    const double loss = output_loss(inputs.back(), batch.local, pairs, dmat, &upstream);
    upstream *= scale;

    for (std::size_t l = layers.size(); l-- > 0;) {
        if (layers[l].activation == Activation::relu)
            upstream = upstream.cwiseProduct((pre[l].array() > 0.0).cast<double>().matrix());
        grad.weight[l].noalias() = upstream * inputs[l].transpose();
        grad.bias[l] = upstream.rowwise().sum();
        if (l > 0) upstream = layers[l].weight.transpose() * upstream;
    }
    return loss;
}

// Distinct pairs i < j drawn uniformly; all pairs (shuffled) when the batch
// covers at least half of them.
std::vector<PairIndex> sample_pairs(std::size_t n, std::size_t batch, std::mt19937_64& rng) {
    const std::size_t total = n * (n - 1) / 2;
    if (2 * batch >= total) {
        auto pairs = all_pairs(n);
        std::shuffle(pairs.begin(), pairs.end(), rng);
        pairs.resize(std::min(batch, total));
        return pairs;
    }
    std::vector<PairIndex> pairs;
    pairs.reserve(batch);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(batch * 2);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (pairs.size() < batch) {
        std::size_t a = pick(rng);
        std::size_t b = pick(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const std::uint64_t key = static_cast<std::uint64_t>(a) * n + b;
        if (seen.insert(key).second) pairs.push_back({a, b});
    }
    return pairs;
}

}  // namespace

ChartModel::ChartModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (static_cast<std::size_t>(layers_[l].bias.size()) != layers_[l].outputs())
            throw DimensionError("layer " + std::to_string(l) + ": bias length mismatch");
        if (l > 0 && layers_[l].inputs() != layers_[l - 1].outputs())
            throw DimensionError("layer " + std::to_string(l) + " does not chain onto layer " +
                                 std::to_string(l - 1));
    }
}

std::size_t ChartModel::input_dim() const { return layers_.empty() ? 0 : layers_.front().inputs(); }

std::size_t ChartModel::output_dim() const { return layers_.empty() ? 0 : layers_.back().outputs(); }

std::size_t ChartModel::parameter_count() const {
    std::size_t total = 0;
    for (const auto& l : layers_) total += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return total;
}

bool ChartModel::all_finite() const {
    return std::all_of(layers_.begin(), layers_.end(), [](const DenseLayer& l) {
        return l.weight.allFinite() && l.bias.allFinite();
    });
}

bool ChartModel::operator==(const ChartModel& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& a = layers_[l];
        const auto& b = other.layers_[l];
        if (a.activation != b.activation || a.weight.rows() != b.weight.rows() ||
            a.weight.cols() != b.weight.cols() || a.weight != b.weight || a.bias != b.bias)
            return false;
    }
    return true;
}

ChartModel init_glorot(std::size_t input_dim, std::span<const std::size_t> widths,
                       std::uint64_t seed) {
    if (input_dim == 0 || widths.empty()) throw ParameterError("network needs input and layer widths");
    std::mt19937_64 rng(seed);
    std::vector<DenseLayer> layers;
    std::size_t fan_in = input_dim;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        const std::size_t fan_out = widths[l];
        if (fan_out == 0) throw ParameterError("layer widths must be positive");
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> u(-limit, limit);
        DenseLayer layer;
        layer.weight.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = u(rng);
        layer.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out));
        layer.activation = l + 1 == widths.size() ? Activation::linear : Activation::relu;
        layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return ChartModel(std::move(layers));
}

ChartModel init_glorot(std::size_t input_dim, std::uint64_t seed) {
    return init_glorot(input_dim, kChartWidths, seed);
}

Eigen::MatrixXd stack_features(std::span<const CsiFeature> features) {
    if (features.empty()) return Eigen::MatrixXd(0, 0);
    const auto d = static_cast<Eigen::Index>(features.front().size());
    Eigen::MatrixXd x(d, static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (static_cast<Eigen::Index>(features[i].size()) != d)
            throw DimensionError("features have differing lengths");
        x.col(static_cast<Eigen::Index>(i)) = features[i].values();
    }
    return x;
}

Eigen::MatrixXd forward_batch(const ChartModel& model, const Eigen::MatrixXd& inputs) {
    if (model.layers().empty()) throw DimensionError("model has no layers");
    if (static_cast<std::size_t>(inputs.rows()) != model.input_dim())
        throw DimensionError("input length " + std::to_string(inputs.rows()) +
                             " does not match model input " + std::to_string(model.input_dim()));
    Eigen::MatrixXd a = inputs;
    for (const auto& layer : model.layers()) {
        Eigen::MatrixXd z = layer.weight * a;
        z.colwise() += layer.bias;
        apply_activation(z, layer.activation);
        a = std::move(z);
    }
    return a;
}

Eigen::VectorXd forward(const ChartModel& model, const Eigen::VectorXd& input) {
    return forward_batch(model, Eigen::MatrixXd(input)).col(0);
}

Eigen::VectorXd forward(const ChartModel& model, const CsiFeature& f) {
    return forward(model, f.values());
}

std::vector<PairIndex> all_pairs(std::size_t n) {
    std::vector<PairIndex> pairs;
    if (n < 2) return pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j});
    return pairs;
}

double siamese_loss(const ChartModel& model, const Eigen::MatrixXd& features,
                    const DissimilarityMatrix& dmat, std::span<const PairIndex> pairs) {
    check_pairs(pairs, static_cast<std::size_t>(features.cols()), dmat);
    const PairBatch batch = gather(pairs, static_cast<std::size_t>(features.cols()));
    const Eigen::MatrixXd y = forward_batch(model, gather_columns(features, batch.columns));
    return output_loss(y, batch.local, pairs, dmat, nullptr);
}

ModelGradient ModelGradient::zeros_like(const ChartModel& model) {
    ModelGradient g;
    for (const auto& l : model.layers()) {
        g.weight.push_back(Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(Eigen::VectorXd::Zero(l.bias.size()));
    }
    return g;
}

double siamese_loss_and_gradient(const ChartModel& model, const Eigen::MatrixXd& features,
                                 const DissimilarityMatrix& dmat, std::span<const PairIndex> pairs,
                                 ModelGradient& grad) {
    check_pairs(pairs, static_cast<std::size_t>(features.cols()), dmat);
    if (static_cast<std::size_t>(features.rows()) != model.input_dim())
        throw DimensionError("feature length does not match model input");
    if (grad.weight.size() != model.layers().size()) grad = ModelGradient::zeros_like(model);
    return loss_and_gradient_impl(model, features, dmat, pairs, grad, 1.0);
}

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ParameterError("learning rate must be finite and nonnegative");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
        throw ParameterError("Adam betas must lie in (0,1)");
    if (!(epsilon > 0.0)) throw ParameterError("Adam epsilon must be positive");
    if (batch_pairs == 0 || epochs == 0) throw ParameterError("batch_pairs and epochs must be positive");
}

std::size_t TrainConfig::resolved_steps_per_epoch(std::size_t n) const {
    if (steps_per_epoch > 0) return steps_per_epoch;
    return std::max<std::size_t>(1, (16 * n + batch_pairs - 1) / batch_pairs);
}

TrainResult train(ChartModel model, const Eigen::MatrixXd& features,
                  const DissimilarityMatrix& dmat, const TrainConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::size_t>(features.cols());
    if (n < 2) throw ParameterError("training needs at least two samples");
    if (dmat.size() != n) throw DimensionError("feature set and dissimilarity matrix sizes differ");
    if (static_cast<std::size_t>(features.rows()) != model.input_dim())
        throw DimensionError("feature length does not match model input");

    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(cfg.rng_seed);
    ModelGradient grad = ModelGradient::zeros_like(model);
    ModelGradient m = ModelGradient::zeros_like(model);
    ModelGradient v = ModelGradient::zeros_like(model);

    const std::size_t steps_per_epoch = cfg.resolved_steps_per_epoch(n);
    TrainReport report;
    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            const auto pairs = sample_pairs(n, cfg.batch_pairs, rng);
            const double scale = 1.0 / static_cast<double>(pairs.size());
            const double loss =
                loss_and_gradient_impl(model, features, dmat, pairs, grad, scale) * scale;
            if (!std::isfinite(loss))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                   std::to_string(s));
            epoch_loss += loss;

            ++t;
            const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
            const double step = cfg.learning_rate / bc1;
            auto update = [&](auto& param, const auto& g, auto& mom, auto& vel) {
                mom = cfg.beta1 * mom + (1.0 - cfg.beta1) * g;
                vel = cfg.beta2 * vel + (1.0 - cfg.beta2) * g.cwiseProduct(g);
                param.array() -= step * mom.array() / ((vel.array() / bc2).sqrt() + cfg.epsilon);
            };
            for (std::size_t l = 0; l < model.layers().size(); ++l) {
                auto& layer = model.layers()[l];
                update(layer.weight, grad.weight[l], m.weight[l], v.weight[l]);
                update(layer.bias, grad.bias[l], m.bias[l], v.bias[l]);
            }
        }
        report.epoch_loss.push_back(epoch_loss / static_cast<double>(steps_per_epoch));
    }
    if (!model.all_finite()) throw NumericError("training produced non-finite parameters");
    report.steps = t;
    report.final_loss = report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back();
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return TrainResult{std::move(model), std::move(report)};
}

}  // namespace streamcc
