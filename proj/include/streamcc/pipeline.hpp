// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// End-to-end orchestration: stream -> curate -> ADP / k-NN / geodesics ->
// train -> evaluate, plus the run configuration shared by the CLI and the
// Python bindings.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "streamcc/chart.hpp"
#include "streamcc/curation.hpp"
#include "streamcc/dissimilarity.hpp"
#include "streamcc/io.hpp"
#include "streamcc/metrics.hpp"
#include "streamcc/synthetic.hpp"

namespace streamcc {

enum class Strategy { randos, sims, all };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

/// Every experiment knob. Sources are "synthetic", "synthetic-test" or
/// "file:<path to CSI record file>".
struct RunConfig {
    std::string source = "synthetic";
    std::string test_source = "synthetic-test";
    Strategy strategy = Strategy::sims;

    std::size_t capacity = 1000;
    std::size_t taps = 16;
    std::size_t knn_k = 20;
    /// Number of equal contiguous AP groups on the antenna axis (1 = a single AP).
    std::size_t ap_groups = 4;
    double p_update = 0.5;
    double p_tiebreak = 0.5;
    bool store_csi = false;
    /// Arrival counts at which memory snapshots are written (the end of the
    /// stream is always added).
    std::vector<std::uint64_t> snapshots = {6000, 12000};

    /// Record range of file sources, [first, last); last = 0 means to the end.
    std::uint64_t record_first = 0;
    std::uint64_t record_last = 0;

    // Synthetic scenario overrides (0 keeps the scenario default).
    std::size_t synthetic_subcarriers = 0;
    double synthetic_sample_rate = 0.0;
    double synthetic_test_sample_rate = 0.0;
    double synthetic_noise_std = -1.0;

    TrainConfig train;
    MetricOptions metrics;
    /// Coordinates of the ground truth used for metrics (2 drops height).
    std::size_t metric_position_dims = 2;

    std::uint64_t source_seed = 1;
    std::uint64_t curation_seed = 2;
    std::uint64_t train_seed = 3;
    std::uint64_t test_seed = 4;
    unsigned threads = 1;

    std::filesystem::path output_dir = "out";

    /// Throws ConfigError on an invalid combination.
    void validate() const;

    /// Sets one field from its textual key/value form. "seed" sets the four
    /// seeds to s, s+1, s+2, s+3. Throws ConfigError for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Parses `key = value` lines; '#' starts a comment.
    void load_key_value(const std::string& text);
    void load_file(const std::filesystem::path& path);
    /// Complete key/value echo, loadable by load_key_value().
    std::string to_key_value() const;

    /// Registered keys in echo order.
    static std::vector<std::string> keys();
    static std::string describe(const std::string& key);

    SyntheticScenario training_scenario() const;
    SyntheticScenario test_scenario() const;
};

/// Opens `name` ("synthetic", "synthetic-test" or "file:<path>").
std::unique_ptr<StreamSource> open_source(const std::string& name, const RunConfig& cfg,
                                          std::uint64_t seed);

ApPartition resolve_partition(const RunConfig& cfg, std::size_t antennas);

// ---------------------------------------------------------------------------
// Streaming

struct MemorySnapshot {
    std::uint64_t arrivals = 0;
    std::vector<SnapshotEntry> entries;
    double max_pair_similarity = 0.0;
};

struct StreamStats {
    std::uint64_t offered = 0;
    std::uint64_t inserted = 0;
    std::uint64_t replaced = 0;
    std::uint64_t discarded = 0;
    std::uint64_t rejected_zero = 0;
    /// Memory-wide maximum pairwise similarity right after the fill phase and at the end.
    std::optional<double> max_pair_at_fill;
    std::optional<double> max_pair_at_end;
};

struct StreamResult {
    CoreMemory memory;
    StreamStats stats;
    std::vector<MemorySnapshot> snapshots;
};

using OfferObserver = std::function<void(const CoreMemory&, const CurationDecision&)>;

/// Pushes the whole source through the configured strategy (randos or sims).
/// Zero-feature samples are counted and skipped.
StreamResult run_stream(StreamSource& source, const RunConfig& cfg,
                        const OfferObserver& observer = {});

std::unique_ptr<Curator> make_curator(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Training and evaluation

struct TrainingSet {
    std::vector<std::uint64_t> arrival_index;
    std::vector<DelayDomainCsi> delay;
    std::vector<CsiFeature> features;
    std::vector<std::optional<GroundTruthPosition>> positions;

    std::size_t size() const noexcept { return features.size(); }
};

TrainingSet training_set_from_memory(const CoreMemory& mem);
/// Every sample of the stream ("all" baseline).
TrainingSet collect_all(StreamSource& source, const RunConfig& cfg);

struct ChartFit {
    ChartModel model;
    TrainReport report;
    DissimilarityMatrix geodesic;
    std::size_t components = 1;
};

/// ADP -> k-NN graph -> geodesics -> Siamese training.
ChartFit fit_chart(const TrainingSet& set, const RunConfig& cfg);

struct Evaluation {
    Eigen::MatrixXd ground_truth;  // n x metric_position_dims (empty without positions)
    Eigen::MatrixXd chart;         // n x 2
    std::optional<MetricReport> metrics;
};

/// Maps every test sample through the model and scores the chart when the
/// source carries positions.
Evaluation evaluate_model(const ChartModel& model, StreamSource& test, const RunConfig& cfg);

/// Selects the first `dims` coordinates of every position (rows).
Eigen::MatrixXd position_matrix(const std::vector<std::optional<GroundTruthPosition>>& positions,
                                std::size_t dims);

// ---------------------------------------------------------------------------
// Commands (write artifacts under cfg.output_dir)

struct CommandPaths {
    std::filesystem::path memory_checkpoint;
    std::filesystem::path model_checkpoint;
};

/// memory.ckpt, snapshots/memory_n<arrivals>.csv, stream_summary.txt, config.txt
StreamResult cmd_stream(const RunConfig& cfg);
/// model.ckpt, train_report.txt, train_loss.csv, config.txt. With strategy
/// "all" the memory checkpoint is ignored and the full source is used.
ChartFit cmd_train(const RunConfig& cfg, const std::filesystem::path& memory_checkpoint);
/// chart.csv, metrics.txt, metrics.csv, config.txt
Evaluation cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& model_checkpoint);
/// stream -> train -> evaluate into one directory.
Evaluation cmd_reproduce(const RunConfig& cfg);

}  // namespace streamcc
