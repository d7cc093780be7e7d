// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Key/value parsing

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("bad value '" + text + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string v = trim(text);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("bad boolean '" + text + "' for " + key);
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

struct Field {
    const char* key;
    const char* help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number_field(const char* key, const char* help, T RunConfig::*member) {
    return {key, help,
            [key, member](RunConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
            [member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double(c.*member);
                else return std::to_string(c.*member);
            }};
}

template <typename T, typename Sub>
Field nested_field(const char* key, const char* help, Sub RunConfig::*outer, T Sub::*member) {
    return {key, help,
            [key, outer, member](RunConfig& c, const std::string& v) {
                (c.*outer).*member = parse_number<T>(key, v);
            },
            [outer, member](const RunConfig& c) {
                if constexpr (std::is_floating_point_v<T>) return format_double((c.*outer).*member);
                else return std::to_string((c.*outer).*member);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        {"source", "training stream: synthetic | synthetic-test | file:<path>",
         [](RunConfig& c, const std::string& v) { c.source = trim(v); },
         [](const RunConfig& c) { return c.source; }},
        {"test_source", "evaluation stream: synthetic | synthetic-test | file:<path>",
         [](RunConfig& c, const std::string& v) { c.test_source = trim(v); },
         [](const RunConfig& c) { return c.test_source; }},
        {"strategy", "curation strategy: randos | sims | all",
         [](RunConfig& c, const std::string& v) { c.strategy = parse_strategy(trim(v)); },
         [](const RunConfig& c) { return to_string(c.strategy); }},
        number_field("capacity", "core memory capacity M", &RunConfig::capacity),
        number_field("taps", "delay taps C kept per antenna", &RunConfig::taps),
        number_field("knn_k", "neighbors per node in the k-NN graph", &RunConfig::knn_k),
        number_field("ap_groups", "equal contiguous AP groups on the antenna axis", &RunConfig::ap_groups),
        number_field("p_update", "RandoS update probability", &RunConfig::p_update),
        number_field("p_tiebreak", "SimS probability of evicting k rather than l", &RunConfig::p_tiebreak),
        {"store_csi", "keep full CSI matrices in the memory checkpoint",
         [](RunConfig& c, const std::string& v) { c.store_csi = parse_bool("store_csi", v); },
         [](const RunConfig& c) { return std::string(c.store_csi ? "true" : "false"); }},
        {"snapshots", "comma-separated arrival counts for memory snapshots",
         [](RunConfig& c, const std::string& v) {
             c.snapshots.clear();
             std::istringstream in(v);
             std::string item;
             while (std::getline(in, item, ','))
                 if (!trim(item).empty()) c.snapshots.push_back(parse_number<std::uint64_t>("snapshots", item));
         },
         [](const RunConfig& c) {
             std::string out;
             for (std::size_t i = 0; i < c.snapshots.size(); ++i)
                 out += (i ? "," : "") + std::to_string(c.snapshots[i]);
             return out;
         }},
        number_field("record_first", "first record of file sources", &RunConfig::record_first),
        number_field("record_last", "one past the last record of file sources (0: end)", &RunConfig::record_last),
        number_field("synthetic_subcarriers", "override W of the synthetic scenario (0: default)",
                     &RunConfig::synthetic_subcarriers),
        number_field("synthetic_sample_rate", "override training sample rate in Hz (0: default)",
                     &RunConfig::synthetic_sample_rate),
        number_field("synthetic_test_sample_rate", "override test sample rate in Hz (0: default)",
                     &RunConfig::synthetic_test_sample_rate),
        number_field("synthetic_noise_std", "override relative noise level (negative: default)",
                     &RunConfig::synthetic_noise_std),
        nested_field("learning_rate", "Adam learning rate", &RunConfig::train, &TrainConfig::learning_rate),
        nested_field("beta1", "Adam beta1", &RunConfig::train, &TrainConfig::beta1),
        nested_field("beta2", "Adam beta2", &RunConfig::train, &TrainConfig::beta2),
        nested_field("epsilon", "Adam epsilon", &RunConfig::train, &TrainConfig::epsilon),
        nested_field("batch_pairs", "pairs per mini-batch", &RunConfig::train, &TrainConfig::batch_pairs),
        nested_field("epochs", "training epochs", &RunConfig::train, &TrainConfig::epochs),
        nested_field("steps_per_epoch", "steps per epoch (0: ceil(16 n / batch_pairs))", &RunConfig::train,
                     &TrainConfig::steps_per_epoch),
        nested_field("neighborhood_k", "TW/CT neighborhood size (0: floor(0.05 n))", &RunConfig::metrics,
                     &MetricOptions::neighborhood_k),
        nested_field("histogram_bins", "RD histogram bins per axis", &RunConfig::metrics,
                     &MetricOptions::histogram_bins),
        nested_field("max_rd_pairs", "RD pair subsampling cap", &RunConfig::metrics, &MetricOptions::max_rd_pairs),
        number_field("metric_position_dims", "ground-truth coordinates used by the metrics",
                     &RunConfig::metric_position_dims),
        number_field("source_seed", "seed of the synthetic training stream", &RunConfig::source_seed),
        number_field("curation_seed", "seed of the curation strategy", &RunConfig::curation_seed),
        number_field("train_seed", "seed of initialization and pair sampling", &RunConfig::train_seed),
        number_field("test_seed", "seed of the synthetic test stream", &RunConfig::test_seed),
        number_field("threads", "worker threads for geodesics", &RunConfig::threads),
        {"output_dir", "directory for all artifacts",
         [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
         [](const RunConfig& c) { return c.output_dir.string(); }},
    };
    return table;
}

const Field* find_field(const std::string& key) {
    for (const auto& f : fields())
        if (key == f.key) return &f;
    return nullptr;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void prepare_output(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    write_text(cfg.output_dir / "config.txt", cfg.to_key_value());
}

void write_snapshot_csv(const fs::path& path, const MemorySnapshot& snap) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << std::setprecision(17) << "arrival_index,x,y,z,max_sim\n";
    for (const auto& e : snap.entries) {
        out << e.arrival_index;
        for (int d = 0; d < 3; ++d) {
            out << ',';
            if (e.position && static_cast<std::size_t>(d) < e.position->dim()) out << e.position->coords()[d];
        }
        out << ',' << e.max_sim_to_others << '\n';
    }
}

MemorySnapshot take_snapshot(const CoreMemory& mem, std::uint64_t arrivals) {
    MemorySnapshot s;
    s.arrivals = arrivals;
    s.entries = mem.snapshot();
    s.max_pair_similarity = mem.max_pair() ? mem.max_pair()->value : 0.0;
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::randos: return "randos";
        case Strategy::sims: return "sims";
        case Strategy::all: return "all";
    }
    return "unknown";
}

Strategy parse_strategy(const std::string& s) {
    if (s == "randos") return Strategy::randos;
    if (s == "sims") return Strategy::sims;
    if (s == "all") return Strategy::all;
    throw ConfigError("unknown strategy '" + s + "' (expected randos, sims or all)");
}

void RunConfig::validate() const {
    auto check_source = [](const std::string& s, const char* key) {
        if (s != "synthetic" && s != "synthetic-test" && s.rfind("file:", 0) != 0)
            throw ConfigError(std::string(key) + " must be synthetic, synthetic-test or file:<path>");
        if (s.rfind("file:", 0) == 0 && s.size() == 5) throw ConfigError(std::string(key) + ": empty file path");
    };
    check_source(source, "source");
    check_source(test_source, "test_source");
    if (capacity < 2) throw ConfigError("capacity must be at least 2");
    if (taps < 1) throw ConfigError("taps must be at least 1");
    if (knn_k < 1) throw ConfigError("knn_k must be at least 1");
    if (ap_groups < 1) throw ConfigError("ap_groups must be at least 1");
    if (!(p_update >= 0.0 && p_update <= 1.0)) throw ConfigError("p_update must lie in [0,1]");
    if (!(p_tiebreak >= 0.0 && p_tiebreak <= 1.0)) throw ConfigError("p_tiebreak must lie in [0,1]");
    if (record_last != 0 && record_last <= record_first) throw ConfigError("record range is empty");
    if (metric_position_dims != 2 && metric_position_dims != 3)
        throw ConfigError("metric_position_dims must be 2 or 3");
    if (metrics.histogram_bins < 2) throw ConfigError("histogram_bins must be at least 2");
    if (metrics.max_rd_pairs < 1) throw ConfigError("max_rd_pairs must be positive");
    if (synthetic_sample_rate < 0.0 || synthetic_test_sample_rate < 0.0)
        throw ConfigError("synthetic sample rates must be nonnegative");
    try {
        train.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "seed") {
        const auto s = parse_number<std::uint64_t>(key, value);
        source_seed = s;
        curation_seed = s + 1;
        train_seed = s + 2;
        test_seed = s + 3;
        return;
    }
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError("unknown configuration key '" + key + "'");
    f->set(*this, value);
}

void RunConfig::load_key_value(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void RunConfig::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    load_key_value(buf.str());
}

std::string RunConfig::to_key_value() const {
    std::string out;
    for (const auto& f : fields()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
    return out;
}

std::vector<std::string> RunConfig::keys() {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
}

std::string RunConfig::describe(const std::string& key) {
    const Field* f = find_field(key);
    return f ? f->help : "";
}

SyntheticScenario RunConfig::training_scenario() const {
    SyntheticScenario s = SyntheticScenario::default_training();
    if (synthetic_subcarriers > 0) s.subcarriers = synthetic_subcarriers;
    if (synthetic_sample_rate > 0.0) s.sample_rate_hz = synthetic_sample_rate;
    if (synthetic_noise_std >= 0.0) s.noise_std = synthetic_noise_std;
    return s;
}

SyntheticScenario RunConfig::test_scenario() const {
    SyntheticScenario s = SyntheticScenario::default_test();
    if (synthetic_subcarriers > 0) s.subcarriers = synthetic_subcarriers;
    if (synthetic_test_sample_rate > 0.0) s.sample_rate_hz = synthetic_test_sample_rate;
    if (synthetic_noise_std >= 0.0) s.noise_std = synthetic_noise_std;
    return s;
}

namespace {

// Applies the configured record range to any source.
class RangeFilter final : public StreamSource {
public:
    RangeFilter(std::unique_ptr<StreamSource> inner, std::uint64_t first, std::uint64_t last)
        : inner_(std::move(inner)), first_(first), last_(last) {}

    std::optional<StreamItem> next() override {
        while (last_ == 0 || position_ < last_) {
            auto item = inner_->next();
            if (!item) return std::nullopt;
            if (position_++ >= first_) return item;
        }
        return std::nullopt;
    }

private:
    std::unique_ptr<StreamSource> inner_;
    std::uint64_t first_;
    std::uint64_t last_;
    std::uint64_t position_ = 0;
};

}  // namespace

std::unique_ptr<StreamSource> open_source(const std::string& name, const RunConfig& cfg, std::uint64_t seed) {
    if (name == "synthetic") return synthesize_stream(cfg.training_scenario(), seed);
    if (name == "synthetic-test") return synthesize_stream(cfg.test_scenario(), seed);
    if (name.rfind("file:", 0) == 0) {
        std::unique_ptr<StreamSource> reader = read_records(name.substr(5));
        if (cfg.record_first == 0 && cfg.record_last == 0) return reader;
        return std::make_unique<RangeFilter>(std::move(reader), cfg.record_first, cfg.record_last);
    }
    throw ConfigError("unknown source '" + name + "'");
}

ApPartition resolve_partition(const RunConfig& cfg, std::size_t antennas) {
    if (cfg.ap_groups == 0 || antennas % cfg.ap_groups != 0)
        throw ConfigError("ap_groups = " + std::to_string(cfg.ap_groups) + " does not divide B = " +
                          std::to_string(antennas));
    return ApPartition::uniform(cfg.ap_groups, antennas / cfg.ap_groups);
}

// ---------------------------------------------------------------------------
// Streaming

std::unique_ptr<Curator> make_curator(const RunConfig& cfg) {
    switch (cfg.strategy) {
        case Strategy::randos: {
            RandosConfig rc;
            rc.p_update = cfg.p_update;
            rc.rng_seed = cfg.curation_seed;
            return std::make_unique<RandosCurator>(rc);
        }
        case Strategy::sims: {
            SimsConfig sc;
            sc.p_tiebreak = cfg.p_tiebreak;
            sc.rng_seed = cfg.curation_seed;
            return std::make_unique<SimsCurator>(sc);
        }
        case Strategy::all: break;
    }
    throw ConfigError("strategy 'all' keeps the complete stream and has no curator");
}

StreamResult run_stream(StreamSource& source, const RunConfig& cfg, const OfferObserver& observer) {
    cfg.validate();
    auto curator = make_curator(cfg);
    StreamResult result{CoreMemory(cfg.capacity), {}, {}};
    std::set<std::uint64_t> snapshot_at(cfg.snapshots.begin(), cfg.snapshots.end());

    while (auto item = source.next()) {
        StoredSample sample;
        try {
            sample = prepare_sample(item->csi, cfg.taps, std::move(item->position), cfg.store_csi);
        } catch (const ZeroFeatureError&) {
            ++result.stats.rejected_zero;
            continue;
        }
        const CurationDecision d = curator->offer(result.memory, std::move(sample));
        ++result.stats.offered;
        switch (d.action) {
            case CurationAction::inserted_while_filling: ++result.stats.inserted; break;
            case CurationAction::replaced: ++result.stats.replaced; break;
            case CurationAction::discarded: ++result.stats.discarded; break;
        }
        if (d.action == CurationAction::inserted_while_filling && result.memory.full() &&
            result.memory.max_pair())
            result.stats.max_pair_at_fill = result.memory.max_pair()->value;
        if (observer) observer(result.memory, d);
        if (snapshot_at.count(result.stats.offered))
            result.snapshots.push_back(take_snapshot(result.memory, result.stats.offered));
    }
    if (result.snapshots.empty() || result.snapshots.back().arrivals != result.stats.offered)
        result.snapshots.push_back(take_snapshot(result.memory, result.stats.offered));
    if (result.memory.max_pair()) result.stats.max_pair_at_end = result.memory.max_pair()->value;
    return result;
}

// ---------------------------------------------------------------------------
// Training and evaluation

TrainingSet training_set_from_memory(const CoreMemory& mem) {
    TrainingSet set;
    for (const auto& s : mem.slots()) {
        set.arrival_index.push_back(s.arrival_index);
        set.delay.push_back(s.delay);
        set.features.push_back(s.feature);
        set.positions.push_back(s.position);
    }
    return set;
}

TrainingSet collect_all(StreamSource& source, const RunConfig& cfg) {
    TrainingSet set;
    while (auto item = source.next()) {
        try {
            StoredSample s = prepare_sample(item->csi, cfg.taps, std::move(item->position));
            set.arrival_index.push_back(s.arrival_index);
            set.delay.push_back(std::move(s.delay));
            set.features.push_back(std::move(s.feature));
            set.positions.push_back(std::move(s.position));
        } catch (const ZeroFeatureError&) {
        }
    }
    return set;
}

ChartFit fit_chart(const TrainingSet& set, const RunConfig& cfg) {
    cfg.validate();
    if (set.size() < 2) throw ParameterError("training needs at least two samples");
    const std::size_t k = std::min(cfg.knn_k, set.size() - 1);
    if (k != cfg.knn_k)
        log::warn("knn_k = " + std::to_string(cfg.knn_k) + " reduced to " + std::to_string(k) +
                  " for a training set of " + std::to_string(set.size()));
    const ApPartition aps = resolve_partition(cfg, set.delay.front().antennas());
    const KnnGraph graph = build_knn_graph(set.delay, k, aps);

    ChartFit fit;
    fit.components = connected_components(graph);
    GeodesicOptions gopt;
    gopt.threads = cfg.threads;
    fit.geodesic = geodesic_all_pairs(graph, gopt);

    TrainConfig tc = cfg.train;
    tc.rng_seed = cfg.train_seed;
    const Eigen::MatrixXd x = stack_features(set.features);
    ChartModel init = init_glorot(static_cast<std::size_t>(x.rows()), cfg.train_seed);
    TrainResult trained = train(std::move(init), x, fit.geodesic, tc);
    fit.model = std::move(trained.model);
    fit.report = std::move(trained.report);
    return fit;
}

Eigen::MatrixXd position_matrix(const std::vector<std::optional<GroundTruthPosition>>& positions,
                                std::size_t dims) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(positions.size()), static_cast<Eigen::Index>(dims));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!positions[i]) throw DimensionError("sample " + std::to_string(i) + " has no position");
        if (positions[i]->dim() < dims) throw DimensionError("positions have fewer coordinates than requested");
        out.row(static_cast<Eigen::Index>(i)) = positions[i]->coords().head(static_cast<Eigen::Index>(dims)).transpose();
    }
    return out;
}

Evaluation evaluate_model(const ChartModel& model, StreamSource& test, const RunConfig& cfg) {
    TrainingSet set = collect_all(test, cfg);
    Evaluation ev;
    if (set.size() == 0) throw ParameterError("test source produced no usable samples");
    ev.chart = forward_batch(model, stack_features(set.features)).transpose();
    const bool have_positions =
        std::all_of(set.positions.begin(), set.positions.end(), [](const auto& p) { return p.has_value(); });
    if (!have_positions) {
        log::warn("test source lacks positions; metrics skipped");
        return ev;
    }
    ev.ground_truth = position_matrix(set.positions, cfg.metric_position_dims);
    ev.metrics = evaluate_chart(ev.ground_truth, ev.chart, cfg.metrics);
    return ev;
}

// ---------------------------------------------------------------------------
// Commands

StreamResult cmd_stream(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.strategy == Strategy::all)
        throw ConfigError("strategy 'all' does not curate a memory; run train with it directly");
    prepare_output(cfg);
    auto source = open_source(cfg.source, cfg, cfg.source_seed);
    StreamResult result = run_stream(*source, cfg);

    save_memory(cfg.output_dir / "memory.ckpt", result.memory);
    fs::create_directories(cfg.output_dir / "snapshots");
    for (const auto& snap : result.snapshots)
        write_snapshot_csv(cfg.output_dir / "snapshots" / ("memory_n" + std::to_string(snap.arrivals) + ".csv"),
                           snap);

    std::ostringstream summary;
    summary << std::setprecision(17) << "strategy = " << to_string(cfg.strategy) << '\n'
            << "offered = " << result.stats.offered << '\n'
            << "inserted = " << result.stats.inserted << '\n'
            << "replaced = " << result.stats.replaced << '\n'
            << "discarded = " << result.stats.discarded << '\n'
            << "rejected_zero = " << result.stats.rejected_zero << '\n'
            << "memory_size = " << result.memory.size() << '\n';
    if (result.stats.max_pair_at_fill) summary << "max_pair_at_fill = " << *result.stats.max_pair_at_fill << '\n';
    if (result.stats.max_pair_at_end) summary << "max_pair_at_end = " << *result.stats.max_pair_at_end << '\n';
    for (const auto& snap : result.snapshots)
        summary << "snapshot_" << snap.arrivals << "_max_pair = " << snap.max_pair_similarity << '\n';
    write_text(cfg.output_dir / "stream_summary.txt", summary.str());
    return result;
}

ChartFit cmd_train(const RunConfig& cfg, const fs::path& memory_checkpoint) {
    cfg.validate();
    prepare_output(cfg);
    TrainingSet set;
    if (cfg.strategy == Strategy::all) {
        auto source = open_source(cfg.source, cfg, cfg.source_seed);
        set = collect_all(*source, cfg);
    } else {
        set = training_set_from_memory(load_memory(memory_checkpoint));
    }
    ChartFit fit = fit_chart(set, cfg);
    save_model(cfg.output_dir / "model.ckpt", fit.model);

    std::ostringstream report;
    report << std::setprecision(17) << "samples = " << set.size() << '\n'
           << "graph_components = " << fit.components << '\n'
           << "steps = " << fit.report.steps << '\n'
           << "final_loss = " << fit.report.final_loss << '\n'
           << "seconds = " << fit.report.seconds << '\n';
    write_text(cfg.output_dir / "train_report.txt", report.str());

    std::ostringstream losses;
    losses << std::setprecision(17) << "epoch,mean_pair_loss\n";
    for (std::size_t e = 0; e < fit.report.epoch_loss.size(); ++e)
        losses << e << ',' << fit.report.epoch_loss[e] << '\n';
    write_text(cfg.output_dir / "train_loss.csv", losses.str());
    return fit;
}

Evaluation cmd_evaluate(const RunConfig& cfg, const fs::path& model_checkpoint) {
    cfg.validate();
    prepare_output(cfg);
    const ChartModel model = load_model(model_checkpoint);
    auto test = open_source(cfg.test_source, cfg, cfg.test_seed);
    Evaluation ev = evaluate_model(model, *test, cfg);

    std::ostringstream chart;
    chart << std::setprecision(17) << "gt_x,gt_y,chart_x,chart_y\n";
    for (Eigen::Index i = 0; i < ev.chart.rows(); ++i) {
        if (ev.ground_truth.rows() > 0) chart << ev.ground_truth(i, 0) << ',' << ev.ground_truth(i, 1);
        else chart << ',';
        chart << ',' << ev.chart(i, 0) << ',' << ev.chart(i, 1) << '\n';
    }
    write_text(cfg.output_dir / "chart.csv", chart.str());
    if (ev.metrics) {
        write_text(cfg.output_dir / "metrics.txt", ev.metrics->to_key_value());
        write_text(cfg.output_dir / "metrics.csv",
                   MetricReport::csv_header() + "\n" + ev.metrics->to_csv_row(to_string(cfg.strategy)) + "\n");
    }
    return ev;
}

Evaluation cmd_reproduce(const RunConfig& cfg) {
    cfg.validate();
    fs::path memory = cfg.output_dir / "memory.ckpt";
    if (cfg.strategy != Strategy::all) cmd_stream(cfg);
    cmd_train(cfg, memory);
    return cmd_evaluate(cfg, cfg.output_dir / "model.ckpt");
}

}  // namespace streamcc
