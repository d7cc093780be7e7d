// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

// Command-line front end: stream, train, evaluate, reproduce, plus synth and
// import for producing CSI record files.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.

#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "streamcc/error.hpp"
#include "streamcc/io.hpp"
#include "streamcc/pipeline.hpp"
#include "streamcc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace streamcc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Flags shared by the experiment subcommands. Values are applied to a
// RunConfig in order: defaults, --config file, --set pairs, then per-key flags.
struct ConfigFlags {
    std::string config_file;
    std::vector<std::string> assignments;
    std::vector<std::pair<std::string, std::string>> flags;
    std::vector<std::string> values;  // storage for per-key flags

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "key = value file")->check(CLI::ExistingFile);
        app->add_option("--set", assignments, "key=value override (repeatable)");
        const auto keys = RunConfig::keys();
        values.resize(keys.size() + 1);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            std::string flag = "--" + keys[i];
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            app->add_option(flag, values[i], RunConfig::describe(keys[i]));
        }
        app->add_option("--seed", values.back(), "sets all four seeds to s, s+1, s+2, s+3");
    }

    RunConfig resolve(const CLI::App* app) const {
        RunConfig cfg;
        if (!config_file.empty()) cfg.load_file(config_file);
        for (const auto& a : assignments) {
            const auto eq = a.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + a + "'");
            cfg.set(a.substr(0, eq), a.substr(eq + 1));
        }
        if (app->count("--seed") > 0) cfg.set("seed", values.back());
        const auto keys = RunConfig::keys();
        for (std::size_t i = 0; i < keys.size(); ++i) {
            std::string flag = "--" + keys[i];
            for (auto& ch : flag)
                if (ch == '_') ch = '-';
            if (app->count(flag) > 0) cfg.set(keys[i], values[i]);
        }
        cfg.validate();
        return cfg;
    }
};

void print_metrics(const Evaluation& ev) {
    if (ev.metrics) std::cout << ev.metrics->to_key_value();
    else std::cout << "metrics skipped (no ground-truth positions)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming channel charting with a curated core CSI memory"};
    app.require_subcommand(1);

    ConfigFlags stream_flags, train_flags, eval_flags, repro_flags, config_flags;

    auto* stream = app.add_subcommand("stream", "curate the core memory from a CSI stream");
    stream_flags.attach(stream);

    auto* train = app.add_subcommand("train", "train a chart on a memory checkpoint");
    train_flags.attach(train);
    std::string memory_path;
    train->add_option("--memory", memory_path, "memory checkpoint (default <output_dir>/memory.ckpt)");

    auto* evaluate = app.add_subcommand("evaluate", "map a test stream through a model and score it");
    eval_flags.attach(evaluate);
    std::string model_path;
    evaluate->add_option("--model", model_path, "model checkpoint (default <output_dir>/model.ckpt)");

    auto* reproduce = app.add_subcommand("reproduce", "stream, train and evaluate into one directory");
    repro_flags.attach(reproduce);

    auto* show = app.add_subcommand("config", "print the resolved configuration");
    config_flags.attach(show);

    auto* synth = app.add_subcommand("synth", "write a synthetic stream as a CSI record file");
    std::string synth_out;
    bool synth_test = false;
    std::uint64_t synth_seed = 1;
    std::size_t synth_subcarriers = 0;
    std::uint64_t synth_max = 0;
    synth->add_option("--output", synth_out, "record file to write")->required();
    synth->add_flag("--test", synth_test, "use the test trajectory");
    synth->add_option("--seed", synth_seed, "noise seed");
    synth->add_option("--subcarriers", synth_subcarriers, "override W (0: default)");
    synth->add_option("--max-samples", synth_max, "cap the number of samples (0: whole trajectory)");

    auto* import = app.add_subcommand("import", "convert an external dataset into a CSI record file");
    std::string import_in, import_format = "npy", import_out;
    ImportOptions import_opts;
    import->add_option("--input", import_in, "dataset directory or file")->required();
    import->add_option("--format", import_format, "npy | ccsf");
    import->add_option("--output", import_out, "record file to write")->required();
    import->add_option("--first", import_opts.first, "first record kept");
    import->add_option("--last", import_opts.last, "one past the last record kept (0: end)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*stream) {
            const RunConfig cfg = stream_flags.resolve(stream);
            const StreamResult r = cmd_stream(cfg);
            std::cout << "offered " << r.stats.offered << ", memory " << r.memory.size() << ", replaced "
                      << r.stats.replaced << " -> " << cfg.output_dir.string() << "\n";
        } else if (*train) {
            const RunConfig cfg = train_flags.resolve(train);
            const fs::path mem = memory_path.empty() ? cfg.output_dir / "memory.ckpt" : fs::path(memory_path);
            const ChartFit fit = cmd_train(cfg, mem);
            std::cout << "steps " << fit.report.steps << ", final loss " << fit.report.final_loss << " -> "
                      << cfg.output_dir.string() << "\n";
        } else if (*evaluate) {
            const RunConfig cfg = eval_flags.resolve(evaluate);
            const fs::path model = model_path.empty() ? cfg.output_dir / "model.ckpt" : fs::path(model_path);
            print_metrics(cmd_evaluate(cfg, model));
        } else if (*reproduce) {
            print_metrics(cmd_reproduce(repro_flags.resolve(reproduce)));
        } else if (*show) {
            std::cout << config_flags.resolve(show).to_key_value();
        } else if (*synth) {
            SyntheticScenario s = synth_test ? SyntheticScenario::default_test() : SyntheticScenario::default_training();
            if (synth_subcarriers > 0) s.subcarriers = synth_subcarriers;
            s.max_samples = synth_max;
            auto source = synthesize_stream(s, synth_seed);
            CsiRecordWriter writer(synth_out, static_cast<std::uint32_t>(s.antennas()),
                                   static_cast<std::uint32_t>(s.subcarriers), 3);
            while (auto item = source->next()) writer.write(*item);
            writer.close();
            std::cout << "wrote " << writer.count() << " records to " << synth_out << "\n";
        } else if (*import) {
            const CsiRecordHeader h = import_external(import_in, import_format, import_out, import_opts);
            std::cout << "wrote " << h.count << " records (B=" << h.antennas << ", W=" << h.subcarriers
                      << ") to " << import_out << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ZeroFeatureError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
