// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "streamcc/error.hpp"
#include "streamcc/pipeline.hpp"

namespace py = pybind11;
using namespace streamcc;

namespace {

py::dict metrics_dict(const MetricReport& r) {
    py::dict d;
    d["tw"] = r.tw;
    d["ct"] = r.ct;
    d["ks"] = r.ks;
    d["rd"] = r.rd;
    d["neighborhood_k"] = r.neighborhood_k;
    d["histogram_bins"] = r.histogram_bins;
    d["sample_count"] = r.sample_count;
    return d;
}

py::dict evaluation_dict(const Evaluation& ev) {
    py::dict d;
    d["ground_truth"] = ev.ground_truth;
    d["chart"] = ev.chart;
    d["metrics"] = ev.metrics ? py::object(metrics_dict(*ev.metrics)) : py::none();
    return d;
}

ApPartition groups(std::size_t antennas, std::size_t ap_groups) {
    if (ap_groups == 0 || antennas % ap_groups != 0)
        throw ConfigError("ap_groups must divide the antenna count");
    return ApPartition::uniform(ap_groups, antennas / ap_groups);
}

}  // namespace

PYBIND11_MODULE(_streamcc, m) {
    m.doc() = "Streaming channel charting with a curated core CSI memory";

    auto base = py::register_exception<Error>(m, "StreamccError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());

    // CSI processing
    m.def(
        "delay_domain",
        [](const ComplexGrid& csi, std::size_t taps) { return to_delay_domain(CsiMatrix(csi), taps).taps(); },
        py::arg("csi"), py::arg("taps"), "First `taps` inverse-DFT taps of a B x W CSI matrix.");
    m.def(
        "feature",
        [](const ComplexGrid& csi, std::size_t taps) {
            return extract_feature(to_delay_domain(CsiMatrix(csi), taps)).values();
        },
        py::arg("csi"), py::arg("taps"), "Unit-norm magnitude feature of a B x W CSI matrix.");
    m.def(
        "cosine_similarity",
        [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return cosine_similarity(CsiFeature(a), CsiFeature(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "adp_dissimilarity",
        [](const ComplexGrid& a, const ComplexGrid& b, std::size_t ap_groups) {
            return adp_dissimilarity(DelayDomainCsi(a), DelayDomainCsi(b),
                                     groups(static_cast<std::size_t>(a.rows()), ap_groups));
        },
        py::arg("a_taps"), py::arg("b_taps"), py::arg("ap_groups") = 1);
    m.def(
        "synthesize_channel",
        [](const Eigen::Vector3d& position, std::size_t subcarriers) {
            auto s = SyntheticScenario::default_training();
            if (subcarriers > 0) s.subcarriers = subcarriers;
            return synthesize_channel(s, position);
        },
        py::arg("position"), py::arg("subcarriers") = 0,
        "Noise-free channel of the default synthetic scenario at a UE position.");

    // Metrics (points are rows)
    m.def("trustworthiness", &trustworthiness, py::arg("ground_truth"), py::arg("chart"), py::arg("k"));
    m.def("continuity", &continuity, py::arg("ground_truth"), py::arg("chart"), py::arg("k"));
    m.def("kruskal_stress", &kruskal_stress, py::arg("ground_truth"), py::arg("chart"));
    m.def("rajski_distance", &rajski_distance, py::arg("ground_truth"), py::arg("chart"), py::arg("bins") = 128,
          py::arg("max_pairs") = 1'000'000, py::arg("seed") = 0);
    m.def(
        "evaluate_chart",
        [](const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k, std::size_t bins) {
            MetricOptions o;
            o.neighborhood_k = k;
            o.histogram_bins = bins;
            return metrics_dict(evaluate_chart(gt, chart, o));
        },
        py::arg("ground_truth"), py::arg("chart"), py::arg("neighborhood_k") = 0, py::arg("histogram_bins") = 128);

    // Records and checkpoints
    m.def(
        "read_records",
        [](const std::filesystem::path& path) {
            auto reader = read_records(path);
            py::list out;
            while (auto item = reader->next()) {
                py::dict d;
                d["sample_index"] = item->csi.sample_index();
                d["timestamp"] = item->csi.timestamp() ? py::object(py::float_(*item->csi.timestamp())) : py::none();
                d["csi"] = item->csi.entries();
                d["position"] = item->position ? py::object(py::cast(item->position->coords())) : py::none();
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("path"), "All records of a CSI record file as dicts.");
    m.def(
        "import_external",
        [](const std::filesystem::path& input, const std::string& format, const std::filesystem::path& output,
           std::uint64_t first, std::uint64_t last) {
            return import_external(input, format, output, {first, last}).count;
        },
        py::arg("input"), py::arg("format"), py::arg("output"), py::arg("first") = 0, py::arg("last") = 0,
        "Converts a dataset into a CSI record file; returns the record count.");

    py::class_<ChartModel>(m, "ChartModel")
        .def_property_readonly("input_dim", &ChartModel::input_dim)
        .def_property_readonly("output_dim", &ChartModel::output_dim)
        .def_property_readonly("parameter_count", &ChartModel::parameter_count)
        .def(
            "forward",
            [](const ChartModel& model, const Eigen::MatrixXd& features) {
                return Eigen::MatrixXd(forward_batch(model, features.transpose()).transpose());
            },
            py::arg("features"), "Maps n x D' feature rows to n x 2 chart points.");
    m.def("load_model", &load_model, py::arg("path"));

    // Configuration and commands
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def(py::init([](const py::kwargs& kwargs) {
            RunConfig cfg;
            for (const auto& [key, value] : kwargs) cfg.set(py::str(key), py::str(value));
            return cfg;
        }))
        .def("set", &RunConfig::set, py::arg("key"), py::arg("value"))
        .def("validate", &RunConfig::validate)
        .def("load_file", &RunConfig::load_file, py::arg("path"))
        .def("load_text", &RunConfig::load_key_value, py::arg("text"))
        .def("to_text", &RunConfig::to_key_value)
        .def_static("keys", &RunConfig::keys)
        .def("__repr__", [](const RunConfig& c) { return "RunConfig(\n" + c.to_key_value() + ")"; });

    m.def(
        "stream",
        [](const RunConfig& cfg) {
            py::gil_scoped_release release;
            const StreamResult r = cmd_stream(cfg);
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["offered"] = r.stats.offered;
            d["inserted"] = r.stats.inserted;
            d["replaced"] = r.stats.replaced;
            d["discarded"] = r.stats.discarded;
            d["memory_size"] = r.memory.size();
            py::list arrivals;
            for (const auto& s : r.memory.slots()) arrivals.append(s.arrival_index);
            d["arrival_indices"] = arrivals;
            return d;
        },
        py::arg("config"), "Curates the core memory and writes its artifacts.");
    m.def(
        "train",
        [](const RunConfig& cfg, const std::filesystem::path& memory) {
            ChartFit fit;
            {
                py::gil_scoped_release release;
                fit = cmd_train(cfg, memory);
            }
            py::dict d;
            d["final_loss"] = fit.report.final_loss;
            d["steps"] = fit.report.steps;
            d["epoch_loss"] = fit.report.epoch_loss;
            d["components"] = fit.components;
            return d;
        },
        py::arg("config"), py::arg("memory_checkpoint") = std::filesystem::path());
    m.def(
        "evaluate",
        [](const RunConfig& cfg, const std::filesystem::path& model) {
            Evaluation ev;
            {
                py::gil_scoped_release release;
                ev = cmd_evaluate(cfg, model);
            }
            return evaluation_dict(ev);
        },
        py::arg("config"), py::arg("model_checkpoint"));
    m.def(
        "reproduce",
        [](const RunConfig& cfg) {
            Evaluation ev;
            {
                py::gil_scoped_release release;
                ev = cmd_reproduce(cfg);
            }
            return evaluation_dict(ev);
        },
        py::arg("config"), "stream -> train -> evaluate into config.output_dir.");
}
