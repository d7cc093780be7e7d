// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>
#include <vector>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

void check_sets(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart) {
    if (gt.rows() != chart.rows())
        throw DimensionError("ground truth has " + std::to_string(gt.rows()) + " points, chart has " +
                             std::to_string(chart.rows()));
    if (!gt.allFinite() || !chart.allFinite()) throw NumericError("non-finite point coordinates");
}

void squared_distances_from(const Eigen::MatrixXd& pts, Eigen::Index i, std::vector<double>& out) {
    out.resize(static_cast<std::size_t>(pts.rows()));
    for (Eigen::Index j = 0; j < pts.rows(); ++j)
        out[static_cast<std::size_t>(j)] = (pts.row(j) - pts.row(i)).squaredNorm();
}

// order[r] = index of the (r+1)-th nearest point to i, i itself excluded.
void neighbor_order(const std::vector<double>& dist, std::size_t self, std::vector<std::size_t>& order) {
    order.clear();
    for (std::size_t j = 0; j < dist.size(); ++j)
        if (j != self) order.push_back(j);
    std::sort(order.begin(), order.end(), [&dist](std::size_t a, std::size_t b) {
        return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
}

double entropy(const std::vector<double>& counts, double total) {
    double h = 0.0;
    for (double c : counts) {
        if (c <= 0.0) continue;
        const double p = c / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::size_t MetricOptions::resolved_k(std::size_t n) const {
    if (neighborhood_k > 0) return neighborhood_k;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(n))));
}

NeighborhoodScores neighborhood_scores(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart,
                                       std::size_t k) {
    check_sets(gt, chart);
    const auto n = static_cast<std::size_t>(gt.rows());
    if (k < 1 || 2 * k >= n)
        throw ParameterError("neighborhood size k = " + std::to_string(k) +
                             " must satisfy 1 <= k < n/2 (n = " + std::to_string(n) + ")");

    std::vector<double> dgt, dch;
    std::vector<std::size_t> ogt, och;
    std::vector<std::size_t> rank_gt(n), rank_ch(n);
    double tw_sum = 0.0;
    double ct_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        squared_distances_from(gt, static_cast<Eigen::Index>(i), dgt);
        squared_distances_from(chart, static_cast<Eigen::Index>(i), dch);
        neighbor_order(dgt, i, ogt);
        neighbor_order(dch, i, och);
        for (std::size_t r = 0; r < ogt.size(); ++r) rank_gt[ogt[r]] = r + 1;
        for (std::size_t r = 0; r < och.size(); ++r) rank_ch[och[r]] = r + 1;
        // A chart neighbor with ground-truth rank > k is a false neighbor, and
        // vice versa for continuity.
        for (std::size_t r = 0; r < k; ++r) {
            if (rank_gt[och[r]] > k) tw_sum += static_cast<double>(rank_gt[och[r]] - k);
            if (rank_ch[ogt[r]] > k) ct_sum += static_cast<double>(rank_ch[ogt[r]] - k);
        }
    }
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    const double norm = 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0));
    return {1.0 - norm * tw_sum, 1.0 - norm * ct_sum};
}

double trustworthiness(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k) {
    return neighborhood_scores(gt, chart, k).tw;
}

double continuity(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k) {
    return neighborhood_scores(gt, chart, k).ct;
}

double kruskal_stress(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart) {
    check_sets(gt, chart);
    const Eigen::Index n = gt.rows();
    if (n < 2) throw ParameterError("Kruskal stress needs at least two points");
    double s_dd = 0.0;  // sum delta * dhat
    double s_hh = 0.0;  // sum dhat^2
    double s_gg = 0.0;  // sum delta^2
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double delta = (gt.row(i) - gt.row(j)).norm();
            const double dhat = (chart.row(i) - chart.row(j)).norm();
            s_dd += delta * dhat;
            s_hh += dhat * dhat;
            s_gg += delta * delta;
        }
    }
    if (!(s_gg > 0.0)) throw NumericError("Kruskal stress undefined: all ground-truth points coincide");
    const double beta = s_hh > 0.0 ? s_dd / s_hh : 0.0;
    double residual = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double delta = (gt.row(i) - gt.row(j)).norm();
            const double dhat = (chart.row(i) - chart.row(j)).norm();
            const double e = delta - beta * dhat;
            residual += e * e;
        }
    }
    return std::min(1.0, std::sqrt(residual / s_gg));
}

double rajski_from_joint_counts(const Eigen::MatrixXd& counts) {
    if (counts.size() == 0 || (counts.array() < 0.0).any() || !counts.allFinite())
        throw ParameterError("joint histogram needs finite nonnegative counts");
    const double total = counts.sum();
    if (!(total > 0.0)) throw ParameterError("joint histogram is empty");
    std::vector<double> joint(counts.data(), counts.data() + counts.size());
    std::vector<double> px(static_cast<std::size_t>(counts.rows()));
    std::vector<double> py(static_cast<std::size_t>(counts.cols()));
    for (Eigen::Index r = 0; r < counts.rows(); ++r) px[static_cast<std::size_t>(r)] = counts.row(r).sum();
    for (Eigen::Index c = 0; c < counts.cols(); ++c) py[static_cast<std::size_t>(c)] = counts.col(c).sum();
    const double hxy = entropy(joint, total);
    if (!(hxy > 0.0)) {
        log::warn("Rajski distance: joint entropy is zero (single occupied bin); reporting 0");
        return 0.0;
    }
    const double mi = entropy(px, total) + entropy(py, total) - hxy;
    return std::clamp(1.0 - mi / hxy, 0.0, 1.0);
}

double rajski_distance(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t bins,
                       std::size_t max_pairs, std::uint64_t seed) {
    check_sets(gt, chart);
    const auto n = static_cast<std::size_t>(gt.rows());
    if (n < 2) throw ParameterError("Rajski distance needs at least two points");
    if (bins < 2) throw ParameterError("Rajski distance needs at least two bins");
    if (max_pairs == 0) throw ParameterError("max_pairs must be positive");

    const std::size_t total_pairs = n * (n - 1) / 2;
    std::vector<double> x, y;
    auto push = [&](std::size_t i, std::size_t j) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        x.push_back((gt.row(ii) - gt.row(jj)).norm());
        y.push_back((chart.row(ii) - chart.row(jj)).norm());
    };
    if (total_pairs <= max_pairs) {
        x.reserve(total_pairs);
        y.reserve(total_pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) push(i, j);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(max_pairs * 2);
        while (x.size() < max_pairs) {
            std::size_t a = pick(rng), b = pick(rng);
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            if (seen.insert(static_cast<std::uint64_t>(a) * n + b).second) push(a, b);
        }
    }

    auto binner = [bins](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double lo_v = *lo;
        const double width = *hi - *lo;
        std::vector<std::size_t> out(v.size(), 0);
        if (!(width > 0.0)) return out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double t = (v[i] - lo_v) / width;
            out[i] = std::min(bins - 1, static_cast<std::size_t>(t * static_cast<double>(bins)));
        }
        return out;
    };
    const auto bx = binner(x);
    const auto by = binner(y);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bins),
                                                   static_cast<Eigen::Index>(bins));
    for (std::size_t p = 0; p < bx.size(); ++p)
        counts(static_cast<Eigen::Index>(bx[p]), static_cast<Eigen::Index>(by[p])) += 1.0;
    return rajski_from_joint_counts(counts);
}

MetricReport evaluate_chart(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart,
                            const MetricOptions& options) {
    check_sets(gt, chart);
    MetricReport r;
    r.sample_count = static_cast<std::size_t>(gt.rows());
    r.neighborhood_k = options.resolved_k(r.sample_count);
    r.histogram_bins = options.histogram_bins;
    const auto nb = neighborhood_scores(gt, chart, r.neighborhood_k);
    r.tw = nb.tw;
    r.ct = nb.ct;
    r.ks = kruskal_stress(gt, chart);
    r.rd = rajski_distance(gt, chart, options.histogram_bins, options.max_rd_pairs, options.rd_seed);
    return r;
}

std::string MetricReport::to_key_value() const {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "tw = " << tw << '\n'
        << "ct = " << ct << '\n'
        << "ks = " << ks << '\n'
        << "rd = " << rd << '\n'
        << "neighborhood_k = " << neighborhood_k << '\n'
        << "histogram_bins = " << histogram_bins << '\n'
        << "sample_count = " << sample_count << '\n';
    return out.str();
}

std::string MetricReport::csv_header() { return "label,tw,ct,ks,rd,neighborhood_k,histogram_bins,sample_count"; }

std::string MetricReport::to_csv_row(const std::string& label) const {
    std::ostringstream out;
    out << std::setprecision(17) << label << ',' << tw << ',' << ct << ',' << ks << ',' << rd << ','
        << neighborhood_k << ',' << histogram_bins << ',' << sample_count;
    return out.str();
}

}  // namespace streamcc
