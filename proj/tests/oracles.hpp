// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Deliberately naive reference implementations used as test oracles. They
// share no code with the library and favor obviousness over speed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace oracle {

using cd = std::complex<double>;

// tap_t = (1/W) sum_w H_w exp(+j 2 pi w t / W)
inline std::vector<cd> idft_taps(const std::vector<cd>& h, std::size_t taps) {
    const double w_count = static_cast<double>(h.size());
    std::vector<cd> out(taps);
    for (std::size_t t = 0; t < taps; ++t) {
        cd acc = 0.0;
        for (std::size_t w = 0; w < h.size(); ++w)
            acc += h[w] * std::exp(cd(0.0, 2.0 * std::numbers::pi * static_cast<double>(w * t) / w_count));
        out[t] = acc / w_count;
    }
    return out;
}

inline std::vector<cd> dft(const std::vector<cd>& x) {
    const double n = static_cast<double>(x.size());
    std::vector<cd> out(x.size());
    for (std::size_t w = 0; w < x.size(); ++w)
        for (std::size_t t = 0; t < x.size(); ++t)
            out[w] += x[t] * std::exp(cd(0.0, -2.0 * std::numbers::pi * static_cast<double>(w * t) / n));
    return out;
}

// One term per (tap, AP): 1 - |<a,b>|^2 / (|a|^2 |b|^2), zero norms give 1.
// taps[b][c] is antenna b, tap c; aps lists [first, first+count) ranges.
inline double adp(const std::vector<std::vector<cd>>& a, const std::vector<std::vector<cd>>& b,
                  const std::vector<std::pair<std::size_t, std::size_t>>& aps) {
    double total = 0.0;
    const std::size_t c_taps = a.front().size();
    for (const auto& [first, count] : aps) {
        for (std::size_t c = 0; c < c_taps; ++c) {
            cd inner = 0.0;
            double na = 0.0, nb = 0.0;
            for (std::size_t r = first; r < first + count; ++r) {
                inner += std::conj(a[r][c]) * b[r][c];
                na += std::norm(a[r][c]);
                nb += std::norm(b[r][c]);
            }
            if (na == 0.0 || nb == 0.0) {
                total += 1.0;
                continue;
            }
            total += std::max(0.0, 1.0 - std::norm(inner) / (na * nb));
        }
    }
    return total;
}

// Floyd-Warshall on a dense weight matrix (inf for no edge).
inline Eigen::MatrixXd floyd_warshall(Eigen::MatrixXd d) {
    const Eigen::Index n = d.rows();
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) = 0.0;
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (d(i, m) + d(m, j) < d(i, j)) d(i, j) = d(i, m) + d(m, j);
    return d;
}

inline double dist(const Eigen::MatrixXd& p, Eigen::Index i, Eigen::Index j) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < p.cols(); ++c) s += (p(i, c) - p(j, c)) * (p(i, c) - p(j, c));
    return std::sqrt(s);
}

// Rank of j among the neighbors of i by counting: 1 + number of points that
// are strictly closer, or equally close with a smaller index.
inline std::size_t rank_of(const Eigen::MatrixXd& p, Eigen::Index i, Eigen::Index j) {
    std::size_t r = 1;
    const double dij = dist(p, i, j);
    for (Eigen::Index m = 0; m < p.rows(); ++m) {
        if (m == i || m == j) continue;
        const double dim = dist(p, i, m);
        if (dim < dij || (dim == dij && m < j)) ++r;
    }
    return r;
}

// Trustworthiness with ranks counted from squared distances (same ordering
// as distances; the tie order by index is what matters).
inline double trustworthiness(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k) {
    const auto n = static_cast<double>(gt.rows());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < gt.rows(); ++i)
        for (Eigen::Index j = 0; j < gt.rows(); ++j) {
            if (i == j) continue;
            if (rank_of(chart, i, j) <= k && rank_of(gt, i, j) > k)
                sum += static_cast<double>(rank_of(gt, i, j)) - static_cast<double>(k);
        }
    const double kk = static_cast<double>(k);
    return 1.0 - 2.0 / (n * kk * (2.0 * n - 3.0 * kk - 1.0)) * sum;
}

inline double continuity(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t k) {
    return trustworthiness(chart, gt, k);
}

inline double kruskal_stress(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart) {
    std::vector<double> delta, dhat;
    for (Eigen::Index i = 0; i < gt.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gt.rows(); ++j) {
            delta.push_back(dist(gt, i, j));
            dhat.push_back(dist(chart, i, j));
        }
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < delta.size(); ++p) {
        num += delta[p] * dhat[p];
        den += dhat[p] * dhat[p];
    }
    const double beta = den > 0.0 ? num / den : 0.0;
    double res = 0.0, norm = 0.0;
    for (std::size_t p = 0; p < delta.size(); ++p) {
        res += (delta[p] - beta * dhat[p]) * (delta[p] - beta * dhat[p]);
        norm += delta[p] * delta[p];
    }
    return std::min(1.0, std::sqrt(res / norm));
}

// Equal-width histogram over the observed range, bins as (index_x, index_y)
// keys, entropies in nats.
inline double rajski(const Eigen::MatrixXd& gt, const Eigen::MatrixXd& chart, std::size_t bins) {
    std::vector<double> x, y;
    for (Eigen::Index i = 0; i < gt.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gt.rows(); ++j) {
            x.push_back(dist(gt, i, j));
            y.push_back(dist(chart, i, j));
        }
    auto bin_of = [bins](const std::vector<double>& v, double value) -> std::size_t {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        if (hi == lo) return 0;
        auto b = static_cast<std::size_t>((value - lo) / (hi - lo) * static_cast<double>(bins));
        return b >= bins ? bins - 1 : b;
    };
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> px, py;
    for (std::size_t p = 0; p < x.size(); ++p) {
        const auto bx = bin_of(x, x[p]);
        const auto by = bin_of(y, y[p]);
        joint[{bx, by}] += 1.0;
        px[bx] += 1.0;
        py[by] += 1.0;
    }
    const double total = static_cast<double>(x.size());
    auto h = [total](const auto& m) {
        double out = 0.0;
        for (const auto& [key, count] : m) out -= count / total * std::log(count / total);
        return out;
    };
    const double hxy = h(joint);
    if (hxy == 0.0) return 0.0;
    return 1.0 - (h(px) + h(py) - hxy) / hxy;
}

}  // namespace oracle
