// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/dissimilarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_compatible(const DelayDomainCsi& a, const DelayDomainCsi& b, const ApPartition& aps) {
    if (a.antennas() != b.antennas() || a.tap_count() != b.tap_count())
        throw DimensionError("delay-domain CSI shapes differ");
    aps.validate(a.antennas());
}

// Every (tap, AP) block of every sample normalized to unit norm (zero blocks
// stay zero). Row n of `packed_` holds, per block, the real parts followed by
// the imaginary parts, so a block of pair inner products is two small GEMMs.
class NormalizedBlocks {
public:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    NormalizedBlocks(std::span<const DelayDomainCsi> set, const ApPartition& aps) {
        if (set.empty()) return;
        const std::size_t b = set.front().antennas();
        const std::size_t c = set.front().tap_count();
        aps.validate(b);
        for (const auto& dd : set)
            if (dd.antennas() != b || dd.tap_count() != c)
                throw DimensionError("delay-domain CSI shapes differ within the set");

        std::size_t offset = 0;
        for (std::size_t tap = 0; tap < c; ++tap) {
            for (const auto& range : aps.ranges()) {
                blocks_.push_back({offset, range.count});
                offset += 2 * range.count;
            }
        }
        packed_.setZero(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(offset));

        for (std::size_t n = 0; n < set.size(); ++n) {
            const auto& taps = set[n].taps();
            std::size_t blk = 0;
            for (std::size_t tap = 0; tap < c; ++tap) {
                for (const auto& range : aps.ranges()) {
                    const auto& block = blocks_[blk++];
                    double energy = 0.0;
                    for (std::size_t a = 0; a < range.count; ++a)
                        energy += std::norm(taps(static_cast<Eigen::Index>(range.first + a),
                                                 static_cast<Eigen::Index>(tap)));
                    if (!(energy > 0.0)) continue;
                    const double inv = 1.0 / std::sqrt(energy);
                    double* re = packed_.row(static_cast<Eigen::Index>(n)).data() + block.offset;
                    double* im = re + block.length;
                    for (std::size_t a = 0; a < range.count; ++a) {
                        const Complex v = taps(static_cast<Eigen::Index>(range.first + a),
                                               static_cast<Eigen::Index>(tap));
                        re[a] = v.real() * inv;
                        im[a] = v.imag() * inv;
                    }
                }
            }
        }
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(packed_.rows()); }

    // out(r, c) = dissimilarity between samples i0 + r and j0 + c.
    void block(std::size_t i0, std::size_t rows, std::size_t j0, std::size_t cols, Eigen::MatrixXd& out) const {
        const auto r = static_cast<Eigen::Index>(rows);
        const auto c = static_cast<Eigen::Index>(cols);
        out.setZero(r, c);
        re_.resize(r, c);
        im_.resize(r, c);
        for (const auto& blk : blocks_) {
            const auto off = static_cast<Eigen::Index>(blk.offset);
            const auto len = static_cast<Eigen::Index>(blk.length);
            const auto a = packed_.block(static_cast<Eigen::Index>(i0), off, r, 2 * len);
            const auto b = packed_.block(static_cast<Eigen::Index>(j0), off, c, 2 * len);
            // <a, b> = sum conj(a) b
            re_.noalias() = a * b.transpose();
            im_.noalias() = a.leftCols(len) * b.rightCols(len).transpose();
            im_.noalias() -= a.rightCols(len) * b.leftCols(len).transpose();
            out.array() += (1.0 - re_.array().square() - im_.array().square()).max(0.0);
        }
    }

    static constexpr std::size_t kTile = 256;

private:
    struct Block {
        std::size_t offset;
        std::size_t length;
    };
    std::vector<Block> blocks_;
    RowMatrix packed_;
    mutable Eigen::MatrixXd re_;
    mutable Eigen::MatrixXd im_;
};

// Feeds `consume` full dissimilarity rows in order, computed kTile rows at a time.
template <typename Consume>
void for_each_row(const NormalizedBlocks& blocks, Consume&& consume) {
    const std::size_t n = blocks.size();
    const std::size_t tile = NormalizedBlocks::kTile;
    std::vector<Eigen::MatrixXd> strip((n + tile - 1) / tile);
    std::vector<double> row(n);
    for (std::size_t i0 = 0; i0 < n; i0 += tile) {
        const std::size_t rows = std::min(tile, n - i0);
        for (std::size_t j0 = 0, t = 0; j0 < n; j0 += tile, ++t)
            blocks.block(i0, rows, j0, std::min(tile, n - j0), strip[t]);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j0 = 0, t = 0; j0 < n; j0 += tile, ++t)
                for (Eigen::Index c = 0; c < strip[t].cols(); ++c)
                    row[j0 + static_cast<std::size_t>(c)] = strip[t](static_cast<Eigen::Index>(r), c);
            row[i0 + r] = 0.0;
            consume(i0 + r, row);
        }
    }
}

std::vector<std::size_t> k_smallest(const std::vector<double>& row, std::size_t self,
                                    std::size_t k) {
    std::vector<std::size_t> idx;
    idx.reserve(row.size() - 1);
    for (std::size_t j = 0; j < row.size(); ++j)
        if (j != self) idx.push_back(j);
    auto less = [&row](std::size_t a, std::size_t b) {
        return row[a] < row[b] || (row[a] == row[b] && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), less);
    idx.resize(k);
    return idx;
}

void check_knn_args(std::size_t n, std::size_t k) {
    if (n < 2) throw ParameterError("k-NN graph needs at least two nodes");
    if (k < 1 || k >= n)
        throw ParameterError("k = " + std::to_string(k) + " must satisfy 1 <= k < n = " +
                             std::to_string(n));
}

// Collects the k nearest of each row, then stores every edge in both directions.
class KnnBuilder {
public:
    KnnBuilder(std::size_t n, std::size_t k) {
        g_.k = k;
        g_.adjacency.assign(n, {});
    }

    void add_row(std::size_t i, const std::vector<double>& row) {
        for (std::size_t j : k_smallest(row, i, g_.k)) {
            g_.adjacency[i].push_back({j, row[j]});
            g_.adjacency[j].push_back({i, row[j]});
        }
    }

    KnnGraph finish() {
        for (auto& adj : g_.adjacency) {
            std::sort(adj.begin(), adj.end(),
                      [](const KnnEdge& a, const KnnEdge& b) { return a.to < b.to; });
            adj.erase(std::unique(adj.begin(), adj.end(),
                                  [](const KnnEdge& a, const KnnEdge& b) { return a.to == b.to; }),
                      adj.end());
        }
        return std::move(g_);
    }

private:
    KnnGraph g_;
};

}  // namespace

std::size_t KnnGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& adj : adjacency) total += adj.size();
    return total / 2;
}

double adp_dissimilarity(const DelayDomainCsi& a, const DelayDomainCsi& b, const ApPartition& aps) {
    check_compatible(a, b, aps);
    double total = 0.0;
    for (std::size_t tap = 0; tap < a.tap_count(); ++tap) {
        const auto t = static_cast<Eigen::Index>(tap);
        for (const auto& range : aps.ranges()) {
            const auto first = static_cast<Eigen::Index>(range.first);
            const auto count = static_cast<Eigen::Index>(range.count);
            const auto ha = a.taps().col(t).segment(first, count);
            const auto hb = b.taps().col(t).segment(first, count);
            const double na = ha.squaredNorm();
            const double nb = hb.squaredNorm();
            if (!(na > 0.0) || !(nb > 0.0)) {
                total += 1.0;
                continue;
            }
            const Complex inner = ha.dot(hb);  // conjugates the first argument
            total += std::max(0.0, 1.0 - std::norm(inner) / (na * nb));
        }
    }
    return total;
}

DissimilarityMatrix adp_matrix(std::span<const DelayDomainCsi> set, const ApPartition& aps) {
    const NormalizedBlocks blocks(set, aps);
    const auto n = static_cast<Eigen::Index>(set.size());
    DissimilarityMatrix out;
    out.kind = DissimilarityKind::adp;
    out.values.setZero(n, n);
    // Upper triangle by tiles, mirrored so the matrix is exactly symmetric.
    const std::size_t tile = NormalizedBlocks::kTile;
    Eigen::MatrixXd t;
    for (std::size_t i0 = 0; i0 < set.size(); i0 += tile) {
        const std::size_t rows = std::min(tile, set.size() - i0);
        for (std::size_t j0 = i0; j0 < set.size(); j0 += tile) {
            const std::size_t cols = std::min(tile, set.size() - j0);
            blocks.block(i0, rows, j0, cols, t);
            out.values.block(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(j0),
                             static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)) = t;
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < n; ++i) out.values(i, j) = out.values(j, i);
    }
    return out;
}

KnnGraph build_knn_graph(std::span<const DelayDomainCsi> set, std::size_t k,
                         const ApPartition& aps) {
    check_knn_args(set.size(), k);
    const NormalizedBlocks blocks(set, aps);
    KnnBuilder builder(set.size(), k);
    for_each_row(blocks, [&](std::size_t i, const std::vector<double>& row) { builder.add_row(i, row); });
    return builder.finish();
}

KnnGraph build_knn_graph(const DissimilarityMatrix& dissimilarities, std::size_t k) {
    const std::size_t n = dissimilarities.size();
    check_knn_args(n, k);
    KnnBuilder builder(n, k);
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row[j] = dissimilarities(i, j);
        builder.add_row(i, row);
    }
    return builder.finish();
}

std::size_t connected_components(const KnnGraph& g) {
    const std::size_t n = g.node_count();
    std::vector<bool> seen(n, false);
    std::size_t components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++components;
        seen[s] = true;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& e : g.adjacency[u]) {
                if (!seen[e.to]) {
                    seen[e.to] = true;
                    stack.push_back(e.to);
                }
            }
        }
    }
    return components;
}

namespace {

// Flat adjacency for the all-sources loop.
struct Csr {
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;

    explicit Csr(const KnnGraph& g) {
        offsets.reserve(g.node_count() + 1);
        offsets.push_back(0);
        for (const auto& adj : g.adjacency) {
            for (const auto& e : adj) {
                targets.push_back(static_cast<std::uint32_t>(e.to));
                weights.push_back(e.weight);
            }
            offsets.push_back(static_cast<std::uint32_t>(targets.size()));
        }
    }
};

// Indexed 4-ary min-heap over node ids keyed by dist; supports decrease-key,
// so each node is in the heap at most once.
class NodeHeap {
public:
    void reset(std::size_t n) {
        pos_.assign(n, kAbsent);
        heap_.clear();
    }
    bool empty() const noexcept { return heap_.empty(); }

    void push_or_decrease(std::uint32_t v, const double* key) {
        std::uint32_t i = pos_[v];
        if (i == kAbsent) {
            i = static_cast<std::uint32_t>(heap_.size());
            heap_.push_back(v);
        }
        sift_up(i, key);
    }

    std::uint32_t pop(const double* key) {
        const std::uint32_t top = heap_.front();
        pos_[top] = kDone;
        const std::uint32_t last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty()) {
            heap_[0] = last;
            pos_[last] = 0;
            sift_down(0, key);
        }
        return top;
    }

    bool done(std::uint32_t v) const noexcept { return pos_[v] == kDone; }

private:
    static constexpr std::uint32_t kAbsent = std::numeric_limits<std::uint32_t>::max();
    static constexpr std::uint32_t kDone = kAbsent - 1;

    // Ties go to the lower node id, so pop order is deterministic.
    static bool before(std::uint32_t a, std::uint32_t b, const double* key) {
        return key[a] < key[b] || (key[a] == key[b] && a < b);
    }

    void sift_up(std::uint32_t i, const double* key) {
        const std::uint32_t v = heap_[i];
        while (i > 0) {
            const std::uint32_t parent = (i - 1) / 4;
            if (!before(v, heap_[parent], key)) break;
            heap_[i] = heap_[parent];
            pos_[heap_[i]] = i;
            i = parent;
        }
        heap_[i] = v;
        pos_[v] = i;
    }

    void sift_down(std::uint32_t i, const double* key) {
        const std::uint32_t v = heap_[i];
        const auto size = static_cast<std::uint32_t>(heap_.size());
        for (;;) {
            const std::uint32_t first = 4 * i + 1;
            if (first >= size) break;
            std::uint32_t best = first;
            const std::uint32_t end = std::min(first + 4, size);
            for (std::uint32_t c = first + 1; c < end; ++c)
                if (before(heap_[c], heap_[best], key)) best = c;
            if (!before(heap_[best], v, key)) break;
            heap_[i] = heap_[best];
            pos_[heap_[i]] = i;
            i = best;
        }
        heap_[i] = v;
        pos_[v] = i;
    }

    std::vector<std::uint32_t> heap_;
    std::vector<std::uint32_t> pos_;
};

void dijkstra_into(const Csr& g, std::size_t source, double* dist, NodeHeap& heap) {
    const std::size_t n = g.offsets.size() - 1;
    std::fill(dist, dist + n, kInf);
    heap.reset(n);
    dist[source] = 0.0;
    heap.push_or_decrease(static_cast<std::uint32_t>(source), dist);
    while (!heap.empty()) {
        const std::uint32_t u = heap.pop(dist);
        const double d = dist[u];
        for (std::uint32_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
            const std::uint32_t v = g.targets[e];
            const double nd = d + g.weights[e];
            if (nd < dist[v] && !heap.done(v)) {
                dist[v] = nd;
                heap.push_or_decrease(v, dist);
            }
        }
    }
}

}  // namespace

std::vector<double> dijkstra(const KnnGraph& g, std::size_t source) {
    const std::size_t n = g.node_count();
    if (source >= n) throw ParameterError("Dijkstra source out of range");
    const Csr csr(g);
    std::vector<double> dist(n);
    NodeHeap heap;
    dijkstra_into(csr, source, dist.data(), heap);
    return dist;
}

DissimilarityMatrix geodesic_all_pairs(const KnnGraph& g, const GeodesicOptions& options) {
    for (const auto& adj : g.adjacency)
        for (const auto& e : adj)
            if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
                throw NumericError("graph edge weights must be finite and nonnegative");

    const std::size_t n = g.node_count();
    DissimilarityMatrix out;
    out.kind = DissimilarityKind::geodesic;
    out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

    if (n > std::numeric_limits<std::uint32_t>::max()) throw ParameterError("graph too large");
    const Csr csr(g);
    auto run_sources = [&](std::size_t first, std::size_t step) {
        NodeHeap heap;
        // Column-major: column s is contiguous.
        for (std::size_t s = first; s < n; s += step)
            dijkstra_into(csr, s, out.values.col(static_cast<Eigen::Index>(s)).data(), heap);
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        run_sources(0, 1);
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) workers.emplace_back(run_sources, t, threads);
    }

    // Undirected graph: distances are symmetric up to summation order. Take the
    // smaller of the two so that the matrix is exactly symmetric.
    double largest = 0.0;
    bool disconnected = false;
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
        out.values(j, j) = 0.0;
        for (Eigen::Index i = j + 1; i < out.values.rows(); ++i) {
            const double v = std::min(out.values(i, j), out.values(j, i));
            out.values(i, j) = v;
            out.values(j, i) = v;
            if (std::isfinite(v))
                largest = std::max(largest, v);
            else
                disconnected = true;
        }
    }
    if (disconnected) {
        const double fill = largest * options.disconnected_factor;
        out.values = out.values.unaryExpr([fill](double v) { return std::isfinite(v) ? v : fill; });
        std::ostringstream msg;
        msg << "k-NN graph has " << connected_components(g)
            << " connected components; inter-component geodesics set to " << fill;
        log::warn(msg.str());
    }
    return out;
}

}  // namespace streamcc
