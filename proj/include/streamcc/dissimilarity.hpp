// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "streamcc/csi.hpp"

namespace streamcc {

enum class DissimilarityKind : unsigned char { adp = 1, geodesic = 2 };

/// Symmetric, zero-diagonal, nonnegative n x n matrix.
struct DissimilarityMatrix {
    Eigen::MatrixXd values;
    DissimilarityKind kind = DissimilarityKind::adp;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
};

struct KnnEdge {
    std::size_t to = 0;
    double weight = 0.0;
};

/// k-nearest-neighbor graph, symmetrized by union. adjacency[i] is sorted by
/// neighbor index and holds every incident edge exactly once.
struct KnnGraph {
    std::size_t k = 0;
    std::vector<std::vector<KnnEdge>> adjacency;

    std::size_t node_count() const noexcept { return adjacency.size(); }
    std::size_t degree(std::size_t i) const { return adjacency.at(i).size(); }
    std::size_t edge_count() const;
};

/// Sum over taps and access points of 1 - |<a,b>|^2 / (|a|^2 |b|^2), evaluated
/// on the per-AP tap vectors. A tap vector with zero norm contributes 1.
double adp_dissimilarity(const DelayDomainCsi& a, const DelayDomainCsi& b, const ApPartition& aps);

/// All-pairs ADP dissimilarity matrix (kind = adp).
DissimilarityMatrix adp_matrix(std::span<const DelayDomainCsi> set, const ApPartition& aps);

/// k smallest-ADP neighbors per node (ties by index), symmetrized by union.
/// Rows of the ADP matrix are computed on the fly, so memory stays O(n k).
/// Throws ParameterError unless n >= 2 and 1 <= k < n.
KnnGraph build_knn_graph(std::span<const DelayDomainCsi> set, std::size_t k, const ApPartition& aps);

/// Same construction from an explicit dissimilarity matrix.
KnnGraph build_knn_graph(const DissimilarityMatrix& dissimilarities, std::size_t k);

/// Number of connected components.
std::size_t connected_components(const KnnGraph& g);

struct GeodesicOptions {
    /// Worker threads over source nodes; results do not depend on this.
    unsigned threads = 1;
    /// Pairs in different components get (largest finite geodesic) * this.
    double disconnected_factor = 1.5;
};

/// Dijkstra from every node. Disconnected pairs are filled per
/// GeodesicOptions and a warning is logged. Throws NumericError on a negative
/// or non-finite edge weight.
DissimilarityMatrix geodesic_all_pairs(const KnnGraph& g, const GeodesicOptions& options = {});

/// Shortest-path lengths from one source; unreachable nodes are +inf.
std::vector<double> dijkstra(const KnnGraph& g, std::size_t source);

}  // namespace streamcc
