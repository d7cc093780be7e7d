// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Fixed-capacity core CSI memory and the two streaming curation strategies.
//
// The memory keeps an M x M cache of pairwise cosine similarities between the
// stored features together with a per-row maximum, so that the most similar
// stored pair is available in O(M) after every replacement.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "streamcc/csi.hpp"

namespace streamcc {

/// One stored record. The truncated delay-domain CSI is always kept (the ADP
/// dissimilarity needs it); the full CSI matrix only when requested.
struct StoredSample {
    std::uint64_t arrival_index = 0;
    DelayDomainCsi delay;
    CsiFeature feature;
    std::optional<CsiMatrix> csi;
    std::optional<GroundTruthPosition> position;
};

/// Runs feature extraction on an incoming matrix. Throws ZeroFeatureError for
/// an all-zero sample.
StoredSample prepare_sample(const CsiMatrix& h, std::size_t c_taps,
                            std::optional<GroundTruthPosition> position = std::nullopt,
                            bool keep_csi = false);

struct MaxPair {
    std::size_t k = 0;  // k < l
    std::size_t l = 0;
    double value = 0.0;
};

struct SnapshotEntry {
    std::uint64_t arrival_index = 0;
    std::optional<GroundTruthPosition> position;
    double max_sim_to_others = 0.0;
};

class CoreMemory {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    explicit CoreMemory(std::size_t capacity);

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return slots_.size(); }
    bool full() const noexcept { return slots_.size() == capacity_; }
    bool empty() const noexcept { return slots_.empty(); }

    const std::vector<StoredSample>& slots() const noexcept { return slots_; }
    const StoredSample& slot(std::size_t i) const { return slots_.at(i); }

    /// Cached similarity of stored slots i != j.
    double similarity(std::size_t i, std::size_t j) const;
    /// size() x size() view of the cache; the diagonal is meaningless.
    Eigen::MatrixXd similarity_cache() const;
    /// Most similar stored pair; empty while fewer than two samples are held.
    /// Ties resolve to the lexicographically smallest (k, l).
    const std::optional<MaxPair>& max_pair() const noexcept { return max_pair_; }

    /// Cosine similarity between `feature` and every stored feature, in slot order.
    Eigen::VectorXd similarities_to(const CsiFeature& feature) const;

    /// Appends during the fill phase. Returns the new slot index.
    std::size_t append(StoredSample sample);
    /// Overwrites `slot_index`. `sims_to_stored`, when given, must be the
    /// output of similarities_to(sample.feature) on the current contents.
    void replace(std::size_t slot_index, StoredSample sample,
                 const Eigen::VectorXd* sims_to_stored = nullptr);

    /// Recomputes the cache and the max pair from scratch with cosine_similarity().
    void rebuild_cache_bruteforce();

    /// Per-sample maximum similarity to the rest of the memory. A singleton
    /// memory reports 0.
    std::vector<SnapshotEntry> snapshot() const;

    std::size_t feature_size() const noexcept { return static_cast<std::size_t>(features_.rows()); }

private:
    struct RowMax {
        double value = -std::numeric_limits<double>::infinity();
        std::size_t col = npos;
    };

    void write_row(std::size_t slot_index, const Eigen::VectorXd& sims);
    void recompute_row_max(std::size_t i);
    void recompute_max_pair();
    void check_feature(const CsiFeature& f) const;

    std::size_t capacity_;
    std::vector<StoredSample> slots_;
    Eigen::MatrixXd features_;  // D' x capacity, one column per slot
    Eigen::VectorXd norms_;
    Eigen::MatrixXd sim_;       // capacity x capacity
    std::vector<RowMax> row_max_;
    std::optional<MaxPair> max_pair_;
};

/// Free-function form of CoreMemory::rebuild_cache_bruteforce().
CoreMemory rebuild_cache_bruteforce(const CoreMemory& mem);

enum class CurationAction { inserted_while_filling, replaced, discarded };

std::string to_string(CurationAction action);

struct CurationDecision {
    CurationAction action = CurationAction::discarded;
    std::size_t slot = CoreMemory::npos;     // set for inserted_while_filling and replaced
    std::optional<double> observed_max_sim;  // SimS only: max similarity of the newcomer to the memory
};

struct RandosConfig {
    double p_update = 0.5;
    /// Empty means uniform 1/M.
    std::vector<double> replacement_pmf;
    std::uint64_t rng_seed = 0;

    void validate(std::size_t capacity) const;
};

struct SimsConfig {
    double p_tiebreak = 0.5;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Common interface of the curation strategies. Offers must be serialized.
class Curator {
public:
    virtual ~Curator() = default;
    virtual CurationDecision offer(CoreMemory& mem, StoredSample sample) = 0;
    virtual std::string name() const = 0;
};

/// Random subset: once full, update with probability p_update and evict a
/// slot drawn from the replacement pmf.
class RandosCurator final : public Curator {
public:
    explicit RandosCurator(RandosConfig cfg);

    CurationDecision offer(CoreMemory& mem, StoredSample sample) override;
    std::string name() const override { return "randos"; }
    const RandosConfig& config() const noexcept { return cfg_; }

private:
    RandosConfig cfg_;
    std::mt19937_64 rng_;
    std::optional<std::discrete_distribution<std::size_t>> pmf_;
};

/// Min-max similarity: once full, a newcomer whose maximum similarity to the
/// memory is strictly below the similarity of the most similar stored pair
/// (k, l) replaces k with probability p_tiebreak, otherwise l.
class SimsCurator final : public Curator {
public:
    explicit SimsCurator(SimsConfig cfg);

    CurationDecision offer(CoreMemory& mem, StoredSample sample) override;
    std::string name() const override { return "sims"; }
    const SimsConfig& config() const noexcept { return cfg_; }

private:
    SimsConfig cfg_;
    std::mt19937_64 rng_;
};

CurationDecision offer_randos(CoreMemory& mem, StoredSample sample, RandosCurator& curator);
CurationDecision offer_sims(CoreMemory& mem, StoredSample sample, SimsCurator& curator);

std::vector<SnapshotEntry> memory_snapshot(const CoreMemory& mem);

}  // namespace streamcc
