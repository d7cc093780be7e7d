// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/curation.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

double uniform01(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

StoredSample prepare_sample(const CsiMatrix& h, std::size_t c_taps,
                            std::optional<GroundTruthPosition> position, bool keep_csi) {
    StoredSample s;
    s.arrival_index = h.sample_index();
    s.delay = to_delay_domain(h, c_taps);
    s.feature = extract_feature(s.delay);
    if (keep_csi) s.csi = h;
    s.position = std::move(position);
    return s;
}

// ---------------------------------------------------------------------------
// CoreMemory

CoreMemory::CoreMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ParameterError("core memory capacity must be positive");
    slots_.reserve(capacity_);
    row_max_.reserve(capacity_);
}

void CoreMemory::check_feature(const CsiFeature& f) const {
    if (f.size() == 0) throw ZeroFeatureError("sample carries no feature");
    if (!slots_.empty() && f.size() != feature_size())
        throw DimensionError("feature length " + std::to_string(f.size()) +
                             " does not match stored length " + std::to_string(feature_size()));
}

double CoreMemory::similarity(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size() || i == j)
        throw ParameterError("similarity() needs two distinct stored slots");
    return sim_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

Eigen::MatrixXd CoreMemory::similarity_cache() const {
    const auto n = static_cast<Eigen::Index>(size());
    if (n == 0) return Eigen::MatrixXd(0, 0);
    return sim_.topLeftCorner(n, n);
}

Eigen::VectorXd CoreMemory::similarities_to(const CsiFeature& feature) const {
    const auto n = static_cast<Eigen::Index>(size());
    if (n == 0) return Eigen::VectorXd(0);
    check_feature(feature);
    const double norm = feature.values().norm();
    if (!(norm > 0.0)) throw NumericError("cosine similarity of a zero vector");
    Eigen::VectorXd dots = features_.leftCols(n).transpose() * feature.values();
    Eigen::VectorXd sims(n);
    for (Eigen::Index i = 0; i < n; ++i) sims[i] = std::abs(dots[i]) / (norms_[i] * norm);
    return sims;
}

void CoreMemory::write_row(std::size_t slot_index, const Eigen::VectorXd& sims) {
    const auto r = static_cast<Eigen::Index>(slot_index);
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == slot_index) continue;
        const auto jj = static_cast<Eigen::Index>(j);
        sim_(r, jj) = sims[jj];
        sim_(jj, r) = sims[jj];
    }
    sim_(r, r) = 0.0;

    // Row maxima of the other rows: only column r changed.
    for (std::size_t i = 0; i < n; ++i) {
        if (i == slot_index) continue;
        const double v = sim_(static_cast<Eigen::Index>(i), r);
        RowMax& rm = row_max_[i];
        if (rm.col == slot_index) {
            if (v >= rm.value)
                rm.value = v;
            else
                recompute_row_max(i);
        } else if (v > rm.value || (v == rm.value && slot_index < rm.col)) {
            rm.value = v;
            rm.col = slot_index;
        }
    }
    recompute_row_max(slot_index);
    recompute_max_pair();
}

void CoreMemory::recompute_row_max(std::size_t i) {
    RowMax rm;
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < size(); ++j) {
        if (j == i) continue;
        const double v = sim_(ii, static_cast<Eigen::Index>(j));
        if (v > rm.value) {
            rm.value = v;
            rm.col = j;
        }
    }
    row_max_[i] = rm;
}

void CoreMemory::recompute_max_pair() {
    max_pair_.reset();
    if (size() < 2) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < size(); ++i)
        if (row_max_[i].value > row_max_[best].value) best = i;
    // The first row attaining the maximum has its partner at a larger index.
    max_pair_ = MaxPair{best, row_max_[best].col, row_max_[best].value};
}

std::size_t CoreMemory::append(StoredSample sample) {
    if (full()) throw ParameterError("append() on a full core memory");
    check_feature(sample.feature);
    if (slots_.empty()) {
        const auto d = static_cast<Eigen::Index>(sample.feature.size());
        const auto m = static_cast<Eigen::Index>(capacity_);
        features_.resize(d, m);
        norms_.resize(m);
        sim_.setZero(m, m);
    }
    Eigen::VectorXd sims = similarities_to(sample.feature);
    const std::size_t idx = slots_.size();
    const auto col = static_cast<Eigen::Index>(idx);
    features_.col(col) = sample.feature.values();
    norms_[col] = sample.feature.values().norm();
    slots_.push_back(std::move(sample));
    row_max_.emplace_back();
    sims.conservativeResize(static_cast<Eigen::Index>(slots_.size()));
    sims[col] = 0.0;
    write_row(idx, sims);
    return idx;
}

void CoreMemory::replace(std::size_t slot_index, StoredSample sample,
                         const Eigen::VectorXd* sims_to_stored) {
    if (slot_index >= size()) throw ParameterError("replace() slot out of range");
    check_feature(sample.feature);
    Eigen::VectorXd sims =
        sims_to_stored != nullptr ? *sims_to_stored : similarities_to(sample.feature);
    if (sims.size() != static_cast<Eigen::Index>(size()))
        throw DimensionError("similarity vector does not match memory size");
    const auto col = static_cast<Eigen::Index>(slot_index);
    features_.col(col) = sample.feature.values();
    norms_[col] = sample.feature.values().norm();
    slots_[slot_index] = std::move(sample);
    write_row(slot_index, sims);
}

void CoreMemory::rebuild_cache_bruteforce() {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        sim_(ii, ii) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = cosine_similarity(slots_[i].feature, slots_[j].feature);
            sim_(ii, static_cast<Eigen::Index>(j)) = v;
            sim_(static_cast<Eigen::Index>(j), ii) = v;
        }
    }
    for (std::size_t i = 0; i < n; ++i) recompute_row_max(i);
    recompute_max_pair();
}

std::vector<SnapshotEntry> CoreMemory::snapshot() const {
    std::vector<SnapshotEntry> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        SnapshotEntry e;
        e.arrival_index = slots_[i].arrival_index;
        e.position = slots_[i].position;
        e.max_sim_to_others = size() > 1 ? row_max_[i].value : 0.0;
        out.push_back(std::move(e));
    }
    return out;
}

CoreMemory rebuild_cache_bruteforce(const CoreMemory& mem) {
    CoreMemory copy = mem;
    copy.rebuild_cache_bruteforce();
    return copy;
}

std::vector<SnapshotEntry> memory_snapshot(const CoreMemory& mem) { return mem.snapshot(); }

// ---------------------------------------------------------------------------
// Strategies

std::string to_string(CurationAction action) {
    switch (action) {
        case CurationAction::inserted_while_filling: return "inserted_while_filling";
        case CurationAction::replaced: return "replaced";
        case CurationAction::discarded: return "discarded";
    }
    return "unknown";
}

void RandosConfig::validate(std::size_t capacity) const {
    if (!(p_update >= 0.0 && p_update <= 1.0)) throw ParameterError("p_update must lie in [0,1]");
    if (replacement_pmf.empty()) return;
    if (replacement_pmf.size() != capacity)
        throw ParameterError("replacement pmf has " + std::to_string(replacement_pmf.size()) +
                             " entries, capacity is " + std::to_string(capacity));
    double total = 0.0;
    for (double p : replacement_pmf) {
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("pmf entries must lie in [0,1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ParameterError("replacement pmf must sum to 1");
}

void SimsConfig::validate() const {
    if (!(p_tiebreak >= 0.0 && p_tiebreak <= 1.0))
        throw ParameterError("p_tiebreak must lie in [0,1]");
}

RandosCurator::RandosCurator(RandosConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.rng_seed) {
    if (!(cfg_.p_update >= 0.0 && cfg_.p_update <= 1.0))
        throw ParameterError("p_update must lie in [0,1]");
    if (!cfg_.replacement_pmf.empty()) {
        cfg_.validate(cfg_.replacement_pmf.size());
        pmf_.emplace(cfg_.replacement_pmf.begin(), cfg_.replacement_pmf.end());
    }
}

CurationDecision RandosCurator::offer(CoreMemory& mem, StoredSample sample) {
    CurationDecision d;
    if (!mem.full()) {
        d.action = CurationAction::inserted_while_filling;
        d.slot = mem.append(std::move(sample));
        return d;
    }
    if (pmf_ && cfg_.replacement_pmf.size() != mem.capacity())
        throw ParameterError("replacement pmf does not match memory capacity");
    if (!(uniform01(rng_) < cfg_.p_update)) {
        d.action = CurationAction::discarded;
        return d;
    }
    const std::size_t r =
        pmf_ ? (*pmf_)(rng_)
             : std::uniform_int_distribution<std::size_t>(0, mem.capacity() - 1)(rng_);
    mem.replace(r, std::move(sample));
    d.action = CurationAction::replaced;
    d.slot = r;
    return d;
}

SimsCurator::SimsCurator(SimsConfig cfg) : cfg_(cfg), rng_(cfg_.rng_seed) { cfg_.validate(); }

CurationDecision SimsCurator::offer(CoreMemory& mem, StoredSample sample) {
    CurationDecision d;
    if (!mem.full()) {
        d.action = CurationAction::inserted_while_filling;
        d.slot = mem.append(std::move(sample));
        return d;
    }
    const Eigen::VectorXd sims = mem.similarities_to(sample.feature);
    const double s = sims.maxCoeff();
    d.observed_max_sim = s;
    const auto& pair = mem.max_pair();
    if (!pair || !(s < pair->value)) {
        d.action = CurationAction::discarded;
        return d;
    }
    const std::size_t r = uniform01(rng_) < cfg_.p_tiebreak ? pair->k : pair->l;
    mem.replace(r, std::move(sample), &sims);
    d.action = CurationAction::replaced;
    d.slot = r;
    return d;
}

CurationDecision offer_randos(CoreMemory& mem, StoredSample sample, RandosCurator& curator) {
    return curator.offer(mem, std::move(sample));
}

CurationDecision offer_sims(CoreMemory& mem, StoredSample sample, SimsCurator& curator) {
    return curator.offer(mem, std::move(sample));
}

}  // namespace streamcc
