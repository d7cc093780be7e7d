// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/csi.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <fftw3.h>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

bool all_finite(const ComplexGrid& g) {
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Complex v = g.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

// Batched backward (e^{+j...}) transforms over the rows of a row-major B x W
// grid. fftw_execute_dft is thread-safe; planning is not, hence the mutex.
class InverseDftPlans {
public:
    ~InverseDftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int rows, int cols) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(rows, cols);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<fftw_complex> scratch_in(static_cast<std::size_t>(rows) * cols);
        std::vector<fftw_complex> scratch_out(scratch_in.size());
        int n[] = {cols};
        fftw_plan plan = fftw_plan_many_dft(1, n, rows, scratch_in.data(), nullptr, 1, cols,
                                            scratch_out.data(), nullptr, 1, cols, FFTW_BACKWARD,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw NumericError("fftw planning failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

InverseDftPlans& plans() {
    static InverseDftPlans instance;
    return instance;
}

}  // namespace

ApPartition::ApPartition(std::vector<AntennaRange> ranges) : ranges_(std::move(ranges)) {}

ApPartition ApPartition::single(std::size_t antennas) {
    return ApPartition({AntennaRange{0, antennas}});
}

ApPartition ApPartition::uniform(std::size_t aps, std::size_t antennas_per_ap) {
    if (aps == 0 || antennas_per_ap == 0)
        throw ParameterError("ApPartition::uniform needs at least one AP and one antenna");
    std::vector<AntennaRange> ranges;
    ranges.reserve(aps);
    for (std::size_t a = 0; a < aps; ++a) ranges.push_back({a * antennas_per_ap, antennas_per_ap});
    return ApPartition(std::move(ranges));
}

void ApPartition::validate(std::size_t antennas) const {
    if (ranges_.empty()) throw DimensionError("AP partition is empty");
    std::size_t next = 0;
    for (const auto& r : ranges_) {
        if (r.first != next || r.count == 0)
            throw DimensionError("AP partition ranges must be contiguous and non-empty");
        next += r.count;
    }
    if (next != antennas)
        throw DimensionError("AP partition covers " + std::to_string(next) + " antennas, CSI has " +
                             std::to_string(antennas));
}

CsiMatrix::CsiMatrix(ComplexGrid entries, std::uint64_t sample_index,
                     std::optional<double> timestamp)
    : entries_(std::move(entries)), sample_index_(sample_index), timestamp_(timestamp) {
    if (entries_.rows() < 1 || entries_.cols() < 1)
        throw DimensionError("CSI matrix needs B >= 1 and W >= 1");
    if (!all_finite(entries_))
        throw NumericError("CSI matrix " + std::to_string(sample_index_) + " has non-finite entries");
}

DelayDomainCsi::DelayDomainCsi(ComplexGrid taps) : taps_(std::move(taps)) {
    if (taps_.rows() < 1 || taps_.cols() < 1)
        throw DimensionError("delay-domain CSI needs B >= 1 and C >= 1");
}

CsiFeature::CsiFeature(Eigen::VectorXd values) : values_(std::move(values)) {
    if (values_.size() == 0) throw DimensionError("empty CSI feature");
    for (Eigen::Index i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] < 0.0)
            throw NumericError("CSI feature entries must be finite and nonnegative");
    }
    if (std::abs(values_.norm() - 1.0) > 1e-6) throw NumericError("CSI feature is not unit norm");
}

GroundTruthPosition::GroundTruthPosition(Eigen::VectorXd coords) : coords_(std::move(coords)) {
    if (coords_.size() != 2 && coords_.size() != 3)
        throw DimensionError("positions must be 2-D or 3-D");
    if (!coords_.allFinite()) throw NumericError("position has non-finite coordinates");
}

DelayDomainCsi to_delay_domain(const CsiMatrix& h, std::size_t c_taps) {
    const auto rows = static_cast<int>(h.antennas());
    const auto cols = static_cast<int>(h.subcarriers());
    if (c_taps < 1 || c_taps > h.subcarriers())
        throw DimensionError("tap count " + std::to_string(c_taps) + " outside [1, W=" +
                             std::to_string(cols) + "]");
    if (!all_finite(h.entries())) throw NumericError("non-finite CSI");

    ComplexGrid spectrum(rows, cols);
    fftw_plan plan = plans().get(rows, cols);
    // fftw does not write the input of an out-of-place complex transform.
    auto* in = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(h.entries().data()));
    fftw_execute_dft(plan, in, reinterpret_cast<fftw_complex*>(spectrum.data()));

    const double scale = 1.0 / static_cast<double>(cols);
    ComplexGrid taps = spectrum.leftCols(static_cast<Eigen::Index>(c_taps)) * scale;
    return DelayDomainCsi(std::move(taps));
}

CsiFeature extract_feature(const DelayDomainCsi& dd) {
    const auto& taps = dd.taps();
    Eigen::VectorXd v(taps.size());
    // Row-major storage is already antenna-major order.
    for (Eigen::Index i = 0; i < taps.size(); ++i) v[i] = std::abs(taps.data()[i]);
    const double norm = v.norm();
    if (!(norm > 0.0)) throw ZeroFeatureError("all-zero delay-domain CSI has no feature");
    if (!std::isfinite(norm)) throw NumericError("non-finite delay-domain CSI");
    v /= norm;
    return CsiFeature(std::move(v));
}

double cosine_similarity(const CsiFeature& a, const CsiFeature& b) {
    if (a.size() != b.size())
        throw DimensionError("feature lengths differ: " + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()));
    const double na = a.values().norm();
    const double nb = b.values().norm();
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericError("cosine similarity of a zero vector");
    return std::abs(a.values().dot(b.values())) / (na * nb);
}

}  // namespace streamcc
