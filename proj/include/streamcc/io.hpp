// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#pragma once

// Binary containers. All integers and floats are little-endian.
//
// CSI record file ("CCSF1"):
//   magic[5] "CCSF1" | version u16 | B u32 | W u32 | N u64 | has_positions u8 | position_dim u8
//   N records of:
//     sample_index u64 | timestamp f64 (NaN when absent)
//     [position_dim x f64 when has_positions]
//     B*W x (re f32, im f32), antenna-major then subcarrier
//
// Checkpoint file ("CCKP1"):
//   magic[5] "CCKP1" | version u16 | kind u8 | kind-specific payload (see io.cpp)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "streamcc/chart.hpp"
#include "streamcc/csi.hpp"
#include "streamcc/curation.hpp"
#include "streamcc/dissimilarity.hpp"

namespace streamcc {

/// One streamed sample.
struct StreamItem {
    CsiMatrix csi;
    std::optional<GroundTruthPosition> position;
};

/// Ordered single-consumer producer of stream items.
class StreamSource {
public:
    virtual ~StreamSource() = default;
    /// Next item in sample_index order, or nullopt at the end of the stream.
    virtual std::optional<StreamItem> next() = 0;
    /// Total item count if known up front.
    virtual std::optional<std::uint64_t> size_hint() const { return std::nullopt; }
};

/// Serves items from memory, mainly for tests.
class VectorStreamSource final : public StreamSource {
public:
    explicit VectorStreamSource(std::vector<StreamItem> items);
    std::optional<StreamItem> next() override;
    std::optional<std::uint64_t> size_hint() const override { return items_.size(); }

private:
    std::vector<StreamItem> items_;
    std::size_t cursor_ = 0;
};

struct CsiRecordHeader {
    static constexpr char kMagic[5] = {'C', 'C', 'S', 'F', '1'};
    static constexpr std::uint16_t kVersion = 1;
    static constexpr std::size_t kBytes = 25;

    std::uint16_t version = kVersion;
    std::uint32_t antennas = 0;
    std::uint32_t subcarriers = 0;
    std::uint64_t count = 0;
    bool has_positions = false;
    std::uint8_t position_dim = 0;

    std::size_t record_bytes() const;
};

/// Streams records to disk; the record count in the header is patched on close().
class CsiRecordWriter {
public:
    CsiRecordWriter(const std::filesystem::path& path, std::uint32_t antennas,
                    std::uint32_t subcarriers, std::uint8_t position_dim);
    ~CsiRecordWriter();
    CsiRecordWriter(const CsiRecordWriter&) = delete;
    CsiRecordWriter& operator=(const CsiRecordWriter&) = delete;

    /// CSI entries are narrowed to f32.
    void write(const StreamItem& item);
    void close();
    std::uint64_t count() const noexcept { return header_.count; }

private:
    std::ofstream out_;
    CsiRecordHeader header_;
    bool closed_ = false;
};

/// Lazy sequential reader. The constructor validates magic, version and the
/// exact file length; errors are ParseError with a byte offset.
class CsiRecordReader final : public StreamSource {
public:
    explicit CsiRecordReader(const std::filesystem::path& path);

    const CsiRecordHeader& header() const noexcept { return header_; }
    std::optional<StreamItem> next() override;
    std::optional<std::uint64_t> size_hint() const override { return header_.count; }

private:
    std::ifstream in_;
    CsiRecordHeader header_;
    std::uint64_t next_record_ = 0;
    std::vector<char> buffer_;
};

std::unique_ptr<CsiRecordReader> read_records(const std::filesystem::path& path);

/// Writes all items; they must share B and W and either all or none carry positions.
void write_records(const std::filesystem::path& path, std::span<const StreamItem> items);

// ---------------------------------------------------------------------------
// External dataset import

struct ImportOptions {
    /// Half-open record range [first, last); last = 0 keeps everything after first.
    std::uint64_t first = 0;
    std::uint64_t last = 0;
};

/// Converts an external dataset into a CSI record file and returns its header.
///
/// format_hint "npy": `input` is a directory holding csi.npy (complex64 or
/// complex128, shape N x B x W) and optionally positions.npy (float32/64,
/// N x 2 or N x 3) and timestamps.npy (float32/64, N). Without positions.npy
/// the records carry no positions.
/// format_hint "ccsf": `input` is already a CSI record file; it is re-encoded
/// (identity apart from the record range).
///
/// Errors name the offending record index.
CsiRecordHeader import_external(const std::filesystem::path& input, const std::string& format_hint,
                                const std::filesystem::path& output, const ImportOptions& options = {});

// ---------------------------------------------------------------------------
// Checkpoints

enum class CheckpointKind : std::uint8_t { memory = 1, model = 2, dissimilarity = 3 };

/// Peeks at the kind of a checkpoint file.
CheckpointKind checkpoint_kind(const std::filesystem::path& path);

void save_memory(const std::filesystem::path& path, const CoreMemory& mem);
/// Re-inserts the stored samples in slot order; features are re-derived from
/// the stored delay-domain CSI and the similarity cache is rebuilt.
CoreMemory load_memory(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const ChartModel& model);
ChartModel load_model(const std::filesystem::path& path);

void save_dissimilarity(const std::filesystem::path& path, const DissimilarityMatrix& d);
DissimilarityMatrix load_dissimilarity(const std::filesystem::path& path);

}  // namespace streamcc
