// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include "streamcc/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <type_traits>
#include <utility>

#include "streamcc/error.hpp"

namespace streamcc {

namespace {

namespace fs = std::filesystem;

template <typename T>
T from_le(const char* p) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

template <typename T>
void to_le(T v, char* p) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    std::memcpy(p, bytes.data(), sizeof(T));
}

class BinaryOut {
public:
    explicit BinaryOut(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }

    template <typename T>
    void put(T v) {
        char buf[sizeof(T)];
        to_le(v, buf);
        out_.write(buf, sizeof(T));
    }
    void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void finish() {
        out_.flush();
        if (!out_) throw Error("write failed");
    }

private:
    std::ofstream out_;
};

class BinaryIn {
public:
    explicit BinaryIn(const fs::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw ParseError("cannot open " + path.string(), 0);
    }

    template <typename T>
    T get(const char* what) {
        char buf[sizeof(T)];
        read(buf, sizeof(T), what);
        return from_le<T>(buf);
    }
    void read(char* p, std::size_t n, const char* what) {
        in_.read(p, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw ParseError(std::string("unexpected end of file reading ") + what, offset_ + static_cast<std::uint64_t>(in_.gcount()));
        offset_ += n;
    }
    std::uint64_t offset() const noexcept { return offset_; }
    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::ifstream in_;
    std::uint64_t offset_ = 0;
};

// ---------------------------------------------------------------------------
// Checkpoint header

constexpr char kCheckpointMagic[5] = {'C', 'C', 'K', 'P', '1'};
constexpr std::uint16_t kCheckpointVersion = 1;

void write_checkpoint_header(BinaryOut& out, CheckpointKind kind) {
    out.bytes(kCheckpointMagic, 5);
    out.put<std::uint16_t>(kCheckpointVersion);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(kind));
}

CheckpointKind read_checkpoint_header(BinaryIn& in) {
    char magic[5];
    in.read(magic, 5, "magic");
    if (std::memcmp(magic, kCheckpointMagic, 5) != 0) throw ParseError("not a CCKP1 checkpoint", 0);
    const auto version = in.get<std::uint16_t>("version");
    if (version != kCheckpointVersion)
        throw ParseError("unsupported checkpoint version " + std::to_string(version), 5);
    const auto kind = in.get<std::uint8_t>("kind");
    if (kind < 1 || kind > 3) throw ParseError("unknown checkpoint kind " + std::to_string(kind), 7);
    return static_cast<CheckpointKind>(kind);
}

void expect_kind(BinaryIn& in, CheckpointKind want, const char* name) {
    if (read_checkpoint_header(in) != want)
        throw ParseError(std::string("checkpoint does not hold a ") + name, 7);
}

void expect_end(BinaryIn& in) {
    if (!in.at_end()) throw ParseError("trailing bytes after checkpoint payload", in.offset());
}

// ---------------------------------------------------------------------------
// .npy

struct NpyArray {
    std::string descr;
    std::vector<std::uint64_t> shape;
    std::uint64_t data_offset = 0;
    std::size_t item_bytes = 0;
};

std::string header_field(const std::string& header, const std::string& key) {
    const auto pos = header.find("'" + key + "'");
    if (pos == std::string::npos) return {};
    auto colon = header.find(':', pos);
    if (colon == std::string::npos) return {};
    ++colon;
    while (colon < header.size() && header[colon] == ' ') ++colon;
    if (colon < header.size() && header[colon] == '(') {
        const auto close = header.find(')', colon);
        return header.substr(colon, close - colon + 1);
    }
    const auto end = header.find_first_of(",}", colon);
    return header.substr(colon, end - colon);
}

NpyArray parse_npy_header(std::ifstream& in, const fs::path& path) {
    char magic[6];
    in.read(magic, 6);
    if (in.gcount() != 6 || std::memcmp(magic, "\x93NUMPY", 6) != 0)
        throw ParseError(path.string() + ": not a .npy file", 0);
    char ver[2];
    in.read(ver, 2);
    std::uint64_t header_len = 0;
    std::uint64_t prefix = 8;
    if (ver[0] == 1) {
        char b[2];
        in.read(b, 2);
        header_len = from_le<std::uint16_t>(b);
        prefix += 2;
    } else {
        char b[4];
        in.read(b, 4);
        header_len = from_le<std::uint32_t>(b);
        prefix += 4;
    }
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw ParseError(path.string() + ": truncated .npy header", prefix);

    NpyArray a;
    std::string descr = header_field(header, "descr");
    descr.erase(std::remove(descr.begin(), descr.end(), '\''), descr.end());
    a.descr = descr;
    if (header_field(header, "fortran_order").find("True") != std::string::npos)
        throw ParseError(path.string() + ": Fortran-ordered arrays are not supported", prefix);
    std::string shape = header_field(header, "shape");
    for (char& c : shape)
        if (c == '(' || c == ')' || c == ',') c = ' ';
    std::istringstream ss(shape);
    std::uint64_t dim;
    while (ss >> dim) a.shape.push_back(dim);
    if (a.descr == "<c8" || a.descr == "<f8") a.item_bytes = 8;
    else if (a.descr == "<c16") a.item_bytes = 16;
    else if (a.descr == "<f4") a.item_bytes = 4;
    else throw ParseError(path.string() + ": unsupported dtype '" + a.descr + "'", prefix);
    a.data_offset = prefix + header_len;
    return a;
}

double read_real(const char* p, const std::string& descr) {
    return descr == "<f4" ? static_cast<double>(from_le<float>(p)) : from_le<double>(p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Stream sources

VectorStreamSource::VectorStreamSource(std::vector<StreamItem> items) : items_(std::move(items)) {}

std::optional<StreamItem> VectorStreamSource::next() {
    if (cursor_ >= items_.size()) return std::nullopt;
    return items_[cursor_++];
}

std::size_t CsiRecordHeader::record_bytes() const {
    return 16 + (has_positions ? 8u * position_dim : 0u) +
           8u * static_cast<std::size_t>(antennas) * subcarriers;
}

// ---------------------------------------------------------------------------
// CSI record files

CsiRecordWriter::CsiRecordWriter(const fs::path& path, std::uint32_t antennas,
                                 std::uint32_t subcarriers, std::uint8_t position_dim)
    : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot open " + path.string() + " for writing");
    if (antennas == 0 || subcarriers == 0) throw DimensionError("record file needs B, W >= 1");
    if (position_dim != 0 && position_dim != 2 && position_dim != 3)
        throw DimensionError("position_dim must be 0, 2 or 3");
    header_.antennas = antennas;
    header_.subcarriers = subcarriers;
    header_.has_positions = position_dim != 0;
    header_.position_dim = position_dim;

    char buf[CsiRecordHeader::kBytes];
    std::memcpy(buf, CsiRecordHeader::kMagic, 5);
    to_le<std::uint16_t>(header_.version, buf + 5);
    to_le<std::uint32_t>(header_.antennas, buf + 7);
    to_le<std::uint32_t>(header_.subcarriers, buf + 11);
    to_le<std::uint64_t>(0, buf + 15);
    buf[23] = header_.has_positions ? 1 : 0;
    buf[24] = static_cast<char>(header_.position_dim);
    out_.write(buf, sizeof buf);
}

CsiRecordWriter::~CsiRecordWriter() {
    try {
        close();
    } catch (...) {
    }
}

void CsiRecordWriter::write(const StreamItem& item) {
    if (closed_) throw Error("write() after close()");
    const auto& h = item.csi;
    if (h.antennas() != header_.antennas || h.subcarriers() != header_.subcarriers)
        throw DimensionError("record shape differs from file shape");
    if (header_.has_positions != item.position.has_value() ||
        (item.position && item.position->dim() != header_.position_dim))
        throw DimensionError("record position presence/dimension differs from file header");

    std::vector<char> buf(header_.record_bytes());
    char* p = buf.data();
    to_le<std::uint64_t>(h.sample_index(), p);
    to_le<double>(h.timestamp().value_or(std::numeric_limits<double>::quiet_NaN()), p + 8);
    p += 16;
    if (item.position) {
        for (std::size_t d = 0; d < item.position->dim(); ++d, p += 8)
            to_le<double>(item.position->coords()[static_cast<Eigen::Index>(d)], p);
    }
    const Complex* data = h.entries().data();
    for (Eigen::Index i = 0; i < h.entries().size(); ++i, p += 8) {
        to_le<float>(static_cast<float>(data[i].real()), p);
        to_le<float>(static_cast<float>(data[i].imag()), p + 4);
    }
    out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    ++header_.count;
}

void CsiRecordWriter::close() {
    if (closed_) return;
    closed_ = true;
    char buf[8];
    to_le<std::uint64_t>(header_.count, buf);
    out_.seekp(15);
    out_.write(buf, 8);
    out_.close();
    if (!out_) throw Error("failed to finalize record file");
}

CsiRecordReader::CsiRecordReader(const fs::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw ParseError("cannot open " + path.string(), 0);
    char buf[CsiRecordHeader::kBytes];
    in_.read(buf, sizeof buf);
    const auto got = static_cast<std::uint64_t>(in_.gcount());
    if (got < 5 || std::memcmp(buf, CsiRecordHeader::kMagic, 5) != 0)
        throw ParseError("bad magic, not a CCSF1 record file", 0);
    if (got < CsiRecordHeader::kBytes) throw ParseError("truncated header", got);
    header_.version = from_le<std::uint16_t>(buf + 5);
    if (header_.version != CsiRecordHeader::kVersion)
        throw ParseError("unsupported record file version " + std::to_string(header_.version), 5);
    header_.antennas = from_le<std::uint32_t>(buf + 7);
    header_.subcarriers = from_le<std::uint32_t>(buf + 11);
    header_.count = from_le<std::uint64_t>(buf + 15);
    header_.has_positions = buf[23] != 0;
    header_.position_dim = static_cast<std::uint8_t>(buf[24]);
    if (header_.antennas == 0 || header_.subcarriers == 0)
        throw ParseError("header declares an empty CSI shape", 7);
    if (header_.has_positions && header_.position_dim != 2 && header_.position_dim != 3)
        throw ParseError("position_dim must be 2 or 3", 24);

    const std::uint64_t size = fs::file_size(path);
    const std::uint64_t rec = header_.record_bytes();
    const std::uint64_t expected = CsiRecordHeader::kBytes + header_.count * rec;
    if (size < expected) {
        const std::uint64_t complete = (size - CsiRecordHeader::kBytes) / rec;
        throw ParseError("file truncated: header declares " + std::to_string(header_.count) +
                             " records, record " + std::to_string(complete) + " is incomplete",
                         CsiRecordHeader::kBytes + complete * rec);
    }
    if (size > expected)
        throw ParseError("trailing bytes after the declared " + std::to_string(header_.count) + " records",
                         expected);
    buffer_.resize(rec);
}

std::optional<StreamItem> CsiRecordReader::next() {
    if (next_record_ >= header_.count) return std::nullopt;
    const std::uint64_t offset = CsiRecordHeader::kBytes + next_record_ * buffer_.size();
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (static_cast<std::size_t>(in_.gcount()) != buffer_.size())
        throw ParseError("record " + std::to_string(next_record_) + " truncated", offset);
    ++next_record_;

    const char* p = buffer_.data();
    const auto index = from_le<std::uint64_t>(p);
    const double ts = from_le<double>(p + 8);
    p += 16;
    std::optional<GroundTruthPosition> pos;
    if (header_.has_positions) {
        Eigen::VectorXd c(header_.position_dim);
        for (std::uint8_t d = 0; d < header_.position_dim; ++d, p += 8) c[d] = from_le<double>(p);
        try {
            pos = GroundTruthPosition(std::move(c));
        } catch (const Error& e) {
            throw ParseError("record " + std::to_string(next_record_ - 1) + ": " + e.what(), offset + 16);
        }
    }
    ComplexGrid g(header_.antennas, header_.subcarriers);
    Complex* data = g.data();
    for (Eigen::Index i = 0; i < g.size(); ++i, p += 8)
        data[i] = Complex(from_le<float>(p), from_le<float>(p + 4));
    try {
        return StreamItem{CsiMatrix(std::move(g), index,
                                    std::isnan(ts) ? std::nullopt : std::optional<double>(ts)),
                          std::move(pos)};
    } catch (const Error& e) {
        throw ParseError("record " + std::to_string(next_record_ - 1) + ": " + e.what(), offset);
    }
}

std::unique_ptr<CsiRecordReader> read_records(const fs::path& path) {
    return std::make_unique<CsiRecordReader>(path);
}

void write_records(const fs::path& path, std::span<const StreamItem> items) {
    if (items.empty()) {
        // Shape is unknown without items; write a minimal 1 x 1 header.
        CsiRecordWriter w(path, 1, 1, 0);
        w.close();
        return;
    }
    const auto& first = items.front();
    CsiRecordWriter w(path, static_cast<std::uint32_t>(first.csi.antennas()),
                      static_cast<std::uint32_t>(first.csi.subcarriers()),
                      first.position ? static_cast<std::uint8_t>(first.position->dim()) : 0);
    for (const auto& item : items) w.write(item);
    w.close();
}

// ---------------------------------------------------------------------------
// Import

CsiRecordHeader import_external(const fs::path& input, const std::string& format_hint,
                                const fs::path& output, const ImportOptions& options) {
    if (options.last != 0 && options.last <= options.first)
        throw ParameterError("import range is empty");
    auto in_range = [&](std::uint64_t n) {
        return n >= options.first && (options.last == 0 || n < options.last);
    };

    if (format_hint == "ccsf") {
        CsiRecordReader reader(input);
        const auto& h = reader.header();
        CsiRecordWriter writer(output, h.antennas, h.subcarriers, h.has_positions ? h.position_dim : 0);
        std::uint64_t n = 0;
        while (auto item = reader.next()) {
            if (in_range(n)) writer.write(*item);
            ++n;
        }
        writer.close();
        CsiRecordReader check(output);
        return check.header();
    }
    if (format_hint != "npy") throw ParameterError("unknown import format '" + format_hint + "'");

    const fs::path csi_path = input / "csi.npy";
    std::ifstream csi_in(csi_path, std::ios::binary);
    if (!csi_in) throw ParseError("cannot open " + csi_path.string(), 0);
    const NpyArray csi = parse_npy_header(csi_in, csi_path);
    if (csi.shape.size() != 3 || (csi.descr != "<c8" && csi.descr != "<c16"))
        throw ParseError(csi_path.string() + ": expected a complex N x B x W array", 0);
    const std::uint64_t count = csi.shape[0];
    const auto antennas = static_cast<std::uint32_t>(csi.shape[1]);
    const auto subcarriers = static_cast<std::uint32_t>(csi.shape[2]);

    std::optional<NpyArray> pos;
    std::ifstream pos_in;
    if (fs::exists(input / "positions.npy")) {
        pos_in.open(input / "positions.npy", std::ios::binary);
        pos = parse_npy_header(pos_in, input / "positions.npy");
        if (pos->shape.size() != 2 || pos->shape[0] != count || (pos->shape[1] != 2 && pos->shape[1] != 3) ||
            (pos->descr != "<f4" && pos->descr != "<f8"))
            throw ParseError("positions.npy: expected a real N x 2 or N x 3 array matching csi.npy", 0);
    } else {
        log::warn("import: no positions.npy, records carry no positions");
    }
    std::optional<NpyArray> ts;
    std::ifstream ts_in;
    if (fs::exists(input / "timestamps.npy")) {
        ts_in.open(input / "timestamps.npy", std::ios::binary);
        ts = parse_npy_header(ts_in, input / "timestamps.npy");
        if (ts->shape.size() != 1 || ts->shape[0] != count || (ts->descr != "<f4" && ts->descr != "<f8"))
            throw ParseError("timestamps.npy: expected a real length-N array matching csi.npy", 0);
    }

    const std::uint8_t pdim = pos ? static_cast<std::uint8_t>(pos->shape[1]) : 0;
    CsiRecordWriter writer(output, antennas, subcarriers, pdim);
    const std::size_t csi_bytes = csi.item_bytes * antennas * subcarriers;
    std::vector<char> csi_buf(csi_bytes);
    std::vector<char> pos_buf(pos ? pos->item_bytes * pdim : 0);
    char ts_buf[8];
    for (std::uint64_t n = 0; n < count; ++n) {
        const std::uint64_t offset = csi.data_offset + n * csi_bytes;
        csi_in.read(csi_buf.data(), static_cast<std::streamsize>(csi_bytes));
        if (static_cast<std::size_t>(csi_in.gcount()) != csi_bytes)
            throw ParseError("csi.npy: record " + std::to_string(n) + " truncated", offset);
        if (pos) {
            pos_in.read(pos_buf.data(), static_cast<std::streamsize>(pos_buf.size()));
            if (static_cast<std::size_t>(pos_in.gcount()) != pos_buf.size())
                throw ParseError("positions.npy: record " + std::to_string(n) + " truncated",
                                 pos->data_offset + n * pos_buf.size());
        }
        std::optional<double> stamp;
        if (ts) {
            ts_in.read(ts_buf, static_cast<std::streamsize>(ts->item_bytes));
            if (static_cast<std::size_t>(ts_in.gcount()) != ts->item_bytes)
                throw ParseError("timestamps.npy: record " + std::to_string(n) + " truncated",
                                 ts->data_offset + n * ts->item_bytes);
            stamp = read_real(ts_buf, ts->descr);
        }
        if (!in_range(n)) continue;

        ComplexGrid g(antennas, subcarriers);
        Complex* data = g.data();
        const std::size_t half = csi.item_bytes / 2;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const char* p = csi_buf.data() + static_cast<std::size_t>(i) * csi.item_bytes;
            data[i] = half == 4 ? Complex(from_le<float>(p), from_le<float>(p + 4))
                                : Complex(from_le<double>(p), from_le<double>(p + 8));
        }
        try {
            StreamItem item{CsiMatrix(std::move(g), n, stamp), std::nullopt};
            if (pos) {
                Eigen::VectorXd c(pdim);
                for (std::uint8_t d = 0; d < pdim; ++d)
                    c[d] = read_real(pos_buf.data() + d * pos->item_bytes, pos->descr);
                item.position = GroundTruthPosition(std::move(c));
            }
            writer.write(item);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError("record " + std::to_string(n) + ": " + e.what(), offset);
        }
    }
    writer.close();
    CsiRecordReader check(output);
    return check.header();
}

// ---------------------------------------------------------------------------
// Checkpoints
//
// memory payload:
//   capacity u64 | count u64 | B u32 | C u32 | W u32 (0: no CSI stored) | position_dim u8 (0: none)
//   per slot: arrival_index u64 | has_position u8 | [position_dim x f64]
//             B*C x (re f64, im f64) delay taps | [B*W x (re f64, im f64) CSI]
// model payload:
//   layer_count u32 | per layer: outputs u32 | inputs u32 | activation u8 |
//   outputs*inputs f64 weights (row-major) | outputs f64 bias
// dissimilarity payload:
//   kind u8 | n u64 | n*n f64 (column-major)

CheckpointKind checkpoint_kind(const fs::path& path) {
    BinaryIn in(path);
    return read_checkpoint_header(in);
}

void save_memory(const fs::path& path, const CoreMemory& mem) {
    std::uint32_t b = 0, c = 0, w = 0;
    std::uint8_t pdim = 0;
    if (!mem.empty()) {
        const auto& first = mem.slot(0);
        b = static_cast<std::uint32_t>(first.delay.antennas());
        c = static_cast<std::uint32_t>(first.delay.tap_count());
        if (first.csi) w = static_cast<std::uint32_t>(first.csi->subcarriers());
        for (const auto& s : mem.slots())
            if (s.position) pdim = static_cast<std::uint8_t>(s.position->dim());
    }
    BinaryOut out(path);
    write_checkpoint_header(out, CheckpointKind::memory);
    out.put<std::uint64_t>(mem.capacity());
    out.put<std::uint64_t>(mem.size());
    out.put<std::uint32_t>(b);
    out.put<std::uint32_t>(c);
    out.put<std::uint32_t>(w);
    out.put<std::uint8_t>(pdim);
    for (const auto& s : mem.slots()) {
        if (s.delay.antennas() != b || s.delay.tap_count() != c ||
            (w != 0) != s.csi.has_value() || (s.csi && s.csi->subcarriers() != w))
            throw DimensionError("stored samples have inconsistent shapes");
        out.put<std::uint64_t>(s.arrival_index);
        out.put<std::uint8_t>(s.position ? 1 : 0);
        if (s.position) {
            if (s.position->dim() != pdim) throw DimensionError("stored positions have differing dimension");
            for (Eigen::Index d = 0; d < s.position->coords().size(); ++d) out.put<double>(s.position->coords()[d]);
        }
        const Complex* taps = s.delay.taps().data();
        for (Eigen::Index i = 0; i < s.delay.taps().size(); ++i) {
            out.put<double>(taps[i].real());
            out.put<double>(taps[i].imag());
        }
        if (s.csi) {
            const Complex* e = s.csi->entries().data();
            for (Eigen::Index i = 0; i < s.csi->entries().size(); ++i) {
                out.put<double>(e[i].real());
                out.put<double>(e[i].imag());
            }
        }
    }
    out.finish();
}

CoreMemory load_memory(const fs::path& path) {
    BinaryIn in(path);
    expect_kind(in, CheckpointKind::memory, "core memory");
    const auto capacity = in.get<std::uint64_t>("capacity");
    const auto count = in.get<std::uint64_t>("count");
    const auto b = in.get<std::uint32_t>("antennas");
    const auto c = in.get<std::uint32_t>("taps");
    const auto w = in.get<std::uint32_t>("subcarriers");
    const auto pdim = in.get<std::uint8_t>("position_dim");
    if (capacity == 0 || count > capacity) throw ParseError("inconsistent capacity/count", 8);
    if (count > 0 && (b == 0 || c == 0)) throw ParseError("empty sample shape", 24);

    CoreMemory mem(capacity);
    for (std::uint64_t n = 0; n < count; ++n) {
        const std::uint64_t offset = in.offset();
        StoredSample s;
        s.arrival_index = in.get<std::uint64_t>("arrival_index");
        if (in.get<std::uint8_t>("has_position") != 0) {
            Eigen::VectorXd pc(pdim);
            for (std::uint8_t d = 0; d < pdim; ++d) pc[d] = in.get<double>("position");
            s.position = GroundTruthPosition(std::move(pc));
        }
        ComplexGrid taps(b, c);
        for (Eigen::Index i = 0; i < taps.size(); ++i) {
            const double re = in.get<double>("delay taps");
            const double im = in.get<double>("delay taps");
            taps.data()[i] = Complex(re, im);
        }
        s.delay = DelayDomainCsi(std::move(taps));
        if (w != 0) {
            ComplexGrid g(b, w);
            for (Eigen::Index i = 0; i < g.size(); ++i) {
                const double re = in.get<double>("csi");
                const double im = in.get<double>("csi");
                g.data()[i] = Complex(re, im);
            }
            s.csi = CsiMatrix(std::move(g), s.arrival_index);
        }
        try {
            s.feature = extract_feature(s.delay);
        } catch (const Error& e) {
            throw ParseError("slot " + std::to_string(n) + ": " + e.what(), offset);
        }
        mem.append(std::move(s));
    }
    expect_end(in);
    return mem;
}

void save_model(const fs::path& path, const ChartModel& model) {
    BinaryOut out(path);
    write_checkpoint_header(out, CheckpointKind::model);
    out.put<std::uint32_t>(static_cast<std::uint32_t>(model.layers().size()));
    for (const auto& l : model.layers()) {
        out.put<std::uint32_t>(static_cast<std::uint32_t>(l.outputs()));
        out.put<std::uint32_t>(static_cast<std::uint32_t>(l.inputs()));
        out.put<std::uint8_t>(static_cast<std::uint8_t>(l.activation));
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index col = 0; col < l.weight.cols(); ++col) out.put<double>(l.weight(r, col));
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.put<double>(l.bias[r]);
    }
    out.finish();
}

ChartModel load_model(const fs::path& path) {
    BinaryIn in(path);
    expect_kind(in, CheckpointKind::model, "chart model");
    const auto layers = in.get<std::uint32_t>("layer_count");
    std::vector<DenseLayer> out;
    for (std::uint32_t l = 0; l < layers; ++l) {
        const std::uint64_t offset = in.offset();
        DenseLayer layer;
        const auto rows = in.get<std::uint32_t>("outputs");
        const auto cols = in.get<std::uint32_t>("inputs");
        const auto act = in.get<std::uint8_t>("activation");
        if (act > 1) throw ParseError("unknown activation tag " + std::to_string(act), offset + 8);
        layer.activation = static_cast<Activation>(act);
        layer.weight.resize(rows, cols);
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = in.get<double>("weights");
        layer.bias.resize(rows);
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = in.get<double>("bias");
        out.push_back(std::move(layer));
    }
    expect_end(in);
    try {
        return ChartModel(std::move(out));
    } catch (const Error& e) {
        throw ParseError(std::string("invalid model: ") + e.what(), 8);
    }
}

void save_dissimilarity(const fs::path& path, const DissimilarityMatrix& d) {
    BinaryOut out(path);
    write_checkpoint_header(out, CheckpointKind::dissimilarity);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(d.kind));
    out.put<std::uint64_t>(d.size());
    for (Eigen::Index i = 0; i < d.values.size(); ++i) out.put<double>(d.values.data()[i]);
    out.finish();
}

DissimilarityMatrix load_dissimilarity(const fs::path& path) {
    BinaryIn in(path);
    expect_kind(in, CheckpointKind::dissimilarity, "dissimilarity matrix");
    const auto kind = in.get<std::uint8_t>("kind");
    if (kind != 1 && kind != 2) throw ParseError("unknown dissimilarity kind", 8);
    const auto n = in.get<std::uint64_t>("n");
    DissimilarityMatrix d;
    d.kind = static_cast<DissimilarityKind>(kind);
    d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.values.size(); ++i) d.values.data()[i] = in.get<double>("values");
    expect_end(in);
    return d;
}

}  // namespace streamcc
