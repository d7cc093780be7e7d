// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The streamcc Authors

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include "generators.hpp"
#include "streamcc/error.hpp"
#include "streamcc/io.hpp"

using namespace streamcc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("streamcc_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path operator/(const std::string& name) const { return path / name; }
};

// Items whose CSI is exactly representable in f32.
std::vector<StreamItem> random_items(gen::Rng& rng, std::size_t count, std::size_t b, std::size_t w,
                                     std::size_t pos_dim) {
    std::uniform_real_distribution<float> u(-5.0f, 5.0f);
    std::vector<StreamItem> out;
    for (std::size_t n = 0; n < count; ++n) {
        ComplexGrid g(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(w));
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = {u(rng), u(rng)};
        std::optional<double> ts;
        if (n % 2 == 0) ts = 0.125 * static_cast<double>(n);
        StreamItem item{CsiMatrix(std::move(g), 100 + n, ts), std::nullopt};
        if (pos_dim > 0) item.position = GroundTruthPosition(Eigen::VectorXd::Random(static_cast<Eigen::Index>(pos_dim)));
        out.push_back(std::move(item));
    }
    return out;
}

void check_same(const StreamItem& a, const StreamItem& b) {
    CHECK(a.csi.sample_index() == b.csi.sample_index());
    CHECK(a.csi.entries() == b.csi.entries());
    CHECK(a.csi.timestamp().has_value() == b.csi.timestamp().has_value());
    if (a.csi.timestamp() && b.csi.timestamp()) CHECK(*a.csi.timestamp() == *b.csi.timestamp());
    REQUIRE(a.position.has_value() == b.position.has_value());
    if (a.position) CHECK(a.position->coords() == b.position->coords());
}

std::vector<StreamItem> drain(StreamSource& s) {
    std::vector<StreamItem> out;
    while (auto item = s.next()) out.push_back(std::move(*item));
    return out;
}

std::uint64_t parse_offset(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.offset();
    }
    FAIL("expected a parse error");
    return 0;
}

// Minimal .npy (format 1.0) writer, little-endian, C order.
void write_npy(const fs::path& path, const std::string& descr, const std::vector<std::size_t>& shape,
               const void* data, std::size_t bytes) {
    std::string dims;
    for (std::size_t i = 0; i < shape.size(); ++i) dims += (i ? ", " : "") + std::to_string(shape[i]);
    if (shape.size() == 1) dims += ",";
    std::string header = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': (" + dims + "), }";
    const std::size_t total = 10 + header.size() + 1;
    header.append((64 - total % 64) % 64, ' ');
    header += '\n';
    std::ofstream out(path, std::ios::binary);
    out.write("\x93NUMPY\x01\x00", 8);
    const auto len = static_cast<std::uint16_t>(header.size());
    const char le[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
    out.write(le, 2);
    out << header;
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("record file round trip is bitwise") {
    TempDir dir;
    gen::Rng rng(61);
    for (std::size_t pos_dim : {0u, 2u, 3u}) {
        const auto items = random_items(rng, 3, 4, 7, pos_dim);
        write_records(dir / "r.ccsf", items);
        auto reader = read_records(dir / "r.ccsf");
        CHECK(reader->header().count == 3);
        CHECK(reader->header().antennas == 4);
        CHECK(reader->header().subcarriers == 7);
        CHECK(reader->header().has_positions == (pos_dim > 0));
        const auto back = drain(*reader);
        REQUIRE(back.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) check_same(items[i], back[i]);
    }
}

TEST_CASE("header layout") {
    TempDir dir;
    gen::Rng rng(62);
    write_records(dir / "r.ccsf", random_items(rng, 2, 3, 5, 2));
    std::ifstream in(dir / "r.ccsf", std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), {});
    REQUIRE(bytes.size() == 25 + 2 * (8 + 8 + 16 + 3 * 5 * 8));
    CHECK(std::memcmp(bytes.data(), "CCSF1", 5) == 0);
    CHECK(bytes[5] == 1);
    CHECK(bytes[7] == 3);
    CHECK(bytes[11] == 5);
    CHECK(bytes[15] == 2);
    CHECK(bytes[23] == 1);
    CHECK(bytes[24] == 2);
    CHECK(bytes[25] == 100);  // first sample index, little-endian
}

TEST_CASE("truncated file reports the offset of the incomplete record") {
    TempDir dir;
    gen::Rng rng(63);
    const auto items = random_items(rng, 10, 2, 3, 0);
    write_records(dir / "r.ccsf", items);
    const std::uint64_t rec = 8 + 8 + 2 * 3 * 8;
    fs::resize_file(dir / "r.ccsf", 25 + 9 * rec + 5);
    CHECK(parse_offset([&] { read_records(dir / "r.ccsf"); }) == 25 + 9 * rec);
    fs::resize_file(dir / "r.ccsf", 25 + 9 * rec);
    CHECK(parse_offset([&] { read_records(dir / "r.ccsf"); }) == 25 + 9 * rec);
}

TEST_CASE("trailing bytes and bad magic are rejected") {
    TempDir dir;
    gen::Rng rng(64);
    write_records(dir / "r.ccsf", random_items(rng, 2, 2, 2, 0));
    {
        std::ofstream out(dir / "r.ccsf", std::ios::binary | std::ios::app);
        out.put('x');
    }
    CHECK_THROWS_AS(read_records(dir / "r.ccsf"), ParseError);
    {
        std::ofstream out(dir / "bad.ccsf", std::ios::binary);
        out << "NOPE!00000000000000000000000000";
    }
    CHECK(parse_offset([&] { read_records(dir / "bad.ccsf"); }) == 0);
}

TEST_CASE("empty record file streams nothing") {
    TempDir dir;
    write_records(dir / "e.ccsf", {});
    auto reader = read_records(dir / "e.ccsf");
    CHECK(reader->header().count == 0);
    CHECK_FALSE(reader->next().has_value());
}

TEST_CASE("writer rejects inconsistent records") {
    TempDir dir;
    gen::Rng rng(65);
    CsiRecordWriter w(dir / "w.ccsf", 2, 3, 0);
    CHECK_THROWS_AS(w.write(random_items(rng, 1, 2, 4, 0)[0]), DimensionError);
    CHECK_THROWS_AS(w.write(random_items(rng, 1, 2, 3, 2)[0]), DimensionError);
}

TEST_CASE("npy adapter imports a five-record fixture") {
    TempDir dir;
    gen::Rng rng(66);
    constexpr std::size_t N = 5, B = 32, W = 1024;
    std::vector<float> csi(N * B * W * 2);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& x : csi) x = u(rng);
    std::vector<double> pos(N * 3);
    for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = 0.5 * static_cast<double>(i);
    std::vector<double> ts = {0.0, 0.1, 0.2, 0.3, 0.4};
    fs::create_directories(dir / "npy");
    write_npy(dir / "npy" / "csi.npy", "<c8", {N, B, W}, csi.data(), csi.size() * 4);
    write_npy(dir / "npy" / "positions.npy", "<f8", {N, 3}, pos.data(), pos.size() * 8);
    write_npy(dir / "npy" / "timestamps.npy", "<f8", {N}, ts.data(), ts.size() * 8);

    const auto h = import_external(dir / "npy", "npy", dir / "out.ccsf");
    CHECK(h.count == 5);
    CHECK(h.antennas == 32);
    CHECK(h.subcarriers == 1024);
    CHECK(h.position_dim == 3);
    auto reader = read_records(dir / "out.ccsf");
    const auto items = drain(*reader);
    REQUIRE(items.size() == 5);
    CHECK(items[3].csi.sample_index() == 3);
    CHECK(*items[3].csi.timestamp() == 0.3);
    CHECK(items[3].position->coords()(2) == 0.5 * 11);
    const std::size_t base = 3 * B * W * 2;
    CHECK(items[3].csi.entries()(1, 2).real() == csi[base + (1 * W + 2) * 2]);
    CHECK(items[3].csi.entries()(1, 2).imag() == csi[base + (1 * W + 2) * 2 + 1]);

    SUBCASE("record range") {
        const auto r = import_external(dir / "npy", "npy", dir / "range.ccsf", {1, 4});
        CHECK(r.count == 3);
        auto rr = read_records(dir / "range.ccsf");
        CHECK(rr->next()->csi.sample_index() == 1);
    }
    SUBCASE("re-import of an exported file is the identity") {
        import_external(dir / "out.ccsf", "ccsf", dir / "again.ccsf");
        auto again = read_records(dir / "again.ccsf");
        const auto items2 = drain(*again);
        REQUIRE(items2.size() == items.size());
        for (std::size_t i = 0; i < items.size(); ++i) check_same(items[i], items2[i]);
    }
    SUBCASE("corrupt record is named") {
        csi[2 * B * W * 2 + 17] = std::numeric_limits<float>::quiet_NaN();
        write_npy(dir / "npy" / "csi.npy", "<c8", {N, B, W}, csi.data(), csi.size() * 4);
        try {
            import_external(dir / "npy", "npy", dir / "bad.ccsf");
            FAIL("expected an error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("record 2") != std::string::npos);
        }
    }
    SUBCASE("truncated array names the record") {
        write_npy(dir / "npy" / "csi.npy", "<c8", {N, B, W}, csi.data(), csi.size() * 4 - 100);
        try {
            import_external(dir / "npy", "npy", dir / "bad.ccsf");
            FAIL("expected an error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("record 4") != std::string::npos);
        }
    }
}

TEST_CASE("memory checkpoint round trip") {
    TempDir dir;
    gen::Rng rng(67);
    for (bool keep_csi : {false, true}) {
        CoreMemory mem(6);
        for (std::uint64_t i = 0; i < 5; ++i) {
            std::optional<GroundTruthPosition> p;
            if (i != 2) p = GroundTruthPosition(Eigen::Vector3d(1.0 * i, 2.0, 0.5));
            mem.append(prepare_sample(gen::csi(rng, 4, 16, i), 5, p, keep_csi));
        }
        save_memory(dir / "m.ckpt", mem);
        CHECK(checkpoint_kind(dir / "m.ckpt") == CheckpointKind::memory);
        const CoreMemory back = load_memory(dir / "m.ckpt");
        CHECK(back.capacity() == 6);
        REQUIRE(back.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            const auto& a = mem.slot(i);
            const auto& b = back.slot(i);
            CHECK(a.arrival_index == b.arrival_index);
            CHECK(a.delay.taps() == b.delay.taps());
            CHECK(a.feature.values() == b.feature.values());
            CHECK(a.position.has_value() == b.position.has_value());
            CHECK(a.csi.has_value() == b.csi.has_value());
            if (a.csi) CHECK(a.csi->entries() == b.csi->entries());
        }
        CHECK(mem.similarity_cache() == back.similarity_cache());
        CHECK_THROWS_AS(load_model(dir / "m.ckpt"), ParseError);
    }
}

TEST_CASE("model and dissimilarity checkpoints round trip") {
    TempDir dir;
    const auto m = init_glorot(12, 5);
    save_model(dir / "model.ckpt", m);
    CHECK(checkpoint_kind(dir / "model.ckpt") == CheckpointKind::model);
    CHECK(load_model(dir / "model.ckpt") == m);

    DissimilarityMatrix d{Eigen::MatrixXd::Random(4, 4).cwiseAbs(), DissimilarityKind::geodesic};
    save_dissimilarity(dir / "d.ckpt", d);
    const auto back = load_dissimilarity(dir / "d.ckpt");
    CHECK(back.kind == DissimilarityKind::geodesic);
    CHECK(back.values == d.values);

    fs::resize_file(dir / "model.ckpt", fs::file_size(dir / "model.ckpt") - 3);
    CHECK_THROWS_AS(load_model(dir / "model.ckpt"), ParseError);
}

}  // TEST_SUITE
