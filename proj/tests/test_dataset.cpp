#include <catch2/catch_amalgamated.hpp>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace geotime;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {
fs::path tmp_dir() {
    fs::path p = fs::temp_directory_path() / "geotime_test_io";
    fs::create_directories(p);
    return p;
}
}  // namespace

TEST_CASE("dataset generation on the flat disk") {
    const auto& d = oracles::disk_dataset();
    const TravelTimeDataset& ds = d.gen.ds;
    REQUIRE(ds.N >= 50);
    CHECK(ds.failed_rows.empty());

    SECTION("entries equal the euclidean point-sensor distances") {
        auto g = oracles::rng(3);
        std::uniform_int_distribution<long> pick(0, ds.N - 1);
        for (int k = 0; k < 25; ++k) {
            long i = pick(g);
            for (int j = 0; j < ds.m; j += 7) {
                double truth = norm(d.gen.truth.source[std::size_t(i)] - d.sensors.pos[std::size_t(j)]);
                CHECK(ds.at(i, j) == Approx(truth).margin(1e-8));
            }
        }
    }
    SECTION("sensor-coincident sources have exactly one zero") {
        for (std::size_t g = 0; g < d.gen.truth.kind.size(); ++g) {
            if (d.gen.truth.kind[g] != int(SourceKind::gamma_trace)) continue;
            int zeros = 0;
            for (int j = 0; j < ds.m; ++j)
                if (ds.at(long(g), j) <= 1e-12) ++zeros;
            CHECK(zeros == 1);
        }
    }
    SECTION("row Lipschitz bound through the boundary arc") {
        // |r(z_j) - r(z_k)| <= arc length of gamma between the sensors
        for (long i = 0; i < ds.N; i += 37) {
            for (int j = 0; j < ds.m - 1; ++j) {
                double arc = std::abs(d.sensors.s[std::size_t(j + 1)] - d.sensors.s[std::size_t(j)]);
                CHECK(std::abs(ds.at(i, j + 1) - ds.at(i, j)) <= arc + 2e-8);
            }
        }
    }
    SECTION("non-negative with at most one zero per row") {
        for (long i = 0; i < ds.N; ++i) {
            int zeros = 0;
            for (int j = 0; j < ds.m; ++j) {
                CHECK(ds.at(i, j) >= 0.0);
                if (ds.at(i, j) <= 1e-12) ++zeros;
            }
            CHECK(zeros <= 1);
        }
    }
}

TEST_CASE("source plan structure") {
    const auto& d = oracles::disk_dataset();
    long lattice = 0, collar = 0, trace = 0;
    double min_lattice_depth = 1e9;
    for (std::size_t i = 0; i < d.gen.truth.kind.size(); ++i) {
        switch (SourceKind(d.gen.truth.kind[i])) {
            case SourceKind::lattice:
                ++lattice;
                min_lattice_depth = std::min(min_lattice_depth, d.gen.truth.depth[i]);
                break;
            case SourceKind::collar: ++collar; break;
            case SourceKind::gamma_trace: ++trace; break;
            default: break;
        }
    }
    CHECK(trace == d.gen.ds.m);
    CHECK(collar >= 8);
    CHECK(lattice >= 50);
    // the collar is the shallowest interior layer by construction
    CHECK(min_lattice_depth >= 1.5 * d.gen.ds.collar_depth - 1e-12);
}

TEST_CASE("dataset file round trip") {
    const auto& d = oracles::disk_dataset();
    fs::path dir = tmp_dir();
    std::string path = (dir / "roundtrip.gtt").string();
    write_dataset(d.gen.ds, path);
    write_truth(d.gen.ds, d.gen.truth, path + ".truth");

    SECTION("bit-exact matrix round trip") {
        TravelTimeDataset back = read_dataset(path);
        REQUIRE(back.N == d.gen.ds.N);
        REQUIRE(back.m == d.gen.ds.m);
        CHECK(std::memcmp(back.times.data(), d.gen.ds.times.data(),
                          back.times.size() * sizeof(double)) == 0);
        CHECK(back.sensor_u == d.gen.ds.sensor_u);
        CHECK(back.h_src == d.gen.ds.h_src);
    }
    SECTION("byte-identical rewrite (determinism of the writer)") {
        std::string path2 = (dir / "roundtrip2.gtt").string();
        write_dataset(d.gen.ds, path2);
        std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
    SECTION("truncated matrix block names the byte offset") {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::string cut = all.substr(0, all.size() - 64);
        std::string path3 = (dir / "truncated.gtt").string();
        std::ofstream out(path3, std::ios::binary);
        out << cut;
        out.close();
        try {
            read_dataset(path3);
            FAIL("expected data_error");
        } catch (const data_error& e) {
            CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
        }
    }
    SECTION("version and header validation") {
        std::string bad = (dir / "bad.gtt").string();
        {
            std::ofstream out(bad, std::ios::binary);
            out << "geotime-dataset v2\nm=4 N=4 layout=row-major\n0 0.3 0.6 1\n";
        }
        CHECK_THROWS_AS(read_dataset(bad), data_error);
        {
            std::ofstream out(bad, std::ios::binary);
            out << "geotime-dataset v1\nm=4 N=4 layout=col-major\n0 0.3 0.6 1\n";
        }
        CHECK_THROWS_AS(read_dataset(bad), data_error);
        {
            std::ofstream out(bad, std::ios::binary);
            out << "geotime-dataset v1\nm=4 N=1 layout=row-major\n0 0.6 0.3 1\n";
            double zeros[4] = {};
            out.write(reinterpret_cast<const char*>(zeros), sizeof zeros);
        }
        CHECK_THROWS_AS(read_dataset(bad), data_error);  // non-monotone sensors
    }
    SECTION("truth sidecar round trip and blindness of the plain reader") {
        DatasetTruth t = read_truth(path + ".truth", d.gen.ds);
        REQUIRE(t.source.size() == std::size_t(d.gen.ds.N));
        CHECK(t.sensor_pos.size() == std::size_t(d.gen.ds.m));
        CHECK(norm(t.source[0] - d.gen.truth.source[0]) == 0.0);
        // the dataset reader has no sidecar channel at all: reading the
        // dataset with a deleted sidecar must work identically
        std::string path4 = (dir / "blind.gtt").string();
        write_dataset(d.gen.ds, path4);
        TravelTimeDataset blind = read_dataset(path4);
        CHECK(blind.times == d.gen.ds.times);
    }
}

TEST_CASE("row separation statistics") {
    const auto& d = oracles::disk_dataset();
    RowSeparation rs = row_separation(d.gen.ds, 1e-8);
    CHECK(rs.min_gap > 0.0);
    CHECK(rs.near_duplicates.empty());

    SECTION("a duplicated row is flagged, not dropped") {
        TravelTimeDataset copy = d.gen.ds;
        copy.N += 1;
        copy.times.resize(copy.times.size() + std::size_t(copy.m));
        for (int j = 0; j < copy.m; ++j) copy.at(copy.N - 1, j) = copy.at(7, j);
        RowSeparation rs2 = row_separation(copy, 1e-12);
        CHECK(rs2.min_gap == 0.0);
        REQUIRE(rs2.near_duplicates.size() == 1);
        CHECK(rs2.near_duplicates[0].first == 7);
        CHECK(rs2.near_duplicates[0].second == copy.N - 1);
    }
}
