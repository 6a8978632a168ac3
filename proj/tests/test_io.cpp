// test_io.cpp — File formats, report serialization, rendering, and config.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "uecorr/io.hpp"
#include "uecorr/synth.hpp"

using namespace uecorr;
namespace fs = std::filesystem;

namespace {

/// Fresh per-invocation scratch directory under the system temp root.
fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("uecorr_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

Volume3D random_volume(SeededRng& rng) {
    const Index3 dims(7, 5, 6);
    std::vector<float> v(static_cast<std::size_t>(dims.count()));
    for (auto& x : v) {
        x = static_cast<float>(rng.uniform(-100.0, 100.0));
    }
    return Volume3D(dims, Vec3(0.5f, 1.25f, 2.0f), Vec3(-3.5f, 10.0f, 0.25f), std::move(v));
}

DenseField small_field(std::vector<double> u, Index3 dims) {
    DenseField f;
    f.grid_dims = dims;
    f.stride = 1;
    f.spacing = Vec3(1, 1, 1);
    f.origin = Vec3(0, 0, 0);
    f.u = std::move(u);
    f.mean.assign(f.u.size(), Vec3());
    return f;
}

} // namespace

TEST_CASE("volume file: write/read round-trips bit-exactly") {
    const fs::path dir = scratch_dir("vol_roundtrip");
    SeededRng rng(301);
    const Volume3D vol = random_volume(rng);
    write_volume(vol, dir / "a.uev");
    const Volume3D back = read_volume(dir / "a.uev");
    CHECK(back.dims() == vol.dims());
    CHECK(back.voxels() == vol.voxels());
    CHECK(back.spacing() == Vec3(0.5f, 1.25f, 2.0f));
    CHECK(back.origin() == Vec3(-3.5f, 10.0f, 0.25f));
    // The second generation of bytes must match the first exactly.
    write_volume(back, dir / "b.uev");
    CHECK(slurp(dir / "a.uev") == slurp(dir / "b.uev"));
}

TEST_CASE("volume file: header layout is fixed") {
    const fs::path dir = scratch_dir("vol_header");
    const Volume3D vol(Index3(2, 1, 1), Vec3(1, 1, 1), Vec3(0, 0, 0),
                       std::vector<float>{0.0f, 0.0f});
    write_volume(vol, dir / "v.uev");
    const std::string bytes = slurp(dir / "v.uev");
    REQUIRE(bytes.size() == 40 + 8);
    CHECK(bytes.substr(0, 4) == "UEV1");
    CHECK(static_cast<unsigned char>(bytes[4]) == 2);   // dims.x low byte
    CHECK(static_cast<unsigned char>(bytes[5]) == 0);
}

TEST_CASE("volume file: malformed files raise IoError") {
    const fs::path dir = scratch_dir("vol_bad");
    CHECK_THROWS_AS(read_volume(dir / "missing.uev"), IoError);

    spit(dir / "short.uev", "UEV1abc");
    CHECK_THROWS_AS(read_volume(dir / "short.uev"), IoError);

    const Volume3D vol(Index3(2, 2, 2), Vec3(1, 1, 1), Vec3(0, 0, 0),
                       std::vector<float>(8, 1.0f));
    write_volume(vol, dir / "ok.uev");
    std::string bytes = slurp(dir / "ok.uev");

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    spit(dir / "bad_magic.uev", bad_magic);
    CHECK_THROWS_AS(read_volume(dir / "bad_magic.uev"), IoError);

    spit(dir / "truncated.uev", bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(read_volume(dir / "truncated.uev"), IoError);

    std::string huge_dims = bytes;
    huge_dims[7] = static_cast<char>(0xff);   // dims.x top byte
    spit(dir / "huge.uev", huge_dims);
    CHECK_THROWS_AS(read_volume(dir / "huge.uev"), IoError);
}

TEST_CASE("landmark csv: serialize/parse is the identity") {
    const fs::path dir = scratch_dir("csv_roundtrip");
    SeededRng rng(307);
    LandmarkSet set;
    for (int i = 0; i < 25; ++i) {
        set.landmarks.push_back({i * 3,
                                 Vec3(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0),
                                      rng.uniform(-50.0, 50.0)),
                                 Vec3(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0),
                                      rng.uniform(-5.0, 5.0))});
    }
    write_landmarks(set, dir / "lm.csv");
    const LandmarkSet back = read_landmarks(dir / "lm.csv");
    REQUIRE(back.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CHECK(back.landmarks[i].id == set.landmarks[i].id);
        CHECK(back.landmarks[i].position == set.landmarks[i].position);
        CHECK(back.landmarks[i].displacement == set.landmarks[i].displacement);
    }
}

TEST_CASE("landmark csv: voxel rows convert through the paired volume") {
    const fs::path dir = scratch_dir("csv_voxel");
    const Volume3D vol(Index3(20, 20, 20), Vec3(2, 3, 4), Vec3(10, 20, 30),
                       std::vector<float>(8000, 0.0f));
    spit(dir / "lm.csv",
         "id,unit,x,y,z,dx,dy,dz\n"
         "0,voxel,1,2,3,0.5,1,2\n"
         "1,mm,5,6,7,0.1,0.2,0.3\n");
    const LandmarkSet set = read_landmarks(dir / "lm.csv", &vol);
    REQUIRE(set.size() == 2);
    CHECK(set.landmarks[0].position == Vec3(10 + 2 * 1, 20 + 3 * 2, 30 + 4 * 3));
    CHECK(set.landmarks[0].displacement == Vec3(2 * 0.5, 3 * 1, 4 * 2));
    CHECK(set.landmarks[1].position == Vec3(5, 6, 7));
    CHECK(set.landmarks[1].displacement == Vec3(0.1, 0.2, 0.3));

    CHECK_THROWS_AS(read_landmarks(dir / "lm.csv"), InvalidInput);
}

TEST_CASE("landmark csv: malformed text raises ParseError") {
    const fs::path dir = scratch_dir("csv_bad");
    CHECK_THROWS_AS(read_landmarks(dir / "missing.csv"), IoError);

    spit(dir / "bad_header.csv", "id,x,y,z\n");
    CHECK_THROWS_AS(read_landmarks(dir / "bad_header.csv"), ParseError);

    spit(dir / "short_row.csv", "id,unit,x,y,z,dx,dy,dz\n0,mm,1,2,3\n");
    CHECK_THROWS_AS(read_landmarks(dir / "short_row.csv"), ParseError);

    spit(dir / "bad_number.csv", "id,unit,x,y,z,dx,dy,dz\n0,mm,1,2,zebra,0,0,0\n");
    CHECK_THROWS_AS(read_landmarks(dir / "bad_number.csv"), ParseError);

    spit(dir / "bad_unit.csv", "id,unit,x,y,z,dx,dy,dz\n0,inches,1,2,3,0,0,0\n");
    CHECK_THROWS_AS(read_landmarks(dir / "bad_unit.csv"), ParseError);

    spit(dir / "dup_ids.csv",
         "id,unit,x,y,z,dx,dy,dz\n0,mm,1,2,3,0,0,0\n0,mm,4,5,6,0,0,0\n");
    CHECK_THROWS_AS(read_landmarks(dir / "dup_ids.csv"), InvalidInput);
}

TEST_CASE("landmark csv: tolerates CRLF endings and blank lines") {
    const fs::path dir = scratch_dir("csv_crlf");
    spit(dir / "lm.csv", "id,unit,x,y,z,dx,dy,dz\r\n7,mm,1,2,3,0.5,0,0\r\n\r\n");
    const LandmarkSet set = read_landmarks(dir / "lm.csv");
    REQUIRE(set.size() == 1);
    CHECK(set.landmarks[0].id == 7);
    CHECK(set.landmarks[0].position == Vec3(1, 2, 3));
}

TEST_CASE("report json: pointwise round-trip preserves every value") {
    const fs::path dir = scratch_dir("report_point");
    AssociationReport report;
    report.kind = "pointwise";
    report.point_records = {{3, 0.123456789012345, 1.0 / 3.0},
                            {7, 2.5e-17, 4.9e300},
                            {9, 1.25, 0.0}};
    report.rho_s = -0.08154711;
    report.m = 3;
    report.dropped = 0;
    report.config.kernel_a = 42.75;
    report.config.jitter = 1e-8;
    report.config.train_count = 10;
    report.config.test_count = 3;

    write_report(report, dir / "r.json");
    const AssociationReport back = read_report(dir / "r.json");
    CHECK(back.kind == "pointwise");
    REQUIRE(back.rho_s.has_value());
    CHECK(*back.rho_s == *report.rho_s);
    CHECK(back.m == 3);
    CHECK(back.dropped == 0);
    CHECK(back.config.kernel_a == 42.75);
    CHECK(back.config.jitter == 1e-8);
    CHECK(!back.config.k.has_value());
    CHECK(!back.config.metric.has_value());
    REQUIRE(back.point_records.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.point_records[i].landmark_id == report.point_records[i].landmark_id);
        CHECK(back.point_records[i].u == report.point_records[i].u);
        CHECK(back.point_records[i].eps == report.point_records[i].eps);
    }
}

TEST_CASE("report json: patchwise config and degenerate rho survive") {
    const fs::path dir = scratch_dir("report_patch");
    AssociationReport report;
    report.kind = "patchwise";
    report.patch_records = {{1, 0.5, 0.25, Metric::HI, 3}, {2, 0.75, 0.5, Metric::HI, 3}};
    report.rho_s = std::nullopt;
    report.m = 2;
    report.dropped = 4;
    report.config.kernel_a = 9.0;
    report.config.jitter = 0.0;
    report.config.k = 3;
    report.config.metric = Metric::HI;
    report.config.bins = 16;
    report.config.train_count = 50;
    report.config.test_count = 6;

    write_report(report, dir / "r.json");
    const AssociationReport back = read_report(dir / "r.json");
    CHECK(back.kind == "patchwise");
    CHECK(!back.rho_s.has_value());
    CHECK(back.dropped == 4);
    CHECK(back.config.k == 3);
    CHECK(back.config.metric == Metric::HI);
    CHECK(back.config.bins == 16);
    REQUIRE(back.patch_records.size() == 2);
    CHECK(back.patch_records[0].u_patch == 0.5);
    CHECK(back.patch_records[0].eps_patch == 0.25);
    CHECK(back.patch_records[0].metric == Metric::HI);
    CHECK(back.patch_records[0].k == 3);
}

TEST_CASE("report json: schema and structure are enforced on read") {
    const fs::path dir = scratch_dir("report_bad");
    spit(dir / "nonsense.json", "this is not json");
    CHECK_THROWS_AS(read_report(dir / "nonsense.json"), ParseError);

    spit(dir / "missing.json", R"({"schema_version": 1, "kind": "pointwise"})");
    CHECK_THROWS_AS(read_report(dir / "missing.json"), ParseError);

    spit(dir / "wrong_version.json",
         R"({"schema_version": 2, "kind": "pointwise", "config": {}, "rho_s": 0,)"
         R"( "m": 0, "dropped": 0, "records": []})");
    CHECK_THROWS_AS(read_report(dir / "wrong_version.json"), ParseError);

    CHECK_THROWS_AS(read_report(dir / "not_there.json"), IoError);
}

TEST_CASE("report json: numbers carry at least 15 significant digits") {
    AssociationReport report;
    report.kind = "pointwise";
    report.point_records = {{0, 1.0 / 3.0, 2.0 / 7.0}, {1, 0.1, 0.7}};
    report.rho_s = 1.0 / 3.0;
    report.m = 2;
    report.dropped = 0;
    report.config.kernel_a = 1.0;
    report.config.jitter = 0.0;
    report.config.train_count = 1;
    report.config.test_count = 2;
    const std::string json = report_to_json(report);
    CHECK(json.find("3.3333333333333331e-01") != std::string::npos);
    CHECK(json.find("\"schema_version\": 1") != std::string::npos);
}

TEST_CASE("format_double: round-trips exactly through from_chars") {
    SeededRng rng(311);
    for (int trial = 0; trial < 200; ++trial) {
        double v = 0.0;
        switch (trial % 4) {
            case 0: v = rng.uniform(-1.0, 1.0); break;
            case 1: v = rng.uniform(-1e9, 1e9); break;
            case 2: v = rng.uniform(0.0, 1.0) * 1e-12; break;
            default: v = rng.normal() * 1e100; break;
        }
        const std::string s = format_double(v);
        double back = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(ec == std::errc());
        CHECK(ptr == s.data() + s.size());
        CHECK(back == v);
    }
    CHECK(format_double(0.0) == "0.0000000000000000e+00");
}

TEST_CASE("render: colors interpolate red to blue with clamping") {
    // u values: one at the minimum, one at the maximum, one in the middle,
    // plus values beyond both ends that must clamp.
    const DenseField f = small_field({0.0, 1.0, 0.5, -2.0, 3.0, 0.25}, Index3(6, 1, 1));
    const PpmImage img = render_uncertainty_slice(f, Axis::Z, 0, 0.0, 1.0);
    CHECK(img.width == 6);
    CHECK(img.height == 1);
    REQUIRE(img.rgb.size() == 18);
    // u = u_min: pure red.
    CHECK(img.rgb[0] == 255);
    CHECK(img.rgb[1] == 0);
    CHECK(img.rgb[2] == 0);
    // u = u_max: pure blue.
    CHECK(img.rgb[3] == 0);
    CHECK(img.rgb[5] == 255);
    // Midpoint.
    CHECK(img.rgb[6] == 128);
    CHECK(img.rgb[8] == 128);
    // Clamped below and above.
    CHECK(img.rgb[9] == 255);
    CHECK(img.rgb[11] == 0);
    CHECK(img.rgb[12] == 0);
    CHECK(img.rgb[14] == 255);
}

TEST_CASE("render: constant field gives a uniform image") {
    const DenseField f = small_field(std::vector<double>(12, 0.4), Index3(4, 3, 1));
    const PpmImage img = render_uncertainty_slice(f, Axis::Z, 0, 0.0, 1.0);
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
        CHECK(img.rgb[i] == img.rgb[0]);
        CHECK(img.rgb[i + 1] == img.rgb[1]);
        CHECK(img.rgb[i + 2] == img.rgb[2]);
    }
}

TEST_CASE("render: axis selection fixes the image geometry") {
    // 3x4x5 grid, u = linear index for traceability.
    std::vector<double> u(60);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = static_cast<double>(i);
    }
    const DenseField f = small_field(std::move(u), Index3(3, 4, 5));

    const PpmImage z = render_uncertainty_slice(f, Axis::Z, 2, 0.0, 60.0);
    CHECK(z.width == 3);
    CHECK(z.height == 4);
    const PpmImage y = render_uncertainty_slice(f, Axis::Y, 1, 0.0, 60.0);
    CHECK(y.width == 3);
    CHECK(y.height == 5);
    const PpmImage x = render_uncertainty_slice(f, Axis::X, 0, 0.0, 60.0);
    CHECK(x.width == 4);
    CHECK(x.height == 5);

    CHECK_THROWS_AS(render_uncertainty_slice(f, Axis::Z, 5, 0.0, 60.0), OutOfBounds);
    CHECK_THROWS_AS(render_uncertainty_slice(f, Axis::X, -1, 0.0, 60.0), OutOfBounds);
    CHECK_THROWS_AS(render_uncertainty_slice(f, Axis::Z, 0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("render: identical calls give identical bytes") {
    const fs::path dir = scratch_dir("render_det");
    SeededRng rng(313);
    std::vector<double> u(64);
    for (auto& v : u) {
        v = rng.uniform(0.0, 2.0);
    }
    const DenseField f = small_field(std::move(u), Index3(4, 4, 4));
    const PpmImage a = render_uncertainty_slice(f, Axis::Y, 2, 0.0, 2.0);
    const PpmImage b = render_uncertainty_slice(f, Axis::Y, 2, 0.0, 2.0);
    CHECK(ppm_bytes(a) == ppm_bytes(b));
    write_ppm(a, dir / "s.ppm");
    CHECK(slurp(dir / "s.ppm") == ppm_bytes(a));
    CHECK(ppm_bytes(a).substr(0, 11) == "P6\n4 4\n255\n");
}

TEST_CASE("axis names parse case-insensitively") {
    CHECK(axis_from_name("x") == Axis::X);
    CHECK(axis_from_name("Y") == Axis::Y);
    CHECK(axis_from_name("z") == Axis::Z);
    CHECK_THROWS_AS(axis_from_name("w"), ParseError);
}

TEST_CASE("config: parses key = value text with comments") {
    const Config cfg = Config::from_string(
        "# a comment\n"
        "dims = 64,64,64\n"
        "\n"
        "seed=17\n"
        "  noise_sigma =  0.25  \n"
        "name = phantom one\n"
        "seed = 18\n");   // last assignment wins
    CHECK(cfg.get_vec3("dims") == Vec3(64, 64, 64));
    CHECK(cfg.get_int("seed") == 18);
    CHECK(cfg.get_real("noise_sigma") == 0.25);
    CHECK(cfg.get_string("name") == "phantom one");
    CHECK(cfg.has("dims"));
    CHECK(!cfg.has("missing"));
}

TEST_CASE("config: typed getters validate and fall back") {
    const Config cfg = Config::from_string("count = twelve\nvec = 1,2\nreal = 0.5\n");
    CHECK_THROWS_AS(cfg.get_int("count"), ParseError);
    CHECK_THROWS_AS(cfg.get_vec3("vec"), ParseError);
    CHECK_THROWS_AS(cfg.get_string("absent"), InvalidInput);
    CHECK(cfg.get_real("real", 9.0) == 0.5);
    CHECK(cfg.get_real("absent", 9.0) == 9.0);
    CHECK(cfg.get_int("absent", 7) == 7);
    CHECK(cfg.get_string("absent", "d") == "d");
    CHECK(cfg.get_vec3("absent", Vec3(1, 2, 3)) == Vec3(1, 2, 3));
}

TEST_CASE("config: malformed lines and missing files error out") {
    CHECK_THROWS_AS(Config::from_string("just words\n"), ParseError);
    CHECK_THROWS_AS(Config::from_string("= value\n"), ParseError);
    CHECK_THROWS_AS(Config::from_file("/nonexistent/config.cfg"), IoError);
}
