// io.cpp — Readers and writers for volumes, landmarks, reports, and slices.
//
// Binary layouts are packed byte by byte in little-endian order rather than
// memcpy'd from structs, so files are identical across hosts. Text output
// goes through format_double (17 significant digits), which from_chars
// recovers exactly.

#include "uecorr/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "json.hpp"

#include "uecorr/errors.hpp"

namespace uecorr {

namespace {

void append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void append_f32(std::string& out, float v) {
    append_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint32_t take_u32(const std::string& buf, std::size_t offset) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(buf[offset + 3])) << 24;
}

float take_f32(const std::string& buf, std::size_t offset) {
    return std::bit_cast<float>(take_u32(buf, offset));
}

void write_bytes(const std::string& bytes, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
        throw IoError("short write to '" + path.string() + "'");
    }
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("read failure on '" + path.string() + "'");
    }
    return std::move(buf).str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_double(std::string_view s, const std::string& what) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("bad " + what + " value '" + std::string(s) + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view s, const std::string& what) {
    std::int64_t v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("bad " + what + " value '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

// --- volumes -----------------------------------------------------------------

static constexpr char kVolumeMagic[4] = {'U', 'E', 'V', '1'};
static constexpr std::size_t kVolumeHeaderSize = 4 + 3 * 4 + 3 * 4 + 3 * 4;

void write_volume(const Volume3D& vol, const std::filesystem::path& path) {
    std::string bytes;
    bytes.reserve(kVolumeHeaderSize + 4 * vol.voxel_count());
    bytes.append(kVolumeMagic, sizeof kVolumeMagic);
    append_u32(bytes, static_cast<std::uint32_t>(vol.dims().x));
    append_u32(bytes, static_cast<std::uint32_t>(vol.dims().y));
    append_u32(bytes, static_cast<std::uint32_t>(vol.dims().z));
    for (double s : {vol.spacing().x, vol.spacing().y, vol.spacing().z}) {
        append_f32(bytes, static_cast<float>(s));
    }
    for (double o : {vol.origin().x, vol.origin().y, vol.origin().z}) {
        append_f32(bytes, static_cast<float>(o));
    }
    for (float v : vol.voxels()) {
        append_f32(bytes, v);
    }
    write_bytes(bytes, path);
}

Volume3D read_volume(const std::filesystem::path& path) {
    const std::string bytes = read_bytes(path);
    if (bytes.size() < kVolumeHeaderSize) {
        throw IoError("'" + path.string() + "' is too short to be a volume file");
    }
    if (std::memcmp(bytes.data(), kVolumeMagic, sizeof kVolumeMagic) != 0) {
        throw IoError("'" + path.string() + "' has no UEV1 magic");
    }
    const std::uint32_t nx = take_u32(bytes, 4);
    const std::uint32_t ny = take_u32(bytes, 8);
    const std::uint32_t nz = take_u32(bytes, 12);
    constexpr std::uint32_t kMaxDim = 1u << 16;
    if (nx == 0 || ny == 0 || nz == 0 || nx > kMaxDim || ny > kMaxDim || nz > kMaxDim) {
        throw IoError("'" + path.string() + "' declares implausible dims");
    }
    const std::uint64_t count = static_cast<std::uint64_t>(nx) * ny * nz;
    const std::uint64_t expected = kVolumeHeaderSize + 4 * count;
    if (bytes.size() != expected) {
        throw IoError("'" + path.string() + "' payload size does not match its dims");
    }
    const Vec3 spacing(take_f32(bytes, 16), take_f32(bytes, 20), take_f32(bytes, 24));
    const Vec3 origin(take_f32(bytes, 28), take_f32(bytes, 32), take_f32(bytes, 36));
    std::vector<float> voxels(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < voxels.size(); ++i) {
        voxels[i] = take_f32(bytes, kVolumeHeaderSize + 4 * i);
    }
    try {
        return Volume3D(Index3(static_cast<int>(nx), static_cast<int>(ny),
                               static_cast<int>(nz)),
                        spacing, origin, std::move(voxels));
    } catch (const InvalidInput& e) {
        throw IoError("'" + path.string() + "' holds an invalid volume: " + e.what());
    }
}

// --- landmarks ---------------------------------------------------------------

static constexpr std::string_view kLandmarkHeader = "id,unit,x,y,z,dx,dy,dz";

void write_landmarks(const LandmarkSet& set, const std::filesystem::path& path) {
    std::string text(kLandmarkHeader);
    text.push_back('\n');
    for (const auto& lm : set.landmarks) {
        text += std::to_string(lm.id);
        text += ",mm,";
        text += format_double(lm.position.x);
        text += ",";
        text += format_double(lm.position.y);
        text += ",";
        text += format_double(lm.position.z);
        text += ",";
        text += format_double(lm.displacement.x);
        text += ",";
        text += format_double(lm.displacement.y);
        text += ",";
        text += format_double(lm.displacement.z);
        text += "\n";
    }
    write_bytes(text, path);
}

LandmarkSet read_landmarks(const std::filesystem::path& path, const Volume3D* vol) {
    const std::string text = read_bytes(path);
    std::istringstream lines(text);
    std::string line;
    if (!std::getline(lines, line) || trim(line) != kLandmarkHeader) {
        throw ParseError("'" + path.string() + "' does not start with the header '" +
                         std::string(kLandmarkHeader) + "'");
    }
    LandmarkSet set;
    std::size_t line_no = 1;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split(row, ',');
        if (fields.size() != 8) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 8 fields, got " +
                             std::to_string(fields.size()));
        }
        Landmark lm;
        lm.id = static_cast<int>(parse_int(trim(fields[0]), "id"));
        const std::string_view unit = trim(fields[1]);
        Vec3 p(parse_double(trim(fields[2]), "x"), parse_double(trim(fields[3]), "y"),
               parse_double(trim(fields[4]), "z"));
        Vec3 d(parse_double(trim(fields[5]), "dx"), parse_double(trim(fields[6]), "dy"),
               parse_double(trim(fields[7]), "dz"));
        if (unit == "mm") {
            lm.position = p;
            lm.displacement = d;
        } else if (unit == "voxel") {
            if (vol == nullptr) {
                throw InvalidInput(path.string() + ":" + std::to_string(line_no) +
                                   ": row in voxel units needs a reference volume");
            }
            lm.position = vol->voxel_to_world(p);
            lm.displacement = vol->spacing().scaled(d);
        } else {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unknown unit '" +
                             std::string(unit) + "'");
        }
        set.landmarks.push_back(lm);
    }
    validate(set);
    return set;
}

// --- reports -----------------------------------------------------------------

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

std::string report_to_json(const AssociationReport& report) {
    std::string j = "{\n";
    j += "  \"schema_version\": " + std::to_string(kReportSchemaVersion) + ",\n";
    j += "  \"kind\": \"" + json_escape(report.kind) + "\",\n";
    j += "  \"config\": {\n";
    j += "    \"kernel_a\": " + format_double(report.config.kernel_a) + ",\n";
    j += "    \"jitter\": " + format_double(report.config.jitter) + ",\n";
    if (report.config.k) {
        j += "    \"k\": " + std::to_string(*report.config.k) + ",\n";
    }
    if (report.config.metric) {
        j += "    \"metric\": \"" + metric_name(*report.config.metric) + "\",\n";
    }
    if (report.config.bins) {
        j += "    \"bins\": " + std::to_string(*report.config.bins) + ",\n";
    }
    j += "    \"train_count\": " + std::to_string(report.config.train_count) + ",\n";
    j += "    \"test_count\": " + std::to_string(report.config.test_count) + "\n";
    j += "  },\n";
    if (report.rho_s) {
        j += "  \"rho_s\": " + format_double(*report.rho_s) + ",\n";
    } else {
        j += "  \"rho_s\": \"degenerate\",\n";
    }
    j += "  \"m\": " + std::to_string(report.m) + ",\n";
    j += "  \"dropped\": " + std::to_string(report.dropped) + ",\n";
    j += "  \"records\": [";
    bool first = true;
    auto add_record = [&](int id, double u, double eps) {
        j += first ? "\n" : ",\n";
        first = false;
        j += "    {\"id\": " + std::to_string(id) + ", \"u\": " + format_double(u) +
             ", \"eps\": " + format_double(eps) + "}";
    };
    if (report.kind == "pointwise") {
        for (const auto& r : report.point_records) {
            add_record(r.landmark_id, r.u, r.eps);
        }
    } else {
        for (const auto& r : report.patch_records) {
            add_record(r.landmark_id, r.u_patch, r.eps_patch);
        }
    }
    j += first ? "]\n" : "\n  ]\n";
    j += "}\n";
    return j;
}

void write_report(const AssociationReport& report, const std::filesystem::path& path) {
    write_bytes(report_to_json(report), path);
}

AssociationReport read_report(const std::filesystem::path& path) {
    const std::string text = read_bytes(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw ParseError("'" + path.string() + "' has unsupported schema_version");
        }
        AssociationReport report;
        report.kind = j.at("kind").get<std::string>();
        if (report.kind != "pointwise" && report.kind != "patchwise") {
            throw ParseError("'" + path.string() + "' has unknown kind '" + report.kind + "'");
        }
        const auto& cfg = j.at("config");
        report.config.kernel_a = cfg.at("kernel_a").get<double>();
        report.config.jitter = cfg.at("jitter").get<double>();
        if (cfg.contains("k")) {
            report.config.k = cfg.at("k").get<int>();
        }
        if (cfg.contains("metric")) {
            report.config.metric = metric_from_name(cfg.at("metric").get<std::string>());
        }
        if (cfg.contains("bins")) {
            report.config.bins = cfg.at("bins").get<int>();
        }
        report.config.train_count = cfg.at("train_count").get<int>();
        report.config.test_count = cfg.at("test_count").get<int>();
        const auto& rho = j.at("rho_s");
        if (rho.is_number()) {
            report.rho_s = rho.get<double>();
        } else if (!(rho.is_string() && rho.get<std::string>() == "degenerate")) {
            throw ParseError("'" + path.string() + "' has a malformed rho_s");
        }
        report.m = j.at("m").get<int>();
        report.dropped = j.at("dropped").get<int>();
        for (const auto& rec : j.at("records")) {
            const int id = rec.at("id").get<int>();
            const double u = rec.at("u").get<double>();
            const double eps = rec.at("eps").get<double>();
            if (report.kind == "pointwise") {
                report.point_records.push_back(PointRecord{id, u, eps});
            } else {
                PatchRecord pr;
                pr.landmark_id = id;
                pr.u_patch = u;
                pr.eps_patch = eps;
                if (report.config.metric) {
                    pr.metric = *report.config.metric;
                }
                if (report.config.k) {
                    pr.k = *report.config.k;
                }
                report.patch_records.push_back(pr);
            }
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path.string() + "' is missing report fields: " + e.what());
    }
}

// --- rendering -----------------------------------------------------------------

Axis axis_from_name(const std::string& name) {
    if (name == "x" || name == "X") return Axis::X;
    if (name == "y" || name == "Y") return Axis::Y;
    if (name == "z" || name == "Z") return Axis::Z;
    throw ParseError("unknown axis '" + name + "', expected x, y, or z");
}

PpmImage render_uncertainty_slice(const DenseField& field, Axis axis, int index,
                                  double u_min, double u_max) {
    if (!(u_min < u_max)) {
        throw InvalidInput("slice color range needs u_min < u_max");
    }
    const Index3 g = field.grid_dims;
    int axis_extent = 0;
    PpmImage img;
    switch (axis) {
        case Axis::X: axis_extent = g.x; img.width = g.y; img.height = g.z; break;
        case Axis::Y: axis_extent = g.y; img.width = g.x; img.height = g.z; break;
        case Axis::Z: axis_extent = g.z; img.width = g.x; img.height = g.y; break;
    }
    if (index < 0 || index >= axis_extent) {
        throw OutOfBounds("slice index " + std::to_string(index) + " outside [0, " +
                          std::to_string(axis_extent - 1) + "]");
    }
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    std::size_t out = 0;
    for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
            std::size_t at = 0;
            switch (axis) {
                case Axis::X: at = field.index(index, col, row); break;
                case Axis::Y: at = field.index(col, index, row); break;
                case Axis::Z: at = field.index(col, row, index); break;
            }
            const double t =
                std::clamp((field.u[at] - u_min) / (u_max - u_min), 0.0, 1.0);
            img.rgb[out++] = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
            img.rgb[out++] = 0;
            img.rgb[out++] = static_cast<std::uint8_t>(std::lround(255.0 * t));
        }
    }
    return img;
}

std::string ppm_bytes(const PpmImage& image) {
    std::string bytes = "P6\n" + std::to_string(image.width) + " " +
                        std::to_string(image.height) + "\n255\n";
    bytes.append(reinterpret_cast<const char*>(image.rgb.data()), image.rgb.size());
    return bytes;
}

void write_ppm(const PpmImage& image, const std::filesystem::path& path) {
    write_bytes(ppm_bytes(image), path);
}

// --- config --------------------------------------------------------------------

Config Config::from_file(const std::filesystem::path& path) {
    return from_string(read_bytes(path));
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line " + std::to_string(line_no) +
                             ": expected 'key = value'");
        }
        const std::string_view key = trim(stripped.substr(0, eq));
        const std::string_view value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        }
        cfg.entries_[std::string(key)] = std::string(value);
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string Config::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw InvalidInput("missing config key '" + key + "'");
    }
    return it->second;
}

std::int64_t Config::get_int(const std::string& key) const {
    return parse_int(get_string(key), "config key '" + key + "'");
}

double Config::get_real(const std::string& key) const {
    return parse_double(get_string(key), "config key '" + key + "'");
}

Vec3 Config::get_vec3(const std::string& key) const {
    const std::string value = get_string(key);
    const auto parts = split(value, ',');
    if (parts.size() != 3) {
        throw ParseError("config key '" + key + "' needs 3 comma-separated values");
    }
    return Vec3(parse_double(trim(parts[0]), "config key '" + key + "'"),
                parse_double(trim(parts[1]), "config key '" + key + "'"),
                parse_double(trim(parts[2]), "config key '" + key + "'"));
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double Config::get_real(const std::string& key, double fallback) const {
    return has(key) ? get_real(key) : fallback;
}

Vec3 Config::get_vec3(const std::string& key, const Vec3& fallback) const {
    return has(key) ? get_vec3(key) : fallback;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::scientific, 16);
    if (ec != std::errc()) {
        throw InvalidInput("unformattable double");
    }
    return std::string(buf, ptr);
}

} // namespace uecorr
