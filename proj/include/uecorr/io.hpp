// io.hpp — File formats, report serialization, and slice rendering.
//
// Formats:
//   .uev volumes — magic "UEV1", dims 3xu32 LE, spacing 3xf32 LE,
//                  origin 3xf32 LE, then f32 LE voxels x-fastest.
//   landmark CSV — header `id,unit,x,y,z,dx,dy,dz`, unit per row in
//                  {mm, voxel}; voxel rows are converted to mm on load
//                  using the paired volume's spacing and origin.
//   report JSON  — schema-versioned association reports; numbers carry 17
//                  significant digits so round-trips are value-exact.
//   PPM P6       — uncertainty slices under a linear red (low) to blue
//                  (high) colormap.
// All writers are byte-deterministic for identical inputs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uecorr/association.hpp"
#include "uecorr/gp.hpp"
#include "uecorr/volume.hpp"

namespace uecorr {

// --- volumes ---------------------------------------------------------------

void write_volume(const Volume3D& vol, const std::filesystem::path& path);
Volume3D read_volume(const std::filesystem::path& path);

// --- landmarks -------------------------------------------------------------

/// Writes canonical mm rows. parse(serialize(s)) == s.
void write_landmarks(const LandmarkSet& set, const std::filesystem::path& path);

/// Loads a landmark CSV. Rows with unit "voxel" require `vol` for the
/// conversion x_mm = origin + spacing*x_vox, d_mm = spacing*d_vox; loading
/// such a row without a volume throws InvalidInput. Malformed text throws
/// ParseError, missing files IoError.
LandmarkSet read_landmarks(const std::filesystem::path& path, const Volume3D* vol = nullptr);

// --- reports ---------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

std::string report_to_json(const AssociationReport& report);
void write_report(const AssociationReport& report, const std::filesystem::path& path);
AssociationReport read_report(const std::filesystem::path& path);

// --- rendering -------------------------------------------------------------

enum class Axis { X, Y, Z };

Axis axis_from_name(const std::string& name);

struct PpmImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major
};

/// Extracts the field slice at `index` along `axis` and maps u linearly from
/// red (255,0,0) at u_min to blue (0,0,255) at u_max, clamping outside
/// values. Throws OutOfBounds for a bad index, InvalidInput if u_min >= u_max.
PpmImage render_uncertainty_slice(const DenseField& field, Axis axis, int index,
                                  double u_min, double u_max);

std::string ppm_bytes(const PpmImage& image);
void write_ppm(const PpmImage& image, const std::filesystem::path& path);

// --- flat key=value config ---------------------------------------------

/// Flat `key = value` text: one pair per line, `#` comments, blank lines
/// ignored. Typed getters throw ParseError on malformed values and
/// InvalidInput on missing required keys.
class Config {
public:
    Config() = default;
    static Config from_file(const std::filesystem::path& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_real(const std::string& key) const;
    Vec3 get_vec3(const std::string& key) const;         // "x,y,z"

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_real(const std::string& key, double fallback) const;
    Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Locale-independent float formatting used by every writer: scientific
/// notation with 17 significant digits, round-trip exact.
std::string format_double(double v);

} // namespace uecorr
