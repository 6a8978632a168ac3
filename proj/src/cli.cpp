// cli.cpp — Subcommand dispatch for the uecorr tool.
//
// Resolution order for every parameter is flag, then config key, then
// default. All inputs are loaded before the first byte of output is written,
// so a failing run leaves no partial output tree.

#include "uecorr/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "CLI11.hpp"

#include "uecorr/association.hpp"
#include "uecorr/errors.hpp"
#include "uecorr/gp.hpp"
#include "uecorr/io.hpp"
#include "uecorr/synth.hpp"
#include "uecorr/volume.hpp"

namespace uecorr {

namespace {

namespace fs = std::filesystem;

struct Opts {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<double> kernel_a;
    std::optional<double> jitter;
    std::optional<int> k;
    std::optional<std::string> metric;
    std::optional<int> bins;
    std::optional<int> stride;
    std::optional<std::string> train_path;
    std::optional<std::string> test_path;
    std::optional<std::string> volume_path;
};

Config load_config(const Opts& o) {
    if (o.config_path.empty()) {
        return Config();
    }
    return Config::from_file(o.config_path);
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + out + "': " + ec.message());
    }
    return dir;
}

std::string resolve_path(const std::optional<std::string>& flag, const Config& cfg,
                         const std::string& key, const std::string& flag_name) {
    if (flag) {
        return *flag;
    }
    if (cfg.has(key)) {
        return cfg.get_string(key);
    }
    throw ParseError("missing " + flag_name + " (or config key '" + key + "')");
}

double resolve_real(const std::optional<double>& flag, const Config& cfg,
                    const std::string& key, double fallback) {
    return flag ? *flag : cfg.get_real(key, fallback);
}

std::int64_t resolve_int(const std::optional<int>& flag, const Config& cfg,
                         const std::string& key, std::int64_t fallback) {
    return flag ? *flag : cfg.get_int(key, fallback);
}

std::uint64_t resolve_seed(const Opts& o, const Config& cfg) {
    if (o.seed) {
        return *o.seed;
    }
    return static_cast<std::uint64_t>(cfg.get_int("seed", 0));
}

/// Kernel parameters; `a` falls back to the median squared landmark distance.
KernelParams resolve_kernel(const Opts& o, const Config& cfg, const LandmarkSet& train) {
    KernelParams p;
    if (o.kernel_a) {
        p.a = *o.kernel_a;
    } else if (cfg.has("kernel_a")) {
        p.a = cfg.get_real("kernel_a");
    } else {
        p.a = median_squared_distance(train);
    }
    p.jitter = resolve_real(o.jitter, cfg, "jitter", 1e-8);
    return p;
}

Metric resolve_metric(const Opts& o, const Config& cfg) {
    const std::string name = o.metric ? *o.metric : cfg.get_string("metric", "ssd");
    if (name != "ssd" && name != "hi") {
        throw ParseError("metric must be 'ssd' or 'hi', got '" + name + "'");
    }
    return metric_from_name(name);
}

Index3 dims_from_config(const Config& cfg) {
    if (!cfg.has("dims")) {
        throw ParseError("missing config key 'dims' (e.g. dims = 64,64,64)");
    }
    const Vec3 v = cfg.get_vec3("dims");
    for (double c : {v.x, v.y, v.z}) {
        if (!(c > 0.0) || c != static_cast<double>(static_cast<int>(c)) || c > 65536.0) {
            throw ParseError("config key 'dims' needs positive integers");
        }
    }
    return Index3(static_cast<int>(v.x), static_cast<int>(v.y), static_cast<int>(v.z));
}

/// Bumps listed in the config (bump_count, bump{i}_center/amplitude/width),
/// or a seeded random field scaled to the volume when none are given.
DeformationSpec resolve_deformation(const Config& cfg, const Volume3D& vol,
                                    std::uint64_t seed) {
    DeformationSpec spec;
    if (cfg.has("bump_count")) {
        const std::int64_t n = cfg.get_int("bump_count");
        if (n < 0) {
            throw ParseError("config key 'bump_count' must be non-negative");
        }
        for (std::int64_t i = 0; i < n; ++i) {
            const std::string prefix = "bump" + std::to_string(i) + "_";
            DeformationBump bump;
            bump.center = cfg.get_vec3(prefix + "center");
            bump.amplitude = cfg.get_vec3(prefix + "amplitude");
            bump.width = cfg.get_real(prefix + "width");
            if (!(bump.width > 0.0)) {
                throw InvalidInput("config key '" + prefix + "width' must be positive");
            }
            spec.bumps.push_back(bump);
        }
        return spec;
    }
    const Vec3 extent = vol.spacing().scaled(Vec3(static_cast<double>(vol.dims().x - 1),
                                                  static_cast<double>(vol.dims().y - 1),
                                                  static_cast<double>(vol.dims().z - 1)));
    double ref = 0.0;
    for (double e : {extent.x, extent.y, extent.z}) {
        if (e > 0.0 && (ref == 0.0 || e < ref)) {
            ref = e;
        }
    }
    if (ref == 0.0) {
        ref = 1.0;
    }
    SeededRng rng(seed + 2);
    for (int i = 0; i < 3; ++i) {
        DeformationBump bump;
        bump.center = Vec3(rng.uniform(0.0, extent.x), rng.uniform(0.0, extent.y),
                           rng.uniform(0.0, extent.z));
        bump.amplitude = Vec3(rng.uniform(-0.05, 0.05) * ref, rng.uniform(-0.05, 0.05) * ref,
                              rng.uniform(-0.05, 0.05) * ref);
        bump.width = rng.uniform(0.15, 0.30) * ref;
        spec.bumps.push_back(bump);
    }
    return spec;
}

void note_report(const fs::path& path, const AssociationReport& report) {
    std::cout << "wrote " << path.string() << ": m=" << report.m
              << " dropped=" << report.dropped << " rho_s="
              << (report.rho_s ? format_double(*report.rho_s) : std::string("degenerate"))
              << "\n";
}

int cmd_synth(const Opts& o) {
    const Config cfg = load_config(o);
    const std::uint64_t seed = resolve_seed(o, cfg);

    PhantomSpec phantom;
    phantom.seed = seed;
    phantom.dims = dims_from_config(cfg);
    phantom.spacing = cfg.get_vec3("spacing", Vec3(1.0, 1.0, 1.0));
    phantom.blob_count = static_cast<int>(cfg.get_int("blobs", 6));
    phantom.noise_sigma = cfg.get_real("noise_sigma", 0.01);

    const int n_train = static_cast<int>(cfg.get_int("n_train", 100));
    const int n_test = static_cast<int>(cfg.get_int("n_test", 100));
    const int margin = static_cast<int>(cfg.get_int("margin", 2));

    const Volume3D fixed = make_phantom(phantom);
    const DeformationSpec deformation = resolve_deformation(cfg, fixed, seed);
    const WarpResult warped = warp_volume(fixed, deformation);
    const auto [train, test] =
        sample_landmarks(deformation, fixed, n_train, n_test, seed + 1, margin);

    const fs::path dir = ensure_out_dir(o.out_dir);
    write_volume(fixed, dir / "fixed.uev");
    write_volume(warped.volume, dir / "warped.uev");
    write_landmarks(train, dir / "train.csv");
    write_landmarks(test, dir / "test.csv");
    std::cout << "wrote " << (dir / "fixed.uev").string() << ", warped.uev, train.csv, "
              << "test.csv (oob fraction " << format_double(warped.oob_fraction) << ")\n";
    return kExitOk;
}

int cmd_pointwise(const Opts& o) {
    const Config cfg = load_config(o);
    std::optional<Volume3D> vol;
    if (o.volume_path || cfg.has("volume")) {
        vol = read_volume(resolve_path(o.volume_path, cfg, "volume", "--volume"));
    }
    const Volume3D* vol_ptr = vol ? &*vol : nullptr;
    const LandmarkSet train =
        read_landmarks(resolve_path(o.train_path, cfg, "train", "--train"), vol_ptr);
    const LandmarkSet test =
        read_landmarks(resolve_path(o.test_path, cfg, "test", "--test"), vol_ptr);
    const KernelParams params = resolve_kernel(o, cfg, train);

    const AssociationReport report = pointwise_experiment(train, test, params);

    const fs::path dir = ensure_out_dir(o.out_dir);
    const fs::path path = dir / "pointwise.json";
    write_report(report, path);
    note_report(path, report);
    return kExitOk;
}

int cmd_patchwise(const Opts& o) {
    const Config cfg = load_config(o);
    const Volume3D vol = read_volume(resolve_path(o.volume_path, cfg, "volume", "--volume"));
    const LandmarkSet train =
        read_landmarks(resolve_path(o.train_path, cfg, "train", "--train"), &vol);
    const LandmarkSet test =
        read_landmarks(resolve_path(o.test_path, cfg, "test", "--test"), &vol);
    const KernelParams params = resolve_kernel(o, cfg, train);
    const int k = static_cast<int>(resolve_int(o.k, cfg, "k", 3));
    const Metric metric = resolve_metric(o, cfg);
    const int bins = static_cast<int>(resolve_int(o.bins, cfg, "bins", 32));

    const AssociationReport report =
        patchwise_experiment(train, test, vol, params, k, metric, bins);

    const fs::path dir = ensure_out_dir(o.out_dir);
    const fs::path path =
        dir / ("patchwise_k" + std::to_string(k) + "_" + metric_name(metric) + ".json");
    write_report(report, path);
    note_report(path, report);
    return kExitOk;
}

int cmd_field(const Opts& o) {
    const Config cfg = load_config(o);
    const Volume3D vol = read_volume(resolve_path(o.volume_path, cfg, "volume", "--volume"));
    const LandmarkSet train =
        read_landmarks(resolve_path(o.train_path, cfg, "train", "--train"), &vol);
    const KernelParams params = resolve_kernel(o, cfg, train);
    const int stride = static_cast<int>(resolve_int(o.stride, cfg, "stride", 1));

    const GPModel model = gp_fit(train, params);
    const DenseField field = dense_field(model, vol, stride);

    const std::size_t n = field.u.size();
    std::vector<float> u(n);
    std::vector<float> dx(n);
    std::vector<float> dy(n);
    std::vector<float> dz(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = static_cast<float>(field.u[i]);
        dx[i] = static_cast<float>(field.mean[i].x);
        dy[i] = static_cast<float>(field.mean[i].y);
        dz[i] = static_cast<float>(field.mean[i].z);
    }
    double u_min = field.u[0];
    double u_max = field.u[0];
    for (double v : field.u) {
        u_min = std::min(u_min, v);
        u_max = std::max(u_max, v);
    }
    if (!(u_min < u_max)) {
        u_max = u_min + 1.0;
    }
    const PpmImage slice_x = render_uncertainty_slice(field, Axis::X, field.grid_dims.x / 2,
                                                      u_min, u_max);
    const PpmImage slice_y = render_uncertainty_slice(field, Axis::Y, field.grid_dims.y / 2,
                                                      u_min, u_max);
    const PpmImage slice_z = render_uncertainty_slice(field, Axis::Z, field.grid_dims.z / 2,
                                                      u_min, u_max);

    const fs::path dir = ensure_out_dir(o.out_dir);
    write_volume(Volume3D(field.grid_dims, field.spacing, field.origin, std::move(u)),
                 dir / "u.uev");
    write_volume(Volume3D(field.grid_dims, field.spacing, field.origin, std::move(dx)),
                 dir / "dx.uev");
    write_volume(Volume3D(field.grid_dims, field.spacing, field.origin, std::move(dy)),
                 dir / "dy.uev");
    write_volume(Volume3D(field.grid_dims, field.spacing, field.origin, std::move(dz)),
                 dir / "dz.uev");
    write_ppm(slice_x, dir / "slice_x.ppm");
    write_ppm(slice_y, dir / "slice_y.ppm");
    write_ppm(slice_z, dir / "slice_z.ppm");
    std::cout << "wrote u.uev, dx.uev, dy.uev, dz.uev and 3 slices to " << dir.string()
              << " (u range [" << format_double(u_min) << ", " << format_double(u_max)
              << "])\n";
    return kExitOk;
}

int cmd_sweep(const Opts& o) {
    const Config cfg = load_config(o);
    const Volume3D vol = read_volume(resolve_path(o.volume_path, cfg, "volume", "--volume"));
    const LandmarkSet train =
        read_landmarks(resolve_path(o.train_path, cfg, "train", "--train"), &vol);
    const LandmarkSet test =
        read_landmarks(resolve_path(o.test_path, cfg, "test", "--test"), &vol);
    const KernelParams params = resolve_kernel(o, cfg, train);
    const int bins = static_cast<int>(resolve_int(o.bins, cfg, "bins", 32));

    // Every report is computed before the first write.
    const AssociationReport point_report = pointwise_experiment(train, test, params);
    struct Entry {
        std::string name;
        AssociationReport report;
    };
    std::vector<Entry> patch_reports;
    for (int k : {3, 5}) {
        for (Metric metric : {Metric::SSD, Metric::HI}) {
            patch_reports.push_back(
                Entry{"patchwise_k" + std::to_string(k) + "_" + metric_name(metric) + ".json",
                      patchwise_experiment(train, test, vol, params, k, metric, bins)});
        }
    }

    const fs::path dir = ensure_out_dir(o.out_dir);
    write_report(point_report, dir / "pointwise.json");
    note_report(dir / "pointwise.json", point_report);
    for (const auto& entry : patch_reports) {
        write_report(entry.report, dir / entry.name);
        note_report(dir / entry.name, entry.report);
    }
    return kExitOk;
}

void add_common_options(CLI::App* cmd, Opts& o) {
    cmd->add_option("--config", o.config_path, "flat key = value config file");
    cmd->add_option("--out", o.out_dir, "output directory")->required();
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--kernel-a", o.kernel_a,
                    "squared kernel length scale a, mm^2 (default: median squared "
                    "landmark distance)");
    cmd->add_option("--jitter", o.jitter, "diagonal regularizer (default 1e-8)");
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Dense displacement interpolation with per-voxel uncertainty, and "
                 "uncertainty/error association experiments"};
    app.require_subcommand(1);

    Opts o;

    CLI::App* synth = app.add_subcommand(
        "synth", "Generate a phantom pair plus train/test landmark CSVs");
    add_common_options(synth, o);

    CLI::App* pointwise = app.add_subcommand(
        "pointwise", "Correlate per-landmark uncertainty with registration error");
    add_common_options(pointwise, o);
    pointwise->add_option("--train", o.train_path, "training landmark CSV");
    pointwise->add_option("--test", o.test_path, "held-out landmark CSV");
    pointwise->add_option("--volume", o.volume_path,
                          "reference volume (needed for voxel-unit CSV rows)");

    CLI::App* patchwise = app.add_subcommand(
        "patchwise", "Correlate patch uncertainty with patch dissimilarity");
    add_common_options(patchwise, o);
    patchwise->add_option("--train", o.train_path, "training landmark CSV");
    patchwise->add_option("--test", o.test_path, "held-out landmark CSV");
    patchwise->add_option("--volume", o.volume_path, "fixed intensity volume");
    patchwise->add_option("--k", o.k, "patch half-width in voxels (default 3)");
    patchwise->add_option("--metric", o.metric, "patch dissimilarity: ssd or hi")
        ->check(CLI::IsMember({"ssd", "hi"}));
    patchwise->add_option("--bins", o.bins, "histogram bins for hi (default 32)");

    CLI::App* field = app.add_subcommand(
        "field", "Emit the dense displacement/uncertainty field and slice renders");
    add_common_options(field, o);
    field->add_option("--train", o.train_path, "training landmark CSV");
    field->add_option("--volume", o.volume_path, "volume defining the prediction grid");
    field->add_option("--stride", o.stride, "voxel stride between grid points (default 1)");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Run the point-wise experiment plus patch-wise k in {3,5} x {ssd,hi}");
    add_common_options(sweep, o);
    sweep->add_option("--train", o.train_path, "training landmark CSV");
    sweep->add_option("--test", o.test_path, "held-out landmark CSV");
    sweep->add_option("--volume", o.volume_path, "fixed intensity volume");
    sweep->add_option("--bins", o.bins, "histogram bins for hi (default 32)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "uecorr: error: ParseError: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        if (synth->parsed()) return cmd_synth(o);
        if (pointwise->parsed()) return cmd_pointwise(o);
        if (patchwise->parsed()) return cmd_patchwise(o);
        if (field->parsed()) return cmd_field(o);
        return cmd_sweep(o);
    } catch (const Error& e) {
        std::cerr << "uecorr: error: " << e.kind() << ": " << e.what() << "\n";
        switch (e.category()) {
            case ErrorCategory::Parse: return kExitParse;
            case ErrorCategory::Io: return kExitIo;
            case ErrorCategory::Numeric: return kExitNumeric;
        }
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "uecorr: error: InternalError: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace uecorr
