#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stochgeo/geometry.hpp"
#include "stochgeo/stabilization.hpp"

namespace stochgeo {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind {
    OnngClt,
    MstClt,
    MstMultivariate,
    ComponentsClt,
    ShotnoiseClt,
    PsiDecay,
    RadiusTails,
    TwoArmFrequency,
};

std::string experiment_kind_name(ExperimentKind k);

/// Declarative Monte Carlo campaign. Flat, JSON-compatible; one experiment
/// per document; unknown keys are rejected.
struct ExperimentSpec {
    ExperimentKind experiment = ExperimentKind::MstClt;
    std::size_t dimension = 2;
    std::vector<double> n_list{8, 12, 16, 24, 32};
    double alpha = 0.5;        // inner scale exponent: b_n = n^alpha
    bool bn_equals_n = false;  // degenerate override for exact-zero tests
    std::size_t replicas = 200;
    std::uint64_t seed = 1;
    Shape base_shape = Shape::Cube;

    // edge weights
    std::string weight = "identity";  // identity | power:<a> | indicator_le:<r> | truncated_power:<a>:<r>
    std::vector<std::string> weights{"identity", "indicator_le:1.0"};  // multivariate coordinates

    // component count
    double radius = 0.8;

    // shot noise
    std::string kernel_family = "polynomial";  // polynomial | gaussian
    double kernel_cg = 1.0;
    double kernel_delta = 3.0;
    double kernel_amplitude = 1.0;
    double kernel_bandwidth = 1.0;
    double grid_h = 0.25;
    double test_lo = 0.05;
    double test_hi = 0.2;
    std::string shotnoise_statistic = "volume";  // volume | perimeter

    // psi / site handling
    std::string psi_functional = "component_count";
    std::size_t site_grid = 3;
    bool full_window_sites = false;

    // radius tails
    std::vector<double> thresholds{3, 4, 5, 6, 7};
    double probe_mark = 1.0;

    // two-arm campaign
    double wall_scale_factor = 0.27;  // wall cube side = factor * b_n

    std::string out_dir = "reports";
    std::string format = "csv";  // csv | json

    double inner_scale(double n) const;
    Region window(double n) const;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Parse/serialize. parse_spec rejects unknown keys and reports the
/// offending field on domain violations; emit_spec(parse_spec(t)) reparses
/// to an equal spec.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec parse_spec_json(const nlohmann::json& j);
nlohmann::json emit_spec(const ExperimentSpec& spec);

/// FNV-1a hash of the canonical spec serialization.
std::string spec_hash(const ExperimentSpec& spec);

/// Weight grammar shared by specs and the CLI:
/// identity | power:<a> | indicator_le:<r> | truncated_power:<a>:<r>
WeightFunction parse_weight_string(const std::string& text);

struct ReportRow {
    double n = 0.0;
    std::size_t replicas = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double var_per_volume = std::numeric_limits<double>::quiet_NaN();
    double d_k = std::numeric_limits<double>::quiet_NaN();
    double d_w = std::numeric_limits<double>::quiet_NaN();
    double psi_sup = std::numeric_limits<double>::quiet_NaN();
    std::string notes;
    std::vector<TailPoint> tail;      // radius-tail campaigns
    nlohmann::json extra;             // JSON-only structured extras (covariances, ...)
    double wall_ms = 0.0;             // display only, never serialized
};

struct Report {
    std::string experiment;
    std::string version = kVersion;
    std::uint64_t root_seed = 0;
    std::string hash;
    nlohmann::json spec_json;
    std::vector<ReportRow> rows;
};

/// Equality up to NaN == NaN (used by the round-trip contract).
bool reports_equivalent(const Report& a, const Report& b);

Report run_experiment(const ExperimentSpec& spec, std::size_t threads = 1);

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);
std::string report_to_csv(const Report& r);

/// Writes <experiment>_<hash8>.{csv|json} (and a _tails.csv sidecar when the
/// campaign produced tail tables) under out_dir; returns the paths written.
std::vector<std::filesystem::path> write_report(const Report& r, const std::string& format,
                                                const std::filesystem::path& out_dir);

/// Cached report lookup: a report file written by write_report is reused
/// only when its embedded hash matches the spec's.
std::optional<Report> load_cached_report(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

/// Fixed-point formatting contract: 17 significant digits, '.' separator.
std::string format_double(double v);

/// Lattice of `per_axis`^d sites covering `region` (cell-centered; sites
/// outside a ball region are dropped; degenerate regions yield the center).
std::vector<Point> make_site_grid(const Region& region, std::size_t per_axis);

}  // namespace stochgeo
