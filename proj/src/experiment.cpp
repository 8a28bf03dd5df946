#include "stochgeo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "stochgeo/parallel.hpp"
#include "stochgeo/stats.hpp"

namespace stochgeo {

namespace {

const std::map<std::string, ExperimentKind>& kind_table() {
    static const std::map<std::string, ExperimentKind> table{
        {"onng_clt", ExperimentKind::OnngClt},
        {"mst_clt", ExperimentKind::MstClt},
        {"mst_multivariate", ExperimentKind::MstMultivariate},
        {"components_clt", ExperimentKind::ComponentsClt},
        {"shotnoise_clt", ExperimentKind::ShotnoiseClt},
        {"psi_decay", ExperimentKind::PsiDecay},
        {"radius_tails", ExperimentKind::RadiusTails},
        {"two_arm_frequency", ExperimentKind::TwoArmFrequency},
    };
    return table;
}

[[noreturn]] void spec_error(const std::string& field, const std::string& why) {
    throw std::invalid_argument("experiment spec: " + field + ": " + why);
}

WeightFunction parse_weight(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.empty()) spec_error("weight", "empty weight");
    try {
        if (parts[0] == "identity" && parts.size() == 1) return WeightFunction::identity();
        if (parts[0] == "power" && parts.size() == 2) return WeightFunction::power(std::stod(parts[1]));
        if (parts[0] == "indicator_le" && parts.size() == 2)
            return WeightFunction::indicator_le(std::stod(parts[1]));
        if (parts[0] == "truncated_power" && parts.size() == 3)
            return WeightFunction::truncated_power(std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::exception&) {
        spec_error("weight", "bad numeric parameter in '" + text + "'");
    }
    spec_error("weight", "unknown weight '" + text + "'");
}

KernelSpec parse_kernel(const ExperimentSpec& s) {
    if (s.kernel_family == "polynomial")
        return KernelSpec::polynomial_decay(s.kernel_cg, s.kernel_delta, s.dimension);
    if (s.kernel_family == "gaussian") return KernelSpec::gaussian(s.kernel_amplitude, s.kernel_bandwidth);
    spec_error("kernel_family", "must be polynomial or gaussian");
}

}  // namespace

WeightFunction parse_weight_string(const std::string& text) { return parse_weight(text); }

std::string experiment_kind_name(ExperimentKind k) {
    for (const auto& [name, kind] : kind_table())
        if (kind == k) return name;
    return "?";
}

double ExperimentSpec::inner_scale(double n) const { return bn_equals_n ? n : std::pow(n, alpha); }

Region ExperimentSpec::window(double n) const {
    return Region(base_shape, Point(dimension, 0.0), n);
}

// ---------------------------------------------------------------------------
// Parsing

ExperimentSpec parse_spec(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("experiment spec: syntax error: ") + e.what());
    }
    return parse_spec_json(j);
}

ExperimentSpec parse_spec_json(const nlohmann::json& j) {
    if (!j.is_object()) spec_error("document", "must be a JSON object");
    ExperimentSpec s;
    std::vector<std::string> known;
    auto claim = [&](const char* key) {
        known.push_back(key);
        return j.contains(key);
    };
    auto get_double = [&](const char* key, double& out) {
        if (!claim(key)) return;
        if (!j.at(key).is_number()) spec_error(key, "must be a number");
        out = j.at(key).get<double>();
    };
    auto get_size = [&](const char* key, std::size_t& out) {
        if (!claim(key)) return;
        if (!j.at(key).is_number_unsigned()) spec_error(key, "must be a nonnegative integer");
        out = j.at(key).get<std::size_t>();
    };
    auto get_string = [&](const char* key, std::string& out) {
        if (!claim(key)) return;
        if (!j.at(key).is_string()) spec_error(key, "must be a string");
        out = j.at(key).get<std::string>();
    };
    auto get_bool = [&](const char* key, bool& out) {
        if (!claim(key)) return;
        if (!j.at(key).is_boolean()) spec_error(key, "must be a boolean");
        out = j.at(key).get<bool>();
    };
    auto get_double_list = [&](const char* key, std::vector<double>& out) {
        if (!claim(key)) return;
        if (!j.at(key).is_array()) spec_error(key, "must be an array of numbers");
        out.clear();
        for (const auto& v : j.at(key)) {
            if (!v.is_number()) spec_error(key, "must be an array of numbers");
            out.push_back(v.get<double>());
        }
    };

    std::string kind_name;
    if (!claim("experiment")) spec_error("experiment", "required");
    if (!j.at("experiment").is_string()) spec_error("experiment", "must be a string");
    kind_name = j.at("experiment").get<std::string>();
    auto it = kind_table().find(kind_name);
    if (it == kind_table().end()) spec_error("experiment", "unknown experiment '" + kind_name + "'");
    s.experiment = it->second;

    get_size("dimension", s.dimension);
    get_double_list("n_list", s.n_list);
    get_double("alpha", s.alpha);
    get_bool("bn_equals_n", s.bn_equals_n);
    get_size("replicas", s.replicas);
    if (claim("seed")) {
        if (!j.at("seed").is_number_unsigned()) spec_error("seed", "must be a nonnegative integer");
        s.seed = j.at("seed").get<std::uint64_t>();
    }
    std::string shape = "cube";
    get_string("base_shape", shape);
    if (shape == "cube")
        s.base_shape = Shape::Cube;
    else if (shape == "ball")
        s.base_shape = Shape::Ball;
    else
        spec_error("base_shape", "must be cube or ball");

    get_string("weight", s.weight);
    if (claim("weights")) {
        if (!j.at("weights").is_array()) spec_error("weights", "must be an array of weight strings");
        s.weights.clear();
        for (const auto& v : j.at("weights")) {
            if (!v.is_string()) spec_error("weights", "must be an array of weight strings");
            s.weights.push_back(v.get<std::string>());
        }
    }
    get_double("radius", s.radius);
    get_string("kernel_family", s.kernel_family);
    get_double("kernel_cg", s.kernel_cg);
    get_double("kernel_delta", s.kernel_delta);
    get_double("kernel_amplitude", s.kernel_amplitude);
    get_double("kernel_bandwidth", s.kernel_bandwidth);
    get_double("grid_h", s.grid_h);
    get_double("test_lo", s.test_lo);
    get_double("test_hi", s.test_hi);
    get_string("shotnoise_statistic", s.shotnoise_statistic);
    get_size("site_grid", s.site_grid);
    get_bool("full_window_sites", s.full_window_sites);
    get_double_list("thresholds", s.thresholds);
    get_double("probe_mark", s.probe_mark);
    get_double("wall_scale_factor", s.wall_scale_factor);
    get_string("out_dir", s.out_dir);
    get_string("format", s.format);
    get_string("functional", s.psi_functional);

    for (auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            spec_error(key, "unknown key");
    }

    // Domain validation.
    if (s.dimension < 1 || s.dimension > 3) spec_error("dimension", "must be 1, 2 or 3");
    for (std::size_t i = 0; i + 1 < s.n_list.size(); ++i)
        if (!(s.n_list[i] < s.n_list[i + 1])) spec_error("n_list", "window scales must be strictly increasing");
    for (double n : s.n_list)
        if (!(n > 0.0)) spec_error("n_list", "window scales must be positive");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) spec_error("inner scale exponent", "must lie in (0,1)");
    if (s.replicas < 30) spec_error("replicas", "must be at least 30");
    if (!(s.radius > 0.0)) spec_error("radius", "must be positive");
    if (!(s.grid_h > 0.0)) spec_error("grid_h", "must be positive");
    if (!(s.test_hi > s.test_lo)) spec_error("test_hi", "must exceed test_lo");
    if (s.shotnoise_statistic != "volume" && s.shotnoise_statistic != "perimeter")
        spec_error("shotnoise_statistic", "must be volume or perimeter");
    if (s.site_grid < 1) spec_error("site_grid", "must be at least 1");
    if (s.thresholds.empty()) spec_error("thresholds", "must not be empty");
    if (!(s.probe_mark > 0.0 && s.probe_mark <= 1.0)) spec_error("probe_mark", "must lie in (0,1]");
    if (!(s.wall_scale_factor > 0.0)) spec_error("wall_scale_factor", "must be positive");
    if (s.format != "csv" && s.format != "json") spec_error("format", "must be csv or json");
    parse_weight(s.weight);
    for (const auto& w : s.weights) parse_weight(w);
    if (s.kernel_family == "polynomial" && !(s.kernel_delta > static_cast<double>(s.dimension)))
        spec_error("kernel_delta", "must exceed the dimension");
    return s;
}

nlohmann::json emit_spec(const ExperimentSpec& s) {
    nlohmann::json j;
    j["experiment"] = experiment_kind_name(s.experiment);
    j["dimension"] = s.dimension;
    j["n_list"] = s.n_list;
    j["alpha"] = s.alpha;
    j["bn_equals_n"] = s.bn_equals_n;
    j["replicas"] = s.replicas;
    j["seed"] = s.seed;
    j["base_shape"] = s.base_shape == Shape::Cube ? "cube" : "ball";
    j["weight"] = s.weight;
    j["weights"] = s.weights;
    j["radius"] = s.radius;
    j["kernel_family"] = s.kernel_family;
    j["kernel_cg"] = s.kernel_cg;
    j["kernel_delta"] = s.kernel_delta;
    j["kernel_amplitude"] = s.kernel_amplitude;
    j["kernel_bandwidth"] = s.kernel_bandwidth;
    j["grid_h"] = s.grid_h;
    j["test_lo"] = s.test_lo;
    j["test_hi"] = s.test_hi;
    j["shotnoise_statistic"] = s.shotnoise_statistic;
    j["site_grid"] = s.site_grid;
    j["full_window_sites"] = s.full_window_sites;
    j["thresholds"] = s.thresholds;
    j["probe_mark"] = s.probe_mark;
    j["wall_scale_factor"] = s.wall_scale_factor;
    j["out_dir"] = s.out_dir;
    j["format"] = s.format;
    j["functional"] = s.psi_functional;
    return j;
}

std::string spec_hash(const ExperimentSpec& spec) {
    const std::string canon = emit_spec(spec).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<Point> make_site_grid(const Region& region, std::size_t per_axis) {
    const std::size_t d = region.dim();
    std::vector<Point> sites;
    std::vector<std::size_t> counter(d, 0);
    const double step = 2.0 * region.scale / static_cast<double>(per_axis);
    for (;;) {
        Point p(d);
        for (std::size_t a = 0; a < d; ++a)
            p[a] = region.center[a] - region.scale + (static_cast<double>(counter[a]) + 0.5) * step;
        if (region.contains(p)) sites.push_back(std::move(p));
        std::size_t carry = 0;
        while (carry < d) {
            if (++counter[carry] < per_axis) break;
            counter[carry] = 0;
            ++carry;
        }
        if (carry == d) break;
    }
    if (sites.empty()) sites.push_back(region.center);
    return sites;
}

// ---------------------------------------------------------------------------
// Campaign runners

namespace {

struct RowStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double variance = std::numeric_limits<double>::quiet_NaN();
    double d_k = std::numeric_limits<double>::quiet_NaN();
    double d_w = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

RowStats summarize(const std::vector<double>& values) {
    RowStats rs;
    rs.mean = mean_of(values);
    rs.variance = variance_of(values);
    if (rs.variance > 0.0) {
        SampleSet std_sample = standardize(SampleSet{values, ""});
        rs.d_k = empirical_dk(std_sample);
        rs.d_w = empirical_dw(std_sample);
    } else {
        rs.note = "degenerate sample";
    }
    return rs;
}

SeedState replica_seed(const ExperimentSpec& spec, std::size_t n_index, std::size_t replica) {
    SeedState root{spec.seed, 0};
    return root.substream(0x10000ULL * (n_index + 1)).substream(replica);
}

[[noreturn]] void replica_failure(const ExperimentSpec& spec, std::size_t n_index, std::size_t replica,
                                  const std::exception& e) {
    throw std::runtime_error("replica " + std::to_string(replica) + " (n=" +
                             format_double(spec.n_list[n_index]) + ", stream=" +
                             std::to_string(replica_seed(spec, n_index, replica).stream_index) +
                             ") failed: " + e.what());
}

FunctionalSpec campaign_functional(const ExperimentSpec& spec, const std::string& name) {
    if (name == "mst_length") return FunctionalSpec::mst_length_spec(parse_weight(spec.weight));
    if (name == "onng_length") return FunctionalSpec::onng_length_spec(parse_weight(spec.weight));
    if (name == "component_count") return FunctionalSpec::component_count_spec(spec.radius);
    if (name == "excursion_volume")
        return FunctionalSpec::excursion_volume_spec(parse_kernel(spec), SmoothTest(spec.test_lo, spec.test_hi),
                                                     spec.grid_h);
    if (name == "excursion_perimeter")
        return FunctionalSpec::excursion_perimeter_spec(parse_kernel(spec), SmoothTest(spec.test_lo, spec.test_hi),
                                                        spec.grid_h);
    spec_error("functional", "unknown functional '" + name + "'");
}

/// One scalar functional, one value per replica, CLT summary per n.
void run_scalar_clt(const ExperimentSpec& spec, const FunctionalSpec& f, std::size_t threads, Report& report) {
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        const Region window = spec.window(n);
        std::vector<double> values(spec.replicas, 0.0);
        run_indexed_tasks(spec.replicas, threads, [&](std::size_t r) {
            try {
                const SeedState sd = replica_seed(spec, ni, r);
                PointConfiguration config =
                    f.required_marks() == MarkKind::None
                        ? sample_poisson(window, 1.0, sd)
                        : sample_marked_poisson(window, 1.0, f.required_marks(), sd);
                values[r] = f.evaluate(config, Window(window));
            } catch (const std::exception& e) {
                replica_failure(spec, ni, r, e);
            }
        });
        RowStats rs = summarize(values);
        ReportRow row;
        row.n = n;
        row.replicas = spec.replicas;
        row.mean = rs.mean;
        row.variance = rs.variance;
        row.var_per_volume = rs.variance / window.volume();
        row.d_k = rs.d_k;
        row.d_w = rs.d_w;
        row.notes = rs.note;
        report.rows.push_back(std::move(row));
    }
}

void run_mst_multivariate(const ExperimentSpec& spec, std::size_t threads, Report& report) {
    std::vector<FunctionalSpec> fs;
    for (const auto& w : spec.weights) fs.push_back(FunctionalSpec::mst_length_spec(parse_weight(w)));
    const std::size_t m = fs.size();
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        const Region window = spec.window(n);
        std::vector<double> values(spec.replicas * m, 0.0);
        run_indexed_tasks(spec.replicas, threads, [&](std::size_t r) {
            try {
                const SeedState sd = replica_seed(spec, ni, r);
                PointConfiguration config = sample_poisson(window, 1.0, sd);
                // One MST per replica serves every weight coordinate.
                PointConfiguration local = restrict_to(config, Window(window));
                WeightedTree tree = build_mst_kruskal(local);
                for (std::size_t c = 0; c < m; ++c) values[r * m + c] = mst_length(tree, fs[c].weight);
            } catch (const std::exception& e) {
                replica_failure(spec, ni, r, e);
            }
        });
        VectorSampleSet vs;
        vs.m = m;
        vs.rows = values;
        CovarianceEstimate cov = covariance_matrix(vs);
        for (std::size_t c = 0; c < m; ++c) {
            std::vector<double> coord(spec.replicas);
            for (std::size_t r = 0; r < spec.replicas; ++r) coord[r] = values[r * m + c];
            RowStats rs = summarize(coord);
            ReportRow row;
            row.n = n;
            row.replicas = spec.replicas;
            row.mean = rs.mean;
            row.variance = rs.variance;
            row.var_per_volume = rs.variance / window.volume();
            row.d_k = rs.d_k;
            row.d_w = rs.d_w;
            row.notes = "coord=" + spec.weights[c] + (rs.note.empty() ? "" : ";" + rs.note);
            if (c == 0) {
                nlohmann::json extra;
                nlohmann::json matrix = nlohmann::json::array();
                for (std::size_t i = 0; i < m; ++i) {
                    nlohmann::json rowj = nlohmann::json::array();
                    for (std::size_t jj = 0; jj < m; ++jj) rowj.push_back(cov.at(i, jj) / window.volume());
                    matrix.push_back(rowj);
                }
                extra["cov_per_volume"] = matrix;
                extra["min_eigenvalue"] = cov.min_eigenvalue;
                extra["psd_within_floor"] = cov.psd_within_floor;
                row.extra = std::move(extra);
            }
            report.rows.push_back(std::move(row));
        }
    }
}

void run_psi_decay(const ExperimentSpec& spec, std::size_t threads, Report& report) {
    FunctionalSpec f = campaign_functional(spec, spec.psi_functional);
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        TwoScalePair pair(spec.window(n), spec.inner_scale(n));
        const Region site_region = spec.full_window_sites ? pair.outer : pair.shrunk_site_region();
        std::vector<Point> sites = make_site_grid(site_region, spec.site_grid);
        DiscrepancyEstimate est = estimate_psi(f, pair, sites, spec.replicas,
                                               SeedState{spec.seed, 0}.substream(0x10000ULL * (ni + 1)), threads,
                                               !spec.full_window_sites);
        double mean_of_means = 0.0, max_se = 0.0;
        for (const auto& s : est.per_site) {
            mean_of_means += s.mean;
            max_se = std::max(max_se, s.std_error);
        }
        mean_of_means /= static_cast<double>(est.per_site.size());
        ReportRow row;
        row.n = n;
        row.replicas = spec.replicas;
        row.mean = mean_of_means;
        row.psi_sup = est.sup_estimate;
        row.notes = "sites=" + std::to_string(est.per_site.size()) + ";b_n=" + format_double(pair.inner_scale) +
                    ";max_se=" + format_double(max_se);
        report.rows.push_back(std::move(row));
    }
}

void run_radius_tails(const ExperimentSpec& spec, std::size_t threads, Report& report) {
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        const Region window = spec.window(n);
        const Point site = window.center;
        std::vector<double> values(spec.replicas, 0.0);
        std::vector<char> censored(spec.replicas, 0);
        run_indexed_tasks(spec.replicas, threads, [&](std::size_t r) {
            try {
                const SeedState sd = replica_seed(spec, ni, r);
                PointConfiguration config = sample_marked_poisson(window, 1.0, MarkKind::Time, sd);
                const double radius = onng_stabilization_radius(config, site, spec.probe_mark);
                if (radius == kCensored) {
                    values[r] = 2.0 * window.boundary_distance(site);
                    censored[r] = 1;
                } else {
                    values[r] = radius;
                }
            } catch (const std::exception& e) {
                replica_failure(spec, ni, r, e);
            }
        });
        RadiusSample sample;
        for (std::size_t r = 0; r < spec.replicas; ++r) sample.add(values[r], censored[r] != 0);
        ReportRow row;
        row.n = n;
        row.replicas = spec.replicas;
        std::vector<double> uncensored;
        for (std::size_t r = 0; r < spec.replicas; ++r)
            if (!censored[r]) uncensored.push_back(values[r]);
        row.mean = mean_of(uncensored);
        row.variance = variance_of(uncensored);
        row.tail = estimate_radius_tail(sample, spec.thresholds);
        row.notes = "censored=" + std::to_string(spec.replicas - uncensored.size()) +
                    ";probe_mark=" + format_double(spec.probe_mark);
        report.rows.push_back(std::move(row));
    }
}

void run_two_arm_frequency(const ExperimentSpec& spec, std::size_t threads, Report& report) {
    const double sqrt_d = std::sqrt(static_cast<double>(spec.dimension));
    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        const Region window = spec.window(n);
        const double b = spec.inner_scale(n);
        const double a = spec.wall_scale_factor * b;
        const double inner_hs = (1.0 + 2.0 * sqrt_d) * a / 2.0;
        const double outer_hs = b - sqrt_d * a;
        if (!(inner_hs < outer_hs))
            spec_error("wall_scale_factor", "two-arm annulus is empty at n=" + format_double(n));
        TwoScalePair pair(window, b);

        // Paired candidate-restricted runs keep the new vertex's tree
        // neighbours inside the wall cube by construction, which is what the
        // removed-edge comparison and the two-arm inclusion rest on; the wall
        // event itself is only counted as a diagnostic.
        struct ReplicaTally {
            char wall = 0;
            std::uint32_t mismatches = 0;
            std::uint32_t fired = 0;
            std::uint32_t order_violations = 0;  // removed edge longer at the global scale
        };
        std::vector<ReplicaTally> tally(spec.replicas);
        const Point site = window.center;
        run_indexed_tasks(spec.replicas, threads, [&](std::size_t r) {
            try {
                const SeedState sd = replica_seed(spec, ni, r);
                PointConfiguration config = sample_poisson(window, 1.0, sd);
                if (wall_event(config, site, a, window)) tally[r].wall = 1;
                PairedTraces traces = mst_paired_traces(config, site, a, pair);
                const std::size_t steps = std::min(traces.outer_trace.steps.size(), traces.inner_trace.steps.size());
                const Region inner_cube = Region::cube(site, inner_hs);
                const Region outer_cube = Region::cube(site, outer_hs);
                for (std::size_t i = 1; i < steps; ++i) {
                    const double f_big = traces.outer_trace.steps[i].removed.length;
                    const double f_small = traces.inner_trace.steps[i].removed.length;
                    if (f_big > f_small) ++tally[r].order_violations;
                    if (f_big < f_small) {
                        ++tally[r].mismatches;
                        const double u = 0.5 * (f_big + f_small);
                        if (two_arm_event_boolean(config, inner_cube, outer_cube, u)) ++tally[r].fired;
                    }
                }
            } catch (const std::exception& e) {
                replica_failure(spec, ni, r, e);
            }
        });
        std::size_t walls = 0, mismatch_replicas = 0, mismatches = 0, fired = 0, order_violations = 0;
        for (const auto& t : tally) {
            walls += t.wall;
            mismatches += t.mismatches;
            fired += t.fired;
            order_violations += t.order_violations;
            if (t.mismatches > 0) ++mismatch_replicas;
        }
        ReportRow row;
        row.n = n;
        row.replicas = spec.replicas;
        row.mean = static_cast<double>(mismatch_replicas) / static_cast<double>(spec.replicas);
        row.notes = "walls=" + std::to_string(walls) + ";mismatch_steps=" + std::to_string(mismatches) +
                    ";two_arm_fired=" + std::to_string(fired) +
                    ";counterexamples=" + std::to_string(mismatches - fired) +
                    ";order_violations=" + std::to_string(order_violations) + ";wall_scale=" + format_double(a);
        report.rows.push_back(std::move(row));
    }
}

}  // namespace

Report run_experiment(const ExperimentSpec& spec, std::size_t threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    Report report;
    report.experiment = experiment_kind_name(spec.experiment);
    report.root_seed = spec.seed;
    report.hash = spec_hash(spec);
    report.spec_json = emit_spec(spec);

    switch (spec.experiment) {
        case ExperimentKind::OnngClt:
            run_scalar_clt(spec, campaign_functional(spec, "onng_length"), threads, report);
            break;
        case ExperimentKind::MstClt:
            run_scalar_clt(spec, campaign_functional(spec, "mst_length"), threads, report);
            break;
        case ExperimentKind::ComponentsClt:
            run_scalar_clt(spec, campaign_functional(spec, "component_count"), threads, report);
            break;
        case ExperimentKind::ShotnoiseClt:
            run_scalar_clt(spec,
                           campaign_functional(spec, spec.shotnoise_statistic == "volume" ? "excursion_volume"
                                                                                          : "excursion_perimeter"),
                           threads, report);
            break;
        case ExperimentKind::MstMultivariate:
            run_mst_multivariate(spec, threads, report);
            break;
        case ExperimentKind::PsiDecay:
            run_psi_decay(spec, threads, report);
            break;
        case ExperimentKind::RadiusTails:
            run_radius_tails(spec, threads, report);
            break;
        case ExperimentKind::TwoArmFrequency:
            run_two_arm_frequency(spec, threads, report);
            break;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double null_or_num(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return j.get<double>();
}

std::string csv_field(double v) { return std::isnan(v) ? "" : format_double(v); }

bool same_value(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["metadata"] = {{"experiment", r.experiment},
                     {"version", r.version},
                     {"root_seed", r.root_seed},
                     {"spec_hash", r.hash},
                     {"spec", r.spec_json}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json rj;
        rj["n"] = row.n;
        rj["replicas"] = row.replicas;
        rj["mean"] = num_or_null(row.mean);
        rj["variance"] = num_or_null(row.variance);
        rj["var_per_volume"] = num_or_null(row.var_per_volume);
        rj["d_k"] = num_or_null(row.d_k);
        rj["d_w"] = num_or_null(row.d_w);
        rj["psi_sup"] = num_or_null(row.psi_sup);
        rj["notes"] = row.notes;
        if (!row.tail.empty()) {
            nlohmann::json tails = nlohmann::json::array();
            for (const auto& tp : row.tail)
                tails.push_back({{"threshold", tp.threshold}, {"survival", tp.survival}, {"std_error", tp.std_error}});
            rj["tail"] = tails;
        }
        if (!row.extra.is_null()) rj["extra"] = row.extra;
        rows.push_back(rj);
    }
    j["rows"] = rows;
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    const auto& meta = j.at("metadata");
    r.experiment = meta.at("experiment").get<std::string>();
    r.version = meta.at("version").get<std::string>();
    r.root_seed = meta.at("root_seed").get<std::uint64_t>();
    r.hash = meta.at("spec_hash").get<std::string>();
    r.spec_json = meta.at("spec");
    for (const auto& rj : j.at("rows")) {
        ReportRow row;
        row.n = rj.at("n").get<double>();
        row.replicas = rj.at("replicas").get<std::size_t>();
        row.mean = null_or_num(rj.at("mean"));
        row.variance = null_or_num(rj.at("variance"));
        row.var_per_volume = null_or_num(rj.at("var_per_volume"));
        row.d_k = null_or_num(rj.at("d_k"));
        row.d_w = null_or_num(rj.at("d_w"));
        row.psi_sup = null_or_num(rj.at("psi_sup"));
        row.notes = rj.at("notes").get<std::string>();
        if (rj.contains("tail"))
            for (const auto& tj : rj.at("tail"))
                row.tail.push_back(TailPoint{tj.at("threshold").get<double>(), tj.at("survival").get<double>(),
                                             tj.at("std_error").get<double>()});
        if (rj.contains("extra")) row.extra = rj.at("extra");
        r.rows.push_back(std::move(row));
    }
    return r;
}

bool reports_equivalent(const Report& a, const Report& b) {
    if (a.experiment != b.experiment || a.version != b.version || a.root_seed != b.root_seed || a.hash != b.hash ||
        a.spec_json != b.spec_json || a.rows.size() != b.rows.size())
        return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (!same_value(x.n, y.n) || x.replicas != y.replicas || !same_value(x.mean, y.mean) ||
            !same_value(x.variance, y.variance) || !same_value(x.var_per_volume, y.var_per_volume) ||
            !same_value(x.d_k, y.d_k) || !same_value(x.d_w, y.d_w) || !same_value(x.psi_sup, y.psi_sup) ||
            x.notes != y.notes || x.tail.size() != y.tail.size() || x.extra != y.extra)
            return false;
        for (std::size_t t = 0; t < x.tail.size(); ++t)
            if (x.tail[t].threshold != y.tail[t].threshold || x.tail[t].survival != y.tail[t].survival ||
                x.tail[t].std_error != y.tail[t].std_error)
                return false;
    }
    return true;
}

std::string report_to_csv(const Report& r) {
    std::string out = "experiment,n,replicas,mean,variance,var_per_volume,d_k,d_w,psi_sup,notes\n";
    for (const auto& row : r.rows) {
        out += r.experiment;
        out += ',' + csv_field(row.n);
        out += ',' + std::to_string(row.replicas);
        out += ',' + csv_field(row.mean);
        out += ',' + csv_field(row.variance);
        out += ',' + csv_field(row.var_per_volume);
        out += ',' + csv_field(row.d_k);
        out += ',' + csv_field(row.d_w);
        out += ',' + csv_field(row.psi_sup);
        out += ',' + row.notes;
        out += '\n';
    }
    return out;
}

std::vector<std::filesystem::path> write_report(const Report& r, const std::string& format,
                                                const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    const std::string base = r.experiment + "_" + r.hash.substr(0, 8);
    std::vector<fs::path> written;
    auto dump = [&](const fs::path& path, const std::string& content) {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        os << content;
        if (!os) throw std::runtime_error("write failed for " + path.string());
        written.push_back(path);
    };
    if (format == "csv") {
        dump(out_dir / (base + ".csv"), report_to_csv(r));
        bool has_tails = false;
        for (const auto& row : r.rows) has_tails |= !row.tail.empty();
        if (has_tails) {
            std::string tails = "experiment,n,threshold,survival,std_error\n";
            for (const auto& row : r.rows)
                for (const auto& tp : row.tail)
                    tails += r.experiment + ',' + format_double(row.n) + ',' + format_double(tp.threshold) + ',' +
                             format_double(tp.survival) + ',' + format_double(tp.std_error) + '\n';
            dump(out_dir / (base + "_tails.csv"), tails);
        }
    } else if (format == "json") {
        dump(out_dir / (base + ".json"), report_to_json(r).dump(2) + "\n");
    } else {
        throw std::invalid_argument("write_report: format must be csv or json");
    }
    return written;
}

std::optional<Report> load_cached_report(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const std::string hash = spec_hash(spec);
    const fs::path path = out_dir / (experiment_kind_name(spec.experiment) + "_" + hash.substr(0, 8) + ".json");
    std::ifstream is(path);
    if (!is) return std::nullopt;
    nlohmann::json j;
    try {
        is >> j;
        Report r = report_from_json(j);
        if (r.hash != hash) return std::nullopt;  // stale or colliding file
        return r;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace stochgeo
