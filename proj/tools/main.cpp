// Command-line front end: one-shot geometry utilities plus the declarative
// experiment runner. Exit codes: 0 success, 2 spec/usage error, 3 runtime
// failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stochgeo/experiment.hpp"
#include "stochgeo/functionals.hpp"
#include "stochgeo/spatial_index.hpp"
#include "stochgeo/stats.hpp"

using namespace stochgeo;

namespace {

struct SampleOptions {
    std::size_t d = 2;
    std::string shape = "cube";
    double scale = 5.0;
    double intensity = 1.0;
    std::string marks = "none";
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;
    std::string in_file;
};

Region options_region(const SampleOptions& o) {
    return Region(o.shape == "ball" ? Shape::Ball : Shape::Cube, Point(o.d, 0.0), o.scale);
}

MarkKind options_marks(const SampleOptions& o) {
    if (o.marks == "none") return MarkKind::None;
    if (o.marks == "time") return MarkKind::Time;
    if (o.marks == "sign") return MarkKind::Sign;
    throw std::invalid_argument("--marks must be none, time or sign");
}

PointConfiguration load_points_csv(const std::string& path, std::size_t dim, MarkKind marks) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    PointConfiguration config(dim, marks);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() < dim) throw std::runtime_error("row with fewer than " + std::to_string(dim) + " columns");
        Point p(vals.begin(), vals.begin() + static_cast<long>(dim));
        Mark m = Mark::none();
        if (marks != MarkKind::None) {
            if (vals.size() < dim + 1) throw std::runtime_error("row missing mark column");
            m = Mark{marks, vals[dim]};
        }
        config.append_unchecked(p, m);
    }
    return config;
}

PointConfiguration obtain_config(const SampleOptions& o) {
    const MarkKind marks = options_marks(o);
    if (!o.in_file.empty()) return load_points_csv(o.in_file, o.d, marks);
    const Region region = options_region(o);
    return marks == MarkKind::None ? sample_poisson(region, o.intensity, SeedState{o.seed, o.stream})
                                   : sample_marked_poisson(region, o.intensity, marks, SeedState{o.seed, o.stream});
}

void add_sample_options(CLI::App* cmd, SampleOptions& o, bool with_in) {
    cmd->add_option("--d", o.d, "ambient dimension")->check(CLI::Range(1, 3));
    cmd->add_option("--shape", o.shape, "window shape (cube|ball)")->check(CLI::IsMember({"cube", "ball"}));
    cmd->add_option("--scale", o.scale, "window scale (half-side or radius)");
    cmd->add_option("--intensity", o.intensity, "Poisson intensity");
    cmd->add_option("--seed", o.seed, "root seed");
    cmd->add_option("--stream", o.stream, "stream index");
    if (with_in) cmd->add_option("--in", o.in_file, "read points from CSV instead of sampling");
}

void print_config(const PointConfiguration& config) {
    const std::size_t d = config.dim();
    std::string header = "x0";
    for (std::size_t a = 1; a < d; ++a) header += ",x" + std::to_string(a);
    if (config.mark_kind() != MarkKind::None) header += ",mark";
    std::printf("%s\n", header.c_str());
    for (std::size_t i = 0; i < config.size(); ++i) {
        std::string row = format_double(config.point(i)[0]);
        for (std::size_t a = 1; a < d; ++a) row += ',' + format_double(config.point(i)[a]);
        if (config.mark_kind() != MarkKind::None) row += ',' + format_double(config.mark_value(i));
        std::printf("%s\n", row.c_str());
    }
}

void print_tree(const WeightedTree& tree) {
    std::printf("u,v,length\n");
    for (const Edge& e : tree.edges)
        std::printf("%u,%u,%s\n", e.u, e.v, format_double(e.length).c_str());
}

int run_verify(std::uint64_t seed);

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochgeo: stochastic-geometry functionals and Monte Carlo campaigns"};
    app.require_subcommand(1);

    SampleOptions so;
    std::string spec_file;
    std::string out_dir_override;
    std::string format_override;
    std::size_t threads = 0;
    bool use_cache = false;
    double comp_radius = 1.0;
    std::string weight_str = "identity";
    double sn_level = 0.125;
    double sn_grid_h = 0.05;
    double sn_cg = 1.0, sn_delta = 3.0;
    std::string dump_field_path;
    std::uint64_t verify_seed = 7;

    auto* sample_cmd = app.add_subcommand("sample", "sample a (marked) Poisson configuration");
    add_sample_options(sample_cmd, so, false);
    sample_cmd->add_option("--marks", so.marks, "mark variant (none|time|sign)")
        ->check(CLI::IsMember({"none", "time", "sign"}));

    auto* mst_cmd = app.add_subcommand("mst", "Euclidean MST of a sampled or loaded configuration");
    add_sample_options(mst_cmd, so, true);

    auto* onng_cmd = app.add_subcommand("onng", "on-line nearest neighbour graph (time marks)");
    add_sample_options(onng_cmd, so, true);
    onng_cmd->add_option("--weight", weight_str, "edge weight (identity|power:a|indicator_le:r)");

    auto* comp_cmd = app.add_subcommand("components", "fixed-radius geometric graph components");
    add_sample_options(comp_cmd, so, true);
    comp_cmd->add_option("--r", comp_radius, "graph radius")->required();

    auto* sn_cmd = app.add_subcommand("shotnoise", "shot-noise excursion functionals on a grid");
    add_sample_options(sn_cmd, so, true);
    sn_cmd->add_option("--level", sn_level, "excursion level u");
    sn_cmd->add_option("--grid-h", sn_grid_h, "grid spacing");
    sn_cmd->add_option("--kernel-cg", sn_cg, "polynomial kernel amplitude");
    sn_cmd->add_option("--kernel-delta", sn_delta, "polynomial kernel decay");
    sn_cmd->add_option("--dump-field", dump_field_path, "write grid field values as CSV");

    auto* run_cmd = app.add_subcommand("run", "run a declarative experiment spec");
    run_cmd->add_option("spec", spec_file, "experiment spec file (JSON)")->required();
    run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    run_cmd->add_option("--out-dir", out_dir_override, "override spec out_dir");
    run_cmd->add_option("--format", format_override, "override spec format (csv|json)")
        ->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_flag("--cache", use_cache, "reuse a cached report with a matching spec hash");

    auto* verify_cmd = app.add_subcommand("verify", "run the quick invariant suite");
    verify_cmd->add_option("--seed", verify_seed, "seed for the randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample_cmd->parsed()) {
            print_config(obtain_config(so));
        } else if (mst_cmd->parsed()) {
            so.marks = "none";
            PointConfiguration config = obtain_config(so);
            WeightedTree tree = build_mst_kruskal(config);
            print_tree(tree);
            std::printf("total_length,%s\n", format_double(mst_length(tree, WeightFunction::identity())).c_str());
            std::printf("max_degree,%d\n", max_degree(tree));
        } else if (onng_cmd->parsed()) {
            so.marks = "time";
            PointConfiguration config = obtain_config(so);
            WeightedTree tree = build_onng(config);
            print_tree(tree);
            const Region window = options_region(so);
            const double len = onng_length(tree, parse_weight_string(weight_str), Window(window));
            std::printf("onng_length,%s\n", format_double(len).c_str());
        } else if (comp_cmd->parsed()) {
            so.marks = "none";
            PointConfiguration config = obtain_config(so);
            ComponentLabeling lab = geometric_components(config, comp_radius);
            std::printf("point,label\n");
            for (std::size_t i = 0; i < lab.labels.size(); ++i) std::printf("%zu,%u\n", i, lab.labels[i]);
            std::printf("count,%zu\n", lab.count);
        } else if (sn_cmd->parsed()) {
            so.marks = "sign";
            PointConfiguration config = obtain_config(so);
            KernelSpec kernel = KernelSpec::polynomial_decay(sn_cg, sn_delta, so.d);
            FieldSample fs(config, kernel);
            const Region window = options_region(so);
            Grid grid(Window(window), sn_grid_h);
            std::printf("excursion_volume,%s\n", format_double(excursion_volume(fs, sn_level, grid)).c_str());
            if (so.d == 2)
                std::printf("perimeter_marching,%s\n",
                            format_double(perimeter_marching(fs, sn_level, grid)).c_str());
            if (!dump_field_path.empty()) {
                std::ofstream os(dump_field_path);
                if (!os) throw std::runtime_error("cannot write " + dump_field_path);
                auto values = field_on_grid(fs, grid);
                std::string header = "x0";
                for (std::size_t a = 1; a < so.d; ++a) header += ",x" + std::to_string(a);
                os << header << ",value\n";
                std::vector<double> p(so.d);
                for (std::size_t i = 0; i < grid.raw_size(); ++i) {
                    if (std::isnan(values[i])) continue;
                    grid.node(i, p);
                    os << format_double(p[0]);
                    for (std::size_t a = 1; a < so.d; ++a) os << ',' << format_double(p[a]);
                    os << ',' << format_double(values[i]) << '\n';
                }
            }
        } else if (run_cmd->parsed()) {
            std::ifstream is(spec_file);
            if (!is) {
                std::fprintf(stderr, "error: cannot read spec file %s\n", spec_file.c_str());
                return 2;
            }
            std::stringstream buffer;
            buffer << is.rdbuf();
            ExperimentSpec spec;
            try {
                spec = parse_spec(buffer.str());
            } catch (const std::invalid_argument& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 2;
            }
            if (!out_dir_override.empty()) spec.out_dir = out_dir_override;
            if (!format_override.empty()) spec.format = format_override;
            Report report;
            if (use_cache) {
                if (auto cached = load_cached_report(spec, spec.out_dir)) {
                    std::fprintf(stderr, "reusing cached report %s\n", cached->hash.c_str());
                    report = *cached;
                }
            }
            if (report.rows.empty() && report.experiment.empty()) report = run_experiment(spec, threads);
            auto paths = write_report(report, spec.format, spec.out_dir);
            for (const auto& p : paths) std::printf("%s\n", p.string().c_str());
        } else if (verify_cmd->parsed()) {
            return run_verify(verify_seed);
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify subcommand

namespace {

int run_verify(std::uint64_t seed) {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-44s %s\n", name, ok ? "pass" : "FAIL");
        if (!ok) ++failures;
    };

    const Region window = Region::centered_cube(2, 5.0);
    check("sampler determinism", [&] {
        auto a = sample_poisson(window, 1.0, {seed, 0});
        auto b = sample_poisson(window, 1.0, {seed, 0});
        return a.size() == b.size() && a.flat_coords() == b.flat_coords();
    }());

    check("restrict monotone and idempotent", [&] {
        auto config = sample_poisson(window, 1.0, {seed, 1});
        const Region half = Region::centered_cube(2, 2.5);
        auto r1 = restrict_to(config, Window(half));
        auto r2 = restrict_to(r1, Window(half));
        return r1.size() <= config.size() && r1.flat_coords() == r2.flat_coords();
    }());

    check("mst insert matches batch rebuild", [&] {
        Rng rng({seed, 2});
        for (int trial = 0; trial < 50; ++trial) {
            auto config = sample_poisson(window, 0.8, {seed, 100 + static_cast<std::uint64_t>(trial)});
            if (config.size() < 2) continue;
            Point x = rng.point_in(window);
            WeightedTree base = build_mst_kruskal(config);
            auto [incr, trace] = mst_insert(base, x);
            WeightedTree batch = build_mst_kruskal(add_point(config, x, Mark::none()));
            if (incr.edges.size() != batch.edges.size()) return false;
            for (std::size_t i = 0; i < incr.edges.size(); ++i)
                if (incr.edges[i].u != batch.edges[i].u || incr.edges[i].v != batch.edges[i].v) return false;
        }
        return true;
    }());

    check("minimax property (exhaustive, 10 points)", [&] {
        for (int trial = 0; trial < 20; ++trial) {
            auto config = restrict_to(sample_poisson(Region::centered_cube(2, 1.8), 1.0,
                                                     {seed, 200 + static_cast<std::uint64_t>(trial)}),
                                      Window(Region::centered_cube(2, 1.8)));
            if (config.size() < 3 || config.size() > 10) continue;
            if (!verify_minimax(build_mst_kruskal(config)).pass) return false;
        }
        return true;
    }());

    check("planar degree bound", [&] {
        for (int trial = 0; trial < 50; ++trial) {
            auto config = sample_poisson(window, 1.0, {seed, 300 + static_cast<std::uint64_t>(trial)});
            if (config.size() < 2) continue;
            if (max_degree(build_mst_kruskal(config)) > 6) return false;
        }
        return true;
    }());

    check("add-one cost vanishes outside window", [&] {
        auto config = sample_poisson(window, 1.0, {seed, 400});
        FunctionalSpec f = FunctionalSpec::component_count_spec(0.8);
        Point outside{9.0, 9.0};
        return add_one_cost(f, config, Window(window), outside, Mark::none()) == 0.0;
    }());

    check("component add-one cost bound", [&] {
        Rng rng({seed, 5});
        FunctionalSpec f = FunctionalSpec::component_count_spec(0.8);
        for (int trial = 0; trial < 200; ++trial) {
            auto config = sample_poisson(window, 1.0, {seed, 500 + static_cast<std::uint64_t>(trial)});
            Point x = rng.point_in(window);
            const double delta = add_one_cost(f, config, Window(window), x, Mark::none());
            if (delta > 1.0 || delta < -20.0) return false;
        }
        return true;
    }());

    check("cone cover d=2", cone_cover_is_valid(2, 20000, {seed, 6}));
    check("cone cover d=3", cone_cover_is_valid(3, 20000, {seed, 7}));

    check("stats exactness", [&] {
        SampleSet q;
        const std::size_t n = 1000;
        for (std::size_t i = 1; i <= n; ++i)
            q.values.push_back(normal_quantile((static_cast<double>(i) - 0.5) / static_cast<double>(n)));
        const double dk = empirical_dk(q);
        const double dw0 = empirical_dw(SampleSet{{0.0}, ""});
        return std::abs(dk - 1.0 / (2.0 * static_cast<double>(n))) < 1e-12 &&
               std::abs(dw0 - std::sqrt(2.0 / 3.14159265358979323846)) < 1e-6;
    }());

    std::printf("%s\n", failures == 0 ? "verify: all checks passed" : "verify: FAILURES PRESENT");
    return failures == 0 ? 0 : 3;
}

}  // namespace
