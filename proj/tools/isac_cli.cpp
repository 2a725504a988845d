// Command-line front end: solve the waveform design problem and emit
// plot-ready data files.
//
//   isac solve        solution.json + summary on stdout
//   isac beampattern  beampattern_<scheme>.csv and baselines.csv
//   isac convergence  convergence.csv
//   isac cdf          interference_cdf.csv
//   isac check        check_report.json, exit 1 if any check fails
//   isac bench        repeated solves, timing on stdout

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "check_suite.hpp"
#include "isac/isac.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<double> grid_deg;
    bool inject_fault = false;
    int repeats = 20;
};

isac::RunConfig load_config(const CommonOptions& opt) {
    std::string path = opt.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("ISAC_CONFIG"); env != nullptr && *env != '\0') path = env;
    }
    nlohmann::json doc = path.empty() ? nlohmann::json::object() : isac::read_json_file(path);
    if (opt.seed) doc["seed"] = *opt.seed;
    if (opt.out_dir) doc["output_dir"] = *opt.out_dir;
    if (opt.grid_deg) doc["grid_step_deg"] = *opt.grid_deg;
    if (opt.inject_fault) doc["inject_fault"] = true;
    return isac::parse_run_config(doc);
}

fs::path prepare_out(const isac::RunConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

int cmd_solve(const isac::RunConfig& cfg) {
    const auto sol = isac::solve(cfg.spec, isac::SolveOptions{cfg.seed});
    const auto dir = prepare_out(cfg);
    const auto meta = isac::make_meta(cfg);
    open_out(dir / "solution.json") << isac::solution_to_json(sol, meta, false).dump(2) << '\n';

    std::cout << "rank m            " << sol.rank_m << '\n'
              << "delta             " << isac::fmt_double(sol.delta) << '\n'
              << "matching error    " << isac::fmt_double(sol.matching_error) << '\n'
              << "sca converged     " << (sol.converged ? "yes" : "no") << " (" << sol.b_trace.iterations_used
              << " iterations)\n"
              << "feasible          " << (sol.feasibility.all_ok ? "yes" : "no") << '\n'
              << "wall time         " << sol.wall_time_ms << " ms\n"
              << "wrote             " << (dir / "solution.json").string() << '\n';
    return sol.feasibility.all_ok ? 0 : kExitInfeasible;
}

int cmd_beampattern(const isac::RunConfig& cfg) {
    const auto cmp = isac::compare_baselines(cfg.spec, cfg.seed, std::min<std::size_t>(cfg.samples, 20000));
    const auto dir = prepare_out(cfg);
    const auto meta = isac::make_meta(cfg);
    for (const auto& row : cmp.rows) {
        auto os = open_out(dir / ("beampattern_" + row.name + ".csv"));
        isac::write_beampattern_csv(os, cmp.desired.grid, row.beampattern, cmp.desired.values, meta,
                                    "scheme=" + row.name + " delta=" + isac::fmt_double(row.delta) +
                                        " normalization=value/" + std::to_string(cfg.spec.n_sensing));
    }
    auto os = open_out(dir / "baselines.csv");
    isac::write_csv_preamble(os, meta);
    os << "scheme,rank,delta,matching_error,peak_sidelobe_db,mean_interference,mean_normalized_interference\n";
    for (const auto& row : cmp.rows) {
        os << row.name << ',' << row.rank << ',' << isac::fmt_double(row.delta) << ','
           << isac::fmt_double(row.matching_error) << ',' << isac::fmt_double(row.peak_sidelobe_db) << ','
           << isac::fmt_double(row.mean_interference) << ',' << isac::fmt_double(row.mean_normalized_interference)
           << '\n';
        std::cout << row.name << ": matching_error=" << isac::fmt_double(row.matching_error)
                  << " peak_sidelobe_db=" << isac::fmt_double(row.peak_sidelobe_db) << '\n';
    }
    return 0;
}

int cmd_convergence(const isac::RunConfig& cfg) {
    const auto sol = isac::solve(cfg.spec, isac::SolveOptions{cfg.seed});
    const auto dir = prepare_out(cfg);
    auto os = open_out(dir / "convergence.csv");
    isac::write_convergence_csv(os, sol, isac::make_meta(cfg));
    std::cout << "iterations " << sol.b_trace.iterations_used << ", converged " << (sol.converged ? "yes" : "no")
              << '\n';
    return 0;
}

int cmd_cdf(const isac::RunConfig& cfg) {
    const auto table = isac::sim::interference_cdf_experiment(cfg.cdf_ranks, cfg.spec, cfg.samples, cfg.seed,
                                                               cfg.cdf_points);
    const auto dir = prepare_out(cfg);
    auto os = open_out(dir / "interference_cdf.csv");
    isac::write_cdf_csv(os, table, isac::make_meta(cfg));
    for (const auto& r : table.ranks) {
        std::cout << "rank " << r.rank << ": mean g^H C g = " << isac::fmt_double(r.mean) << '\n';
    }
    return 0;
}

int cmd_check(const isac::RunConfig& cfg) {
    const auto results = isac::tools::run_checks(cfg);
    nlohmann::json report;
    report["meta"] = isac::meta_to_json(isac::make_meta(cfg));
    report["checks"] = nlohmann::json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        report["checks"].push_back(
            {{"name", r.name}, {"passed", r.passed}, {"value", r.value}, {"threshold", r.threshold}, {"detail", r.detail}});
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  value=" << isac::fmt_double(r.value)
                  << " threshold=" << isac::fmt_double(r.threshold) << "  (" << r.detail << ")\n";
    }
    report["all_passed"] = all;
    const auto dir = prepare_out(cfg);
    open_out(dir / "check_report.json") << report.dump(2) << '\n';
    return all ? 0 : kExitCheckFailed;
}

int cmd_bench(const isac::RunConfig& cfg, int repeats) {
    std::vector<double> times;
    for (int r = 0; r < repeats; ++r) {
        times.push_back(isac::solve(cfg.spec, isac::SolveOptions{cfg.seed}).wall_time_ms);
    }
    std::sort(times.begin(), times.end());
    std::cout << "solve x" << repeats << ": min " << times.front() << " ms, median " << times[times.size() / 2]
              << " ms, max " << times.back() << " ms\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interference-reduction ISAC waveform design"};
    app.require_subcommand(1);
    CommonOptions opt;
    std::uint64_t seed = 0;
    std::string out;
    double grid = 0.0;
    app.add_option("--config", opt.config_path, "JSON config (default: $ISAC_CONFIG, else built-in reference scenario)");
    auto* seed_opt = app.add_option("--seed", seed, "Root random seed");
    auto* out_opt = app.add_option("--out", out, "Output directory");
    auto* grid_opt = app.add_option("--grid-deg", grid, "Angle grid step in degrees");

    auto* solve = app.add_subcommand("solve", "Solve and write solution.json");
    auto* beam = app.add_subcommand("beampattern", "Beampatterns of the proposed and reference covariances");
    auto* conv = app.add_subcommand("convergence", "Per-iteration SCA step norms");
    auto* cdf = app.add_subcommand("cdf", "Sensing-interference CDF across projector ranks");
    auto* check = app.add_subcommand("check", "Run the property checks");
    check->add_flag("--inject-fault", opt.inject_fault, "Scale the checked covariance by 0.5");
    auto* bench = app.add_subcommand("bench", "Time repeated solves");
    bench->add_option("--repeats", opt.repeats, "Number of solves")->check(CLI::PositiveNumber);
    for (auto* sub : {solve, beam, conv, cdf, check, bench}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out_dir = out;
    if (*grid_opt) opt.grid_deg = grid;

    try {
        const auto cfg = load_config(opt);
        if (*solve) return cmd_solve(cfg);
        if (*beam) return cmd_beampattern(cfg);
        if (*conv) return cmd_convergence(cfg);
        if (*cdf) return cmd_cdf(cfg);
        if (*check) return cmd_check(cfg);
        if (*bench) return cmd_bench(cfg, opt.repeats);
    } catch (const isac::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const isac::InfeasibleError& e) {
        std::cerr << "infeasible at stage " << e.stage() << ": " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
