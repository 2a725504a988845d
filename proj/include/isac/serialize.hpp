#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "rng.hpp"
#include "sca.hpp"
#include "solver.hpp"
#include "types.hpp"

namespace isac {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal text that round-trips the double.
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// {"rows": n, "cols": m, "data": [[re, im], ...]} in row-major order.
inline nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ShapeError("matrix data length mismatch");
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = data.at(static_cast<std::size_t>(r * cols + c));
            m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

inline nlohmann::json vector_to_json(const RVector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline nlohmann::json trace_to_json(const sca::ScaTrace& t) {
    nlohmann::json iterates = nlohmann::json::array();
    for (const auto& x : t.iterates) iterates.push_back(vector_to_json(x));
    return {{"iterates", iterates},
            {"step_norms", t.step_norms},
            {"converged", t.converged},
            {"iterations_used", t.iterations_used}};
}

/// FNV-1a of the canonical config dump. The output directory is excluded so
/// identical runs written to different places carry the same hash.
inline std::string config_hash(const RunConfig& cfg) {
    auto j = run_config_to_json(cfg);
    j.erase("output_dir");
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(j.dump());
    return os.str();
}

struct OutputMeta {
    std::string config_hash;
    std::uint64_t seed = 0;
};

inline OutputMeta make_meta(const RunConfig& cfg) { return {config_hash(cfg), cfg.seed}; }

inline nlohmann::json meta_to_json(const OutputMeta& m) {
    return {{"artifact", "isac-waveform"}, {"version", kVersion}, {"config_hash", m.config_hash}, {"seed", m.seed}};
}

/// First line of every delimited output file.
inline void write_csv_preamble(std::ostream& os, const OutputMeta& m, const std::string& extra = "") {
    os << "# isac-waveform " << kVersion << " config_hash=" << m.config_hash << " seed=" << m.seed;
    if (!extra.empty()) os << ' ' << extra;
    os << '\n';
}

inline nlohmann::json feasibility_to_json(const FeasibilityReport& r) {
    nlohmann::json interferers = nlohmann::json::array();
    for (std::size_t i = 0; i < r.interferer_cdf.size(); ++i) {
        if (std::isnan(r.interferer_cdf[i])) continue;
        interferers.push_back({{"user", i + 1}, {"prob_below_beta", r.interferer_cdf[i]}, {"epsilon", r.epsilon[i]}});
    }
    return {{"intended_tail_prob", r.intended_tail},
            {"nu", r.nu},
            {"interferers", interferers},
            {"power_used", r.power_used},
            {"power_budget", r.power_budget},
            {"interference_prob", r.interference_prob},
            {"alpha", r.alpha},
            {"trace", r.trace},
            {"sensing_budget", r.sensing_budget},
            {"min_eigenvalue", r.min_eigenvalue},
            {"violations", r.violations},
            {"feasible", r.all_ok}};
}

inline nlohmann::json certificate_to_json(const IdempotencyCertificate& c) {
    return {{"symmetry_residual", c.symmetry_residual},
            {"idem_residual", c.idem_residual},
            {"numeric_rank", c.numeric_rank},
            {"trace", c.trace},
            {"min_eigenvalue", c.min_eigenvalue},
            {"max_eigenvalue", c.max_eigenvalue},
            {"spectrum_residual", c.spectrum_residual},
            {"is_identity", c.is_identity},
            {"passed", c.passed}};
}

/// Full solution record. `include_timing` adds wall_time_ms, which differs
/// between runs; leave it off when byte-identical output is needed.
inline nlohmann::json solution_to_json(const Solution& s, const OutputMeta& meta, bool include_timing) {
    nlohmann::json j;
    j["meta"] = meta_to_json(meta);
    j["spec"] = spec_to_json(s.spec);
    j["rank_m"] = s.rank_m;
    j["projector"] = matrix_to_json(s.projector.entries());
    j["covariance"] = matrix_to_json(s.covariance.entries());
    j["gamma"] = s.gamma;
    j["certificate"] = certificate_to_json(s.certificate);
    j["delta"] = s.delta;
    j["matching_error"] = s.matching_error;
    j["beampattern"] = {{"angles_deg", s.desired.grid.angles()},
                        {"values", vector_to_json(s.beampattern)},
                        {"desired", vector_to_json(s.desired.values)},
                        {"normalization", "divide values by n_sensing for a unit-peak plot"}};
    j["v"] = vector_to_json(s.v);
    j["v_sca"] = vector_to_json(s.v_sca);
    j["z"] = vector_to_json(s.z);
    nlohmann::json precoders = nlohmann::json::array();
    for (const auto& w : s.precoders.vectors) precoders.push_back(matrix_to_json(w));
    j["precoders"] = precoders;
    j["precoder_norms"] = vector_to_json(s.precoders.norms);
    j["traces"] = {{"z", trace_to_json(s.z_trace)}, {"b", trace_to_json(s.b_trace)}, {"converged", s.converged}};
    j["surrogate_violations"] = s.surrogate_violations;
    j["feasibility"] = feasibility_to_json(s.feasibility);
    j["intended_rate_at_estimate"] = s.intended_rate_at_estimate;
    j["notes"] = s.notes;
    if (include_timing) j["wall_time_ms"] = s.wall_time_ms;
    return j;
}

/// Rows (iteration, step_norm_z, step_norm_b).
inline void write_convergence_csv(std::ostream& os, const Solution& s, const OutputMeta& meta) {
    write_csv_preamble(os, meta, std::string("converged=") + (s.converged ? "true" : "false"));
    os << "iteration,step_norm_z,step_norm_b\n";
    for (std::size_t i = 0; i < s.b_trace.step_norms.size(); ++i) {
        const double z = i < s.z_trace.step_norms.size() ? s.z_trace.step_norms[i] : 0.0;
        os << (i + 1) << ',' << fmt_double(z) << ',' << fmt_double(s.b_trace.step_norms[i]) << '\n';
    }
}

/// Rows (angle_deg, value, desired); `extra` lands in the preamble.
inline void write_beampattern_csv(std::ostream& os, const AngleGrid& grid, const RVector& values,
                                  const RVector& desired, const OutputMeta& meta, const std::string& extra) {
    write_csv_preamble(os, meta, extra);
    os << "angle_deg,value,desired\n";
    for (std::size_t l = 0; l < grid.size(); ++l) {
        const auto i = static_cast<Eigen::Index>(l);
        os << fmt_double(grid[l]) << ',' << fmt_double(values[i]) << ',' << fmt_double(desired[i]) << '\n';
    }
}

/// Rows (rank, threshold, cdf, analytic_cdf).
inline void write_cdf_csv(std::ostream& os, const sim::CdfTable& t, const OutputMeta& meta) {
    write_csv_preamble(os, meta, "samples=" + std::to_string(t.n_samples));
    os << "rank,threshold,cdf,analytic_cdf\n";
    for (const auto& r : t.ranks) {
        for (std::size_t i = 0; i < t.thresholds.size(); ++i) {
            os << r.rank << ',' << fmt_double(t.thresholds[i]) << ',' << fmt_double(r.empirical[i]) << ','
               << fmt_double(r.analytic[i]) << '\n';
        }
    }
}

}  // namespace isac
