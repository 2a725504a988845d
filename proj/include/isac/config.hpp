#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "problem.hpp"

namespace isac {

/// ProblemSpec plus run-level settings read from the same JSON document.
struct RunConfig {
    ProblemSpec spec;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::size_t samples = 100000;
    std::vector<int> cdf_ranks{1, 3, 5};
    int cdf_points = 50;
    std::size_t rate_channels = 2000;
    /// Scales the checked covariance by 0.5 in `check` (negative control).
    bool inject_fault = false;
};

inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

namespace detail {

inline double get_number(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "expected a number");
    return j.get<double>();
}

inline int get_int(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number_integer()) throw ConfigError(field, "expected an integer");
    return j.get<int>();
}

inline bool get_bool(const nlohmann::json& j, const std::string& field) {
    if (!j.is_boolean()) throw ConfigError(field, "expected true or false");
    return j.get<bool>();
}

inline std::vector<double> get_number_list(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(get_number(x, field));
    return out;
}

/// A scalar broadcast to every user, or an explicit per-user array.
inline std::vector<double> get_per_user(const nlohmann::json& j, const std::string& field, int users) {
    if (j.is_number()) return std::vector<double>(static_cast<std::size_t>(std::max(users, 0)), j.get<double>());
    return get_number_list(j, field);
}

}  // namespace detail

/// Parses a run configuration. Unknown keys are rejected. Power fields accept
/// a `_dbw` variant (e.g. `total_power_dbw`) converted to watts. Thresholds
/// default to the reference ratios: β = 0.1σ_n², ρ = 2σ_n², ξ = 0.01β.
inline RunConfig parse_run_config(const nlohmann::json& doc) {
    using detail::get_bool;
    using detail::get_int;
    using detail::get_number;
    if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");

    static const std::set<std::string> known{
        "n_total", "n_sensing", "n_comm", "users", "intended_user", "targets_deg", "half_width_deg",
        "spacing_ratio", "grid_step_deg", "total_power", "total_power_dbw", "sensing_power", "sensing_power_dbw",
        "comm_power", "comm_power_dbw", "noise_power", "noise_power_dbw", "sigma_h_sq", "sigma_g_sq", "xi", "beta",
        "rho", "nu", "epsilon", "alpha", "sca", "coefficient_form", "interference_scaling", "rate_interference",
        "full_budget", "fill_intended_power", "seed", "output_dir", "samples", "cdf_ranks", "cdf_points",
        "rate_channels", "inject_fault"};
    for (const auto& [key, _] : doc.items()) {
        if (!known.count(key)) throw ConfigError(key, "unknown field");
    }

    RunConfig cfg;
    ProblemSpec& s = cfg.spec;
    auto has = [&](const char* k) { return doc.contains(k); };
    auto power = [&](const char* watts_key, const std::string& dbw_key, double& out) {
        if (has(watts_key) && doc.contains(dbw_key)) throw ConfigError(watts_key, "give watts or dBW, not both");
        if (has(watts_key)) out = get_number(doc.at(watts_key), watts_key);
        if (doc.contains(dbw_key)) out = dbw_to_watts(get_number(doc.at(dbw_key), dbw_key));
    };

    if (has("n_sensing")) s.n_sensing = get_int(doc.at("n_sensing"), "n_sensing");
    if (has("n_comm")) s.n_comm = get_int(doc.at("n_comm"), "n_comm");
    if (has("n_total")) {
        const int n = get_int(doc.at("n_total"), "n_total");
        if (!has("n_sensing") && !has("n_comm")) {
            s.n_sensing = n / 2;
            s.n_comm = n - n / 2;
        } else if (n != s.n_total()) {
            throw ConfigError("n_total", "must equal n_sensing + n_comm");
        }
    }
    if (has("users")) s.users = get_int(doc.at("users"), "users");
    if (has("intended_user")) s.intended_user = get_int(doc.at("intended_user"), "intended_user");
    if (has("targets_deg")) s.targets_deg = detail::get_number_list(doc.at("targets_deg"), "targets_deg");
    if (has("half_width_deg")) s.half_width_deg = get_number(doc.at("half_width_deg"), "half_width_deg");
    if (has("spacing_ratio")) s.spacing_ratio = get_number(doc.at("spacing_ratio"), "spacing_ratio");
    if (has("grid_step_deg")) s.grid_step_deg = get_number(doc.at("grid_step_deg"), "grid_step_deg");

    power("total_power", "total_power_dbw", s.total_power);
    s.sensing_power = s.comm_power = s.total_power / 2.0;
    power("sensing_power", "sensing_power_dbw", s.sensing_power);
    power("comm_power", "comm_power_dbw", s.comm_power);
    power("noise_power", "noise_power_dbw", s.noise_power);

    const int K = s.users;
    s.sigma_h_sq.assign(static_cast<std::size_t>(std::max(K, 0)), 0.05);
    if (has("sigma_h_sq")) s.sigma_h_sq = detail::get_per_user(doc.at("sigma_h_sq"), "sigma_h_sq", K);
    if (has("sigma_g_sq")) s.sigma_g_sq = get_number(doc.at("sigma_g_sq"), "sigma_g_sq");
    s.beta.assign(static_cast<std::size_t>(std::max(K, 0)), 0.1 * s.noise_power);
    if (has("beta")) s.beta = detail::get_per_user(doc.at("beta"), "beta", K);
    s.rho = 2.0 * s.noise_power;
    if (has("rho")) s.rho = get_number(doc.at("rho"), "rho");
    s.xi = 0.01 * 0.1 * s.noise_power;
    if (has("xi")) s.xi = get_number(doc.at("xi"), "xi");
    if (has("nu")) s.nu = get_number(doc.at("nu"), "nu");
    s.epsilon.assign(static_cast<std::size_t>(std::max(K, 0)), 0.5);
    if (has("epsilon")) s.epsilon = detail::get_per_user(doc.at("epsilon"), "epsilon", K);
    if (has("alpha")) s.alpha = get_number(doc.at("alpha"), "alpha");

    if (has("sca")) {
        const auto& j = doc.at("sca");
        if (!j.is_object()) throw ConfigError("sca", "expected an object");
        for (const auto& [key, value] : j.items()) {
            const std::string field = "sca." + key;
            if (key == "omega_ratio") s.sca.omega_ratio = get_number(value, field);
            else if (key == "big_omega_ratio") s.sca.big_omega_ratio = get_number(value, field);
            else if (key == "zeta1") s.sca.zeta1 = get_number(value, field);
            else if (key == "zeta2") s.sca.zeta2 = get_number(value, field);
            else if (key == "max_iter") s.sca.max_iter = get_int(value, field);
            else throw ConfigError(field, "unknown field");
        }
    }

    auto enum_field = [&](const char* key, const char* a, const char* b) -> int {
        if (!has(key)) return -1;
        const auto& j = doc.at(key);
        if (!j.is_string()) throw ConfigError(key, "expected a string");
        const auto v = j.get<std::string>();
        if (v == a) return 0;
        if (v == b) return 1;
        throw ConfigError(key, std::string("expected \"") + a + "\" or \"" + b + "\"");
    };
    if (int e = enum_field("coefficient_form", "variance_consistent", "literal"); e >= 0) {
        s.coefficient_form = e == 0 ? CoefficientForm::kVarianceConsistent : CoefficientForm::kLiteral;
    }
    if (int e = enum_field("interference_scaling", "channel_scaled", "literal"); e >= 0) {
        s.interference_scaling = e == 0 ? InterferenceScaling::kChannelScaled : InterferenceScaling::kLiteral;
    }
    if (int e = enum_field("rate_interference", "intended_channel", "literal"); e >= 0) {
        s.rate_interference = e == 0 ? RateInterference::kIntendedChannel : RateInterference::kLiteral;
    }
    if (has("full_budget")) s.full_budget = get_bool(doc.at("full_budget"), "full_budget");
    if (has("fill_intended_power")) s.fill_intended_power = get_bool(doc.at("fill_intended_power"), "fill_intended_power");

    if (has("seed")) {
        const auto& j = doc.at("seed");
        if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
            throw ConfigError("seed", "expected a nonnegative integer");
        }
        cfg.seed = j.get<std::uint64_t>();
    }
    if (has("output_dir")) {
        if (!doc.at("output_dir").is_string()) throw ConfigError("output_dir", "expected a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (has("samples")) {
        const int n = get_int(doc.at("samples"), "samples");
        if (n < 1) throw ConfigError("samples", "must be >= 1");
        cfg.samples = static_cast<std::size_t>(n);
    }
    if (has("cdf_ranks")) {
        cfg.cdf_ranks.clear();
        if (!doc.at("cdf_ranks").is_array()) throw ConfigError("cdf_ranks", "expected an array of integers");
        for (const auto& x : doc.at("cdf_ranks")) {
            const int m = get_int(x, "cdf_ranks");
            if (m < 1 || m >= s.n_sensing) throw ConfigError("cdf_ranks", "ranks must be in [1, n_sensing)");
            cfg.cdf_ranks.push_back(m);
        }
    }
    if (has("cdf_points")) {
        cfg.cdf_points = get_int(doc.at("cdf_points"), "cdf_points");
        if (cfg.cdf_points < 2) throw ConfigError("cdf_points", "must be >= 2");
    }
    if (has("rate_channels")) {
        const int n = get_int(doc.at("rate_channels"), "rate_channels");
        if (n < 1) throw ConfigError("rate_channels", "must be >= 1");
        cfg.rate_channels = static_cast<std::size_t>(n);
    }
    if (has("inject_fault")) cfg.inject_fault = get_bool(doc.at("inject_fault"), "inject_fault");

    s.validate();
    return cfg;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
    }
}

/// Canonical echo of the spec, in the same field names the parser accepts.
inline nlohmann::json spec_to_json(const ProblemSpec& s) {
    nlohmann::json j;
    j["n_sensing"] = s.n_sensing;
    j["n_comm"] = s.n_comm;
    j["n_total"] = s.n_total();
    j["users"] = s.users;
    j["intended_user"] = s.intended_user;
    j["targets_deg"] = s.targets_deg;
    j["half_width_deg"] = s.half_width_deg;
    j["spacing_ratio"] = s.spacing_ratio;
    j["grid_step_deg"] = s.grid_step_deg;
    j["total_power"] = s.total_power;
    j["sensing_power"] = s.sensing_power;
    j["comm_power"] = s.comm_power;
    j["noise_power"] = s.noise_power;
    j["sigma_h_sq"] = s.sigma_h_sq;
    j["sigma_g_sq"] = s.sigma_g_sq;
    j["xi"] = s.xi;
    j["beta"] = s.beta;
    j["rho"] = s.rho;
    j["nu"] = s.nu;
    j["epsilon"] = s.epsilon;
    j["alpha"] = s.alpha;
    j["sca"] = {{"omega_ratio", s.sca.omega_ratio},
                {"big_omega_ratio", s.sca.big_omega_ratio},
                {"zeta1", s.sca.zeta1},
                {"zeta2", s.sca.zeta2},
                {"max_iter", s.sca.max_iter}};
    j["coefficient_form"] = s.coefficient_form == CoefficientForm::kLiteral ? "literal" : "variance_consistent";
    j["interference_scaling"] =
        s.interference_scaling == InterferenceScaling::kLiteral ? "literal" : "channel_scaled";
    j["rate_interference"] = s.rate_interference == RateInterference::kLiteral ? "literal" : "intended_channel";
    j["full_budget"] = s.full_budget;
    j["fill_intended_power"] = s.fill_intended_power;
    return j;
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j = spec_to_json(c.spec);
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["samples"] = c.samples;
    j["cdf_ranks"] = c.cdf_ranks;
    j["cdf_points"] = c.cdf_points;
    j["rate_channels"] = c.rate_channels;
    j["inject_fault"] = c.inject_fault;
    return j;
}

}  // namespace isac
