#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "isac/isac.hpp"

using namespace isac;
using nlohmann::json;

namespace {

std::string error_field(const json& doc) {
    try {
        parse_run_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST(ParseRunConfig, EmptyObjectGivesReferenceScenario) {
    const auto cfg = parse_run_config(json::object());
    EXPECT_EQ(spec_to_json(cfg.spec), spec_to_json(ProblemSpec::reference()));
    EXPECT_EQ(cfg.seed, 1u);
    EXPECT_EQ(cfg.output_dir, "out");
}

TEST(ParseRunConfig, RoundTripsItsOwnEcho) {
    auto s = ProblemSpec::reference();
    s.nu = 0.8;
    s.sigma_h_sq = {0.05, 0.1, 0.2};
    s.coefficient_form = CoefficientForm::kLiteral;
    s.sca.max_iter = 7;
    RunConfig cfg;
    cfg.spec = s;
    cfg.seed = 99;
    const auto back = parse_run_config(run_config_to_json(cfg));
    EXPECT_EQ(run_config_to_json(back), run_config_to_json(cfg));
}

TEST(ParseRunConfig, FieldErrors) {
    EXPECT_EQ(error_field({{"nu", 1.5}}), "nu");
    EXPECT_EQ(error_field({{"alpha", 0.0}}), "alpha");
    EXPECT_EQ(error_field({{"bogus", 1}}), "bogus");
    EXPECT_EQ(error_field({{"n_sensing", 2.5}}), "n_sensing");
    EXPECT_EQ(error_field({{"sca", {{"zeta1", -1.0}}}}), "sca.zeta1");
    EXPECT_EQ(error_field({{"sca", {{"nope", 1}}}}), "sca.nope");
    EXPECT_EQ(error_field({{"coefficient_form", "other"}}), "coefficient_form");
    EXPECT_EQ(error_field({{"beta", {0.1, 0.1}}}), "beta");
    EXPECT_EQ(error_field({{"targets_deg", {0.0, 8.0}}}), "targets_deg");
    EXPECT_EQ(error_field({{"sensing_power", 8.0}}), "sensing_power");
    EXPECT_EQ(error_field({{"total_power", 10.0}, {"total_power_dbw", 10.0}}), "total_power");
    EXPECT_EQ(error_field({{"seed", -1}}), "seed");
    EXPECT_EQ(error_field({{"cdf_ranks", {12}}}), "cdf_ranks");
    EXPECT_EQ(error_field(json::array()), "<root>");
}

TEST(ParseRunConfig, DecibelPowers) {
    const auto cfg = parse_run_config({{"total_power_dbw", 10.0}, {"noise_power_dbw", 0.0}});
    EXPECT_DOUBLE_EQ(cfg.spec.total_power, 10.0);
    EXPECT_DOUBLE_EQ(cfg.spec.sensing_power, 5.0);
    EXPECT_DOUBLE_EQ(cfg.spec.comm_power, 5.0);
    EXPECT_DOUBLE_EQ(cfg.spec.noise_power, 1.0);
    EXPECT_DOUBLE_EQ(dbw_to_watts(20.0), 100.0);
}

TEST(ParseRunConfig, ThresholdsFollowNoisePower) {
    const auto cfg = parse_run_config({{"noise_power", 2.0}});
    EXPECT_DOUBLE_EQ(cfg.spec.beta[0], 0.2);
    EXPECT_DOUBLE_EQ(cfg.spec.rho, 4.0);
    EXPECT_DOUBLE_EQ(cfg.spec.xi, 0.002);
}

TEST(ParseRunConfig, PerUserScalarOrArray) {
    const auto a = parse_run_config({{"users", 2}, {"epsilon", 0.3}});
    EXPECT_EQ(a.spec.epsilon, (std::vector<double>{0.3, 0.3}));
    EXPECT_EQ(a.spec.sigma_h_sq.size(), 2u);
    const auto b = parse_run_config({{"sigma_h_sq", {0.01, 0.02, 0.03}}});
    EXPECT_EQ(b.spec.sigma_h_sq, (std::vector<double>{0.01, 0.02, 0.03}));
}

TEST(ParseRunConfig, AntennaTotalSplitsEvenly) {
    const auto cfg = parse_run_config({{"n_total", 16}});
    EXPECT_EQ(cfg.spec.n_sensing, 8);
    EXPECT_EQ(cfg.spec.n_comm, 8);
    EXPECT_EQ(error_field({{"n_total", 16}, {"n_sensing", 4}, {"n_comm", 4}}), "n_total");
}

TEST(ParseRunConfig, EnumsAndFlags) {
    const auto cfg = parse_run_config({{"coefficient_form", "literal"},
                                       {"interference_scaling", "literal"},
                                       {"rate_interference", "literal"},
                                       {"full_budget", true},
                                       {"fill_intended_power", false}});
    EXPECT_EQ(cfg.spec.coefficient_form, CoefficientForm::kLiteral);
    EXPECT_EQ(cfg.spec.interference_scaling, InterferenceScaling::kLiteral);
    EXPECT_EQ(cfg.spec.rate_interference, RateInterference::kLiteral);
    EXPECT_TRUE(cfg.spec.full_budget);
    EXPECT_FALSE(cfg.spec.fill_intended_power);
}

TEST(ConfigHash, IgnoresOutputDirOnly) {
    RunConfig a, b;
    b.output_dir = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Serialize, MatrixRoundTrip) {
    CMatrix m(2, 3);
    m << cplx(1, 2), cplx(3, 4), cplx(5, 6), cplx(-1, 0), cplx(0, -1), cplx(0.1, 0.2);
    EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
    json bad = matrix_to_json(m);
    bad["rows"] = 3;
    EXPECT_THROW(matrix_from_json(bad), ShapeError);
}

TEST(Serialize, ShortestRoundTripDoubles) {
    EXPECT_EQ(fmt_double(0.1), "0.1");
    EXPECT_EQ(fmt_double(1.0), "1");
    EXPECT_EQ(std::stod(fmt_double(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(fmt_double(std::nan("")), "nan");
}

TEST(ReadJsonFile, MissingFileIsConfigError) {
    EXPECT_THROW(read_json_file("/nonexistent/config.json"), ConfigError);
}
