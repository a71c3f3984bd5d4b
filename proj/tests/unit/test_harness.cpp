#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinbath/errors.hpp"
#include "spinbath/harness.hpp"
#include "test_support.hpp"

using namespace spinbath;
using namespace spinbath::harness;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "spinbath_harness_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string field_path_of(const std::string& document) {
    try {
        parse_config(document);
    } catch (const ConfigError& e) {
        return e.field_path();
    }
    return "(no error)";
}

constexpr const char* kModelDoc = R"({
  "model": {"a": [0.6, 0], "b": [0, 0.8],
            "spins": [{"alpha": [0.6, 0], "beta": [0.8, 0], "g": 1.5},
                      {"alpha": [1, 0], "beta": [0, 0], "g": -0.25}]},
  "time_grid": {"t_start": 0, "t_end": 2, "steps": 5},
  "output": {"format": "json"}
})";

}  // namespace

TEST(FormatDouble, RoundTripsAndHandlesSpecials) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
    EXPECT_EQ(format_double(NAN), "nan");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Config, ParsesInlineModel) {
    const auto config = parse_config(kModelDoc);
    const auto model = config.build_model();
    EXPECT_EQ(model.size(), 2u);
    EXPECT_EQ(model.b(), cplx(0.0, 0.8));
    EXPECT_EQ(model.spin(1).g, -0.25);
    ASSERT_TRUE(config.time_grid.has_value());
    EXPECT_EQ(config.time_grid->steps, 5u);
    EXPECT_EQ(config.output.format, OutputFormat::Json);
}

TEST(Config, ParsesRandomSourceAndVerdictOverrides) {
    const auto config = parse_config(R"({
      "random": {"n": 6, "seed": 9, "coupling": {"law": "equal", "g": 2.0}, "phase": "uniform", "population": [0.2, 0.8]},
      "verdict": {"ks_max": 0.3, "cv_max": null, "n_min": 16, "large_bath": "fail"}
    })");
    const auto& src = std::get<RandomSource>(config.model_source);
    EXPECT_EQ(src.n, 6u);
    EXPECT_EQ(std::get<EqualCoupling>(src.coupling).g, 2.0);
    EXPECT_EQ(src.phase, PhaseLaw::Uniform);
    EXPECT_EQ(config.verdict.qc.ks_max, 0.3);
    EXPECT_TRUE(std::isinf(config.verdict.qc.cv_max));
    EXPECT_EQ(config.verdict.qc.n_min, 16u);
    EXPECT_EQ(config.verdict.large_bath, lemma::LargeBathRoute::Fail);
    for (const auto& s : config.build_model().spins()) EXPECT_EQ(s.g, 2.0);
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_EQ(field_path_of(R"({"model": {"a": [1, 0], "b": [0, 0], "spins": [{"alpha": [1, 0], "beta": [0, 0], "g": 1},
                                                                            {"alpha": "x", "beta": [0, 0], "g": 1}]}})"),
              "model.spins[1].alpha");
    EXPECT_EQ(field_path_of(R"({"model": {"a": [1, 0], "b": [0, 0], "spins": [{"alpha": [0.5, 0], "beta": [0.5, 0], "g": 1}]}})"),
              "model.spins[0].beta");
    EXPECT_EQ(field_path_of(R"({"model": {"a": [1, 0], "b": [0, 0], "spins": [{"alpha": [1, 0], "beta": [0, 0]}]}})"),
              "model.spins[0].g");
    EXPECT_EQ(field_path_of(R"({"model": {"a": [1, 0], "b": [0, 0], "spins": []}})"), "model.spins");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 0, "seed": 1}})"), "random.n");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 3, "seed": -1}})"), "random.seed");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 3, "seed": 1, "colour": 2}})"), "random.colour");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 3, "seed": 1}, "time_grid": {"t_end": 0}})"), "time_grid.t_end");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 3, "seed": 1}, "output": {"format": "xml"}})"), "output.format");
    EXPECT_EQ(field_path_of(R"({"random": {"n": 3, "seed": 1}, "model": {}})"), "model");
    EXPECT_EQ(field_path_of("{not json"), "(document)");
}

TEST(ModelJson, RoundTripIsExact) {
    const auto model = generate_random(7, 3, UniformPositive{}, PhaseLaw::Uniform);
    const auto text = model_to_json(model);
    const auto back = model_from_json(text);
    ASSERT_EQ(back.size(), model.size());
    EXPECT_EQ(back.a(), model.a());
    for (std::size_t i = 0; i < model.size(); ++i) {
        EXPECT_EQ(back.spin(i).alpha, model.spin(i).alpha);
        EXPECT_EQ(back.spin(i).beta, model.spin(i).beta);
        EXPECT_EQ(back.spin(i).g, model.spin(i).g);
    }
    EXPECT_EQ(model_to_json(back), text);
}

TEST(Simulate, CsvLayoutAndAlignedBath) {
    ExperimentConfig config;
    config.model_source = SpinBathModel(fixtures::balanced(), fixtures::balanced(), {{{1.0, 0.0}, {0.0, 0.0}, 2.0}});
    config.time_grid = TimeGrid{0.0, 5.0, 11};
    const auto series = run_simulate(config);
    for (double v : series.r_squared()) EXPECT_NEAR(v, 1.0, 1e-15);
    const auto csv = series_to_csv(series);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,re_r,im_r,r_sq,expectation");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
}

TEST(Simulate, DefaultGridUsesMeanCoupling) {
    ExperimentConfig config;
    config.model_source = fixtures::balanced_model({1.0, 3.0});
    const auto grid = config.resolved_grid(config.build_model());
    EXPECT_EQ(grid.t_start, 0.0);
    EXPECT_EQ(grid.t_end, 10.0);
    EXPECT_EQ(grid.steps, kDefaultGridSteps);
}

TEST(Simulate, SeededRunsWriteIdenticalFiles) {
    ExperimentConfig config;
    config.model_source = RandomSource{20, 12345};
    config.time_grid = TimeGrid{0.0, 30.0, 500};
    config.output.path = scratch("sim_a.csv").string();
    run_simulate(config);
    config.output.path = scratch("sim_b.csv").string();
    run_simulate(config);
    const auto a = slurp(scratch("sim_a.csv"));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(scratch("sim_b.csv")));
}

TEST(Predict, SmallBathReport) {
    ExperimentConfig config;
    config.model_source = RandomSource{3, 1};
    const auto report = run_predict(config);
    EXPECT_EQ(report.verdict, lemma::Verdict::NoVerdict);
    EXPECT_EQ(report.n_points, 8.0);
    const auto json = report_to_json(report, config.verdict);
    EXPECT_NE(json.find("\"verdict\": \"NoVerdict\""), std::string::npos);
    EXPECT_NE(json.find("\"n_points\": 8"), std::string::npos);
}

TEST(Predict, RandomBathEchoesWeightSum) {
    ExperimentConfig config;
    config.model_source = RandomSource{20, 77};
    EXPECT_NEAR(run_predict(config).sum_of_weights, 1.0, 1e-12);
}

TEST(Predict, EqualCouplingSetsDegeneracyFlag) {
    ExperimentConfig config;
    config.model_source = RandomSource{20, 77, EqualCoupling{1.0}};
    const auto report = run_predict(config);
    EXPECT_TRUE(report.has_degeneracies());
    EXPECT_NE(report_to_json(report, config.verdict).find("\"has_degeneracies\": true"), std::string::npos);
}

TEST(Predict, RejectsCsv) {
    ExperimentConfig config;
    config.model_source = RandomSource{3, 1};
    config.output.format = OutputFormat::Csv;
    EXPECT_THROW(run_predict(config), ConfigError);
}

TEST(Compare, LargeRandomBathIsConsistent) {
    ExperimentConfig config;
    config.model_source = RandomSource{50, 2024};
    const auto report = run_compare(config);
    EXPECT_EQ(report.verdict.verdict, lemma::Verdict::Decoheres);
    EXPECT_EQ(report.agreement, Agreement::Consistent);
    EXPECT_LT(report.decay.mean_r_squared_last_half, report.decay.consistency_bound);
}

TEST(Compare, AlignedBathIsConsistentWithoutVerdict) {
    ExperimentConfig config;
    config.model_source = fixtures::model_with_populations({1.0, 1.0, 1.0}, {0.5, 1.1, 1.7});
    const auto report = run_compare(config);
    EXPECT_EQ(report.verdict.verdict, lemma::Verdict::NoVerdict);
    EXPECT_EQ(report.agreement, Agreement::Consistent);
    EXPECT_NEAR(report.decay.min_r_squared, 1.0, 1e-12);
}

TEST(Compare, EqualCouplingShowsDeepMinimaWithoutVerdict) {
    ExperimentConfig config;
    config.model_source = fixtures::balanced_model(std::vector<double>(12, 1.0));
    const auto report = run_compare(config);
    EXPECT_EQ(report.verdict.verdict, lemma::Verdict::NoVerdict);
    EXPECT_EQ(report.agreement, Agreement::Consistent);
    EXPECT_LT(report.decay.min_r_squared, 1e-6);
}

TEST(Spectrum, CsvLayout) {
    ExperimentConfig config;
    config.model_source = fixtures::model_with_populations({1.0, 1.0}, {1.0, 2.0});
    const auto csv = spectrum_to_csv(run_spectrum(config));
    EXPECT_EQ(csv, "omega,weight,multiplicity\n-3,1,1\n-1,0,1\n1,0,1\n3,0,1\n");
}

TEST(OracleCheck, PassesAndValidatesArguments) {
    const auto summary = run_oracle_check(6, 25, 1);
    EXPECT_TRUE(summary.ok());
    EXPECT_EQ(summary.cases, 25u);
    EXPECT_LT(summary.max_abs_error, kOracleTolerance);
    EXPECT_THROW(run_oracle_check(0, 10, 1), ConfigError);
    EXPECT_THROW(run_oracle_check(13, 10, 1), ConfigError);
    EXPECT_THROW(run_oracle_check(4, 0, 1), ConfigError);
}

TEST(WriteAtomically, ReplacesContentAndLeavesNoTemporary) {
    const auto path = scratch("atomic.txt");
    write_atomically(path, "first");
    write_atomically(path, "second");
    EXPECT_EQ(slurp(path), "second");
    auto tmp = path;
    tmp += ".tmp";
    EXPECT_FALSE(std::filesystem::exists(tmp));
    EXPECT_THROW(write_atomically(scratch("missing_dir") / "x" / "y.txt", "z"), IoError);
}
