#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "statrcm/data.hpp"
#include "statrcm/error.hpp"
#include "statrcm/synthetic.hpp"

namespace {

using namespace statrcm;
using namespace statrcm::data;
namespace fs = std::filesystem;

class DataFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("statrcm_data_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

const char* kObsHeader = "year,c_star,s_ocn_star,s_lnd_star,f_co2_star,t_m_star,t_d_star,ohc_star\n";

TEST_F(DataFiles, HeaderOnlyIsAnError) {
  EXPECT_THROW(load_observations(write("o.csv", kObsHeader)), DataError);
  EXPECT_THROW(load_covariates(write("c.csv", "year,e_ff,e_luc,f_nonco2,f_nat\n")), DataError);
}

TEST_F(DataFiles, MissingCellsParse) {
  const auto t = load_observations(write("o.csv", std::string(kObsHeader) + "2020,,2.9,3.1,,1.02,0.18,47.7\n"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_TRUE(is_missing(t.rows[0].values[0]));
  EXPECT_TRUE(is_missing(t.rows[0].values[3]));
  EXPECT_EQ(t.rows[0].values[1], 2.9);
  EXPECT_EQ(t.rows[0].values[6], 47.7);
  EXPECT_EQ(t.rows[0].observed_count(), 5);
}

TEST_F(DataFiles, MalformedInputs) {
  EXPECT_THROW(load_observations(write("a.csv", std::string(kObsHeader) + "2020,abc,1,1,1,1,1,1\n")), DataError);
  EXPECT_THROW(load_observations(write("b.csv", std::string(kObsHeader) + "2020,1,1\n")), DataError);
  EXPECT_THROW(load_observations(write("c.csv", std::string(kObsHeader) + "2020,700,1,1,1,1,1,1\n2022,700,1,1,1,1,1,1\n")),
               DataError);
  EXPECT_THROW(load_covariates(write("d.csv", "year,e_ff,e_luc,f_nonco2,f_nat\n2020,1,1,,0.1\n")), DataError);
  EXPECT_THROW(load_covariates(write("e.csv", "year,e_ff,f_nonco2,f_nat\n2020,1,1,0.1\n")), DataError);
}

TEST_F(DataFiles, OutOfRangeValuesWarn) {
  const auto t = load_observations(write("o.csv", std::string(kObsHeader) + "2020,50,2.9,3.1,,1.02,0.18,47.7\n"));
  EXPECT_FALSE(t.warnings.empty());
}

TEST_F(DataFiles, RoundTripIsLossless) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ObservationTable obs;
  for (int y = 1959; y < 1970; ++y) {
    ObservationRow r;
    r.year = y;
    for (double& v : r.values) v = 700.0 * u(gen);
    r.values[2] = kMissing;
    obs.rows.push_back(r);
  }
  const fs::path p = dir_ / "obs.csv";
  write_observations(p, obs);
  const ObservationTable back = load_observations(p);
  ASSERT_EQ(back.size(), obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i)
    for (int j = 0; j < 7; ++j) {
      const double a = obs.rows[i].values[static_cast<std::size_t>(j)], b = back.rows[i].values[static_cast<std::size_t>(j)];
      if (is_missing(a)) {
        EXPECT_TRUE(is_missing(b));
      } else {
        EXPECT_NEAR(a, b, 1e-9);
      }
    }
  // a second pass writes identical bytes
  const fs::path p2 = dir_ / "obs2.csv";
  write_observations(p2, back);
  std::ifstream a(p), b(p2);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(a), {}), std::string(std::istreambuf_iterator<char>(b), {}));

  const CovariateTable cov = synthetic_historical_covariates();
  write_covariates(dir_ / "cov.csv", cov);
  const CovariateTable cov_back = load_covariates(dir_ / "cov.csv");
  ASSERT_EQ(cov_back.size(), cov.size());
  for (std::size_t i = 0; i < cov.size(); ++i) {
    EXPECT_NEAR(cov_back.rows[i].e_ff, cov.rows[i].e_ff, 1e-9);
    EXPECT_NEAR(cov_back.rows[i].f_nat, cov.rows[i].f_nat, 1e-9);
  }
}

TEST_F(DataFiles, TrailingForcingImputation) {
  std::string text = "year,e_ff,e_luc,f_nonco2,f_nat\n";
  for (int i = 0; i < 6; ++i) text += std::to_string(2015 + i) + ",9,1," + std::to_string(0.1 * (i + 1)) + ",0.05\n";
  text += "2021,9,1,,\n2022,9,1,,\n";
  const fs::path p = write("c.csv", text);
  EXPECT_THROW(load_covariates(p), DataError);
  const CovariateTable t = load_covariates(p, {true, 5});
  ASSERT_EQ(t.size(), 8u);
  EXPECT_NEAR(t.rows[6].f_nonco2, 0.7, 1e-12);
  EXPECT_NEAR(t.rows[7].f_nonco2, 0.8, 1e-12);
  EXPECT_NEAR(t.rows[7].f_nat, 0.05, 1e-12);
  EXPECT_FALSE(t.warnings.empty());
}

TEST_F(DataFiles, ScenarioWithTotalEmissionsAndHeldNaturalForcing) {
  const fs::path p = write("s.csv", "year,e_total,f_nonco2,f_nat\n2023,10,0.5,\n2024,9,0.4,\n");
  ScenarioLoadOptions opts;
  opts.expected_first_year = 2023;
  opts.hold_natural_forcing = 0.12;
  const ScenarioTable s = load_scenario(p, opts);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.rows[0].emissions(), 10.0);
  EXPECT_EQ(s.rows[1].f_nat, 0.12);
  opts.expected_first_year = 2022;
  EXPECT_THROW(load_scenario(p, opts), DataError);
}

TEST(Alignment, RequiresSameYears) {
  const CovariateTable cov = synthetic_historical_covariates();
  ObservationTable obs;
  for (const auto& r : cov.rows) {
    ObservationRow o;
    o.year = r.year;
    o.values.fill(1.0);
    obs.rows.push_back(o);
  }
  EXPECT_NO_THROW(check_aligned(obs, cov));
  obs.rows.pop_back();
  EXPECT_THROW(check_aligned(obs, cov), DataError);
}

TEST(Imputation, Examples) {
  const std::vector<double> flat = {2, 2, 2, 2, 2};
  EXPECT_EQ(impute_linear_trend(flat, 5, 3), (std::vector<double>{2, 2, 2}));
  const std::vector<double> line = {1, 2, 3, 4, 5};
  const auto ext = impute_linear_trend(line, 5, 3);
  EXPECT_NEAR(ext[0], 6, 1e-12);
  EXPECT_NEAR(ext[1], 7, 1e-12);
  EXPECT_NEAR(ext[2], 8, 1e-12);
  const std::vector<double> kink = {0, 0, 0, 0, 10};
  EXPECT_NEAR(impute_linear_trend(kink, 5, 1)[0], 8.0, 1e-12);
  const std::vector<double> short_tail = {1, 2};
  EXPECT_THROW(impute_linear_trend(short_tail, 5, 1), DataError);
}

TEST(Imputation, ExactOnAffineSeries) {
  std::vector<double> s;
  for (int i = 0; i < 10; ++i) s.push_back(3.0 - 0.7 * i);
  for (int w = 2; w <= 10; ++w) {
    const auto ext = impute_linear_trend(s, w, 4);
    for (int h = 0; h < 4; ++h) EXPECT_NEAR(ext[static_cast<std::size_t>(h)], 3.0 - 0.7 * (10 + h), 1e-10) << w;
  }
}

TEST(Units, OhcConversion) {
  EXPECT_EQ(convert_ohc_units(0.0), 0.0);
  EXPECT_NEAR(convert_ohc_units(1.0), 0.06212, 1e-5);
  EXPECT_DOUBLE_EQ(convert_ohc_units(2.0 * 3.7), 2.0 * convert_ohc_units(3.7));
  EXPECT_GT(convert_ohc_units(1e-6), 0.0);
}

}  // namespace
