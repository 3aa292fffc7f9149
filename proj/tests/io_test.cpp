#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "uio/ddcheck.hpp"
#include "uio/io.hpp"

namespace uio {
namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("uio_io_test_" + name);
}

TEST(Format12, TwelveSignificantDigits) {
  EXPECT_EQ(io::format12(1.0 / 3), "0.333333333333");
  EXPECT_EQ(io::format12(-2.0), "-2");
  EXPECT_EQ(io::format12(Complex(0.5, -0.25)), "0.5-0.25i");
  EXPECT_EQ(io::format12(Complex(0.5, 0.0)), "0.5");
  EXPECT_EQ(io::round12(0.1 + 0.2), 0.3);
}

TEST(SystemJson, RoundTripIsExact) {
  const auto S = oracle::random_system(4, 2, 3, 2, true, 8);
  const auto path = temp_file("system.json");
  io::write_system(path, S);
  const auto back = io::read_system(path);
  EXPECT_EQ(back.A, S.A);
  EXPECT_EQ(back.B, S.B);
  EXPECT_EQ(back.C, S.C);
  EXPECT_EQ(back.E, S.E);
  EXPECT_EQ(back.construction, S.construction);
  std::filesystem::remove(path);
}

TEST(SystemJson, BMayBeOmittedWithoutInputs) {
  const auto j = io::Json::parse(R"({"kind":"system","n":1,"m":0,"p":1,"r":1,
      "A":[[0.5]],"C":[[1]],"E":[[1]]})");
  const auto S = io::system_from_json(j);
  EXPECT_EQ(S.m(), 0u);
  EXPECT_EQ(S.B.rows(), 1);
}

TEST(SystemJson, RejectsBadShapesAndValues) {
  const char* cases[] = {
      R"({"n":2,"m":0,"p":1,"r":1,"A":[[0.5]],"C":[[1,0]],"E":[[1],[0]]})",
      R"({"n":1,"m":0,"p":1,"r":1,"A":[["x"]],"C":[[1]],"E":[[1]]})",
      R"({"m":0,"p":1,"r":1,"A":[[0.5]],"C":[[1]],"E":[[1]]})",
      R"({"n":1,"m":0,"p":1,"r":1,"A":[[0.5]],"C":[[1, 2]],"E":[[1]]})",
  };
  for (const char* c : cases) {
    try {
      io::system_from_json(io::Json::parse(c));
      ADD_FAILURE() << c;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParse) << c;
    }
  }
  EXPECT_THROW(io::read_system(temp_file("missing.json")), Error);
}

TEST(UioJson, RoundTripIsExact) {
  const auto U = oracle::design_model_based(oracle::random_system(3, 1, 2, 1, true, 4), {});
  const auto path = temp_file("uio.json");
  io::write_uio(path, U);
  const auto back = io::read_uio(path);
  EXPECT_EQ(back.A_uio, U.A_uio);
  EXPECT_EQ(back.B_u, U.B_u);
  EXPECT_EQ(back.B_y, U.B_y);
  EXPECT_EQ(back.D, U.D);
  std::filesystem::remove(path);
}

TEST(ReportJson, DataReportCarriesEvidenceAndTolerances) {
  const numkit::Tolerance tol;
  const auto rep = ddcheck::existence_data_driven(testing::example_data(), 1, tol);
  const auto j = io::to_json(rep, tol);
  EXPECT_EQ(j["source"], "data");
  EXPECT_TRUE(j["uio_exists"].get<bool>());
  EXPECT_TRUE(j["kernel_inclusion"]["holds"].get<bool>());
  EXPECT_EQ(j["rank_condition"]["normal_rank"], 4);
  EXPECT_EQ(j["tolerance"]["rank_tol"], 1e-9);
}

TEST(ReportJson, ModelReportListsZeros) {
  const auto S = testing::plant_zero(testing::gaussian_system(4, 1, 2, 1, 31), 2.0, 8);
  const numkit::Tolerance tol;
  const auto j = io::to_json(oracle::existence_model_based(S, tol), tol);
  EXPECT_EQ(j["source"], "model");
  EXPECT_FALSE(j["uio_exists"].get<bool>());
  ASSERT_FALSE(j["rosenbrock"]["unstable_zeros"].empty());
  EXPECT_NEAR(j["rosenbrock"]["unstable_zeros"][0][0].get<double>(), 2.0, 1e-6);
}

TEST(RenderReport, NamesConditionsAndVerdict) {
  const numkit::Tolerance tol;
  std::ostringstream os;
  io::render_report(os, oracle::existence_model_based(oracle::example_system(), tol), tol);
  const std::string s = os.str();
  EXPECT_NE(s.find("rank(CE) = rank(E) = r"), std::string::npos);
  EXPECT_NE(s.find("UIO exists (strong* detectable): yes"), std::string::npos);
  EXPECT_NE(s.find("rank_tol 1e-09"), std::string::npos);
}

}  // namespace
}  // namespace uio
