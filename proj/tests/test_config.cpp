#include "fbflow/config.hpp"
#include "fbflow/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fbflow;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<ErrorCode>(0);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, Defaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.flow, FlowMode::PLaplacian);
  EXPECT_EQ(c.domain.shape, Shape::Disk);
  EXPECT_EQ(c.final_time, 0.0);
}

TEST(Config, GaussParameters) {
  const auto a = parse_config("[operator]\nflow = gcf\nalpha = 1\n");
  EXPECT_DOUBLE_EQ(a.operator_spec().sigma(), 1.0);
  const auto b = parse_config("[operator]\nflow = gcf\nalpha = 2/3\n");
  EXPECT_DOUBLE_EQ(b.operator_spec().sigma(), 0.5);
  EXPECT_EQ(b.operator_spec().two_over_sigma(), 4);
  EXPECT_EQ(code_of("[operator]\nflow = gcf\nalpha = 0.4\n"), ErrorCode::InvalidConfig);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  EXPECT_EQ(code_of("[domain]\nradius = 1\ncolour = red\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[physics]\ng = 9.8\n"), ErrorCode::InvalidConfig);
}

TEST(Config, RejectsTypeMismatch) {
  EXPECT_EQ(code_of("[domain]\ndimension = two\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[domain]\ndimension = 2.5\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[domain]\nfree_hi = maybe\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[numerics]\ngrid_spacing = 1/0\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[operator]\nflow = porous\n"), ErrorCode::InvalidConfig);
}

TEST(Config, RejectsConstraintViolations) {
  EXPECT_EQ(code_of("[numerics]\ngrid_spacing = -0.1\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[numerics]\ntaylor_order = 7\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[numerics]\nextension = exact\n"), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of("[operator]\np_exponent = 2\n"), ErrorCode::InvalidConfig);
}

TEST(Config, FractionsAndLists) {
  const auto c = parse_config("[domain]\nshape = ellipse\nsemi_axes = 3, 3/2\n[numerics]\ngrid_spacing = 1/256\n");
  EXPECT_DOUBLE_EQ(c.domain.grid_spacing, 1.0 / 256);
  ASSERT_EQ(c.domain.semi_axes.size(), 2u);
  EXPECT_DOUBLE_EQ(c.domain.semi_axes[1], 1.5);
}

TEST(Config, MissingFileIsIoError) {
  try {
    load_config("/nonexistent/run.ini");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"plaplacian_disk", "traveling_wave", "gcf_flat_disk", "heat"})
    EXPECT_NO_THROW(load_config(std::string(FBF_CONFIG_DIR) + "/" + name + ".ini")) << name;
}

TEST(Dispatch, ExitCodes) {
  const auto tmp = std::filesystem::temp_directory_path() / "fbflow_dispatch_test";
  RunRequest req;
  req.out_dir = tmp.string();

  req.subcommand = "oracle-test";
  EXPECT_EQ(dispatch(parse_config(""), req).exit_code, 0);

  req.subcommand = "check-conditions";
  EXPECT_EQ(dispatch(parse_config("[operator]\nflow = heat\n[numerics]\ngrid_spacing = 0.05\n"), req).exit_code, 1);

  req.subcommand = "evolve";
  const auto r = dispatch(parse_config("[domain]\ndimension = 1\nshape = interval\n"), req);
  EXPECT_EQ(r.exit_code, 0) << r.summary;
  EXPECT_TRUE(std::filesystem::exists(tmp / "snapshot_0.csv"));
  EXPECT_FALSE(std::filesystem::exists(tmp / "snapshot_1.csv"));

  req.subcommand = "bogus";
  EXPECT_EQ(dispatch(parse_config(""), req).exit_code, 2);

  req.subcommand = "evolve";
  EXPECT_EQ(dispatch(parse_config("[domain]\nshape = ellipse\n"), req).exit_code, 2);
  std::filesystem::remove_all(tmp);
}

TEST(Dispatch, OutputIsDeterministic) {
  const auto base = std::filesystem::temp_directory_path();
  const auto cfg = parse_config(
      "[domain]\ndimension = 1\nshape = interval\n[numerics]\ngrid_spacing = 1/64\nfinal_time = 0.01\n"
      "[output]\nsnapshots = 2\n");
  RunRequest req;
  req.subcommand = "evolve";
  req.out_dir = (base / "fbflow_det_a").string();
  dispatch(cfg, req);
  req.out_dir = (base / "fbflow_det_b").string();
  dispatch(cfg, req);
  for (const char* f : {"run.json", "snapshot_0.csv", "snapshot_2.csv", "boundary_2.csv"})
    EXPECT_EQ(slurp(base / "fbflow_det_a" / f), slurp(base / "fbflow_det_b" / f)) << f;
  const std::string csv = slurp(base / "fbflow_det_a" / "snapshot_2.csv");
  EXPECT_EQ(csv.rfind("s,h,g,image,a,b,det_phi,det_B,collar\n", 0), 0u);
  std::filesystem::remove_all(base / "fbflow_det_a");
  std::filesystem::remove_all(base / "fbflow_det_b");
}

TEST(Dispatch, TaylorSeedColumns) {
  const auto tmp = std::filesystem::temp_directory_path() / "fbflow_seed_test";
  RunRequest req;
  req.subcommand = "taylor-seed";
  req.out_dir = tmp.string();
  req.order = 3;
  const auto r = dispatch(parse_config("[domain]\ndimension = 1\nshape = interval\n"), req);
  ASSERT_EQ(r.exit_code, 0) << r.summary;
  const std::string csv = slurp(tmp / "taylor_seed.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,h0,h1,h2,h3,valid");
  std::filesystem::remove_all(tmp);
}
