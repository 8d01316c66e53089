#include "fbflow/fbflow.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <string>

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STRNE(fbf_version(), "");
  EXPECT_STREQ(fbf_status_string(FBF_OK), "ok");
  EXPECT_STRNE(fbf_status_string(FBF_ERR_INVALID_CONFIG), "unknown status");
}

TEST(CApi, ConfigErrorsCarryMessages) {
  fbf_config* cfg = nullptr;
  EXPECT_EQ(fbf_config_parse("[operator]\nflow = gcf\nalpha = 0.4\n", &cfg), FBF_ERR_INVALID_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_GT(std::strlen(fbf_last_error()), 0u);
  EXPECT_EQ(fbf_config_parse(nullptr, &cfg), FBF_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(fbf_config_load("/nonexistent.ini", &cfg), FBF_ERR_IO);
}

TEST(CApi, RunOracleTest) {
  fbf_config* cfg = nullptr;
  ASSERT_EQ(fbf_config_parse("", &cfg), FBF_OK);
  const std::string out = testing::TempDir() + "fbflow_capi";
  fbf_result* r = nullptr;
  ASSERT_EQ(fbf_run(cfg, "oracle-test", out.c_str(), 3, -1, &r), FBF_OK);
  EXPECT_EQ(fbf_result_exit_code(r), 0);
  EXPECT_NE(std::string(fbf_result_report(r)).find("\"checks\""), std::string::npos);
  fbf_result_destroy(r);

  EXPECT_EQ(fbf_run(cfg, "frobnicate", out.c_str(), 1, -1, &r), FBF_ERR_UNKNOWN_SUBCOMMAND);
  EXPECT_EQ(r, nullptr);
  EXPECT_EQ(fbf_config_set_grid(cfg, -1.0), FBF_ERR_INVALID_CONFIG);
  fbf_config_destroy(cfg);
}

TEST(CApi, RuntimeAbortIsResultNotStatus) {
  fbf_config* cfg = nullptr;
  ASSERT_EQ(fbf_config_parse("[domain]\nshape = ellipse\n", &cfg), FBF_OK);
  fbf_result* r = nullptr;
  const std::string out = testing::TempDir() + "fbflow_capi_abort";
  ASSERT_EQ(fbf_run(cfg, "evolve", out.c_str(), 1, -1, &r), FBF_OK);
  EXPECT_EQ(fbf_result_exit_code(r), 2);
  fbf_result_destroy(r);
  fbf_config_destroy(cfg);
}

TEST(CApi, OperatorEvaluation) {
  fbf_operator* op = nullptr;
  ASSERT_EQ(fbf_operator_create(FBF_FLOW_PLAPLACIAN, 2, 4.0, &op), FBF_OK);
  const double I[4] = {1, 0, 0, 1}, p[2] = {1, 0};
  double val = 0;
  ASSERT_EQ(fbf_operator_eval(op, I, p, 1.0, &val), FBF_OK);
  EXPECT_NEAR(val, 11.0 / 3.0, 1e-15);
  double dA[4], dp[2], du;
  ASSERT_EQ(fbf_operator_partials(op, I, p, 1.0, &val, dA, dp, &du), FBF_OK);
  EXPECT_NEAR(dA[1], dA[2], 1e-15);
  fbf_operator_destroy(op);

  ASSERT_EQ(fbf_operator_create(FBF_FLOW_GCF, 2, 1.0, &op), FBF_OK);
  ASSERT_EQ(fbf_operator_eval(op, I, p, 1.0, &val), FBF_OK);
  EXPECT_NEAR(val, 1.0 / std::sqrt(2.0), 1e-15);
  const double bad[4] = {-1, 0, 0, 1}, p0[2] = {0, 0};
  EXPECT_EQ(fbf_operator_eval(op, bad, p0, 1.0, &val), FBF_ERR_INVALID_STATE);
  fbf_operator_destroy(op);

  EXPECT_EQ(fbf_operator_create(FBF_FLOW_GCF, 2, 0.4, &op), FBF_ERR_INVALID_CONFIG);
}
