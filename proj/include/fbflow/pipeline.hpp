#pragma once

// Subcommand orchestration and output emission.

#include "fbflow/config.hpp"
#include "fbflow/evolve.hpp"
#include "fbflow/extension.hpp"
#include "fbflow/fields.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/grid_operator.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fbflow {

struct RunRequest {
  std::string subcommand;
  std::string out_dir;           ///< overrides output.directory when set
  unsigned long long seed = 1;
  int order = -1;                ///< taylor-seed order override
  double grid = 0.0;             ///< grid spacing override
};

struct RunResult {
  int exit_code = 0;             ///< 0 pass, 1 audit failure, 2 runtime abort
  std::string summary;
  std::string report;            ///< JSON
  std::vector<std::string> files;
};

RunResult dispatch(const RunConfig& cfg, const RunRequest& req);

ScalarFieldPtr build_profile(const RunConfig& cfg, const DomainSpec& domain);
MovingFieldPtr build_initial_g(const RunConfig& cfg, const ScalarFieldPtr& v);
HFieldPtr build_initial_h(const RunConfig& cfg, const ScalarFieldPtr& v);

struct FixedSetup {
  DomainSpec domain;
  ScalarFieldPtr v;
  std::shared_ptr<const GridOperator> G;
  double eta = 0.0;
  std::vector<char> collar;
  std::vector<double> h0;
};

/// Grid operator and initial h on the evolution grid. With a mirrored g0 the
/// initial h is solved on the collar and continued inward where the segment
/// relation has no root.
FixedSetup build_fixed_setup(const RunConfig& cfg);

/// Largest diffusion coefficient of G on the collar at t = 0.
double collar_diffusivity(const FixedSetup& setup);

std::shared_ptr<const ExtendedOperator> build_extended(const RunConfig& cfg, const FixedSetup& setup,
                                                       int taylor_order);

/// %.17g
std::string format_double(double x);

}  // namespace fbflow
