#pragma once

// Run configuration: INI text with the sections [domain], [operator],
// [profile], [initial], [numerics], [audit] and [output]. Unknown sections or
// keys are rejected, as are values of the wrong type.

#include "fbflow/common.hpp"
#include "fbflow/evolve.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/linearization.hpp"
#include "fbflow/operators.hpp"

#include <string>
#include <vector>

namespace fbflow {

enum class ProfileKind { Distance, Quadratic, Polynomial, Radial };
enum class InitialKind { Profile, Mirror };
enum class ExtensionKind { Taylor, Harmonic, Exact };

struct RunConfig {
  DomainConfig domain;

  FlowMode flow = FlowMode::PLaplacian;
  double p_exponent = 3.0;
  double alpha = 1.0;

  ProfileKind profile = ProfileKind::Distance;
  double amplitude = 1.0;
  std::vector<double> coefficients;

  InitialKind initial = InitialKind::Profile;
  double mirror_scale = 1.0;
  double root_bracket = 0.5;

  double c_par = 0.2;
  double c_adv = 0.5;
  double final_time = 0.0;
  int taylor_order = 2;
  Integrator integrator = Integrator::Euler;
  ExtensionKind extension = ExtensionKind::Taylor;
  double interior_diffusivity = 0.0;   ///< 0: largest collar diffusion at t = 0
  double time_step = 0.0;
  double nondegeneracy_threshold = 1e-6;

  LinearizationMethod method = LinearizationMethod::Analytic;
  double tol_A = 1e-8;
  double fichera_margin = 1e-10;
  double stencil_step = 1e-4;

  std::string directory = "out";
  int snapshots = 10;

  OperatorSpec operator_spec() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

const char* to_string(FlowMode m);
const char* to_string(ProfileKind k);
const char* to_string(InitialKind k);
const char* to_string(ExtensionKind k);
const char* to_string(Integrator i);
const char* to_string(LinearizationMethod m);

}  // namespace fbflow
