#include "fbflow/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fbflow {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"domain",
       {"dimension", "shape", "radius", "semi_axes", "lo", "hi", "free_lo", "free_hi", "spline_file", "boundary_nodes",
        "strongly_convex"}},
      {"operator", {"flow", "p_exponent", "alpha"}},
      {"profile", {"type", "amplitude", "coefficients"}},
      {"initial", {"g0", "mirror_scale", "root_bracket"}},
      {"numerics",
       {"grid_spacing", "collar_width", "c_par", "c_adv", "final_time", "taylor_order", "integrator", "extension",
        "interior_diffusivity", "time_step", "nondegeneracy_threshold"}},
      {"audit", {"method", "tol_A", "fichera_margin", "stencil_step"}},
      {"output", {"directory", "snapshots"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void type_error(const std::string& key, const std::string& raw, const char* want) {
  fail(ErrorCode::InvalidConfig, "key '" + key + "': expected " + want + ", got '" + raw + "'");
}

double parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  auto num = [&](const std::string& t) {
    double v = 0.0;
    const auto* b = t.data();
    const auto* e = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (t.empty() || ec != std::errc() || ptr != e) type_error(key, raw, "a number");
    return v;
  };
  // Fractions such as 2/3 are accepted so exponents can be given exactly.
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double d = num(trim(s.substr(slash + 1)));
    if (d == 0.0) type_error(key, raw, "a nonzero denominator");
    return num(trim(s.substr(0, slash))) / d;
  }
  return num(s);
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) type_error(key, raw, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  type_error(key, raw, "a boolean");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  if (out.empty()) type_error(key, raw, "a comma-separated list of numbers");
  return out;
}

template <class E>
E parse_enum(const std::string& key, const std::string& raw, const std::map<std::string, E>& options) {
  const auto it = options.find(trim(raw));
  if (it != options.end()) return it->second;
  std::string list;
  for (const auto& [k, _] : options) list += (list.empty() ? "" : " | ") + k;
  fail(ErrorCode::InvalidConfig, "key '" + key + "': '" + raw + "' is not one of " + list);
}

void validate(RunConfig& c) {
  auto& d = c.domain;
  require(d.dimension >= 1 && d.dimension <= 3, ErrorCode::InvalidConfig, "domain.dimension must be 1, 2 or 3");
  require(d.grid_spacing > 0.0, ErrorCode::InvalidConfig, "numerics.grid_spacing must be positive");
  require(d.collar_width >= 0.0, ErrorCode::InvalidConfig, "numerics.collar_width must be non-negative");
  require(c.c_par > 0.0 && c.c_adv > 0.0, ErrorCode::InvalidConfig, "CFL constants must be positive");
  require(c.final_time >= 0.0, ErrorCode::InvalidConfig, "numerics.final_time must be non-negative");
  require(c.taylor_order >= 0 && c.taylor_order <= 3, ErrorCode::InvalidConfig,
          "numerics.taylor_order must be in 0..3 (higher derivatives of F are not available)");
  require(c.interior_diffusivity >= 0.0, ErrorCode::InvalidConfig, "numerics.interior_diffusivity must be non-negative");
  require(c.time_step >= 0.0, ErrorCode::InvalidConfig, "numerics.time_step must be non-negative");
  require(c.snapshots >= 1, ErrorCode::InvalidConfig, "output.snapshots must be at least 1");
  require(c.mirror_scale > 0.0, ErrorCode::InvalidConfig, "initial.mirror_scale must be positive");
  require(c.root_bracket > 0.0, ErrorCode::InvalidConfig, "initial.root_bracket must be positive");
  require(c.amplitude > 0.0, ErrorCode::InvalidConfig, "profile.amplitude must be positive");
  require(c.tol_A > 0.0 && c.fichera_margin >= 0.0 && c.stencil_step > 0.0, ErrorCode::InvalidConfig,
          "audit tolerances must be positive");
  if (c.profile == ProfileKind::Polynomial || c.profile == ProfileKind::Radial)
    require(!c.coefficients.empty(), ErrorCode::InvalidConfig, "profile.coefficients required for this profile type");
  if (c.extension == ExtensionKind::Exact)
    fail(ErrorCode::InvalidConfig, "numerics.extension = exact needs a closed-form solution and is test-only");
  // Operator parameters are checked by the operator constructors.
  (void)c.operator_spec();
}

}  // namespace

OperatorSpec RunConfig::operator_spec() const {
  switch (flow) {
    case FlowMode::PLaplacian: return OperatorSpec::plaplacian(domain.dimension, p_exponent);
    case FlowMode::GaussFlow: return OperatorSpec::gauss_flow(domain.dimension, alpha);
    case FlowMode::Heat: return OperatorSpec::heat(domain.dimension);
  }
  fail(ErrorCode::InvalidConfig, "unknown flow");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::InvalidConfig, std::string("malformed configuration: ") + e.what());
  }

  RunConfig c;
  auto& d = c.domain;
  for (const auto& [section, body] : tree) {
    const auto sit = schema().find(section);
    if (sit == schema().end()) fail(ErrorCode::InvalidConfig, "unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      fail(ErrorCode::InvalidConfig, "key '" + section + "' outside of any section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (!sit->second.count(key)) fail(ErrorCode::InvalidConfig, "unknown key '" + full + "'");
      const std::string raw = node.data();
      if (section == "domain") {
        if (key == "dimension") d.dimension = parse_int(full, raw);
        else if (key == "shape") d.shape = parse_shape(trim(raw));
        else if (key == "radius") d.radius = parse_number(full, raw);
        else if (key == "semi_axes") d.semi_axes = parse_list(full, raw);
        else if (key == "lo") d.lo = parse_number(full, raw);
        else if (key == "hi") d.hi = parse_number(full, raw);
        else if (key == "free_lo") d.free_lo = parse_bool(full, raw);
        else if (key == "free_hi") d.free_hi = parse_bool(full, raw);
        else if (key == "spline_file") d.spline_file = trim(raw);
        else if (key == "boundary_nodes") d.boundary_nodes = parse_int(full, raw);
        else if (key == "strongly_convex") d.strongly_convex = parse_bool(full, raw);
      } else if (section == "operator") {
        if (key == "flow")
          c.flow = parse_enum<FlowMode>(
              full, raw, {{"plaplacian", FlowMode::PLaplacian}, {"gcf", FlowMode::GaussFlow}, {"heat", FlowMode::Heat}});
        else if (key == "p_exponent") c.p_exponent = parse_number(full, raw);
        else if (key == "alpha") c.alpha = parse_number(full, raw);
      } else if (section == "profile") {
        if (key == "type")
          c.profile = parse_enum<ProfileKind>(full, raw,
                                              {{"distance", ProfileKind::Distance},
                                               {"quadratic", ProfileKind::Quadratic},
                                               {"polynomial", ProfileKind::Polynomial},
                                               {"radial", ProfileKind::Radial}});
        else if (key == "amplitude") c.amplitude = parse_number(full, raw);
        else if (key == "coefficients") c.coefficients = parse_list(full, raw);
      } else if (section == "initial") {
        if (key == "g0")
          c.initial = parse_enum<InitialKind>(full, raw, {{"profile", InitialKind::Profile}, {"mirror", InitialKind::Mirror}});
        else if (key == "mirror_scale") c.mirror_scale = parse_number(full, raw);
        else if (key == "root_bracket") c.root_bracket = parse_number(full, raw);
      } else if (section == "numerics") {
        if (key == "grid_spacing") d.grid_spacing = parse_number(full, raw);
        else if (key == "collar_width") d.collar_width = parse_number(full, raw);
        else if (key == "c_par") c.c_par = parse_number(full, raw);
        else if (key == "c_adv") c.c_adv = parse_number(full, raw);
        else if (key == "final_time") c.final_time = parse_number(full, raw);
        else if (key == "taylor_order") c.taylor_order = parse_int(full, raw);
        else if (key == "integrator")
          c.integrator = parse_enum<Integrator>(full, raw, {{"euler", Integrator::Euler}, {"heun", Integrator::Heun}});
        else if (key == "extension")
          c.extension = parse_enum<ExtensionKind>(
              full, raw,
              {{"taylor", ExtensionKind::Taylor}, {"harmonic", ExtensionKind::Harmonic}, {"exact", ExtensionKind::Exact}});
        else if (key == "interior_diffusivity") c.interior_diffusivity = parse_number(full, raw);
        else if (key == "time_step") c.time_step = parse_number(full, raw);
        else if (key == "nondegeneracy_threshold") c.nondegeneracy_threshold = parse_number(full, raw);
      } else if (section == "audit") {
        if (key == "method")
          c.method = parse_enum<LinearizationMethod>(
              full, raw, {{"analytic", LinearizationMethod::Analytic}, {"fd", LinearizationMethod::FiniteDifference}});
        else if (key == "tol_A") c.tol_A = parse_number(full, raw);
        else if (key == "fichera_margin") c.fichera_margin = parse_number(full, raw);
        else if (key == "stencil_step") c.stencil_step = parse_number(full, raw);
      } else if (section == "output") {
        if (key == "directory") c.directory = trim(raw);
        else if (key == "snapshots") c.snapshots = parse_int(full, raw);
      }
    }
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorCode::Io, "cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

const char* to_string(FlowMode m) {
  switch (m) {
    case FlowMode::PLaplacian: return "plaplacian";
    case FlowMode::GaussFlow: return "gcf";
    case FlowMode::Heat: return "heat";
  }
  return "?";
}

const char* to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Distance: return "distance";
    case ProfileKind::Quadratic: return "quadratic";
    case ProfileKind::Polynomial: return "polynomial";
    case ProfileKind::Radial: return "radial";
  }
  return "?";
}

const char* to_string(InitialKind k) { return k == InitialKind::Profile ? "profile" : "mirror"; }

const char* to_string(ExtensionKind k) {
  switch (k) {
    case ExtensionKind::Taylor: return "taylor";
    case ExtensionKind::Harmonic: return "harmonic";
    case ExtensionKind::Exact: return "exact";
  }
  return "?";
}

const char* to_string(Integrator i) { return i == Integrator::Euler ? "euler" : "heun"; }

const char* to_string(LinearizationMethod m) { return m == LinearizationMethod::Analytic ? "analytic" : "fd"; }

}  // namespace fbflow
