#include "fbflow/pipeline.hpp"

#include "fbflow/linearization.hpp"
#include "fbflow/oracles.hpp"
#include "fbflow/transform.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace fbflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json config_json(const RunConfig& c) {
  const auto& d = c.domain;
  json j;
  j["domain"] = {{"dimension", d.dimension},
                 {"shape", to_string(d.shape)},
                 {"radius", d.radius},
                 {"semi_axes", d.semi_axes},
                 {"lo", d.lo},
                 {"hi", d.hi},
                 {"free_lo", d.free_lo},
                 {"free_hi", d.free_hi},
                 {"spline_file", d.spline_file},
                 {"boundary_nodes", d.boundary_nodes},
                 {"strongly_convex", d.strongly_convex}};
  j["operator"] = {{"flow", to_string(c.flow)}, {"p_exponent", c.p_exponent}, {"alpha", c.alpha}};
  j["profile"] = {{"type", to_string(c.profile)}, {"amplitude", c.amplitude}, {"coefficients", c.coefficients}};
  j["initial"] = {{"g0", to_string(c.initial)}, {"mirror_scale", c.mirror_scale}, {"root_bracket", c.root_bracket}};
  j["numerics"] = {{"grid_spacing", d.grid_spacing},
                   {"collar_width", d.collar_width > 0.0 ? d.collar_width : 10.0 * d.grid_spacing},
                   {"c_par", c.c_par},
                   {"c_adv", c.c_adv},
                   {"final_time", c.final_time},
                   {"taylor_order", c.taylor_order},
                   {"integrator", to_string(c.integrator)},
                   {"extension", to_string(c.extension)},
                   {"interior_diffusivity", c.interior_diffusivity},
                   {"time_step", c.time_step},
                   {"nondegeneracy_threshold", c.nondegeneracy_threshold}};
  j["audit"] = {{"method", to_string(c.method)},
                {"tol_A", c.tol_A},
                {"fichera_margin", c.fichera_margin},
                {"stencil_step", c.stencil_step}};
  j["output"] = {{"directory", c.directory}, {"snapshots", c.snapshots}};
  return j;
}

void write_text(const fs::path& p, const std::string& s, std::vector<std::string>& files) {
  std::ofstream f(p, std::ios::binary);
  require(f.good(), ErrorCode::Io, "cannot write '" + p.string() + "'");
  f << s;
  require(f.good(), ErrorCode::Io, "write failed for '" + p.string() + "'");
  files.push_back(p.string());
}

fs::path prepare_dir(const RunConfig& cfg, const RunRequest& req) {
  const fs::path dir = req.out_dir.empty() ? fs::path(cfg.directory) : fs::path(req.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::Io, "cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string csv_row(std::initializer_list<double> xs) {
  std::string s;
  bool first = true;
  for (double x : xs) {
    if (!first) s += ',';
    s += format_double(x);
    first = false;
  }
  s += '\n';
  return s;
}

}  // namespace

// ----------------------------------------------------------------------------

ScalarFieldPtr build_profile(const RunConfig& cfg, const DomainSpec& domain) {
  const auto& d = domain.config();
  const double A = cfg.amplitude;
  const int n = domain.dim();
  switch (cfg.profile) {
    case ProfileKind::Distance:
      if (domain.shape() == Shape::Interval) {
        if (d.free_hi && !d.free_lo) return std::make_shared<Polynomial1D>(d.hi, std::vector<double>{0.0, A});
        if (d.free_lo && !d.free_hi) return std::make_shared<Polynomial1D>(d.lo, std::vector<double>{0.0, A}, true);
      }
      return std::make_shared<DistanceProfile>(domain, A);
    case ProfileKind::Quadratic: {
      if (domain.shape() == Shape::Disk) return std::make_shared<QuadraticProfile>(A, Vec::Constant(n, d.radius));
      if (domain.shape() == Shape::Ellipse)
        return std::make_shared<QuadraticProfile>(A, Vec(Eigen::Vector2d(d.semi_axes[0], d.semi_axes[1])));
      if (domain.shape() == Shape::Interval) {
        require(std::abs(d.lo + d.hi) <= 1e-12 * std::max(1.0, d.hi), ErrorCode::InvalidConfig,
                "quadratic profile on an interval needs lo = -hi");
        return std::make_shared<QuadraticProfile>(A, Vec::Constant(1, d.hi));
      }
      fail(ErrorCode::InvalidConfig, "quadratic profile needs a disk, ellipse or symmetric interval");
    }
    case ProfileKind::Polynomial: {
      require(domain.shape() == Shape::Interval && !(d.free_lo && d.free_hi), ErrorCode::InvalidConfig,
              "polynomial profile needs an interval with one free end");
      std::vector<double> c = cfg.coefficients;
      for (auto& x : c) x *= A;
      if (d.free_hi) return std::make_shared<Polynomial1D>(d.hi, c);
      return std::make_shared<Polynomial1D>(d.lo, c, true);
    }
    case ProfileKind::Radial: {
      require(domain.shape() == Shape::Disk, ErrorCode::InvalidConfig, "radial profile needs a disk domain");
      std::vector<double> c = cfg.coefficients;
      for (auto& x : c) x *= A;
      return std::make_shared<RadialPolynomial>(n, c);
    }
  }
  fail(ErrorCode::InvalidConfig, "unknown profile type");
}

MovingFieldPtr build_initial_g(const RunConfig& cfg, const ScalarFieldPtr& v) {
  if (cfg.initial == InitialKind::Profile) return std::make_shared<StaticField>(v);
  return std::make_shared<StaticField>(std::make_shared<ScaledField>(v, -cfg.mirror_scale));
}

HFieldPtr build_initial_h(const RunConfig& cfg, const ScalarFieldPtr& v) {
  if (cfg.initial == InitialKind::Profile) return std::make_shared<ZeroHField>(v->dim());
  SolveOptions opt;
  opt.bracket = cfg.root_bracket;
  return std::make_shared<SolvedHField>(build_initial_g(cfg, v), v, 0.0, opt);
}

FixedSetup build_fixed_setup(const RunConfig& cfg) {
  FixedSetup s;
  s.domain = build_domain(cfg.domain);
  s.v = build_profile(cfg, s.domain);
  auto grid = make_evolve_grid(s.domain);
  s.eta = s.domain.collar_width();
  s.collar = collar_mask(grid, s.eta);
  s.G = std::make_shared<GridOperator>(cfg.operator_spec(), grid, s.v);
  const auto& g = s.G->grid();
  const int n = g.size();
  s.h0.assign(n, 0.0);
  if (cfg.initial == InitialKind::Mirror) {
    const auto g0 = build_initial_g(cfg, s.v);
    SolveOptions opt;
    opt.bracket = cfg.root_bracket;
    std::vector<char> ok(n, 0);
    for (int j = 0; j < n; ++j) {
      try {
        s.h0[j] = solve_h(g.point(j), 0.0, *g0, *s.v, opt);
        ok[j] = 1;
      } catch (const Error& e) {
        if (s.collar[j]) throw Error(e.code(), std::string("initial h on the collar: ") + e.what());
      }
    }
    // Continue inward from the last solvable node next to each free end.
    SolvedHField hf(g0, s.v, 0.0, opt);
    auto continue_from = [&](int start, int dir) {
      int j = start;
      while (j >= 0 && j < n && ok[j]) j += dir;
      if (j < 0 || j >= n) return;
      const int a = j - dir;
      const double sa = g.s[a];
      const double ha = s.h0[a];
      const double da = hf.jet(g.point(a)).grad(0);
      for (int k = j; k >= 0 && k < n; k += dir) {
        if (g.kind == GridKind::Radial)
          s.h0[k] = ha + da * (g.s[k] * g.s[k] - sa * sa) / (2.0 * sa);
        else
          s.h0[k] = ha + da * (g.s[k] - sa);
      }
    };
    if (g.free_hi) continue_from(g.last(), -1);
    if (g.free_lo) continue_from(0, +1);
  }
  return s;
}

double collar_diffusivity(const FixedSetup& setup) {
  const auto st = choose_stencils(*setup.G, setup.h0, setup.collar);
  double amax = 0.0;
  for (int j = 0; j < setup.G->grid().size(); ++j)
    if (setup.collar[j]) amax = std::max(amax, setup.G->drift(j, setup.G->derivs(setup.h0, j, st[j])).first);
  return amax > 0.0 ? amax : 1.0;
}

std::shared_ptr<const ExtendedOperator> build_extended(const RunConfig& cfg, const FixedSetup& setup,
                                                       int taylor_order) {
  const auto& grid = setup.G->grid();
  ExtensionSourcePtr src;
  if (cfg.extension == ExtensionKind::Harmonic) {
    src = std::make_shared<HarmonicExtension>(grid, setup.eta);
  } else {
    const auto st = choose_stencils(*setup.G, setup.h0, setup.collar);
    src = std::make_shared<TaylorExtension>(grid, setup.eta, taylor_seed(*setup.G, setup.h0, taylor_order, st));
  }
  BlendSpec blend;
  blend.kappa = cfg.interior_diffusivity > 0.0 ? cfg.interior_diffusivity : collar_diffusivity(setup);
  return std::make_shared<ExtendedOperator>(setup.G, setup.eta, blend, src);
}

// ----------------------------------------------------------------------------

namespace {

RunResult run_check_conditions(const RunConfig& cfg, const RunRequest& req) {
  RunResult res;
  const auto dir = prepare_dir(cfg, req);
  const DomainSpec domain = build_domain(cfg.domain);
  const auto spec = cfg.operator_spec();
  const auto v = build_profile(cfg, domain);
  const auto h = build_initial_h(cfg, v);

  const auto nondeg = check_nondegeneracy(*v, domain, cfg.nondegeneracy_threshold);

  BoundaryOptions bo;
  bo.method = cfg.method;
  bo.delta = cfg.stencil_step;
  std::vector<BoundaryAnalysis> boundary;
  for (const auto& b : domain.nodes()) boundary.push_back(analyze_boundary_node(spec, *h, *v, b.x, b.normal, bo));

  const CollarGrid collar = build_collar(domain);
  std::vector<Vec> interior;
  for (const auto& c : collar.nodes)
    if (c.flag != CollarNode::BoundaryAdjacent) interior.push_back(c.x);
  const auto lin = linearize(spec, *h, *v, interior, cfg.method);

  AuditTolerances tol;
  tol.tol_A = cfg.tol_A;
  tol.fichera_margin = cfg.fichera_margin;
  const ConditionReport rep = audit_conditions(lin, boundary, tol);

  json j;
  j["config"] = config_json(cfg);
  j["operator"] = spec.name();
  j["nondegeneracy"] = {{"min_margin", nondeg.min_margin},
                        {"min_boundary_slope", nondeg.min_boundary_slope},
                        {"threshold", nondeg.threshold},
                        {"pass", nondeg.pass}};
  j["summary"] = {{"min_E", rep.min_E},   {"max_A", rep.max_A},   {"max_B", rep.max_B},
                  {"max_A2", rep.max_A2}, {"a_scale", rep.a_scale}, {"pass_E", rep.pass_E},
                  {"pass_A", rep.pass_A}, {"pass_B", rep.pass_B}, {"pass_A2", rep.pass_A2},
                  {"pass", rep.pass && nondeg.pass}};
  json nodes = json::array();
  for (const auto& ba : boundary) {
    nodes.push_back({{"x", vec_json(ba.x)},
                     {"a_nn", ba.a(ba.a.rows() - 1, ba.a.cols() - 1)},
                     {"dn_a_nn", ba.dn_ann},
                     {"b_n", ba.b(ba.b.size() - 1)},
                     {"fichera", ba.fichera},
                     {"closed_form", {{"a_nn", ba.cf_ann}, {"dn_a_nn", ba.cf_dn_ann}, {"b_n", ba.cf_bn},
                                      {"fichera", ba.cf_fichera}}}});
  }
  j["boundary_nodes"] = nodes;
  j["interior_nodes"] = interior.size();
  res.report = j.dump(2);
  write_text(dir / "conditions.json", res.report + "\n", res.files);

  const bool pass = rep.pass && nondeg.pass;
  std::ostringstream os;
  os << "check-conditions " << spec.name() << ": " << (pass ? "PASS" : "FAIL") << "\n"
     << "  (E) min eigenvalue      " << format_double(rep.min_E) << (rep.pass_E ? "  ok" : "  FAIL") << "\n"
     << "  (A) max |a_nn|/|a|      " << format_double(rep.max_A) << (rep.pass_A ? "  ok" : "  FAIL") << "\n"
     << "  (B) max Fichera         " << format_double(rep.max_B) << (rep.pass_B ? "  ok" : "  FAIL") << "\n"
     << "  (A2) max d_n a_nn       " << format_double(rep.max_A2) << (rep.pass_A2 ? "  ok" : "  FAIL") << "\n"
     << "  nondegeneracy margin    " << format_double(nondeg.min_margin) << (nondeg.pass ? "  ok" : "  FAIL")
     << "\n";
  res.summary = os.str();
  res.exit_code = pass ? 0 : 1;
  return res;
}

std::vector<Vec> boundary_polyline(const EvolveGrid& grid, const Snapshot& s) {
  if (grid.kind == GridKind::Interval) return s.boundary;
  const double r = boundary_coordinate(s);
  std::vector<Vec> pts;
  const int M = 64;
  if (grid.dim == 2) {
    for (int k = 0; k < M; ++k) {
      const double th = 2.0 * std::numbers::pi * k / M;
      pts.push_back(Vec(Eigen::Vector2d(r * std::cos(th), r * std::sin(th))));
    }
  } else {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < M; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / M;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      pts.push_back(Vec(Eigen::Vector3d(r * rho * std::cos(golden * k), r * rho * std::sin(golden * k), r * z)));
    }
  }
  return pts;
}

RunResult run_evolve(const RunConfig& cfg, const RunRequest& req) {
  RunResult res;
  const auto dir = prepare_dir(cfg, req);
  const FixedSetup setup = build_fixed_setup(cfg);
  const auto nondeg = check_nondegeneracy(*setup.v, setup.domain, cfg.nondegeneracy_threshold);
  const auto op = build_extended(cfg, setup, cfg.taylor_order);
  EvolveOptions eo;
  eo.integrator = cfg.integrator;
  eo.c_par = cfg.c_par;
  eo.c_adv = cfg.c_adv;
  eo.final_time = cfg.final_time;
  eo.snapshots = cfg.snapshots;
  eo.fixed_dt = cfg.time_step;
  const FixedDomainSolver solver(op, eo);
  const Trajectory tr = solver.run(setup.h0);
  const auto& grid = setup.G->grid();
  const bool gcf = cfg.flow == FlowMode::GaussFlow;

  json snaps = json::array();
  bool audits_ok = nondeg.pass;
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const Snapshot& s = tr.snapshots[k];
    std::string csv = "s,h,g,image,a,b,det_phi,det_B,collar\n";
    double min_g = std::numeric_limits<double>::infinity(), min_det_B = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid.size(); ++j) {
      const auto& D = s.diag;
      csv += csv_row({grid.s[j], s.h[j], D.g[j], D.image[j], D.a[j], D.b[j], D.det_phi[j], D.det_B[j],
                      static_cast<double>(setup.collar[j])});
      if (setup.collar[j] && grid.distance[j] > 0.5 * grid.dx) min_g = std::min(min_g, D.g[j]);
      if (setup.collar[j] && gcf) min_det_B = std::min(min_det_B, D.det_B[j]);
    }
    write_text(dir / ("snapshot_" + std::to_string(k) + ".csv"), csv, res.files);
    std::string bcsv = grid.dim == 1 ? "x\n" : (grid.dim == 2 ? "x,y\n" : "x,y,z\n");
    for (const Vec& p : boundary_polyline(grid, s)) {
      for (int i = 0; i < p.size(); ++i) bcsv += (i ? "," : "") + format_double(p(i));
      bcsv += '\n';
    }
    write_text(dir / ("boundary_" + std::to_string(k) + ".csv"), bcsv, res.files);
    const bool pos_ok = min_g > 0.0;
    const bool conv_ok = !gcf || min_det_B >= -1e-10;
    const bool drift_ok = !(s.end_drift > 0.0);
    audits_ok = audits_ok && pos_ok && conv_ok && drift_ok;
    json sj = {{"t", s.t},
               {"boundary", boundary_coordinate(s)},
               {"min_collar_g", min_g},
               {"end_drift", s.end_drift},
               {"audit_positivity", pos_ok},
               {"audit_outflow", drift_ok}};
    if (gcf) {
      sj["min_det_B"] = min_det_B;
      sj["audit_convexity"] = conv_ok;
    }
    snaps.push_back(sj);
  }

  json j;
  j["config"] = config_json(cfg);
  j["operator"] = setup.G->spec().name();
  j["grid"] = {{"kind", grid.kind == GridKind::Radial ? "radial" : "interval"},
               {"nodes", grid.size()},
               {"dx", grid.dx},
               {"collar_width", setup.eta}};
  j["extension"] = op->source().name();
  j["cfl"] = {{"c_par", cfg.c_par}, {"c_adv", cfg.c_adv}, {"max_par", tr.max_cfl_par}, {"max_adv", tr.max_cfl_adv}};
  j["steps"] = tr.steps;
  j["t_reached"] = tr.t_reached;
  j["completed"] = tr.completed;
  j["abort_reason"] = tr.abort_reason;
  j["min_det_phi"] = tr.min_det_phi;
  j["nondegeneracy"] = {{"min_margin", nondeg.min_margin}, {"pass", nondeg.pass}};
  j["snapshots"] = snaps;
  j["audits_pass"] = audits_ok;
  res.report = j.dump(2);
  write_text(dir / "run.json", res.report + "\n", res.files);

  std::ostringstream os;
  os << "evolve " << setup.G->spec().name() << ": " << tr.snapshots.size() << " snapshot(s), " << tr.steps
     << " step(s), t = " << format_double(tr.t_reached);
  if (!tr.completed)
    os << "\n  aborted: " << tr.abort_reason;
  else if (!audits_ok)
    os << "\n  audit failure (see run.json)";
  if (!tr.snapshots.empty()) os << "\n  boundary " << format_double(boundary_coordinate(tr.snapshots.back()));
  os << "\n";
  res.summary = os.str();
  res.exit_code = !tr.completed ? 2 : (audits_ok ? 0 : 1);
  return res;
}

RunResult run_oracle_test(const RunConfig& cfg, const RunRequest& req) {
  RunResult res;
  const auto dir = prepare_dir(cfg, req);
  const auto checks = run_oracle_checks(req.seed);
  json arr = json::array();
  std::ostringstream os;
  bool all = true;
  os << std::left << std::setw(48) << "check" << std::setw(26) << "value" << std::setw(10) << "tol" << "result\n";
  for (const auto& c : checks) {
    all = all && c.pass;
    arr.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    std::ostringstream tol;
    tol << c.tolerance;
    os << std::setw(48) << c.name << std::setw(26) << format_double(c.value) << std::setw(10) << tol.str()
       << (c.pass ? "pass" : "FAIL") << "\n";
  }
  json j;
  j["seed"] = req.seed;
  j["checks"] = arr;
  j["pass"] = all;
  res.report = j.dump(2);
  write_text(dir / "oracles.json", res.report + "\n", res.files);
  res.summary = os.str();
  res.exit_code = all ? 0 : 1;
  return res;
}

RunResult run_taylor_seed(const RunConfig& cfg, const RunRequest& req) {
  RunResult res;
  const auto dir = prepare_dir(cfg, req);
  const int K = req.order >= 0 ? req.order : cfg.taylor_order;
  require(K <= 3, ErrorCode::InvalidConfig, "Taylor order must be in 0..3");
  const FixedSetup setup = build_fixed_setup(cfg);
  const auto st = choose_stencils(*setup.G, setup.h0, setup.collar);
  const TaylorSeed seed = taylor_seed(*setup.G, setup.h0, K, st);
  const auto& grid = setup.G->grid();
  std::string csv = "s";
  for (int k = 0; k <= K; ++k) csv += ",h" + std::to_string(k);
  csv += ",valid\n";
  for (int j = 0; j < grid.size(); ++j) {
    csv += format_double(grid.s[j]);
    for (int k = 0; k <= K; ++k) csv += "," + format_double(seed.coeffs[k][j]);
    csv += "," + std::to_string(static_cast<int>(seed.valid[j])) + "\n";
  }
  write_text(dir / "taylor_seed.csv", csv, res.files);
  json j;
  j["config"] = config_json(cfg);
  j["order"] = K;
  j["nodes"] = grid.size();
  res.report = j.dump(2);
  std::ostringstream os;
  os << "taylor-seed order " << K << " on " << grid.size() << " nodes -> " << (dir / "taylor_seed.csv").string()
     << "\n";
  res.summary = os.str();
  res.exit_code = 0;
  return res;
}

}  // namespace

RunResult dispatch(const RunConfig& cfg_in, const RunRequest& req) {
  RunConfig cfg = cfg_in;
  if (req.grid > 0.0) cfg.domain.grid_spacing = req.grid;
  try {
    if (req.subcommand == "check-conditions") return run_check_conditions(cfg, req);
    if (req.subcommand == "evolve") return run_evolve(cfg, req);
    if (req.subcommand == "oracle-test") return run_oracle_test(cfg, req);
    if (req.subcommand == "taylor-seed") return run_taylor_seed(cfg, req);
  } catch (const Error& e) {
    RunResult r;
    r.exit_code = 2;
    r.summary = std::string(req.subcommand) + " aborted (" + to_string(e.code()) + "): " + e.what() + "\n";
    r.report = json{{"error", e.what()}, {"code", to_string(e.code())}}.dump(2);
    return r;
  }
  RunResult r;
  r.exit_code = 2;
  r.summary = "unknown subcommand '" + req.subcommand + "' (check-conditions | evolve | oracle-test | taylor-seed)\n";
  return r;
}

}  // namespace fbflow
