// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "fbflow/config.hpp"
#include "fbflow/evolve.hpp"
#include "fbflow/extension.hpp"
#include "fbflow/geometry.hpp"
#include "fbflow/linearization.hpp"
#include "fbflow/oracles.hpp"
#include "fbflow/pipeline.hpp"
#include "fbflow/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace fbflow;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
    pass = pass && ok;
  }
};

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

Vec on_circle(double R, double th) { return Vec(Eigen::Vector2d(R * std::cos(th), R * std::sin(th))); }

DomainSpec unit_disk() {
  DomainConfig d;
  d.dimension = 2;
  d.shape = Shape::Disk;
  d.radius = 1.0;
  d.boundary_nodes = 64;
  return build_domain(d);
}

// Largest |a| over the collar of the unit disk under g = 1 - |x|^2.
double plap_a_scale(const OperatorSpec& spec) {
  const DomainSpec disk = unit_disk();
  const QuadraticProfile v(1.0, Vec::Constant(2, 1.0));
  std::vector<Vec> pts;
  for (const auto& c : build_collar(disk).nodes) pts.push_back(c.x);
  double s = 0.0;
  for (const auto& c : linearize(spec, ZeroHField(2), v, pts).coeffs) s = std::max(s, c.a.norm());
  return s;
}

struct GcfState {
  OperatorSpec spec;
  ScalarFieldPtr v;
  HFieldPtr h;
  Vec x, normal;
};

// Flat disk of radius R under v = R^2 - r^2, pressure g0 = c (r^2 - R^2).
GcfState gcf_state(double alpha, double R, double c, double theta) {
  GcfState s{OperatorSpec::gauss_flow(2, alpha), nullptr, nullptr, {}, {}};
  s.v = std::make_shared<RadialPolynomial>(2, std::vector<double>{R * R, 0.0, -1.0});
  auto g0 = std::make_shared<StaticField>(std::make_shared<ScaledField>(s.v, -c));
  SolveOptions so;
  so.bracket = 0.5;
  s.h = std::make_shared<SolvedHField>(g0, s.v, 0.0, so);
  s.x = on_circle(R, theta);
  s.normal = on_circle(1.0, theta);
  return s;
}

// 1. Fichera value for the p-Laplacian on the unit disk.
Outcome crit1() {
  Outcome o;
  const DomainSpec disk = unit_disk();
  const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
  const ZeroHField h(2);
  for (double p : {3.0, 4.0}) {
    const auto spec = OperatorSpec::plaplacian(2, p);
    double worst = 0.0;
    for (const auto& b : disk.nodes()) {
      const auto ba = analyze_boundary_node(spec, h, *v, b.x, b.normal);
      // g = 1 - |x|^2 has outward normal derivative -2|x|.
      const double gn = -2.0 * b.x.norm();
      worst = std::max(worst, rel(ba.fichera, std::pow(std::abs(gn), p - 2.0) * gn));
    }
    o.check(worst <= 1e-6, "p=%.0f: max rel err %.3e over 64 nodes (tol 1e-6)", p, worst);
  }
  return o;
}

// 2. Finite-difference coefficients against the closed forms.
Outcome crit2() {
  Outcome o;
  BoundaryOptions fd;
  fd.method = LinearizationMethod::FiniteDifference;
  fd.eps = 1e-5;
  auto compare = [&](const char* tag, const OperatorSpec& spec, const HField& h, const ScalarField& v,
                     const std::vector<std::pair<Vec, Vec>>& pts, double a_scale) {
    double e[4] = {0, 0, 0, 0};
    for (const auto& [x, nu] : pts) {
      const auto ba = analyze_boundary_node(spec, h, v, x, nu, fd);
      const int n = static_cast<int>(ba.b.size()) - 1;
      const double scale = std::max({ba.a_norm, a_scale, 1e-300});
      e[0] = std::max(e[0], std::abs(ba.a(n, n) - ba.cf_ann) / scale);
      e[1] = std::max(e[1], rel(ba.dn_ann, ba.cf_dn_ann));
      e[2] = std::max(e[2], rel(ba.b(n), ba.cf_bn));
      e[3] = std::max(e[3], rel(ba.fichera, ba.cf_fichera));
    }
    const char* part[4] = {"(i) a_nn", "(ii) d_n a_nn", "(iii) b_n", "(iv) Fichera"};
    for (int k = 0; k < 4; ++k) {
      char fmt[160];
      std::snprintf(fmt, sizeof fmt, "%s %s: max rel err %%.3e (tol 1e-4)", tag, part[k]);
      o.check(e[k] <= 1e-4, fmt, e[k]);
    }
  };
  {
    const DomainSpec disk = unit_disk();
    const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
    std::vector<std::pair<Vec, Vec>> pts;
    for (const auto& b : disk.nodes()) pts.emplace_back(b.x, b.normal);
    const auto spec = OperatorSpec::plaplacian(2, 3.0);
    compare("plaplacian p=3", spec, ZeroHField(2), *v, pts, plap_a_scale(spec));
  }
  {
    const auto s = gcf_state(1.0, 0.5, 1.0, 0.0);
    std::vector<std::pair<Vec, Vec>> pts;
    for (int k = 0; k < 16; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 16;
      pts.emplace_back(on_circle(0.5, th), on_circle(1.0, th));
    }
    compare("gcf alpha=1", s.spec, *s.h, *s.v, pts, 0.0);
  }
  return o;
}

// 3. Degeneracy in the normal direction.
Outcome crit3() {
  Outcome o;
  const DomainSpec disk = unit_disk();
  const auto v = std::make_shared<QuadraticProfile>(1.0, Vec::Constant(2, 1.0));
  const ZeroHField h(2);
  for (double p : {3.0, 4.0}) {
    const auto spec = OperatorSpec::plaplacian(2, p);
    const double scale = plap_a_scale(spec);
    double worst = 0.0;
    for (const auto& b : disk.nodes()) {
      const auto ba = analyze_boundary_node(spec, h, *v, b.x, b.normal);
      const int n = static_cast<int>(ba.b.size()) - 1;
      worst = std::max(worst, std::abs(ba.a(n, n)) / scale);
    }
    o.check(worst <= 1e-10, "plaplacian p=%.0f: max |a_nn| / max_collar |a| = %.3e (tol 1e-10)", p, worst);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> R(0.3, 0.7), C(0.5, 2.0), TH(0.0, 2.0 * std::numbers::pi);
  for (double alpha : {1.0, 2.0 / 3.0}) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto s = gcf_state(alpha, R(rng), C(rng), TH(rng));
      worst = std::max(worst, analyze_boundary_node(s.spec, *s.h, *s.v, s.x, s.normal).nu_FA_rel);
    }
    o.check(worst <= 1e-10, "gcf alpha=%.4f: max |nu.dF/dA|/|dF/dA| = %.3e over 100 states (tol 1e-10)", alpha,
            worst);
  }
  return o;
}

// 4. Fichera value against the Gauss-flow bound.
Outcome crit4() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> R(0.3, 0.7), C(0.5, 2.0), TH(0.0, 2.0 * std::numbers::pi);
  for (double alpha : {1.0, 2.0 / 3.0}) {
    int below = 0, negative = 0;
    double worst_gap = -1e300, f_at = 0.0, b_at = 0.0;
    for (int k = 0; k < 100; ++k) {
      const auto s = gcf_state(alpha, R(rng), C(rng), TH(rng));
      const auto ba = analyze_boundary_node(s.spec, *s.h, *s.v, s.x, s.normal);
      const double bound = gcf_fichera_bound(s.spec, ba);
      if (ba.fichera <= bound) ++below;
      if (bound < 0.0) ++negative;
      if (ba.fichera - bound > worst_gap) {
        worst_gap = ba.fichera - bound;
        f_at = ba.fichera;
        b_at = bound;
      }
    }
    o.check(negative == 100, "alpha=%.4f: bound negative in %.0f/100 states", alpha, negative);
    o.check(below == 100, "alpha=%.4f: Fichera <= bound in %.0f/100 states", alpha, below);
    o.check(worst_gap <= 0.0, "worst state: Fichera %.6g vs bound %.6g", f_at, b_at);
  }
  return o;
}

RunConfig wave_config(double dx) {
  RunConfig c = parse_config(
      "[domain]\ndimension = 1\nshape = interval\nlo = -1\nhi = 0\nfree_hi = true\n"
      "[operator]\nflow = plaplacian\np_exponent = 3\n"
      "[numerics]\nfinal_time = 0.1\nintegrator = heun\n");
  c.domain.grid_spacing = dx;
  return c;
}

Trajectory run_wave(const RunConfig& cfg, const FixedSetup& setup, BlendSpec blend) {
  const auto& grid = setup.G->grid();
  const auto st = choose_stencils(*setup.G, setup.h0, setup.collar);
  auto src = std::make_shared<TaylorExtension>(grid, setup.eta, taylor_seed(*setup.G, setup.h0, cfg.taylor_order, st));
  auto op = std::make_shared<ExtendedOperator>(setup.G, setup.eta, blend, src);
  EvolveOptions eo;
  eo.integrator = cfg.integrator;
  eo.final_time = cfg.final_time;
  eo.snapshots = 10;
  return FixedDomainSolver(op, eo).run(setup.h0);
}

// 5. Traveling wave displacement and refinement.
Outcome crit5() {
  Outcome o;
  const double exact = 0.1;
  double err[2];
  const double dxs[2] = {1.0 / 256, 1.0 / 512};
  for (int k = 0; k < 2; ++k) {
    const auto cfg = wave_config(dxs[k]);
    const auto setup = build_fixed_setup(cfg);
    BlendSpec blend;
    blend.kappa = collar_diffusivity(setup);
    const auto tr = run_wave(cfg, setup, blend);
    if (!tr.completed) {
      o.check(false, "dx=1/%.0f aborted at t=%.4g", 1.0 / dxs[k], tr.t_reached);
      return o;
    }
    const double d = boundary_coordinate(tr.snapshots.back());
    err[k] = std::abs(d - exact);
    if (k == 0) o.check(d >= 0.099 && d <= 0.101, "dx=1/256: displacement %.9f in [0.099, 0.101]", d);
    o.check(true, "dx=1/%.0f: |error| = %.3e", 1.0 / dxs[k], err[k]);
  }
  const double factor = err[0] / std::max(err[1], 1e-300);
  o.check(factor >= 1.8, "refinement factor %.3f (need >= 1.8)", factor);
  return o;
}

// 6. Barenblatt exponents, support radius and mass.
Outcome crit6() {
  Outcome o;
  for (auto [n, p] : {std::pair{1, 3.0}, std::pair{1, 4.0}, std::pair{2, 3.0}, std::pair{3, 5.0}}) {
    const auto ex = derive_barenblatt_exponents(n, p);
    o.check(ex.scaling_residual <= 1e-10, "n=%.0f p=%.0f: exponent residual %.3e (tol 1e-10)", n, p,
            ex.scaling_residual);
  }
  const Barenblatt B(1, 3.0, 1.0);
  DirectGrid g;
  g.radial = true;
  g.dim = 1;
  g.dx = 1.0 / 400;
  g.size = static_cast<int>(std::ceil(2.0 * B.support_radius(1.0) / g.dx)) + 2;
  const PLapUFormSolver solver(g, 3.0);
  DirectState s;
  s.t = 0.5;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = B.u(g.s(j), s.t);
  const double m0 = solver.mass(s);
  run_direct(solver, s, 1.0, [&](const DirectState& st) { return solver.front(st); });
  const double R = solver.front(s), Rex = B.support_radius(1.0);
  o.check(rel(R, Rex) <= 0.02, "support radius %.6f vs %.6f, rel %.3e (tol 2%%)", R, Rex, rel(R, Rex));
  const double drift = rel(solver.mass(s), m0);
  o.check(drift <= 0.005, "mass drift %.3e (tol 0.5%%)", drift);
  return o;
}

// 7. Transform round trip.
Outcome crit7() {
  Outcome o;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> X(-0.9, -0.01), T(0.0, 0.2);
  const TravelingWave wave(1, 1.0, 3.0);
  const auto v1 = std::make_shared<Polynomial1D>(0.0, std::vector<double>{0.0, 1.0});
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Vec x = Vec::Constant(1, X(rng));
    const double t = T(rng);
    const double a = solve_h(x, t, wave, *v1);
    const double b = brute_force_h(x, t, wave, *v1, -0.5, 0.5);
    worst = std::max(worst, std::abs(a - b));
  }
  std::uniform_real_distribution<double> Rr(0.45, 0.5), C(0.5, 2.0), TH(0.0, 2.0 * std::numbers::pi);
  const auto v2 = std::make_shared<RadialPolynomial>(2, std::vector<double>{0.25, 0.0, -1.0});
  for (int k = 0; k < 500; ++k) {
    const StaticField g(std::make_shared<ScaledField>(v2, -C(rng)));
    const Vec x = on_circle(Rr(rng), TH(rng));
    const double a = solve_h(x, 0.0, g, *v2);
    const double b = brute_force_h(x, 0.0, g, *v2, -0.5, 0.5);
    worst = std::max(worst, std::abs(a - b));
  }
  o.check(worst <= 1e-12, "solve_h vs bisection: max |diff| %.3e over 1000 samples (tol 1e-12)", worst);

  double inv = 0.0;
  std::uniform_real_distribution<double> H(-0.2, 0.2);
  for (int k = 0; k < 1000; ++k) {
    const Vec x = on_circle(Rr(rng), TH(rng));
    Jet2 h = Jet2::zero(2);
    h.value = H(rng);
    h.grad = Vec(Eigen::Vector2d(H(rng), H(rng)));
    h.hess << H(rng), 0.0, 0.0, H(rng);
    h.hess(0, 1) = h.hess(1, 0) = H(rng);
    try {
      const auto T2 = jacobians(h, v2->jet(x));
      inv = std::max(inv, (T2.Psi * T2.Phi - Mat::Identity(2, 2)).cwiseAbs().maxCoeff());
    } catch (const Error&) {
    }
  }
  o.check(inv <= 1e-12, "Psi' Phi' = I: max entry err %.3e over 1000 jets (tol 1e-12)", inv);
  return o;
}

// 8. Two interior blends, same collar.
Outcome crit8() {
  Outcome o;
  const auto cfg = wave_config(1.0 / 256);
  const auto setup = build_fixed_setup(cfg);
  BlendSpec b1, b2;
  b1.kappa = collar_diffusivity(setup);
  b2.kappa = 5.0 * b1.kappa;
  b2.start = 1.2;
  b2.width = 2.5;
  const auto t1 = run_wave(cfg, setup, b1), t2 = run_wave(cfg, setup, b2);
  if (!t1.completed || !t2.completed) {
    o.check(false, "run aborted", 0.0);
    return o;
  }
  double diff = 0.0, interior = 0.0;
  for (std::size_t k = 0; k < t1.snapshots.size(); ++k)
    for (std::size_t j = 0; j < setup.collar.size(); ++j) {
      const double d = std::abs(t1.snapshots[k].h[j] - t2.snapshots[k].h[j]);
      double& slot = setup.collar[j] ? diff : interior;
      slot = std::max(slot, d);
    }
  o.check(diff <= 1e-6, "collar max |h1 - h2| = %.3e (tol 1e-6)", diff);
  o.check(true, "interior max |h1 - h2| = %.3e", interior);
  return o;
}

// 9. Taylor seed error order.
Outcome crit9() {
  Outcome o;
  RunConfig cfg = parse_config(
      "[domain]\ndimension = 1\nshape = interval\nlo = -1\nhi = 0\nfree_hi = true\n"
      "[operator]\nflow = plaplacian\np_exponent = 3\n"
      "[profile]\ntype = polynomial\ncoefficients = 0, 1, 0.5\n"
      "[numerics]\ngrid_spacing = 1/64\nintegrator = heun\n");
  const auto setup = build_fixed_setup(cfg);
  const auto& grid = setup.G->grid();
  const auto st = choose_stencils(*setup.G, setup.h0, setup.collar);
  const TaylorSeed seed = taylor_seed(*setup.G, setup.h0, 2, st);
  BlendSpec blend;
  blend.kappa = collar_diffusivity(setup);
  auto op = std::make_shared<ExtendedOperator>(setup.G, setup.eta, blend,
                                               std::make_shared<TaylorExtension>(grid, setup.eta, seed));
  std::vector<double> ts{1e-3, 5e-4, 2.5e-4}, es;
  for (double t : ts) {
    EvolveOptions eo;
    eo.integrator = Integrator::Heun;
    eo.final_time = t;
    eo.snapshots = 1;
    eo.fixed_dt = t / 100;
    const auto tr = FixedDomainSolver(op, eo).run(setup.h0);
    if (!tr.completed) {
      o.check(false, "t=%.3g aborted", t);
      return o;
    }
    const auto hb = seed.at(t);
    double e = 0.0;
    for (int j = 0; j < grid.size(); ++j)
      if (setup.collar[j]) e = std::max(e, std::abs(tr.snapshots.back().h[j] - hb[j]));
    es.push_back(e);
    o.check(true, "t=%.3g: collar error %.3e", t, e);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double x = std::log(ts[k]), y = std::log(es[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(ts.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  o.check(slope >= 2.7 && slope <= 3.3, "log-log slope %.3f in [2.7, 3.3]", slope);
  return o;
}

// 10. Gauss flow flat disk, fixed-domain vs direct.
Outcome crit10() {
  Outcome o;
  RunConfig cfg = parse_config(
      "[domain]\ndimension = 2\nshape = disk\nradius = 0.5\n"
      "[operator]\nflow = gcf\nalpha = 1\n"
      "[profile]\ntype = radial\ncoefficients = 0.25, 0, -1\n"
      "[initial]\ng0 = mirror\n"
      "[numerics]\ngrid_spacing = 1/200\nfinal_time = 0.02\nintegrator = heun\n"
      "[output]\nsnapshots = 100\n");
  const double dx = cfg.domain.grid_spacing;
  const auto setup = build_fixed_setup(cfg);
  const auto op = build_extended(cfg, setup, cfg.taylor_order);
  EvolveOptions eo;
  eo.integrator = cfg.integrator;
  eo.final_time = cfg.final_time;
  eo.snapshots = cfg.snapshots;
  const auto tr = FixedDomainSolver(op, eo).run(setup.h0);
  if (!tr.completed) {
    o.check(false, "fixed-domain run aborted at t=%.4g", tr.t_reached);
    return o;
  }
  bool monotone = true;
  double min_det_B = 1e300;
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    if (k > 0 && boundary_coordinate(tr.snapshots[k]) > boundary_coordinate(tr.snapshots[k - 1]) + 1e-12)
      monotone = false;
    for (std::size_t j = 0; j < setup.collar.size(); ++j)
      if (setup.collar[j]) min_det_B = std::min(min_det_B, tr.snapshots[k].diag.det_B[j]);
  }
  o.check(tr.snapshots.size() == 101, "%.0f snapshots", static_cast<double>(tr.snapshots.size()));
  o.check(monotone, "flat radius non-increasing: %.6f -> %.6f", boundary_coordinate(tr.snapshots.front()),
          boundary_coordinate(tr.snapshots.back()));
  o.check(min_det_B > 0.0, "min det B on the collar %.4g (> 0)", min_det_B);

  DirectGrid g;
  g.radial = true;
  g.dim = 2;
  g.dx = dx;
  g.size = static_cast<int>(std::lround(1.0 / dx)) + 1;
  const GcfRadialSolver direct(g, 1.0);
  DirectState s;
  s.values.resize(g.size);
  for (int j = 0; j < g.size; ++j) s.values[j] = std::max(g.s(j) * g.s(j) - 0.25, 0.0);
  std::vector<std::pair<double, double>> trace;
  try {
    trace = run_direct(direct, s, cfg.final_time, [&](const DirectState& st) { return direct.flat_radius(st); });
  } catch (const Error&) {
    o.check(false, "direct solver aborted at t=%.4g", s.t);
    return o;
  }
  o.check(true, "direct solver: convexity kept over %.0f steps", static_cast<double>(trace.size() - 1));
  auto direct_at = [&](double t) {
    auto it = std::lower_bound(trace.begin(), trace.end(), t, [](const auto& p, double x) { return p.first < x; });
    if (it == trace.begin()) return it->second;
    if (it == trace.end()) return trace.back().second;
    const auto& [t1, r1] = *it;
    const auto& [t0, r0] = *(it - 1);
    return r0 + (r1 - r0) * (t - t0) / (t1 - t0);
  };
  double gap = 0.0;
  for (const auto& snap : tr.snapshots) gap = std::max(gap, std::abs(boundary_coordinate(snap) - direct_at(snap.t)));
  o.check(gap <= 2.0 * dx, "max |r_fixed - r_direct| = %.3e (tol 2 dx = %.3e)", gap, 2.0 * dx);
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "p-Laplacian Fichera closed form", 10, crit1},
      {2, "boundary coefficients vs closed forms", 30, crit2},
      {3, "normal degeneracy", 10, crit3},
      {4, "Gauss-flow Fichera bound", 10, crit4},
      {5, "traveling wave displacement", 120, crit5},
      {6, "Barenblatt", 120, crit6},
      {7, "transform round trip", 10, crit7},
      {8, "extension neutrality", 120, crit8},
      {9, "Taylor seed order", 60, crit9},
      {10, "Gauss-flow flat disk", 300, crit10},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o.pass = false;
      o.notes.push_back(std::string("FAIL aborted: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = o.pass && secs < c.budget;
    if (!ok) ++failed;
    std::printf("[%s] %2d %-40s %8.2fs (budget %.0fs)\n", ok ? "PASS" : "FAIL", c.id, c.title, secs, c.budget);
    for (const auto& n : o.notes) std::printf("         %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
