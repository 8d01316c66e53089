#include "fbflow/oracles.hpp"

#include "fbflow/operators.hpp"
#include "fbflow/transform.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace fbflow {

TravelingWave::TravelingWave(int dim, double a, double p, bool clipped)
    : dim_(dim), a_(a), p_(p), clipped_(clipped) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::InvalidArgument, "traveling wave: bad dimension");
  require(a > 0.0 && p > 2.0, ErrorCode::InvalidArgument, "traveling wave needs a > 0 and p > 2");
}

double TravelingWave::speed() const { return std::pow(a_, p_ - 1.0); }

Jet2 TravelingWave::jet(const Vec& y, double t) const {
  Jet2 j = Jet2::zero(dim_);
  const double s = speed() * t - y(0);
  if (clipped_ && s <= 0.0) return j;
  j.value = a_ * s;
  j.grad(0) = -a_;
  return j;
}

double TravelingWave::time_derivative(const Vec& y, double t) const {
  if (clipped_ && speed() * t - y(0) <= 0.0) return 0.0;
  return a_ * speed();
}

double TravelingWave::residual(const Vec& y, double t) const {
  const auto F = OperatorSpec::plaplacian(dim_, p_);
  const Jet2 g = jet(y, t);
  return time_derivative(y, t) - F.eval(g.hess, g.grad, g.value);
}

// ----------------------------------------------------------------------------

BarenblattExponents derive_barenblatt_exponents(int dim, double p) {
  require(dim >= 1 && p > 2.0, ErrorCode::InvalidArgument, "Barenblatt needs n >= 1 and p > 2");
  // u = t^{-alpha} U(r t^{-beta}).
  //   mass:     -alpha + n beta = 0
  //   balance:  alpha + 1 = (alpha + beta)(p - 1) + beta
  Eigen::Matrix2d M;
  M << 1.0, -static_cast<double>(dim), p - 2.0, p;
  const Eigen::Vector2d rhs(0.0, 1.0);
  const Eigen::Vector2d sol = M.fullPivLu().solve(rhs);
  BarenblattExponents e;
  e.alpha = sol(0);
  e.beta = sol(1);
  const double r1 = -e.alpha + dim * e.beta;
  const double r2 = (e.alpha + 1.0) - ((e.alpha + e.beta) * (p - 1.0) + e.beta);
  e.scaling_residual = std::max(std::abs(r1), std::abs(r2));
  require(e.scaling_residual <= 1e-8, ErrorCode::InvalidState, "Barenblatt exponent verification failed");
  return e;
}

namespace {

double sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

}  // namespace

Barenblatt::Barenblatt(int dim, double p, double mass) : n_(dim), p_(p) {
  require(mass > 0.0, ErrorCode::InvalidArgument, "Barenblatt mass must be positive");
  ex_ = derive_barenblatt_exponents(dim, p);
  gamma_ = p / (p - 1.0);
  m_ = (p - 1.0) / (p - 2.0);
  q_ = (p - 2.0) / p * std::pow(ex_.beta, 1.0 / (p - 1.0));

  // Mass of the C = 1 profile; the mass scales as C^{m + n/gamma}.
  const double xi1 = std::pow(1.0 / q_, 1.0 / gamma_);
  auto f = [&](double xi) {
    const double z = 1.0 - q_ * std::pow(xi, gamma_);
    return z > 0.0 ? std::pow(xi, n_ - 1) * std::pow(z, m_) : 0.0;
  };
  const double I1 = sphere_area(n_) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, xi1, 15, 1e-14);
  C_ = std::pow(mass / I1, 1.0 / (m_ + n_ / gamma_));

  // Substitute the profile into the equation at a few points before use.
  double worst = 0.0;
  const double t = 1.0;
  for (int k = 1; k < 8; ++k) worst = std::max(worst, std::abs(residual(support_radius(t) * k / 8.0, t)));
  require(worst <= 1e-8, ErrorCode::InvalidState, "Barenblatt profile does not satisfy the equation");
}

double Barenblatt::u(double r, double t) const {
  const double xi = std::abs(r) * std::pow(t, -ex_.beta);
  const double z = C_ - q_ * std::pow(xi, gamma_);
  return z > 0.0 ? std::pow(t, -ex_.alpha) * std::pow(z, m_) : 0.0;
}

double Barenblatt::pressure(double r, double t) const {
  return (p_ - 1.0) / (p_ - 2.0) * std::pow(u(r, t), (p_ - 2.0) / (p_ - 1.0));
}

double Barenblatt::support_radius(double t) const { return std::pow(C_ / q_, 1.0 / gamma_) * std::pow(t, ex_.beta); }

double Barenblatt::residual(double r, double t) const {
  const double al = ex_.alpha, be = ex_.beta;
  const double xi = r * std::pow(t, -be);
  const double z = C_ - q_ * std::pow(xi, gamma_);
  if (!(z > 0.0) || !(r > 0.0)) return 0.0;
  const double U = std::pow(z, m_);
  const double Ux = -m_ * q_ * gamma_ * std::pow(xi, gamma_ - 1.0) * std::pow(z, m_ - 1.0);
  // u_t = t^{-alpha-1} (-alpha U - beta xi U')
  const double ut = std::pow(t, -al - 1.0) * (-al * U - be * xi * Ux);
  // J = |U'|^{p-2} U' = -K xi^a z^b, differentiated directly.
  const double K = std::pow(m_ * q_ * gamma_, p_ - 1.0);
  const double a = (gamma_ - 1.0) * (p_ - 1.0);
  const double b = (m_ - 1.0) * (p_ - 1.0);
  const double J = -K * std::pow(xi, a) * std::pow(z, b);
  const double Jx = -K * (a * std::pow(xi, a - 1.0) * std::pow(z, b) +
                          std::pow(xi, a) * b * std::pow(z, b - 1.0) * (-q_ * gamma_ * std::pow(xi, gamma_ - 1.0)));
  const double div_xi = Jx + (n_ - 1) * J / xi;
  const double lap = std::pow(t, -(al + be) * (p_ - 1.0) - be) * div_xi;
  return (ut - lap) / (std::abs(ut) + std::abs(lap));
}

double Barenblatt::mass(double t) const {
  const double R = support_radius(t);
  auto f = [&](double r) { return std::pow(r, n_ - 1) * u(r, t); };
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, R, 15, 1e-14);
  return sphere_area(n_) * half;
}

// ----------------------------------------------------------------------------

double brute_force_h(const Vec& x, double t, const MovingField& g, const ScalarField& v, double lo, double hi) {
  const Jet3 vj = v.jet(x);
  auto r = [&](double h) { return (1.0 + h) * vj.value - g.value(x - h * vj.grad, t); };
  const double rl = r(lo), rh = r(hi);
  if (rl == 0.0) return lo;
  if (rh == 0.0) return hi;
  require((rl < 0.0) != (rh < 0.0), ErrorCode::RootBracket, "brute_force_h: no sign change on the bracket");
  auto stop = [](double a, double b) { return std::abs(b - a) <= 1e-14; };
  const auto ab = boost::math::tools::bisect(r, lo, hi, stop);
  return 0.5 * (ab.first + ab.second);
}

// ----------------------------------------------------------------------------

namespace {

OracleCheck check(std::string name, double value, double tol) {
  OracleCheck c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.pass = std::isfinite(value) && value <= tol;
  return c;
}

}  // namespace

std::vector<OracleCheck> run_oracle_checks(unsigned long long seed) {
  std::vector<OracleCheck> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);

  for (double a : {1.0, 2.0}) {
    TravelingWave tw(2, a, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double t = 0.2 * U(rng);
      Vec y(2);
      y << tw.boundary(t) - U(rng), 2.0 * U(rng) - 1.0;
      worst = std::max(worst, std::abs(tw.residual(y, t)) / std::pow(a, 3.0));
    }
    std::ostringstream name;
    name << "traveling-wave residual a=" << a << " p=3";
    out.push_back(check(name.str(), worst, 1e-10));
    std::ostringstream sp;
    sp << "traveling-wave speed a=" << a << " (expect " << std::pow(a, 2.0) << ")";
    out.push_back(check(sp.str(), std::abs(tw.speed() - a * a), 1e-14));
  }

  for (auto [n, p] : {std::pair{1, 3.0}, std::pair{1, 4.0}, std::pair{2, 3.0}, std::pair{3, 5.0}}) {
    Barenblatt B(n, p, 1.0);
    std::ostringstream tag;
    tag << " n=" << n << " p=" << p;
    out.push_back(check("barenblatt exponents" + tag.str(), B.exponents().scaling_residual, 1e-8));
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double t = 0.25 + U(rng);
      const double r = (0.02 + 0.96 * U(rng)) * B.support_radius(t);
      worst = std::max(worst, std::abs(B.residual(r, t)));
    }
    out.push_back(check("barenblatt residual" + tag.str(), worst, 1e-10));
    out.push_back(check("barenblatt mass t=0.5 vs t=1" + tag.str(), std::abs(B.mass(1.0) / B.mass(0.5) - 1.0), 1e-8));
    out.push_back(check("barenblatt R(2t)/R(t)" + tag.str(),
                        std::abs(B.support_radius(1.0) / B.support_radius(0.5) - std::pow(2.0, B.exponents().beta)),
                        1e-12));
  }

  {
    auto v = std::make_shared<Polynomial1D>(0.0, std::vector<double>{0.0, 1.0});
    TravelingWave g(1, 1.0, 3.0);
    double worst_solve = 0.0, worst_exact = 0.0;
    for (int k = 0; k < 500; ++k) {
      Vec x(1);
      x << -0.5 * U(rng);
      const double t = 0.2 * U(rng);
      const double hb = brute_force_h(x, t, g, *v, -0.5, 0.5);
      worst_solve = std::max(worst_solve, std::abs(solve_h(x, t, g, *v) - hb));
      worst_exact = std::max(worst_exact, std::abs(hb - t / (1.0 - x(0))));
    }
    out.push_back(check("solve_h vs bisection, 1D wave", worst_solve, 1e-12));
    out.push_back(check("bisection vs t/(1-x)", worst_exact, 1e-12));
  }
  {
    auto v = std::make_shared<RadialPolynomial>(2, std::vector<double>{0.25, 0.0, -1.0});
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const double c = 0.5 + 1.5 * U(rng);
      auto g = StaticField(std::make_shared<ScaledField>(v, -c));
      const double r = 0.45 + 0.05 * U(rng), th = 2.0 * M_PI * U(rng);
      Vec x(2);
      x << r * std::cos(th), r * std::sin(th);
      worst = std::max(worst, std::abs(solve_h(x, 0.0, g, *v) - brute_force_h(x, 0.0, g, *v, -0.5, 0.5)));
    }
    out.push_back(check("solve_h vs bisection, 2D mirror", worst, 1e-12));
  }
  return out;
}

}  // namespace fbflow
