#include "fbflow/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbflow {

double smoothstep5(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

Ramp::Ramp(double lo, double hi) : lo_(lo), hi_(hi) {
  require(hi > lo, ErrorCode::InvalidArgument, "ramp needs lo < hi");
}

double Ramp::operator()(double d) const { return smoothstep5((d - lo_) / (hi_ - lo_)); }

CutoffProfile build_cutoff(double eta, double max_distance) {
  require(eta > 0.0, ErrorCode::InvalidConfig, "collar width must be positive");
  require(max_distance > eta, ErrorCode::InvalidConfig,
          "collar width too large: no grid point lies deeper than the collar");
  return CutoffProfile(eta);
}

std::vector<char> collar_mask(const EvolveGrid& grid, double eta) {
  std::vector<char> m(grid.size());
  for (int j = 0; j < grid.size(); ++j) m[j] = grid.distance[j] <= eta * (1.0 + 1e-12) ? 1 : 0;
  return m;
}

std::vector<Stencil> choose_stencils(const GridOperator& G, const std::vector<double>& h,
                                     const std::vector<char>& collar) {
  std::vector<Stencil> st(h.size(), Stencil::Central);
  const int N = G.grid().last();
  for (int j = 0; j <= N; ++j) {
    if (!collar[j]) {
      if (j == N) st[j] = Stencil::Backward;
      if (j == 0 && G.grid().kind == GridKind::Interval) st[j] = Stencil::Forward;
      continue;
    }
    st[j] = G.choose(h, j);
  }
  return st;
}

// ----------------------------------------------------------------------------

namespace {

/// Fills every maximal run of non-collar nodes from its collar neighbours.
void linear_fill(const EvolveGrid& grid, const std::vector<char>& collar, std::vector<double>& h) {
  const int N = grid.last();
  int j = 0;
  while (j <= N) {
    if (collar[j]) {
      ++j;
      continue;
    }
    const int a = j;
    while (j <= N && !collar[j]) ++j;
    const int b = j - 1;
    const bool left = a > 0, right = b < N;
    if (left && right) {
      const double hl = h[a - 1], hr = h[b + 1];
      const double sl = grid.s[a - 1], sr = grid.s[b + 1];
      for (int k = a; k <= b; ++k) h[k] = hl + (hr - hl) * (grid.s[k] - sl) / (sr - sl);
    } else if (left) {
      for (int k = a; k <= b; ++k) h[k] = h[a - 1];
    } else if (right) {
      for (int k = a; k <= b; ++k) h[k] = h[b + 1];
    }
  }
}

}  // namespace

HarmonicExtension::HarmonicExtension(const EvolveGrid& grid, double eta)
    : grid_(grid), collar_(collar_mask(grid, eta)) {}

std::vector<double> HarmonicExtension::fill(double, const std::vector<double>& h) const {
  std::vector<double> out = h;
  linear_fill(grid_, collar_, out);
  return out;
}

ExactExtension::ExactExtension(const EvolveGrid& grid, double eta, std::function<double(const Vec&, double)> h)
    : grid_(grid), collar_(collar_mask(grid, eta)), h_(std::move(h)) {}

std::vector<double> ExactExtension::fill(double t, const std::vector<double>& h) const {
  std::vector<double> out = h;
  for (int j = 0; j < grid_.size(); ++j)
    if (!collar_[j]) out[j] = h_(grid_.point(j), t);
  return out;
}

// ----------------------------------------------------------------------------

double TaylorSeed::value(int j, double t) const {
  double s = 0.0, term = 1.0;
  for (int k = 0; k <= order(); ++k) {
    if (k > 0) term *= t / k;
    s += coeffs[k][j] * term;
  }
  return s;
}

std::vector<double> TaylorSeed::at(double t) const {
  std::vector<double> out(coeffs.front().size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = value(static_cast<int>(j), t);
  return out;
}

namespace {

std::vector<double> G_all(const GridOperator& G, const std::vector<double>& h, const std::vector<Stencil>& st) {
  std::vector<double> out(h.size());
  for (int j = 0; j < G.grid().size(); ++j) {
    try {
      out[j] = G.G(h, j, st[j]);
    } catch (const Error&) {
      out[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

std::vector<double> axpy(const std::vector<double>& x, double a, const std::vector<double>& d) {
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + a * (std::isfinite(d[j]) ? d[j] : 0.0);
  return out;
}

}  // namespace

TaylorSeed taylor_seed(const GridOperator& G, const std::vector<double>& h0, int K, const std::vector<Stencil>& st,
                       double eps) {
  require(K >= 0 && K <= 3, ErrorCode::InvalidConfig, "Taylor order must be in 0..3");
  require(static_cast<int>(h0.size()) == G.grid().size(), ErrorCode::InvalidArgument, "seed: size mismatch");
  TaylorSeed s;
  s.coeffs.push_back(h0);
  const std::size_t n = h0.size();
  if (K >= 1) s.coeffs.push_back(G_all(G, h0, st));
  if (K >= 2) {
    const auto& h1 = s.coeffs[1];
    const auto gp = G_all(G, axpy(h0, eps, h1), st);
    const auto gm = G_all(G, axpy(h0, -eps, h1), st);
    std::vector<double> h2(n);
    for (std::size_t j = 0; j < n; ++j) h2[j] = (gp[j] - gm[j]) / (2.0 * eps);
    s.coeffs.push_back(h2);
  }
  if (K >= 3) {
    const auto& h1 = s.coeffs[1];
    const auto& h2 = s.coeffs[2];
    const double e2 = 1e-4;
    const auto g0 = s.coeffs[1];
    const auto gp = G_all(G, axpy(h0, e2, h1), st);
    const auto gm = G_all(G, axpy(h0, -e2, h1), st);
    const auto dp = G_all(G, axpy(h0, eps, h2), st);
    const auto dm = G_all(G, axpy(h0, -eps, h2), st);
    std::vector<double> h3(n);
    for (std::size_t j = 0; j < n; ++j)
      h3[j] = (gp[j] - 2.0 * g0[j] + gm[j]) / (e2 * e2) + (dp[j] - dm[j]) / (2.0 * eps);
    s.coeffs.push_back(h3);
  }
  s.valid.assign(n, 1);
  for (const auto& c : s.coeffs)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(c[j])) s.valid[j] = 0;
  return s;
}

TaylorExtension::TaylorExtension(const EvolveGrid& grid, double eta, TaylorSeed seed)
    : seed_(std::move(seed)), fallback_(grid, eta), collar_(collar_mask(grid, eta)) {
  require(static_cast<int>(seed_.valid.size()) == grid.size(), ErrorCode::InvalidArgument, "seed size mismatch");
}

std::vector<double> TaylorExtension::fill(double t, const std::vector<double>& h) const {
  std::vector<double> out = fallback_.fill(t, h);
  for (std::size_t j = 0; j < out.size(); ++j)
    if (!collar_[j] && seed_.valid[j]) out[j] = seed_.value(static_cast<int>(j), t);
  return out;
}

// ----------------------------------------------------------------------------

ExtendedOperator::ExtendedOperator(std::shared_ptr<const GridOperator> G, double eta, BlendSpec blend,
                                   ExtensionSourcePtr source)
    : G_(std::move(G)),
      psi_(build_cutoff(eta, *std::max_element(G_->grid().distance.begin(), G_->grid().distance.end()))),
      chi_(blend.start * eta, blend.width * eta),
      blend_(blend),
      src_(std::move(source)),
      collar_(collar_mask(G_->grid(), eta)) {
  require(blend.kappa > 0.0, ErrorCode::InvalidConfig, "interior diffusivity must be positive");
  require(blend.start >= 1.0 - 1e-12, ErrorCode::InvalidConfig, "the blend must leave the collar untouched");
  require(src_ != nullptr, ErrorCode::InvalidArgument, "extended operator needs an extension source");
}

std::vector<Stencil> ExtendedOperator::stencils(const std::vector<double>& h) const {
  return choose_stencils(*G_, h, collar_);
}

double ExtendedOperator::G_tilde(const std::vector<double>& w, int j, Stencil st) const {
  if (collar_[j]) return G_->G(w, j, st);
  const double c = chi(j);
  const double lap = blend_.kappa * G_->laplacian(w, j);
  if (c >= 1.0) return lap;
  try {
    return (1.0 - c) * G_->G(w, j, st) + c * lap;
  } catch (const Error&) {
    return lap;
  }
}

std::pair<double, double> ExtendedOperator::coefficients(const std::vector<double>& w, int j, Stencil st) const {
  const auto& grid = G_->grid();
  const double lap_a = (grid.kind == GridKind::Radial && j == 0) ? grid.dim * blend_.kappa : blend_.kappa;
  const double c = collar_[j] ? 0.0 : chi(j);
  if (c >= 1.0) return {lap_a, 0.0};
  try {
    const auto [a, b] = G_->drift(j, G_->derivs(w, j, st));
    return {(1.0 - c) * a + c * lap_a, (1.0 - c) * b};
  } catch (const Error&) {
    if (collar_[j]) throw;
    return {lap_a, 0.0};
  }
}

std::vector<double> ExtendedOperator::forcing(const std::vector<double>& rate, const std::vector<double>& htilde,
                                              const std::vector<Stencil>& st) const {
  std::vector<double> f(htilde.size(), 0.0);
  for (int j = 0; j < G_->grid().size(); ++j) {
    if (collar_[j]) continue;
    f[j] = rate[j] - G_tilde(htilde, j, st[j]);
  }
  return f;
}

std::vector<double> ExtendedOperator::apply(const std::vector<double>& w, const std::vector<double>& f,
                                            const std::vector<Stencil>& st) const {
  std::vector<double> out(w.size());
  for (int j = 0; j < G_->grid().size(); ++j) {
    out[j] = G_tilde(w, j, st[j]);
    if (!collar_[j]) out[j] += psi(j) * f[j];
  }
  return out;
}

}  // namespace fbflow
