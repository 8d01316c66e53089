#pragma once

// Shared vocabulary for the fixed-domain free-boundary engine: small dense
// linear algebra types sized for n <= 4, the error type, and jets.

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace fbflow {

inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidConfig,
  InvalidState,
  Transversality,
  DiffeomorphismBreakdown,
  RootBracket,
  MultipleRoots,
  FramePrecondition,
  CflViolation,
  NonFinite,
  Convexity,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

/// Value, gradient and Hessian of a scalar field at a point.
struct Jet2 {
  double value = 0.0;
  Vec grad;
  Mat hess;

  static Jet2 zero(int n) {
    Jet2 j;
    j.grad = Vec::Zero(n);
    j.hess = Mat::Zero(n, n);
    return j;
  }
  int dim() const { return static_cast<int>(grad.size()); }
};

/// Jet2 plus third derivatives: third[k](i, j) = d^3 f / dx_i dx_j dx_k.
struct Jet3 : Jet2 {
  std::array<Mat, kMaxDim> third;

  static Jet3 zero(int n) {
    Jet3 j;
    static_cast<Jet2&>(j) = Jet2::zero(n);
    for (int k = 0; k < n; ++k) j.third[k] = Mat::Zero(n, n);
    return j;
  }
};

/// Rotates a jet into new coordinates y = R x (R orthogonal).
Jet2 rotate(const Jet2& jet, const Mat& R);
Jet3 rotate(const Jet3& jet, const Mat& R);

inline Vec unit(int n, int i) {
  Vec e = Vec::Zero(n);
  e(i) = 1.0;
  return e;
}

}  // namespace fbflow
