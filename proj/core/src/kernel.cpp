#include "simplexflow/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace simplexflow {

PowerLawParams PowerLawParams::finite(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument("exponents must be finite; use hard_confinement() for alpha = inf");
  }
  if (!(beta > 0.0)) {
    throw std::invalid_argument("repulsion exponent beta must be positive, got " +
                                std::to_string(beta));
  }
  if (!(alpha > beta)) {
    throw std::invalid_argument("attraction exponent must exceed beta (alpha=" +
                                std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
  }
  return PowerLawParams(Attraction::kFinite, alpha, beta);
}

PowerLawParams PowerLawParams::hard_confinement(double beta) {
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw std::invalid_argument("repulsion exponent beta must be positive and finite");
  }
  return PowerLawParams(Attraction::kInfinite, std::numeric_limits<double>::infinity(), beta);
}

PowerLawParams PowerLawParams::null_line(double beta) {
  if (!std::isfinite(beta) || !(beta > 0.0)) {
    throw std::invalid_argument("repulsion exponent beta must be positive and finite");
  }
  return PowerLawParams(Attraction::kFinite, beta, beta);
}

double PowerLawParams::alpha() const {
  if (is_hard()) throw std::logic_error("alpha is infinite for the hard confinement kernel");
  return alpha_;
}

double power(double r, double e) {
  if (r == 0.0) return 0.0;
  return std::pow(r, e);
}

double eval_w(const PowerLawParams& params, double r) {
  const double beta = params.beta();
  if (params.is_hard()) {
    if (r > 1.0) return std::numeric_limits<double>::infinity();
    return -power(r, beta) / beta;
  }
  if (params.is_null()) return 0.0;
  const double alpha = params.alpha();
  return power(r, alpha) / alpha - power(r, beta) / beta;
}

double eval_dw(const PowerLawParams& params, double r) {
  const double alpha = params.alpha();
  const double beta = params.beta();
  return power(r, alpha - 1.0) - power(r, beta - 1.0);
}

double eval_d2w(const PowerLawParams& params, double r) {
  const double alpha = params.alpha();
  const double beta = params.beta();
  return (alpha - 1.0) * power(r, alpha - 2.0) - (beta - 1.0) * power(r, beta - 2.0);
}

namespace {

void check_gradient_domain(const PowerLawParams& params) {
  if (params.is_hard()) {
    throw std::invalid_argument("gradient undefined for the hard confinement kernel");
  }
}

// (|x|^(alpha-2) - |x|^(beta-2)); at x = 0 only defined for beta >= 2.
double radial_factor(const PowerLawParams& params, double norm) {
  const double alpha = params.alpha();
  const double beta = params.beta();
  if (norm == 0.0) {
    if (beta < 2.0) throw std::domain_error("gradient undefined at the origin for beta < 2");
    return 0.0;  // multiplied by x = 0
  }
  return std::pow(norm, alpha - 2.0) - std::pow(norm, beta - 2.0);
}

}  // namespace

Vector eval_grad(const PowerLawParams& params, const Vector& x) {
  check_gradient_domain(params);
  return radial_factor(params, x.norm()) * x;
}

void accumulate_grad(const PowerLawParams& params, const Eigen::Ref<const Vector>& x,
                     double scale, Eigen::Ref<Vector> out) {
  check_gradient_domain(params);
  const double norm = x.norm();
  if (norm == 0.0) {
    radial_factor(params, norm);
    return;
  }
  out.noalias() += (scale * radial_factor(params, norm)) * x;
}

double radius_R(const PowerLawParams& params, bool allow_limit) {
  if (params.is_hard()) {
    if (allow_limit) return 1.0;
    throw std::invalid_argument("radius_R is the alpha -> inf limit for the hard kernel; pass allow_limit");
  }
  const double alpha = params.alpha();
  const double beta = params.beta();
  if (params.is_null()) return std::exp(1.0 / beta);
  return std::pow(alpha / beta, 1.0 / (alpha - beta));
}

std::pair<double, double> split_short_long(const PowerLawParams& params, double r) {
  if (params.is_hard()) {
    throw std::invalid_argument("short/long split requires finite alpha");
  }
  const double w = eval_w(params, r);
  if (r <= 1.0) return {w, 0.0};
  const double w1 = eval_w(params, 1.0);
  return {w1, w - w1};
}

}  // namespace simplexflow
