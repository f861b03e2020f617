#pragma once

#include <utility>

#include "simplexflow/types.hpp"

namespace simplexflow {

/// Exponent pair of the radial potential w(r) = r^alpha/alpha - r^beta/beta.
///
/// The attraction exponent is either a finite real strictly above beta, equal
/// to beta (the null line, built with null_line()), or infinite (the hard
/// confinement limit, built with hard_confinement()). The repulsion exponent
/// must be positive.
class PowerLawParams {
 public:
  enum class Attraction { kFinite, kInfinite };

  /// Throws std::invalid_argument unless alpha > beta > 0.
  static PowerLawParams finite(double alpha, double beta);
  /// alpha = +inf: -r^beta/beta inside the unit ball, +inf outside.
  static PowerLawParams hard_confinement(double beta);
  /// alpha = beta; the potential vanishes identically.
  static PowerLawParams null_line(double beta);

  bool is_hard() const { return attraction_ == Attraction::kInfinite; }
  bool is_null() const { return !is_hard() && alpha_ == beta_; }
  Attraction attraction() const { return attraction_; }

  /// Finite attraction exponent; throws std::logic_error for the hard case.
  double alpha() const;
  double beta() const { return beta_; }

  /// Dynamics and gradients require the mildly repulsive regime beta >= 2.
  bool mildly_repulsive() const { return beta_ >= 2.0; }

 private:
  PowerLawParams(Attraction attraction, double alpha, double beta)
      : attraction_(attraction), alpha_(alpha), beta_(beta) {}

  Attraction attraction_;
  double alpha_;
  double beta_;
};

/// r^e for r >= 0 and e > 0, with 0^e = 0.
double power(double r, double e);

/// Radial potential w(r). Returns +inf for the hard kernel when r > 1.
double eval_w(const PowerLawParams& params, double r);

/// First and second radial derivatives of w (finite alpha only).
double eval_dw(const PowerLawParams& params, double r);
double eval_d2w(const PowerLawParams& params, double r);

/// Gradient of W(x) = w(|x|): (|x|^(alpha-2) - |x|^(beta-2)) x.
/// Throws for the hard kernel, and at x = 0 when beta < 2.
Vector eval_grad(const PowerLawParams& params, const Vector& x);

/// In-place variant used by the pairwise loops; `out` must have x's size.
void accumulate_grad(const PowerLawParams& params,
                     const Eigen::Ref<const Vector>& x, double scale,
                     Eigen::Ref<Vector> out);

/// Unique positive zero of w: (alpha/beta)^(1/(alpha-beta)), e^(1/beta) on
/// the null line. The hard kernel has no zero; pass allow_limit to get the
/// alpha -> inf limit value 1 instead of an exception.
double radius_R(const PowerLawParams& params, bool allow_limit = false);

/// Short/long range split: the short part freezes at w(1) beyond r = 1, the
/// long part w - short is non-negative.
std::pair<double, double> split_short_long(const PowerLawParams& params,
                                           double r);

}  // namespace simplexflow
