#pragma once

#include <functional>

namespace trunctest {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Adaptive tanh-sinh (double exponential) quadrature on a finite interval.
/// Levels are refined until successive estimates agree to the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-12, int max_level = 12);

/// Integral over (-inf, b] of a function that decays at least like a Gaussian
/// on the left. Exp-sinh transformed.
QuadratureResult integrate_lower_tail(const std::function<double(double)>& f, double b,
                                      double tol = 1e-12, int max_level = 12);

/// Integral over the whole real line for Gaussian-type integrands.
QuadratureResult integrate_real_line(const std::function<double(double)>& f,
                                     double tol = 1e-12, int max_level = 12);

}  // namespace trunctest
