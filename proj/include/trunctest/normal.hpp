#pragma once

namespace trunctest {

/// Standard normal density phi(x).
double normal_pdf(double x);

/// Standard normal CDF Phi(x), computed through erfc for full tail accuracy.
double normal_cdf(double x);

/// Inverse standard normal CDF. Rational initial guess refined by one Halley
/// step against normal_cdf; relative error below 1e-14 on (1e-300, 1-1e-16).
double normal_cdf_inv(double p);

/// Inverse error function on (-1, 1), same scheme (rational init + Newton
/// polish against std::erf).
double erf_inv(double p);

/// phi(b) / Phi(b): magnitude of the mean of N(0,1) conditioned on x <= b.
double lower_tail_mean_ratio(double b);

/// Mean and variance of N(0,1) conditioned on x <= b.
struct TruncatedMoments1D {
  double mean;
  double var;
};
TruncatedMoments1D lower_truncated_moments(double b);

}  // namespace trunctest
