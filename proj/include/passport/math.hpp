#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace passport {

// Standard normal density and distribution function. norm_cdf is accurate to
// a few ulps (|error| < 1e-15); see the unit tests for the quadrature check.
double norm_pdf(double x);
double norm_cdf(double x);

// Inverse of norm_cdf on (0,1), Wichura's AS241 rational approximation.
double norm_inv(double p);

// Quantile of the student-t distribution with dof degrees of freedom.
double student_t_quantile(double p, int dof);

// Regularized incomplete beta function I_x(a, b).
double inc_beta(double a, double b, double x);

struct SampleStats {
    double mean = 0.0;
    double sd = 0.0;
    double stderr_mean = 0.0;
    std::size_t n = 0;
};

// Mean / sd / standard error with compensated summation so that results are
// reproducible and the pathwise identities hold at the stated tolerances.
SampleStats sample_stats(std::span<const double> xs);

// Compensated (Kahan) sum, sequential order.
double kahan_sum(std::span<const double> xs);

// Ordinary least squares fit y = a + b x; returns {intercept, slope, r2}.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace passport
