#pragma once

#include <functional>
#include <span>
#include <vector>

namespace passport {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Physicists' Gauss-Hermite rule: integrates f(z) e^{-z^2} dz on R.
QuadratureRule gauss_hermite(int n);

// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Cached lookup; the reference stays valid for the program lifetime.
const QuadratureRule& gauss_legendre_cached(int n);

// E[f(Z)] for Z ~ N(0,1) via n-node Gauss-Hermite.
double normal_expectation_hermite(const std::function<double(double)>& f, int n);

// E[f(Z)] for Z ~ N(0,1) via composite Gauss-Legendre over [-z_max, z_max]
// with panel edges inserted at the given kink locations, so piecewise-smooth
// integrands (terminal |.| payoffs) keep spectral accuracy.
double normal_expectation(const std::function<double(double)>& f, int nodes_per_panel = 32,
                          std::span<const double> kinks = {}, double z_max = 12.0);

// E[f(R)] for R = exp(-v^2/2 + v Z), the lognormal factor with unit mean and
// log-sd v. kinks_in_r lists r-values where f has a kink; they are mapped to
// z-space before panel splitting. Never touches the normal cdf, so it stays an
// independent check on closed-form call prices.
double lognormal_expectation(double v, const std::function<double(double)>& f,
                             int nodes_per_panel = 32, std::span<const double> kinks_in_r = {});

// Precomputed nodes and weights for E[f(Z)], Z ~ N(0,1), with the composite
// panel scheme above; weights already include the density and panel scaling.
struct NormalScheme {
    std::vector<double> z;
    std::vector<double> w;
};
NormalScheme normal_scheme(int nodes_per_panel, std::span<const double> kinks = {},
                           double z_max = 12.0);

}  // namespace passport
