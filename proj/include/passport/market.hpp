#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passport/errors.hpp"

namespace passport {

// Black-Scholes market under the risk-neutral measure. All simulated values
// are discounted, so the interest rate never enters the dynamics; it is kept
// for reporting and config round-trips.
struct MarketParams {
    double r = 0.0;
    std::vector<double> sigma;             // per-asset volatility, > 0
    std::vector<std::vector<double>> rho;  // correlation matrix
    std::vector<double> s0;                // initial prices, > 0
    double x0 = 0.0;                       // initial portfolio value

    int n_assets() const { return static_cast<int>(sigma.size()); }
    bool is_uncorrelated(double tol = 1e-12) const;
    void validate() const;

    static MarketParams uncorrelated(std::vector<double> sigma, std::vector<double> s0,
                                     double x0, double r = 0.0);
};

struct TimeGrid {
    std::vector<double> times;  // t_0 = 0 < t_1 < ... < t_N = T

    static TimeGrid equidistant(int n_steps, double maturity);

    int n_steps() const { return static_cast<int>(times.size()) - 1; }
    double maturity() const { return times.back(); }
    double dt(int n) const { return times[n + 1] - times[n]; }  // step n -> n+1
    void validate() const;
};

// Seeded batch of discounted asset trajectories.
struct PathBatch {
    int n_paths = 0;
    int n_steps = 0;  // N
    int n_assets = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // [path][step 0..N][asset]

    double at(int path, int step, int asset) const {
        return values[(static_cast<std::size_t>(path) * (n_steps + 1) + step) * n_assets + asset];
    }
    double& at(int path, int step, int asset) {
        return values[(static_cast<std::size_t>(path) * (n_steps + 1) + step) * n_assets + asset];
    }
    // Asset vector at (path, step).
    std::span<const double> prices(int path, int step) const {
        return {&values[(static_cast<std::size_t>(path) * (n_steps + 1) + step) * n_assets],
                static_cast<std::size_t>(n_assets)};
    }

    void write_csv(const std::string& path) const;
};

struct MarketState {
    int k = 0;              // time index, 0..N
    std::vector<double> s;  // discounted asset prices
    double x = 0.0;         // discounted portfolio value
};

// Lower-triangular factor A with A A^T = rho. Pivots in [-1e-10, 0] are
// clamped to zero (degenerate |rho|=1 is supported); below that the matrix is
// rejected as NotPositiveSemidefinite.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& rho);

// Exact lognormal transitions of the discounted prices; deterministic given
// the seed and independent of scheduling (per-path counter-based streams).
PathBatch simulate(const MarketParams& params, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed);

// One trading step: x + sum_i q_i (s_next_i - s_prev_i), with the l1 trading
// constraint enforced.
double portfolio_step(double x, std::span<const double> s_prev, std::span<const double> s_next,
                      std::span<const double> q);

}  // namespace passport
