#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "passport/analytic.hpp"
#include "passport/market.hpp"
#include "passport/rng.hpp"

namespace passport {

// Probability vector over the ordered corner set (+e1, -e1, ..., +ed, -ed).
struct ActionDistribution {
    std::vector<double> probs;

    int n_assets() const { return static_cast<int>(probs.size()) / 2; }
    void validate() const;

    static ActionDistribution uniform(int n_assets);
    static ActionDistribution dirac(const CornerAction& a, int n_assets);

    // Probability-weighted mean action, component i = p(+e_i) - p(-e_i).
    std::vector<double> mean_action() const;
    int sample(RngStream& rng) const;  // corner index via inverse cdf
    int modal() const;                 // highest-probability corner, lowest index on ties
};

// Policies see the time index and the normalized time separately, so coarse
// and fine grids share feature scaling.
using Policy =
    std::function<ActionDistribution(int k, double t_norm, std::span<const double> s, double x)>;

enum class StepMode { Mixture, Sampled };

struct Trajectory {
    std::vector<MarketState> states;          // length N+1
    std::vector<ActionDistribution> dists;    // length N
    std::vector<int> actions;                 // sampled corner index, -1 in mixture mode
    double terminal_payoff = 0.0;             // |x_N|
};

// Relaxed transition: portfolio moves by the mean action under dist.
MarketState step_mixture(const MarketState& state, const ActionDistribution& dist,
                         std::span<const double> s_next);

// Algorithm-style transition: one corner sampled from dist, then applied.
std::pair<MarketState, CornerAction> step_sampled(const MarketState& state,
                                                  const ActionDistribution& dist,
                                                  std::span<const double> s_next, RngStream& rng);

// Terminal portfolio values over a pre-simulated batch; per-path action
// streams derive from (action_seed, path). x starts at params.x0.
std::vector<double> rollout_terminal(const Policy& policy, const MarketParams& params,
                                     const TimeGrid& grid, const PathBatch& batch, StepMode mode,
                                     std::uint64_t action_seed);

// Full trajectories (for exports and diagnostics).
std::vector<Trajectory> rollout_trajectories(const Policy& policy, const MarketParams& params,
                                             const TimeGrid& grid, const PathBatch& batch,
                                             StepMode mode, std::uint64_t action_seed);

// Convenience: simulate the market with `seed`, then roll out.
std::vector<Trajectory> rollout(const Policy& policy, const MarketParams& params,
                                const TimeGrid& grid, int n_paths, std::uint64_t seed,
                                StepMode mode);

void write_trajectories_csv(const std::string& path, std::span<const Trajectory> trajectories);

}  // namespace passport
