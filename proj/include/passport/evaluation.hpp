#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "passport/approximator.hpp"

namespace passport {
namespace evaluation {

struct PriceEstimate {
    double mean = 0.0;
    double stderr_mean = 0.0;
    double ci_low = 0.0;   // 95% student-t
    double ci_high = 0.0;
    std::size_t n_paths = 0;
};

PriceEstimate make_estimate(std::span<const double> samples);

inline bool ci_overlap(const PriceEstimate& a, const PriceEstimate& b) {
    return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
}

// The strategy zoo behind the comparison figures.
struct AnalyticStrategy {};                      // Theorem strategy (heuristic when correlated)
struct ConstantStrategy {
    int action_index = 0;                        // fixed corner, buy-and-hold style
};
struct RandomStrategy {};                        // uniform over the corners
struct PolicyStrategy {
    Net net;
    bool modal = false;                          // sampled by default
};
struct DeepHedgingStrategy {
    std::vector<Net> per_step;                   // continuous action in [-1, 1], d = 1
};

using StrategySpec = std::variant<AnalyticStrategy, ConstantStrategy, RandomStrategy,
                                  PolicyStrategy, DeepHedgingStrategy>;

std::string strategy_name(const StrategySpec& spec);

// Terminal portfolio values over a shared batch; per-path action streams
// derive from (action_seed, strategy ordinal, path).
std::vector<double> terminal_values(const StrategySpec& spec, const MarketParams& params,
                                    const TimeGrid& grid, const PathBatch& batch,
                                    std::uint64_t action_seed);

struct PriceResult {
    PriceEstimate plus;      // mean (X_T)^+ with CI: the option price
    PriceEstimate abs;       // mean |X_T| with CI
    double mean_x = 0.0;
    double identity_gap = 0.0;  // |mean((X)^+) - (mean|X| + mean X)/2|
};

PriceResult price(const StrategySpec& spec, const MarketParams& params, const TimeGrid& grid,
                  int n_paths, std::uint64_t seed);

struct SurfaceRow {
    std::vector<double> s;
    double x = 0.0;
    PriceEstimate estimate;
};

std::vector<SurfaceRow> price_surface(const StrategySpec& spec, const MarketParams& params,
                                      const TimeGrid& grid, std::span<const double> s_grid,
                                      std::span<const double> x_grid, int n_paths,
                                      std::uint64_t seed);

// (V(0, s, x) + x) / 2 per node from a critic checkpoint.
std::vector<SurfaceRow> critic_price_surface(const Net& critic, const MarketParams& params,
                                             std::span<const double> s_grid,
                                             std::span<const double> x_grid);

void write_surface_csv(const std::string& path, std::span<const SurfaceRow> rows, int n_assets);

struct StrategyReport {
    std::string name;
    PriceEstimate abs;
    PriceEstimate plus;
    double mean_x = 0.0;
    double identity_gap = 0.0;
    std::vector<double> x_t;  // full sample
};

struct PayoffReport {
    std::vector<StrategyReport> strategies;
    // ci_overlap_abs[i][j]: do the |X_T| CIs of strategies i and j overlap
    std::vector<std::vector<bool>> overlap_abs;
};

// All strategies consume the same simulated asset paths (common random
// numbers); only the action noise differs per strategy.
PayoffReport payoff_report(std::span<const StrategySpec> strategies, const MarketParams& params,
                           const TimeGrid& grid, int n_paths, std::uint64_t seed);

void write_payoff_samples_csv(const std::string& path, const PayoffReport& report);
void write_payoff_summary_csv(const std::string& path, const PayoffReport& report);

// Naive deep hedging on the unconstrained [-1,1] action (demonstration of the
// local-optima failure): one bounded continuous network per time step trained
// by gradient descent on -mean |X_T|.
struct DeepHedgingConfig {
    int n_paths = 1 << 13;
    int epochs = 1 << 7;
    int batch_size = 1 << 8;
    double lr = 1e-3;
    double l2_weight = 1e-6;
    double entropy_weight = 1e-18;  // the failure demo keeps it inert
    std::vector<int> hidden = {16};
};

struct DeepHedgingResult {
    std::vector<Net> per_step;
    std::vector<double> epoch_mean_abs;  // training curve
};

DeepHedgingResult deep_hedging_train(const MarketParams& params, const TimeGrid& grid,
                                     const DeepHedgingConfig& config, std::uint64_t seed);

// Batch gradient of mean(-|X_T|) plus regularizers over paths [start, stop),
// back-propagated through the portfolio recursion; one flat gradient per
// per-step network. Exposed so the chain rule is testable in isolation.
struct DeepHedgingGradient {
    std::vector<std::vector<double>> per_net;
    double mean_abs = 0.0;
};
DeepHedgingGradient deep_hedging_gradient(const std::vector<Net>& per_step,
                                          const MarketParams& params, const TimeGrid& grid,
                                          const PathBatch& batch, int start, int stop,
                                          const DeepHedgingConfig& config);

// Summary of how constant/saturated the per-step networks ended up.
struct DeepHedgingShape {
    double max_output_sd = 0.0;        // across states, max over steps
    double max_distance_to_pm1 = 0.0;  // max over steps/states of 1 - |q|
};
DeepHedgingShape deep_hedging_shape(const std::vector<Net>& per_step, const MarketParams& params,
                                    const TimeGrid& grid, int n_states, std::uint64_t seed);

}  // namespace evaluation
}  // namespace passport
