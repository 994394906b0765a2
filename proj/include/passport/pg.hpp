#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "passport/approximator.hpp"

namespace passport {
namespace pg {

// Backward-in-time policy-gradient trainer: greedy classification targets
// from per-action Monte Carlo continuation values, fitted under TV loss with
// entropy regularization.
struct PGConfig {
    std::vector<int> dppt = {256};         // training points per time step (broadcast if size 1)
    int B = 256;                           // continuation paths per action evaluation
    double lr = 1e-2;
    std::vector<int> epochs = {60};        // per time step (broadcast if size 1)
    std::vector<int> batch_sizes = {64};   // per time step (broadcast if size 1)
    double entropy_weight = -1.0;          // < 0: default by dimension (0 in 1d, 1e-3 above)
    int resample_cap = 100;
    int sweeps = 1;
    std::vector<int> hidden = {64, 64};

    void validate() const;
    double resolved_entropy_weight(int n_assets) const;
    int at(const std::vector<int>& v, int t) const;  // broadcast lookup
};

struct LabeledState {
    int t = 0;
    MarketState state;
    int target = 0;                  // corner index, exact argmax of estimates
    std::vector<double> estimates;   // per-action mean |X_T| over B continuations
};

struct PGLogRow {
    int sweep = 0;
    int t = 0;
    int epoch = 0;
    double mean_tv_loss = 0.0;
    double target_agreement = 0.0;
    double mean_entropy = 0.0;
};

struct PGResult {
    Net policy;
    std::vector<PGLogRow> log;
};

// One noisy training point: samples a state at time t under the current
// stochastic policy, estimates all 2d one-action continuations with common
// random numbers, and returns the argmax action. Resamples the state while
// the best estimate is exactly zero, up to the cap.
LabeledState data_gen(const Net& policy, const MarketParams& params, const TimeGrid& grid, int t,
                      int B, int resample_cap, RngStream& rng);

// Label an externally chosen state (the estimation core of data_gen).
LabeledState label_state(const Net& policy, const MarketParams& params, const TimeGrid& grid,
                         const MarketState& state, int B, RngStream& rng);

PGResult train(const PGConfig& config, const MarketParams& params, const TimeGrid& grid,
               std::uint64_t seed);

void write_log_csv(const std::string& path, const std::vector<PGLogRow>& log);

}  // namespace pg
}  // namespace passport
