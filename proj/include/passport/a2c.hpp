#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "passport/approximator.hpp"

namespace passport {
namespace a2c {

struct A2CConfig {
    int niter = 2000;
    int B = 256;             // paths per iteration
    double tau = -1.0;       // entropy weight; < 0: default 1e-3 in 1d, 1e-2 above
    double gamma = 1.0;      // per-step discount knob; values are already discounted
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    std::vector<int> hidden = {64, 64};

    void validate() const;
    double resolved_tau(int n_assets) const;
};

// One sampled episode: critics at every step including terminal, the sampled
// actions' log-probabilities, and the per-path entropy accumulator
// e = sum_t gamma * sum_a pi(a) log pi(a).
struct EpisodeTape {
    std::vector<double> critics;     // length N+1
    std::vector<double> log_pis;     // length N
    double entropy_acc = 0.0;        // e
    double x_terminal = 0.0;
    // replay fields for gradient evaluation
    std::vector<MarketState> states;  // length N+1
    std::vector<int> actions;         // length N, corner indices
    double entropy_sum = 0.0;         // sum_t H(pi_t), for logging
    int n_floored = 0;                // probability-floor activations
};

std::vector<EpisodeTape> forward(const Net& actor, const Net& critic, const MarketParams& params,
                                 const TimeGrid& grid, int B, double gamma, std::uint64_t seed,
                                 std::uint64_t iter);

// A_t = gamma^{N-t} |x_T| - critics[t], t = 0..N.
std::vector<double> advantages(const EpisodeTape& tape, double gamma);

struct A2CLosses {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    std::vector<double> actor_grad;
    std::vector<double> critic_grad;
};

// Advantages are constants in the actor gradient (score-function estimator);
// the critic gradient flows only through its own values.
A2CLosses losses(const Net& actor, const Net& critic, const MarketParams& params,
                 const TimeGrid& grid, const std::vector<EpisodeTape>& tapes, double gamma,
                 double tau);

struct A2CLogRow {
    int iter = 0;
    double mean_abs_xt = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double mean_entropy = 0.0;
};

struct A2CResult {
    Net actor;
    Net critic;
    std::vector<A2CLogRow> log;
};

A2CResult train(const A2CConfig& config, const MarketParams& params, const TimeGrid& grid,
                std::uint64_t seed);

void write_log_csv(const std::string& path, const std::vector<A2CLogRow>& log);

}  // namespace a2c
}  // namespace passport
