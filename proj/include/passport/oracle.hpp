#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "passport/analytic.hpp"
#include "passport/market.hpp"

namespace passport {
namespace oracle {

// Desk-scale ground truth: backward-induction valuation on an (x, s) tensor
// grid with Gauss quadrature over the lognormal factors. d <= 2, rho = I.
struct DpGridSpec {
    int n_x = 401;             // uniform, symmetric about 0 (odd keeps 0 on-grid)
    double x_max = 0.0;        // 0 = auto: 4 * max(|x0|, max s0)
    int n_s = 101;             // log-uniform per asset (odd keeps s0 on-grid)
    double s_lo_factor = 0.25;
    double s_hi_factor = 4.0;
    double probe_tol = 1e-3;   // interpolation-residual guard, relative
    int n_probe = 32;
};

struct DPSolution {
    MarketParams params;
    TimeGrid grid;
    std::vector<double> x_nodes;
    std::vector<std::vector<double>> s_nodes;    // per asset
    std::vector<std::vector<double>> value;      // [k][node], k = 0..N
    std::vector<std::vector<int8_t>> action;     // [k][node], k = 0..N-1
    std::vector<std::vector<double>> second;     // [k][node], runner-up value
    int n_quad = 64;

    int n_assets() const { return static_cast<int>(s_nodes.size()); }
    std::size_t n_nodes() const;
    std::size_t node_index(int ix, std::span<const int> is) const;
    void node_coords(std::size_t node, int& ix, std::span<int> is) const;
    double x_of(std::size_t node) const;
    std::vector<double> s_of(std::size_t node) const;

    // Interpolated table lookup (local cubic in x and log s; |x| asymptote
    // beyond the x range, clamped in s).
    double value_at(int k, double x, std::span<const double> s) const;

    void write_csv(const std::string& path) const;  // k,x,s1..sd,value,action_index
};

DPSolution dp_solve(const MarketParams& params, const TimeGrid& grid, const DpGridSpec& spec,
                    int n_quad = 64);

// One-step expectation of a continuation for a corner action, by quadrature
// over all assets' next prices. With terminal=true the continuation is |x'|
// and the integration is split at the payoff kink.
double one_step_value(
    const MarketParams& params, double dt, double x, std::span<const double> s, int asset,
    int direction, const std::function<double(double, std::span<const double>)>& continuation,
    int n_quad, bool terminal);

// Interpolation-free DP value / argmax by nested quadrature; cost grows
// geometrically in remaining steps, so keep N - k small.
double dp_value_recursive(const MarketParams& params, const TimeGrid& grid, int k, double x,
                          std::span<const double> s, int n_quad);

struct RecursiveAction {
    CornerAction action;
    double best = 0.0;
    double second = 0.0;
    double rel_gap = 0.0;
};
RecursiveAction dp_action_recursive(const MarketParams& params, const TimeGrid& grid, int k,
                                    double x, std::span<const double> s, int n_quad);

// Value-function shape checks (per time step, per s-column): convexity,
// evenness, dominance over |x|, the linear asymptote, and the positive
// homogeneity of the one-step single-asset values.
struct ValuePropertyReport {
    double max_convexity_violation = 0.0;
    double max_evenness_gap = 0.0;
    double max_dominance_gap = 0.0;
    double max_asymptote_gap = 0.0;
    double max_homogeneity_rel_err = 0.0;
    bool passed(double tol) const {
        return max_convexity_violation <= tol && max_evenness_gap <= tol &&
               max_dominance_gap <= tol && max_asymptote_gap <= tol &&
               max_homogeneity_rel_err <= tol;
    }
};
ValuePropertyReport verify_value_properties(const DPSolution& dp, double tol = 1e-6,
                                            bool throw_on_violation = true);

// Gradient-variance study: tracks the last-layer bias gradient at +e1 over
// single-path evaluations at the frozen uniform policy, per time
// discretization N, and fits variance against N.
struct VarianceStudyResult {
    std::vector<int> n_list;
    std::vector<std::vector<double>> gradients;  // [per N][per iteration]
    std::vector<double> variances;               // per N
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool closed_form_verified = true;  // per-sample score vs Lemma form
};
VarianceStudyResult variance_study(const MarketParams& params, double maturity,
                                   std::span<const int> n_list, int n_iters, std::uint64_t seed);

void write_variance_csv(const std::string& samples_path, const std::string& summary_path,
                        const VarianceStudyResult& result);

// Random-parameter sweeps of the phi dominance and the lognormal median
// implication. Throws PropertyViolation on any failure.
struct PhiMedianReport {
    int phi_cases = 0;
    int median_cases = 0;
    int median_hypothesis_held = 0;
    double max_phi_violation = 0.0;  // max of (phi_plus - phi_minus), <= tol
};
PhiMedianReport verify_phi_and_median(int n_cases, std::uint64_t seed);

}  // namespace oracle
}  // namespace passport
