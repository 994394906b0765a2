#pragma once

#include <span>
#include <utility>

#include "passport/market.hpp"

namespace passport {

// Corner of the l1-ball: one unit long (+1) or short (-1) in a single asset.
// The global flat ordering over the 2d corners is (+e1, -e1, +e2, -e2, ...).
struct CornerAction {
    int asset = 0;      // 0-based
    int direction = 1;  // +1 or -1

    int index() const { return 2 * asset + (direction < 0 ? 1 : 0); }
    static CornerAction from_index(int idx) {
        return CornerAction{idx / 2, (idx % 2 == 0) ? 1 : -1};
    }
};

inline bool operator==(const CornerAction& a, const CornerAction& b) {
    return a.asset == b.asset && a.direction == b.direction;
}

// One-step strike-scaled call value kappa * CP(s/kappa) with
// kappa = (|x| + s)/s; the asset-selection criterion of the optimal strategy.
struct CallQuote {
    double s = 0.0;
    double x_abs = 0.0;
    double sigma = 0.0;
    double dt = 0.0;
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

CallQuote scaled_call(double s, double x_abs, double sigma, double dt);

// E[(S - strike)_+] for lognormal S with mean `forward` and log-sd `vol`.
// Non-positive strikes collapse to forward - strike.
double lognormal_call(double forward, double strike, double vol);
// E[(strike - S)_+]; non-positive strikes give 0.
double lognormal_put(double forward, double strike, double vol);

// Optimal corner for uncorrelated assets: direction -sign(x) with sign(0)=+1,
// asset argmax of the scaled call values (lowest index on ties). Throws
// CorrelatedMarket unless rho = I or the caller opts into heuristic use.
CornerAction optimal_action(const MarketState& state, const MarketParams& params, double dt,
                            bool allow_correlated = false);

// One-step investment values: phi_minus for trading against the sign of x,
// phi_plus for trading with it, both as functions of the representation
// variable z >= 0. Computed from two call prices each.
double phi_minus(double z, double s, double x_abs, double sigma, double dt);
double phi_plus(double z, double s, double x_abs, double sigma, double dt);

// For S ~ logN(mu, sigma) with median m = e^mu and c1 > max(m, c2), evaluates
// the hypothesis |m - c1| > |m - c2| and the conclusion E|S-c1| > E|S-c2|.
// Property-test helper only.
std::pair<bool, bool> lognormal_median_inequality(double mu, double sigma, double c1, double c2);

// E|S - c| for lognormal S, closed form.
double lognormal_abs_moment(double mu, double sigma, double c);

}  // namespace passport
