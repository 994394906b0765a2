#include "passport/analytic.hpp"

#include <cmath>

#include "passport/math.hpp"

namespace passport {

double lognormal_call(double forward, double strike, double vol) {
    if (!(forward > 0.0)) throw DomainError("lognormal_call: forward must be positive");
    if (!(vol > 0.0)) throw DomainError("lognormal_call: vol must be positive");
    if (strike <= 0.0) return forward - strike;
    const double d1 = (std::log(forward / strike) + 0.5 * vol * vol) / vol;
    const double d2 = d1 - vol;
    return forward * norm_cdf(d1) - strike * norm_cdf(d2);
}

double lognormal_put(double forward, double strike, double vol) {
    if (strike <= 0.0) return 0.0;
    // parity: E[(K-S)_+] = E[(S-K)_+] - (F - K)
    return lognormal_call(forward, strike, vol) - (forward - strike);
}

CallQuote scaled_call(double s, double x_abs, double sigma, double dt) {
    if (!(s > 0.0)) throw DomainError("scaled_call: s must be positive");
    if (!(x_abs >= 0.0)) throw DomainError("scaled_call: x_abs must be non-negative");
    if (!(sigma > 0.0)) throw DomainError("scaled_call: sigma must be positive");
    if (!(dt > 0.0)) throw DomainError("scaled_call: dt must be positive");

    CallQuote q;
    q.s = s;
    q.x_abs = x_abs;
    q.sigma = sigma;
    q.dt = dt;
    const double vol = sigma * std::sqrt(dt);
    q.d1 = (std::log1p(x_abs / s) + 0.5 * vol * vol) / vol;
    q.d2 = q.d1 - vol;
    q.value = (s + x_abs) * norm_cdf(q.d1) - s * norm_cdf(q.d2);
    return q;
}

CornerAction optimal_action(const MarketState& state, const MarketParams& params, double dt,
                            bool allow_correlated) {
    const int d = params.n_assets();
    if (static_cast<int>(state.s.size()) != d)
        throw DomainError("optimal_action: state dimension mismatch");
    if (!allow_correlated && !params.is_uncorrelated())
        throw CorrelatedMarket(
            "optimal_action: market is correlated; pass allow_correlated to use as heuristic");

    const double x_abs = std::fabs(state.x);
    int best = 0;
    double best_value = scaled_call(state.s[0], x_abs, params.sigma[0], dt).value;
    for (int j = 1; j < d; ++j) {
        const double v = scaled_call(state.s[j], x_abs, params.sigma[j], dt).value;
        if (v > best_value) {
            best_value = v;
            best = j;
        }
    }
    // sign(0) = +1 convention, so x = 0 trades short.
    const int direction = (state.x >= 0.0) ? -1 : 1;
    return CornerAction{best, direction};
}

double phi_minus(double z, double s, double x_abs, double sigma, double dt) {
    if (!(z >= 0.0)) throw DomainError("phi_minus: z must be non-negative");
    if (!(s > 0.0) || !(x_abs >= 0.0) || !(sigma > 0.0) || !(dt > 0.0))
        throw DomainError("phi_minus: invalid parameters");
    const double vol = sigma * std::sqrt(dt);
    // E[max{|S kappa - s|, z}] with kappa = (x_abs + s)/s; S kappa has mean
    // s + x_abs. Two calls at strikes s +/- z.
    const double fwd = s + x_abs;
    return lognormal_call(fwd, s + z, vol) + lognormal_call(fwd, s - z, vol) - x_abs;
}

namespace {

// E[(S * c_lin + c_off)_+] for lognormal S with mean s_mean, any sign of c_lin.
double affine_positive_part(double s_mean, double c_lin, double c_off, double vol) {
    if (c_lin > 0.0) return lognormal_call(c_lin * s_mean, -c_off, vol);
    if (c_lin == 0.0) return std::max(c_off, 0.0);
    return lognormal_put(-c_lin * s_mean, c_off, vol);
}

}  // namespace

double phi_plus(double z, double s, double x_abs, double sigma, double dt) {
    if (!(z >= 0.0)) throw DomainError("phi_plus: z must be non-negative");
    if (!(s > 0.0) || !(x_abs >= 0.0) || !(sigma > 0.0) || !(dt > 0.0))
        throw DomainError("phi_plus: invalid parameters");
    const double vol = sigma * std::sqrt(dt);
    // E[max{|S kappa_t + s|, z}] with kappa_t = (x_abs - s)/s, any sign.
    const double kt = (x_abs - s) / s;
    return affine_positive_part(s, kt, s + z, vol) + affine_positive_part(s, kt, s - z, vol) -
           x_abs;
}

double lognormal_abs_moment(double mu, double sigma, double c) {
    if (!(sigma > 0.0)) throw DomainError("lognormal_abs_moment: sigma must be positive");
    const double mean = std::exp(mu + 0.5 * sigma * sigma);
    if (c <= 0.0) return mean - c;
    // E|S - c| = 2 E[(S - c)_+] + c - E[S]
    const double d1 = (mu + sigma * sigma - std::log(c)) / sigma;
    const double d2 = d1 - sigma;
    const double call = mean * norm_cdf(d1) - c * norm_cdf(d2);
    return 2.0 * call + c - mean;
}

std::pair<bool, bool> lognormal_median_inequality(double mu, double sigma, double c1, double c2) {
    if (!(sigma > 0.0)) throw DomainError("lognormal_median_inequality: sigma must be positive");
    const double m = std::exp(mu);
    if (!(c1 > m && c1 > c2))
        throw DomainError("lognormal_median_inequality: need c1 > max(m, c2)");
    const bool hypothesis = std::fabs(m - c1) > std::fabs(m - c2);
    const bool conclusion =
        lognormal_abs_moment(mu, sigma, c1) > lognormal_abs_moment(mu, sigma, c2);
    return {hypothesis, conclusion};
}

}  // namespace passport
