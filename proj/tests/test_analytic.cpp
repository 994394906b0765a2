#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "passport/analytic.hpp"
#include "passport/math.hpp"
#include "passport/quadrature.hpp"
#include "passport/rng.hpp"

using namespace passport;

namespace {

// Quadrature oracle for E[(S kappa - strike)_+], S lognormal with mean s.
double quad_scaled_call(double s, double x_abs, double sigma, double dt) {
    const double v = sigma * std::sqrt(dt);
    const double kappa = (x_abs + s) / s;
    const double kink_r = 1.0 / kappa;  // where S kappa = s
    return lognormal_expectation(
        v, [&](double r) { return std::max(s * r * kappa - s, 0.0); }, 64,
        std::span(&kink_r, 1));
}

// Quadrature oracle for phi_-/phi_+ straight from the max-expectation form.
double quad_phi(double z, double s, double x_abs, double sigma, double dt, int direction) {
    const double v = sigma * std::sqrt(dt);
    const double kappa = (x_abs + s) / s;
    const double kappa_t = (x_abs - s) / s;
    auto integrand = [&](double r) {
        const double inner = (direction < 0) ? (s * r * kappa - s) : (s * r * kappa_t + s);
        return std::max(std::fabs(inner), z);
    };
    // kinks: inner = 0 and |inner| = z
    std::vector<double> kinks;
    const double coeff = (direction < 0) ? kappa : kappa_t;
    const double off = (direction < 0) ? -1.0 : 1.0;
    for (double target : {0.0, z, -z}) {
        if (coeff != 0.0) {
            const double r = (target / s - off) / coeff;
            if (r > 0.0) kinks.push_back(r);
        }
    }
    return lognormal_expectation(v, integrand, 64, kinks);
}

MarketParams uncorrelated(std::vector<double> sigma, std::vector<double> s0) {
    return MarketParams::uncorrelated(std::move(sigma), std::move(s0), 0.0, 0.0);
}

}  // namespace

TEST_CASE("scaled_call at x=0 reduces to the at-the-money closed form") {
    const double s = 1.3, sigma = 0.25, dt = 0.4;
    const CallQuote q = scaled_call(s, 0.0, sigma, dt);
    const double expected = s * (2.0 * norm_cdf(0.5 * sigma * std::sqrt(dt)) - 1.0);
    CHECK(q.value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(q.d2 == doctest::Approx(q.d1 - sigma * std::sqrt(dt)).epsilon(1e-15));
}

TEST_CASE("scaled_call degenerate-maturity limit recovers |x|") {
    const double s = 1.0, x_abs = 0.4, sigma = 0.2;
    for (double dt : {1e-6, 1e-9, 1e-12}) {
        CHECK(scaled_call(s, x_abs, sigma, dt).value == doctest::Approx(x_abs).epsilon(1e-6));
    }
}

TEST_CASE("scaled_call matches the quadrature oracle") {
    CHECK(scaled_call(1.0, 0.1, 0.2, 0.1).value ==
          doctest::Approx(quad_scaled_call(1.0, 0.1, 0.2, 0.1)).epsilon(1e-8));
    RngStream rng(2024, RngDomain::Test, 1);
    for (int i = 0; i < 25; ++i) {
        const double s = 0.3 + 2.0 * rng.next_uniform();
        const double x_abs = 1.5 * rng.next_uniform();
        const double sigma = 0.05 + 0.6 * rng.next_uniform();
        const double dt = 0.02 + rng.next_uniform();
        CHECK(scaled_call(s, x_abs, sigma, dt).value ==
              doctest::Approx(quad_scaled_call(s, x_abs, sigma, dt)).epsilon(1e-8));
    }
}

TEST_CASE("scaled_call is strictly increasing in sigma and in x_abs") {
    RngStream rng(555, RngDomain::Test, 2);
    int sigma_checked = 0;
    for (int i = 0; i < 80; ++i) {
        const double s = 0.4 + 2.0 * rng.next_uniform();
        const double x_abs = rng.next_uniform();
        const double sigma = 0.05 + 0.5 * rng.next_uniform();
        const double dt = 0.05 + 0.5 * rng.next_uniform();
        const CallQuote base = scaled_call(s, x_abs, sigma, dt);
        CHECK(scaled_call(s, x_abs + 1e-4, sigma, dt).value > base.value);
        // deep in the money the vega underflows below one ulp; skip there
        if (base.d1 < 6.0) {
            ++sigma_checked;
            CHECK(scaled_call(s, x_abs, sigma + 1e-4, dt).value > base.value);
        }
    }
    CHECK(sigma_checked >= 30);
}

TEST_CASE("scaled_call rejects invalid domain") {
    CHECK_THROWS_AS(scaled_call(0.0, 0.1, 0.2, 0.1), DomainError);
    CHECK_THROWS_AS(scaled_call(1.0, -0.1, 0.2, 0.1), DomainError);
    CHECK_THROWS_AS(scaled_call(1.0, 0.1, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(scaled_call(1.0, 0.1, 0.2, 0.0), DomainError);
}

TEST_CASE("optimal_action in 1d goes short when ahead, long when behind") {
    const MarketParams p = uncorrelated({0.2}, {1.0});
    MarketState st{2, {1.1}, 0.3};
    CornerAction a = optimal_action(st, p, 0.1);
    CHECK(a.asset == 0);
    CHECK(a.direction == -1);
    st.x = -0.3;
    a = optimal_action(st, p, 0.1);
    CHECK(a.direction == 1);
    st.x = 0.0;  // sign(0) = +1 convention trades short
    a = optimal_action(st, p, 0.1);
    CHECK(a.direction == -1);
}

TEST_CASE("optimal_action at x=0 picks the higher sigma*s asset for small dt") {
    const MarketParams p = uncorrelated({0.2, std::sqrt(0.03)}, {1.0, 1.0});
    const MarketState st{0, {1.0, 1.0}, 0.0};
    const CornerAction a = optimal_action(st, p, 0.01);
    CHECK(a.asset == 0);  // sigma_1 s_1 = 0.2 > sqrt(0.03)
    CHECK(a.direction == -1);
}

TEST_CASE("optimal_action refuses correlated markets unless told otherwise") {
    MarketParams p = uncorrelated({0.2, 0.2}, {1.0, 1.0});
    p.rho[0][1] = p.rho[1][0] = 0.5;
    const MarketState st{0, {1.0, 1.0}, 0.1};
    CHECK_THROWS_AS(optimal_action(st, p, 0.1), CorrelatedMarket);
    CHECK_NOTHROW(optimal_action(st, p, 0.1, /*allow_correlated=*/true));
}

TEST_CASE("optimal_action agrees with exhaustive one-step quadrature argmax in 3d") {
    // one-step value of corner (i, q): E | x + q s_i (R - 1) |
    auto one_step = [](const MarketState& st, const MarketParams& p, double dt, int asset,
                       int dir) {
        const double v = p.sigma[asset] * std::sqrt(dt);
        const double s = st.s[asset];
        auto f = [&](double r) { return std::fabs(st.x + dir * s * (r - 1.0)); };
        const double kink = 1.0 - st.x / (dir * s);
        std::vector<double> kinks;
        if (kink > 0.0) kinks.push_back(kink);
        return lognormal_expectation(v, f, 64, kinks);
    };
    RngStream rng(99, RngDomain::Test, 3);
    int tested = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> sigma = {0.1 + 0.4 * rng.next_uniform(),
                                     0.1 + 0.4 * rng.next_uniform(),
                                     0.1 + 0.4 * rng.next_uniform()};
        std::vector<double> s0 = {0.5 + rng.next_uniform(), 0.5 + rng.next_uniform(),
                                  0.5 + rng.next_uniform()};
        const MarketParams p = uncorrelated(sigma, s0);
        MarketState st{1, s0, (rng.next_uniform() - 0.5)};
        const double dt = 0.05 + 0.3 * rng.next_uniform();

        double best = -1.0, second = -1.0;
        int best_idx = -1;
        for (int idx = 0; idx < 6; ++idx) {
            const CornerAction c = CornerAction::from_index(idx);
            const double val = one_step(st, p, dt, c.asset, c.direction);
            if (val > best) {
                second = best;
                best = val;
                best_idx = idx;
            } else if (val > second) {
                second = val;
            }
        }
        if ((best - second) / best < 1e-6) continue;  // tie: excluded
        ++tested;
        CHECK(optimal_action(st, p, dt).index() == best_idx);
    }
    CHECK(tested >= 20);
}

TEST_CASE("phi identities: x=0 collapses the pair; large z dominates") {
    const double s = 1.2, sigma = 0.3, dt = 0.25;
    for (double z : {0.0, 0.2, 1.0, 3.0}) {
        CHECK(phi_minus(z, s, 0.0, sigma, dt) ==
              doctest::Approx(phi_plus(z, s, 0.0, sigma, dt)).epsilon(1e-12));
    }
    const double big = 200.0;
    CHECK(phi_minus(big, s, 0.4, sigma, dt) == doctest::Approx(big).epsilon(1e-10));
    CHECK(phi_plus(big, s, 0.4, sigma, dt) == doctest::Approx(big).epsilon(1e-10));
}

TEST_CASE("phi closed forms match the quadrature oracle") {
    CHECK(phi_minus(0.1, 1.0, 0.2, 0.3, 0.25) ==
          doctest::Approx(quad_phi(0.1, 1.0, 0.2, 0.3, 0.25, -1)).epsilon(1e-8));
    RngStream rng(31, RngDomain::Test, 4);
    for (int i = 0; i < 25; ++i) {
        const double s = 0.4 + 1.6 * rng.next_uniform();
        const double x_abs = 1.2 * rng.next_uniform();
        const double sigma = 0.1 + 0.5 * rng.next_uniform();
        const double dt = 0.05 + 0.5 * rng.next_uniform();
        const double z = 2.0 * rng.next_uniform();
        CHECK(phi_minus(z, s, x_abs, sigma, dt) ==
              doctest::Approx(quad_phi(z, s, x_abs, sigma, dt, -1)).epsilon(1e-8));
        CHECK(phi_plus(z, s, x_abs, sigma, dt) ==
              doctest::Approx(quad_phi(z, s, x_abs, sigma, dt, +1)).epsilon(1e-8));
    }
}

TEST_CASE("phi_minus dominates phi_plus away from x=0") {
    RngStream rng(8, RngDomain::Test, 5);
    for (int i = 0; i < 100; ++i) {
        const double s = 0.4 + 1.6 * rng.next_uniform();
        const double x_abs = 1e-3 + 1.2 * rng.next_uniform();
        const double sigma = 0.1 + 0.5 * rng.next_uniform();
        const double dt = 0.05 + 0.5 * rng.next_uniform();
        for (int j = 0; j <= 20; ++j) {
            const double z = 5.0 * s * j / 20.0;
            CHECK(phi_minus(z, s, x_abs, sigma, dt) >=
                  phi_plus(z, s, x_abs, sigma, dt) - 1e-10);
        }
    }
}

TEST_CASE("asset-selection criteria are equivalent (kappa-scaled vs unit-strike)") {
    // kappa^j CP^j(s^j/kappa^j) vs s^j CP^j_{kappa^j}(1): same argmax.
    RngStream rng(77, RngDomain::Test, 6);
    int tested = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 3;
        std::vector<double> s(d), sigma(d);
        for (int i = 0; i < d; ++i) {
            s[i] = 0.5 + 1.5 * rng.next_uniform();
            sigma[i] = 0.1 + 0.4 * rng.next_uniform();
        }
        const double x_abs = 1.2 * rng.next_uniform();
        const double dt = 0.05 + 0.4 * rng.next_uniform();
        std::vector<double> crit_a(d), crit_b(d);
        for (int i = 0; i < d; ++i) {
            crit_a[i] = scaled_call(s[i], x_abs, sigma[i], dt).value;
            const double kappa = (x_abs + s[i]) / s[i];
            crit_b[i] = s[i] * lognormal_call(kappa, 1.0, sigma[i] * std::sqrt(dt));
        }
        auto argmax = [](const std::vector<double>& v) {
            int best = 0;
            for (std::size_t i = 1; i < v.size(); ++i)
                if (v[i] > v[best]) best = static_cast<int>(i);
            return best;
        };
        const int ia = argmax(crit_a);
        bool tie = false;
        for (int i = 0; i < d; ++i)
            if (i != ia && std::fabs(crit_a[i] - crit_a[ia]) / crit_a[ia] < 1e-6) tie = true;
        if (tie) continue;
        ++tested;
        CHECK(ia == argmax(crit_b));
        CHECK(crit_a[ia] == doctest::Approx(crit_b[ia]).epsilon(1e-10));
    }
    CHECK(tested >= 40);
}

TEST_CASE("preferred asset by scaled call wins the one-step quadrature value") {
    // When scaled_call(j) beats scaled_call(i) by a clear relative margin, the
    // one-step investment values (direction -sign(x)) order the same way.
    RngStream rng(13, RngDomain::Test, 7);
    auto one_step_neg = [](double x, double s, double sigma, double dt) {
        const double v = sigma * std::sqrt(dt);
        auto f = [&](double r) { return std::fabs(std::fabs(x) - s * (r - 1.0)); };
        const double kink = 1.0 + std::fabs(x) / s;
        return lognormal_expectation(v, f, 64, std::span(&kink, 1));
    };
    int tested = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const double x = (rng.next_uniform() - 0.5);
        const double dt = 0.05 + 0.4 * rng.next_uniform();
        const double s_i = 0.5 + 1.5 * rng.next_uniform();
        const double s_j = 0.5 + 1.5 * rng.next_uniform();
        const double sig_i = 0.1 + 0.4 * rng.next_uniform();
        const double sig_j = 0.1 + 0.4 * rng.next_uniform();
        const double ci = scaled_call(s_i, std::fabs(x), sig_i, dt).value;
        const double cj = scaled_call(s_j, std::fabs(x), sig_j, dt).value;
        if (cj <= ci * (1.0 + 1e-6)) continue;
        ++tested;
        CHECK(one_step_neg(x, s_j, sig_j, dt) > one_step_neg(x, s_i, sig_i, dt));
    }
    CHECK(tested >= 20);
}

TEST_CASE("lognormal median inequality: implication on closed forms") {
    auto [hyp, concl] = lognormal_median_inequality(0.0, 0.2, 2.0, 0.5);
    CHECK(hyp);
    CHECK(concl);
    // precondition violated (c1 = c2)
    CHECK_THROWS_AS(lognormal_median_inequality(0.0, 0.2, 1.5, 1.5), DomainError);
    auto [hyp2, concl2] = lognormal_median_inequality(0.0, 1.0, 1.5, 0.9);
    if (hyp2) CHECK(concl2);
}

TEST_CASE("lognormal median inequality admits wide-sigma counterexamples") {
    // The unrestricted implication fails for a heavily skewed lognormal with
    // the lower strike far below the median: the left-tail mass outweighs the
    // wider right-side interval. The helper reports this honestly; both sides
    // are confirmed by quadrature at this point.
    const double mu = 0.372423, sigma = 0.804404;
    const double c1 = 2.8852766877, c2 = 0.2928835178;
    auto [hyp, concl] = lognormal_median_inequality(mu, sigma, c1, c2);
    CHECK(hyp);
    CHECK_FALSE(concl);
    const double mean = std::exp(mu + 0.5 * sigma * sigma);
    auto quad = [&](double c) {
        const double kink = c / mean;
        return lognormal_expectation(
            sigma, [&](double r) { return std::fabs(mean * r - c); }, 64, std::span(&kink, 1));
    };
    CHECK(lognormal_abs_moment(mu, sigma, c1) == doctest::Approx(quad(c1)).epsilon(1e-10));
    CHECK(lognormal_abs_moment(mu, sigma, c2) == doctest::Approx(quad(c2)).epsilon(1e-10));
    CHECK(quad(c1) < quad(c2));
    // the symmetric-strike instance used by the optimal-direction argument
    // does hold at the same sigma: c1 = s + a, c2 = s - a, S with mean s
    const double s = 1.0, a = 0.7;
    auto [hyp_sym, concl_sym] =
        lognormal_median_inequality(std::log(s) - 0.5 * sigma * sigma, sigma, s + a, s - a);
    CHECK(hyp_sym);
    CHECK(concl_sym);
}

TEST_CASE("lognormal absolute moment matches quadrature") {
    RngStream rng(3, RngDomain::Test, 8);
    for (int i = 0; i < 20; ++i) {
        const double mu = -0.5 + rng.next_uniform();
        const double sigma = 0.1 + 0.8 * rng.next_uniform();
        const double c = 0.2 + 2.0 * rng.next_uniform();
        // S = exp(mu + sigma Z) = exp(mu + sigma^2/2) * R with R unit-mean.
        const double mean = std::exp(mu + 0.5 * sigma * sigma);
        const double kink = c / mean;
        const double quad = lognormal_expectation(
            sigma, [&](double r) { return std::fabs(mean * r - c); }, 64, std::span(&kink, 1));
        CHECK(lognormal_abs_moment(mu, sigma, c) == doctest::Approx(quad).epsilon(1e-10));
    }
}
