#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "passport/errors.hpp"
#include "passport/math.hpp"
#include "passport/quadrature.hpp"
#include "passport/rng.hpp"

using namespace passport;

TEST_CASE("norm_cdf matches direct quadrature of the density") {
    // integrate phi from -12 to x with composite Gauss-Legendre panels
    const QuadratureRule gl = gauss_legendre(48);
    auto cdf_quad = [&](double x) {
        double total = 0.0;
        const double lo = -12.0;
        const int panels = 96;
        for (int p = 0; p < panels; ++p) {
            const double a = lo + (x - lo) * p / panels;
            const double b = lo + (x - lo) * (p + 1) / panels;
            const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            double s = 0.0;
            for (std::size_t i = 0; i < gl.nodes.size(); ++i)
                s += gl.weights[i] * norm_pdf(mid + half * gl.nodes[i]);
            total += half * s;
        }
        return total;
    };
    for (double x : {-3.0, -1.0, -0.5, 0.0, 0.2, 1.0, 2.5, 4.0}) {
        CHECK(norm_cdf(x) == doctest::Approx(cdf_quad(x)).epsilon(1e-15));
    }
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-16));
}

TEST_CASE("norm_inv inverts norm_cdf") {
    for (double p : {1e-10, 1e-4, 0.025, 0.2, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
        const double x = norm_inv(p);
        CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(norm_inv(0.0), DomainError);
    CHECK_THROWS_AS(norm_inv(1.0), DomainError);
}

TEST_CASE("student-t quantile: known values and normal limit") {
    // dof=1 is the Cauchy: quantile(0.975) = tan(pi * 0.475)
    CHECK(student_t_quantile(0.975, 1) ==
          doctest::Approx(std::tan(M_PI * 0.475)).epsilon(1e-9));
    // dof=2 closed form: t = a sqrt(2/(1-a^2)) with a = 2p-1
    const double a = 2.0 * 0.975 - 1.0;
    CHECK(student_t_quantile(0.975, 2) ==
          doctest::Approx(a * std::sqrt(2.0 / (1.0 - a * a))).epsilon(1e-9));
    // large dof approaches the normal quantile
    CHECK(student_t_quantile(0.975, 100000) == doctest::Approx(norm_inv(0.975)).epsilon(1e-4));
    CHECK(student_t_quantile(0.5, 7) == doctest::Approx(0.0));
    CHECK(student_t_quantile(0.025, 9) == doctest::Approx(-student_t_quantile(0.975, 9)));
}

TEST_CASE("gauss-hermite integrates gaussian moments exactly") {
    CHECK(normal_expectation_hermite([](double z) { return z * z; }, 16) ==
          doctest::Approx(1.0).epsilon(1e-13));
    CHECK(normal_expectation_hermite([](double z) { return z * z * z * z; }, 16) ==
          doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("composite normal expectation handles kinks to high accuracy") {
    // E|Z| = sqrt(2/pi); kink at 0
    const double exact = std::sqrt(2.0 / M_PI);
    const double kink = 0.0;
    const double got =
        normal_expectation([](double z) { return std::fabs(z); }, 32, std::span(&kink, 1));
    CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    const double got2 =
        normal_expectation([](double z) { return std::fabs(z); }, 64, std::span(&kink, 1));
    CHECK(std::fabs(got - got2) < 1e-13);
}

TEST_CASE("lognormal expectation has unit mean and matches E[R^2]") {
    const double v = 0.37;
    CHECK(lognormal_expectation(v, [](double r) { return r; }, 32) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lognormal_expectation(v, [](double r) { return r * r; }, 32) ==
          doctest::Approx(std::exp(v * v)).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and distinct across indices") {
    RngStream a(42, RngDomain::Test, 7);
    RngStream b(42, RngDomain::Test, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(42, RngDomain::Test, 8);
    RngStream d(42, RngDomain::Test, 7);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
    CHECK_FALSE(all_equal);
}

TEST_CASE("rng normals have the right first two moments") {
    RngStream rng(1234, RngDomain::Test, 0);
    const int n = 200000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.next_normal();
    const SampleStats st = sample_stats(xs);
    CHECK(std::fabs(st.mean) < 3.0 * st.stderr_mean + 1e-12);
    CHECK(st.sd == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("linear fit recovers a noiseless line") {
    std::vector<double> x = {1, 2, 3, 4, 5, 6};
    std::vector<double> y;
    for (double xi : x) y.push_back(2.5 * xi - 1.0);
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}
