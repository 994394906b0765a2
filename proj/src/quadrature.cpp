#include "passport/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "passport/errors.hpp"
#include "passport/math.hpp"

namespace passport {

namespace {

// Rules are requested from hot loops; cache them by node count.
template <QuadratureRule (*Maker)(int)>
const QuadratureRule& cached_rule(int n) {
    static std::map<int, QuadratureRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lk(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, Maker(n)).first;
    return it->second;
}

}  // namespace

QuadratureRule gauss_hermite(int n) {
    if (n < 1) throw DomainError("gauss_hermite: n < 1");
    if (n > 256) throw DomainError("gauss_hermite: Newton recurrence unreliable past n = 256");
    // Newton iteration on H_n with asymptotic initial guesses (Numerical
    // Recipes gauher); nodes in descending order, symmetric about 0.
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[1];
        } else {
            z = 2.0 * z - rule.nodes[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15 * (1.0 + std::fabs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n < 1");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::fabs(z - z1) <= 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

const QuadratureRule& gauss_legendre_cached(int n) { return cached_rule<gauss_legendre>(n); }

double normal_expectation_hermite(const std::function<double(double)>& f, int n) {
    const QuadratureRule& rule = cached_rule<gauss_hermite>(n);
    const double sqrt2 = std::sqrt(2.0);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(sqrt2 * rule.nodes[i]);
    return inv_sqrt_pi * sum;
}

NormalScheme normal_scheme(int nodes_per_panel, std::span<const double> kinks, double z_max) {
    // Base panels resolve the density; extra edges isolate integrand kinks.
    std::vector<double> edges = {-z_max, -8.0, -5.0, -3.0, -2.0, -1.0, 0.0,
                                 1.0,    2.0,  3.0,  5.0,  8.0,  z_max};
    for (double k : kinks) {
        if (k > -z_max && k < z_max) edges.push_back(k);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
                edges.end());

    const int n = std::max(4, nodes_per_panel);
    const QuadratureRule& rule = cached_rule<gauss_legendre>(n);
    NormalScheme scheme;
    scheme.z.reserve(n * (edges.size() - 1));
    scheme.w.reserve(n * (edges.size() - 1));
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double a = edges[p], b = edges[p + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < n; ++i) {
            const double z = mid + half * rule.nodes[i];
            scheme.z.push_back(z);
            scheme.w.push_back(half * rule.weights[i] * norm_pdf(z));
        }
    }
    return scheme;
}

double normal_expectation(const std::function<double(double)>& f, int nodes_per_panel,
                          std::span<const double> kinks, double z_max) {
    const NormalScheme scheme = normal_scheme(nodes_per_panel, kinks, z_max);
    double total = 0.0;
    for (std::size_t i = 0; i < scheme.z.size(); ++i) total += scheme.w[i] * f(scheme.z[i]);
    return total;
}

double lognormal_expectation(double v, const std::function<double(double)>& f,
                             int nodes_per_panel, std::span<const double> kinks_in_r) {
    if (!(v >= 0.0)) throw DomainError("lognormal_expectation: negative log-sd");
    if (v == 0.0) return f(1.0);
    std::vector<double> kz;
    kz.reserve(kinks_in_r.size());
    for (double r : kinks_in_r) {
        if (r > 0.0) kz.push_back((std::log(r) + 0.5 * v * v) / v);
    }
    return normal_expectation([&](double z) { return f(std::exp(-0.5 * v * v + v * z)); },
                              nodes_per_panel, kz);
}

}  // namespace passport
