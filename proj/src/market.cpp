#include "passport/market.hpp"

#include <cmath>

#include "passport/csv.hpp"
#include "passport/rng.hpp"
#include "passport/threading.hpp"

namespace passport {

bool MarketParams::is_uncorrelated(double tol) const {
    const int d = n_assets();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::fabs(rho[i][j] - target) > tol) return false;
        }
    }
    return true;
}

void MarketParams::validate() const {
    const int d = n_assets();
    if (d < 1) throw DomainError("market: need at least one asset");
    if (static_cast<int>(s0.size()) != d) throw DomainError("market: s0 size mismatch");
    if (static_cast<int>(rho.size()) != d) throw DomainError("market: rho size mismatch");
    for (int i = 0; i < d; ++i) {
        if (!(sigma[i] > 0.0)) throw DomainError("market: sigma must be positive");
        if (!(s0[i] > 0.0)) throw DomainError("market: s0 must be positive");
        if (static_cast<int>(rho[i].size()) != d) throw DomainError("market: rho not square");
        if (std::fabs(rho[i][i] - 1.0) > 1e-12) throw DomainError("market: rho diagonal != 1");
        for (int j = 0; j < d; ++j) {
            if (std::fabs(rho[i][j] - rho[j][i]) > 1e-12)
                throw DomainError("market: rho not symmetric");
            if (rho[i][j] < -1.0 - 1e-12 || rho[i][j] > 1.0 + 1e-12)
                throw DomainError("market: correlation outside [-1,1]");
        }
    }
    cholesky(rho);  // rejects non-PSD input
}

MarketParams MarketParams::uncorrelated(std::vector<double> sigma, std::vector<double> s0,
                                        double x0, double r) {
    MarketParams p;
    const int d = static_cast<int>(sigma.size());
    p.sigma = std::move(sigma);
    p.s0 = std::move(s0);
    p.x0 = x0;
    p.r = r;
    p.rho.assign(d, std::vector<double>(d, 0.0));
    for (int i = 0; i < d; ++i) p.rho[i][i] = 1.0;
    p.validate();
    return p;
}

TimeGrid TimeGrid::equidistant(int n_steps, double maturity) {
    if (n_steps < 1 || !(maturity > 0.0)) throw DomainError("grid: need N >= 1 and T > 0");
    TimeGrid g;
    g.times.resize(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i)
        g.times[i] = maturity * static_cast<double>(i) / n_steps;
    return g;
}

void TimeGrid::validate() const {
    if (times.size() < 2) throw DomainError("grid: need N >= 1");
    if (times.front() != 0.0) throw DomainError("grid: t_0 must be 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw DomainError("grid: times not strictly increasing");
    }
}

std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& rho) {
    const int d = static_cast<int>(rho.size());
    std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
    for (int j = 0; j < d; ++j) {
        double diag = rho[j][j];
        for (int k = 0; k < j; ++k) diag -= a[j][k] * a[j][k];
        if (diag < -1e-10) throw NotPositiveSemidefinite("correlation matrix has pivot < -1e-10");
        if (diag < 0.0) diag = 0.0;  // degenerate direction (|rho| = 1)
        a[j][j] = std::sqrt(diag);
        for (int i = j + 1; i < d; ++i) {
            double v = rho[i][j];
            for (int k = 0; k < j; ++k) v -= a[i][k] * a[j][k];
            a[i][j] = (a[j][j] > 0.0) ? v / a[j][j] : 0.0;
        }
    }
    return a;
}

PathBatch simulate(const MarketParams& params, const TimeGrid& grid, int n_paths,
                   std::uint64_t seed) {
    params.validate();
    grid.validate();
    if (n_paths < 1) throw DomainError("simulate: n_paths < 1");

    const int d = params.n_assets();
    const int n = grid.n_steps();
    const auto chol = cholesky(params.rho);

    PathBatch batch;
    batch.n_paths = n_paths;
    batch.n_steps = n;
    batch.n_assets = d;
    batch.seed = seed;
    batch.values.resize(static_cast<std::size_t>(n_paths) * (n + 1) * d);

    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        RngStream rng(seed, RngDomain::Assets, p);
        std::vector<double> w(d, 0.0);   // standard BM at t_k
        std::vector<double> z(d, 0.0);
        for (int i = 0; i < d; ++i) batch.at(static_cast<int>(p), 0, i) = params.s0[i];
        for (int k = 1; k <= n; ++k) {
            const double sdt = std::sqrt(grid.dt(k - 1));
            for (int i = 0; i < d; ++i) z[i] = rng.next_normal();
            for (int i = 0; i < d; ++i) w[i] += sdt * z[i];
            const double t = grid.times[k];
            for (int i = 0; i < d; ++i) {
                double corr = 0.0;
                for (int j = 0; j <= i; ++j) corr += chol[i][j] * w[j];
                const double s = params.s0[i] *
                                 std::exp(-0.5 * params.sigma[i] * params.sigma[i] * t +
                                          params.sigma[i] * corr);
                batch.at(static_cast<int>(p), k, i) = s;
            }
        }
    });
    return batch;
}

double portfolio_step(double x, std::span<const double> s_prev, std::span<const double> s_next,
                      std::span<const double> q) {
    if (s_prev.size() != s_next.size() || s_prev.size() != q.size())
        throw DomainError("portfolio_step: dimension mismatch");
    double l1 = 0.0;
    for (double qi : q) l1 += std::fabs(qi);
    if (l1 > 1.0 + 1e-12) throw ActionNormViolation("portfolio_step: ||q||_1 > 1");
    double out = x;
    for (std::size_t i = 0; i < q.size(); ++i) out += q[i] * (s_next[i] - s_prev[i]);
    return out;
}

void PathBatch::write_csv(const std::string& path) const {
    CsvWriter csv(path);
    csv.header({"path", "step", "asset", "value"});
    for (int p = 0; p < n_paths; ++p) {
        for (int k = 0; k <= n_steps; ++k) {
            for (int i = 0; i < n_assets; ++i) {
                csv.row().cell(p).cell(k).cell(i + 1).cell(at(p, k, i));
            }
        }
    }
}

}  // namespace passport
