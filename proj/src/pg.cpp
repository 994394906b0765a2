#include "passport/pg.hpp"

#include <cmath>

#include "passport/csv.hpp"
#include "passport/threading.hpp"

namespace passport {
namespace pg {

void PGConfig::validate() const {
    auto all_positive = [](const std::vector<int>& v) {
        if (v.empty()) return false;
        for (int x : v)
            if (x < 1) return false;
        return true;
    };
    if (dppt.empty()) throw ConfigError("pg: dppt must not be empty");
    for (int x : dppt)
        if (x < 0) throw ConfigError("pg: dppt entries must be >= 0");
    if (!all_positive(epochs)) throw ConfigError("pg: epochs entries must be >= 1");
    if (!all_positive(batch_sizes)) throw ConfigError("pg: batch sizes must be >= 1");
    if (B < 1) throw ConfigError("pg: B must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("pg: lr must be positive");
    if (resample_cap < 1) throw ConfigError("pg: resample cap must be >= 1");
    if (sweeps < 1) throw ConfigError("pg: sweeps must be >= 1");
    if (hidden.empty()) throw ConfigError("pg: need at least one hidden layer");
}

double PGConfig::resolved_entropy_weight(int n_assets) const {
    if (entropy_weight >= 0.0) return entropy_weight;
    return n_assets >= 2 ? 1e-3 : 0.0;
}

int PGConfig::at(const std::vector<int>& v, int t) const {
    if (v.size() == 1) return v[0];
    return v[static_cast<std::size_t>(t) % v.size()];
}

namespace {

// Advances the asset vector one step with pre-drawn standard normals.
void asset_step(const MarketParams& params, const std::vector<std::vector<double>>& chol,
                double dt, std::span<const double> z, std::vector<double>& s) {
    const int d = params.n_assets();
    const double sdt = std::sqrt(dt);
    for (int i = d - 1; i >= 0; --i) {
        double corr = 0.0;
        for (int j = 0; j <= i; ++j) corr += chol[i][j] * z[j];
        s[i] *= std::exp(-0.5 * params.sigma[i] * params.sigma[i] * dt +
                         params.sigma[i] * sdt * corr);
    }
}

int sample_from_uniform(const ActionDistribution& dist, double u) {
    double acc = 0.0;
    const int last = static_cast<int>(dist.probs.size()) - 1;
    for (int i = 0; i < last; ++i) {
        acc += dist.probs[i];
        if (u < acc) return i;
    }
    return last;
}

MarketState sample_state(const Net& policy, const MarketParams& params, const TimeGrid& grid,
                         int t, RngStream& rng, const std::vector<std::vector<double>>& chol) {
    const int d = params.n_assets();
    const int n = grid.n_steps();
    MarketState st;
    st.k = 0;
    st.s = params.s0;
    st.x = params.x0;
    std::vector<double> z(d);
    for (int k = 0; k < t; ++k) {
        ActionDistribution dist;
        dist.probs =
            policy.forward(state_features(params, static_cast<double>(k) / n, st.s, st.x));
        const CornerAction act = CornerAction::from_index(dist.sample(rng));
        for (auto& v : z) v = rng.next_normal();
        const double s_prev = st.s[act.asset];
        asset_step(params, chol, grid.dt(k), z, st.s);
        st.x += act.direction * (st.s[act.asset] - s_prev);
        ++st.k;
    }
    return st;
}

}  // namespace

LabeledState label_state(const Net& policy, const MarketParams& params, const TimeGrid& grid,
                         const MarketState& state, int B, RngStream& rng) {
    const int d = params.n_assets();
    const int n = grid.n_steps();
    const int t = state.k;
    if (t < 0 || t >= n) throw DomainError("label_state: state time index out of range");
    const auto chol = cholesky(params.rho);

    // Common random numbers across the 2d action evaluations: one shared set
    // of asset increments and policy-sampling uniforms.
    const int steps = n - t;
    std::vector<double> normals(static_cast<std::size_t>(B) * steps * d);
    for (auto& z : normals) z = rng.next_normal();
    std::vector<double> uniforms(static_cast<std::size_t>(B) * std::max(0, steps - 1));
    for (auto& u : uniforms) u = rng.next_uniform();

    LabeledState out;
    out.t = t;
    out.state = state;
    out.estimates.assign(2 * d, 0.0);

    std::vector<double> s(d);
    for (int a = 0; a < 2 * d; ++a) {
        const CornerAction first = CornerAction::from_index(a);
        double sum = 0.0;
        for (int b = 0; b < B; ++b) {
            s = state.s;
            double x = state.x;
            const double* z0 = &normals[static_cast<std::size_t>(b) * steps * d];
            // forced first action over (t, t+1]
            {
                const double s_prev = s[first.asset];
                asset_step(params, chol, grid.dt(t), std::span(z0, d), s);
                x += first.direction * (s[first.asset] - s_prev);
            }
            // current policy continues to maturity
            for (int k = t + 1; k < n; ++k) {
                ActionDistribution dist;
                dist.probs =
                    policy.forward(state_features(params, static_cast<double>(k) / n, s, x));
                const double u =
                    uniforms[static_cast<std::size_t>(b) * (steps - 1) + (k - t - 1)];
                const CornerAction act = CornerAction::from_index(sample_from_uniform(dist, u));
                const double s_prev = s[act.asset];
                asset_step(params, chol, grid.dt(k),
                           std::span(z0 + static_cast<std::size_t>(k - t) * d, d), s);
                x += act.direction * (s[act.asset] - s_prev);
            }
            sum += std::fabs(x);
        }
        out.estimates[a] = sum / B;
    }
    int best = 0;
    for (int a = 1; a < 2 * d; ++a)
        if (out.estimates[a] > out.estimates[best]) best = a;
    out.target = best;
    return out;
}

LabeledState data_gen(const Net& policy, const MarketParams& params, const TimeGrid& grid, int t,
                      int B, int resample_cap, RngStream& rng) {
    if (t < 1 || t >= grid.n_steps()) throw DomainError("data_gen: t must be in 1..N-1");
    const auto chol = cholesky(params.rho);
    for (int attempt = 0; attempt < resample_cap; ++attempt) {
        const MarketState st = sample_state(policy, params, grid, t, rng, chol);
        LabeledState labeled = label_state(policy, params, grid, st, B, rng);
        if (labeled.estimates[labeled.target] > 0.0) return labeled;
    }
    throw ResampleCapExceeded("data_gen: best estimate stayed zero; degenerate configuration");
}

PGResult train(const PGConfig& config, const MarketParams& params, const TimeGrid& grid,
               std::uint64_t seed) {
    config.validate();
    params.validate();
    grid.validate();
    const int d = params.n_assets();
    const int n = grid.n_steps();
    const double ent_w = config.resolved_entropy_weight(d);

    PGResult result;
    result.policy = Net::make_policy(d, config.hidden, seed);
    AdamConfig adam_cfg;
    adam_cfg.lr = config.lr;
    Adam opt(adam_cfg);

    std::vector<double> grad(result.policy.param_count());

    for (int sweep = 0; sweep < config.sweeps; ++sweep) {
        for (int t = n - 1; t >= 1; --t) {
            // (E) collect the labeled set for this time step; per-point
            // streams keep the result independent of collection scheduling.
            const int n_points = config.at(config.dppt, t);
            if (n_points == 0) continue;  // no data at this step
            std::vector<LabeledState> data(n_points);
            const Net& frozen = result.policy;
            parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t i) {
                RngStream rng(
                    seed, RngDomain::PgData,
                    (static_cast<std::uint64_t>(sweep) << 32) | static_cast<std::uint64_t>(t), i);
                data[i] = data_gen(frozen, params, grid, t, config.B, config.resample_cap, rng);
            });

            // (U) minimize mean TV to the dirac targets plus entropy penalty.
            const int n_epochs = config.at(config.epochs, t);
            const int batch = config.at(config.batch_sizes, t);
            const double t_norm = static_cast<double>(t) / n;
            for (int epoch = 0; epoch < n_epochs; ++epoch) {
                double epoch_tv = 0.0;
                int epoch_count = 0;
                for (int start = 0; start < n_points; start += batch) {
                    const int stop = std::min(n_points, start + batch);
                    std::fill(grad.begin(), grad.end(), 0.0);
                    const double scale = 1.0 / (stop - start);
                    for (int i = start; i < stop; ++i) {
                        const auto features =
                            state_features(params, t_norm, data[i].state.s, data[i].state.x);
                        Net::Trace tr;
                        const auto pi = result.policy.forward(features, tr);
                        std::vector<double> target(pi.size(), 0.0);
                        target[data[i].target] = 1.0;
                        std::vector<double> dz = tv_grad_logits(pi, target);
                        if (ent_w > 0.0) {
                            const auto ez = neg_entropy_grad_logits(pi);
                            for (std::size_t j = 0; j < dz.size(); ++j) dz[j] += ent_w * ez[j];
                        }
                        for (auto& v : dz) v *= scale;
                        result.policy.backward(tr, dz, grad);
                        epoch_tv += 1.0 - pi[data[i].target];  // TV to a dirac
                        ++epoch_count;
                    }
                    opt.step(result.policy, grad);
                }
                // post-epoch metrics over the full set
                double agree = 0.0, ent_sum = 0.0;
                for (const auto& pt : data) {
                    ActionDistribution dist;
                    dist.probs = result.policy.forward(
                        state_features(params, t_norm, pt.state.s, pt.state.x));
                    if (dist.modal() == pt.target) agree += 1.0;
                    ent_sum += entropy(dist);
                }
                PGLogRow row;
                row.sweep = sweep;
                row.t = t;
                row.epoch = epoch;
                row.mean_tv_loss = epoch_tv / epoch_count;
                row.target_agreement = agree / n_points;
                row.mean_entropy = ent_sum / n_points;
                result.log.push_back(row);
            }
        }
    }
    return result;
}

void write_log_csv(const std::string& path, const std::vector<PGLogRow>& log) {
    CsvWriter csv(path);
    csv.header({"sweep", "t", "epoch", "mean_tv_loss", "target_agreement", "mean_entropy"});
    for (const auto& row : log) {
        csv.row()
            .cell(row.sweep)
            .cell(row.t)
            .cell(row.epoch)
            .cell(row.mean_tv_loss)
            .cell(row.target_agreement)
            .cell(row.mean_entropy);
    }
}

}  // namespace pg
}  // namespace passport
