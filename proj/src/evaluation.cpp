#include "passport/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "passport/csv.hpp"
#include "passport/math.hpp"
#include "passport/threading.hpp"

namespace passport {
namespace evaluation {

PriceEstimate make_estimate(std::span<const double> samples) {
    PriceEstimate est;
    const SampleStats st = sample_stats(samples);
    est.mean = st.mean;
    est.stderr_mean = st.stderr_mean;
    est.n_paths = st.n;
    if (st.n >= 2) {
        const double tq = student_t_quantile(0.975, static_cast<int>(st.n) - 1);
        est.ci_low = st.mean - tq * st.stderr_mean;
        est.ci_high = st.mean + tq * st.stderr_mean;
    } else {
        est.ci_low = est.ci_high = st.mean;
    }
    return est;
}

std::string strategy_name(const StrategySpec& spec) {
    struct Namer {
        std::string operator()(const AnalyticStrategy&) const { return "analytic"; }
        std::string operator()(const ConstantStrategy& c) const {
            const CornerAction a = CornerAction::from_index(c.action_index);
            return "constant:" + std::string(a.direction > 0 ? "+" : "-") + "e" +
                   std::to_string(a.asset + 1);
        }
        std::string operator()(const RandomStrategy&) const { return "random"; }
        std::string operator()(const PolicyStrategy& p) const {
            return p.modal ? "policy-modal" : "policy";
        }
        std::string operator()(const DeepHedgingStrategy&) const { return "deep-hedging"; }
    };
    return std::visit(Namer{}, spec);
}

namespace {

std::vector<double> deep_hedging_terminals(const DeepHedgingStrategy& dh,
                                           const MarketParams& params, const TimeGrid& grid,
                                           const PathBatch& batch) {
    const int n = grid.n_steps();
    if (params.n_assets() != 1) throw DomainError("deep hedging baseline is one-asset only");
    if (static_cast<int>(dh.per_step.size()) != n)
        throw ShapeMismatch("deep hedging: one network per time step required");
    std::vector<double> x_t(batch.n_paths);
    parallel_for(static_cast<std::size_t>(batch.n_paths), [&](std::size_t p) {
        double x = params.x0;
        for (int k = 0; k < n; ++k) {
            const double s = batch.at(static_cast<int>(p), k, 0);
            const std::vector<double> in = {s / params.s0[0], x};
            const double q = dh.per_step[k].forward(in)[0];
            x += q * (batch.at(static_cast<int>(p), k + 1, 0) - s);
        }
        x_t[p] = x;
    });
    return x_t;
}

}  // namespace

std::vector<double> terminal_values(const StrategySpec& spec, const MarketParams& params,
                                    const TimeGrid& grid, const PathBatch& batch,
                                    std::uint64_t action_seed) {
    const int d = params.n_assets();
    if (const auto* dh = std::get_if<DeepHedgingStrategy>(&spec))
        return deep_hedging_terminals(*dh, params, grid, batch);

    Policy policy;
    StepMode mode = StepMode::Sampled;
    if (std::holds_alternative<AnalyticStrategy>(spec)) {
        // evaluated outside its validity regime on purpose in correlated runs
        policy = [params, grid](int k, double, std::span<const double> s, double x) {
            MarketState st{k, {s.begin(), s.end()}, x};
            const CornerAction a =
                optimal_action(st, params, grid.dt(k), /*allow_correlated=*/true);
            return ActionDistribution::dirac(a, params.n_assets());
        };
    } else if (const auto* c = std::get_if<ConstantStrategy>(&spec)) {
        const ActionDistribution dist =
            ActionDistribution::dirac(CornerAction::from_index(c->action_index), d);
        policy = [dist](int, double, std::span<const double>, double) { return dist; };
    } else if (std::holds_alternative<RandomStrategy>(spec)) {
        const ActionDistribution dist = ActionDistribution::uniform(d);
        policy = [dist](int, double, std::span<const double>, double) { return dist; };
    } else if (const auto* pn = std::get_if<PolicyStrategy>(&spec)) {
        if (pn->modal) {
            const Net net = pn->net;
            const MarketParams par = params;
            policy = [net, par](int, double t_norm, std::span<const double> s, double x) {
                ActionDistribution dist;
                dist.probs = net.forward(state_features(par, t_norm, s, x));
                return ActionDistribution::dirac(CornerAction::from_index(dist.modal()),
                                                 par.n_assets());
            };
        } else {
            policy = net_policy(pn->net, params);
        }
    }
    return rollout_terminal(policy, params, grid, batch, mode, action_seed);
}

namespace {

PriceResult result_from_samples(std::span<const double> x_t) {
    PriceResult out;
    std::vector<double> plus(x_t.size()), abs(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        plus[i] = std::max(x_t[i], 0.0);
        abs[i] = std::fabs(x_t[i]);
    }
    out.plus = make_estimate(plus);
    out.abs = make_estimate(abs);
    out.mean_x = kahan_sum(x_t) / static_cast<double>(x_t.size());
    out.identity_gap = std::fabs(out.plus.mean - 0.5 * (out.abs.mean + out.mean_x));
    return out;
}

}  // namespace

PriceResult price(const StrategySpec& spec, const MarketParams& params, const TimeGrid& grid,
                  int n_paths, std::uint64_t seed) {
    const PathBatch batch = simulate(params, grid, n_paths, seed);
    const std::vector<double> x_t = terminal_values(spec, params, grid, batch, seed + 1);
    return result_from_samples(x_t);
}

std::vector<SurfaceRow> price_surface(const StrategySpec& spec, const MarketParams& params,
                                      const TimeGrid& grid, std::span<const double> s_grid,
                                      std::span<const double> x_grid, int n_paths,
                                      std::uint64_t seed) {
    const int d = params.n_assets();
    std::size_t n_s_nodes = 1;
    for (int a = 0; a < d; ++a) n_s_nodes *= s_grid.size();
    std::vector<SurfaceRow> rows;
    rows.reserve(n_s_nodes * x_grid.size());
    for (std::size_t si = 0; si < n_s_nodes; ++si) {
        std::vector<double> s(d);
        std::size_t rest = si;
        for (int a = 0; a < d; ++a) {
            s[a] = s_grid[rest % s_grid.size()];
            rest /= s_grid.size();
        }
        for (double x : x_grid) {
            MarketParams local = params;
            local.s0 = s;
            local.x0 = x;
            const PriceResult res = price(spec, local, grid, n_paths, seed);
            SurfaceRow row;
            row.s = s;
            row.x = x;
            row.estimate = res.plus;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<SurfaceRow> critic_price_surface(const Net& critic, const MarketParams& params,
                                             std::span<const double> s_grid,
                                             std::span<const double> x_grid) {
    const int d = params.n_assets();
    std::size_t n_s_nodes = 1;
    for (int a = 0; a < d; ++a) n_s_nodes *= s_grid.size();
    std::vector<SurfaceRow> rows;
    rows.reserve(n_s_nodes * x_grid.size());
    for (std::size_t si = 0; si < n_s_nodes; ++si) {
        std::vector<double> s(d);
        std::size_t rest = si;
        for (int a = 0; a < d; ++a) {
            s[a] = s_grid[rest % s_grid.size()];
            rest /= s_grid.size();
        }
        for (double x : x_grid) {
            const double v = critic.forward(state_features(params, 0.0, s, x))[0];
            SurfaceRow row;
            row.s = s;
            row.x = x;
            row.estimate.mean = 0.5 * (v + x);
            row.estimate.ci_low = row.estimate.ci_high = row.estimate.mean;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_surface_csv(const std::string& path, std::span<const SurfaceRow> rows, int n_assets) {
    CsvWriter csv(path);
    std::vector<std::string> cols;
    for (int a = 1; a <= n_assets; ++a) cols.push_back("s" + std::to_string(a));
    cols.insert(cols.end(), {"x", "mean", "stderr", "ci_low", "ci_high"});
    csv.header(cols);
    for (const auto& row : rows) {
        auto r = csv.row();
        for (double s : row.s) r.cell(s);
        r.cell(row.x)
            .cell(row.estimate.mean)
            .cell(row.estimate.stderr_mean)
            .cell(row.estimate.ci_low)
            .cell(row.estimate.ci_high);
    }
}

PayoffReport payoff_report(std::span<const StrategySpec> strategies, const MarketParams& params,
                           const TimeGrid& grid, int n_paths, std::uint64_t seed) {
    PayoffReport report;
    const PathBatch batch = simulate(params, grid, n_paths, seed);  // shared paths
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        StrategyReport sr;
        sr.name = strategy_name(strategies[i]);
        sr.x_t = terminal_values(strategies[i], params, grid, batch,
                                 seed + 1000003ull * (i + 1));
        const PriceResult res = result_from_samples(sr.x_t);
        sr.abs = res.abs;
        sr.plus = res.plus;
        sr.mean_x = res.mean_x;
        sr.identity_gap = res.identity_gap;
        report.strategies.push_back(std::move(sr));
    }
    const std::size_t n = report.strategies.size();
    report.overlap_abs.assign(n, std::vector<bool>(n, true));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            report.overlap_abs[i][j] =
                ci_overlap(report.strategies[i].abs, report.strategies[j].abs);
    return report;
}

void write_payoff_samples_csv(const std::string& path, const PayoffReport& report) {
    CsvWriter csv(path);
    csv.header({"strategy", "path", "xT", "abs_xT"});
    for (const auto& sr : report.strategies) {
        for (std::size_t p = 0; p < sr.x_t.size(); ++p) {
            csv.row().cell(sr.name).cell(p).cell(sr.x_t[p]).cell(std::fabs(sr.x_t[p]));
        }
    }
}

void write_payoff_summary_csv(const std::string& path, const PayoffReport& report) {
    CsvWriter csv(path);
    csv.header({"strategy", "n_paths", "mean_xT", "mean_abs_xT", "stderr_abs", "ci_low_abs",
                "ci_high_abs", "mean_plus", "identity_gap"});
    for (const auto& sr : report.strategies) {
        csv.row()
            .cell(sr.name)
            .cell(sr.abs.n_paths)
            .cell(sr.mean_x)
            .cell(sr.abs.mean)
            .cell(sr.abs.stderr_mean)
            .cell(sr.abs.ci_low)
            .cell(sr.abs.ci_high)
            .cell(sr.plus.mean)
            .cell(sr.identity_gap);
    }
}

DeepHedgingGradient deep_hedging_gradient(const std::vector<Net>& per_step,
                                          const MarketParams& params, const TimeGrid& grid,
                                          const PathBatch& batch, int start, int stop,
                                          const DeepHedgingConfig& config) {
    const int n = grid.n_steps();
    const int m = stop - start;
    const int n_params = per_step[0].param_count();
    const int n_chunks = std::min(16, m);

    // per-chunk gradient buffers keep the reduction deterministic
    std::vector<std::vector<double>> chunk_grad(n_chunks);
    for (auto& gbuf : chunk_grad) gbuf.assign(static_cast<std::size_t>(n) * n_params, 0.0);
    std::vector<double> chunk_abs(n_chunks, 0.0);

    parallel_for(static_cast<std::size_t>(n_chunks), [&](std::size_t c) {
        std::vector<Net::Trace> traces(n);
        std::vector<double> qs(n), xs(n + 1), dinput(2);
        for (int p = start + static_cast<int>(c); p < stop; p += n_chunks) {
            xs[0] = params.x0;
            for (int k = 0; k < n; ++k) {
                const double s = batch.at(p, k, 0);
                const std::vector<double> in = {s / params.s0[0], xs[k]};
                qs[k] = per_step[k].forward(in, traces[k])[0];
                xs[k + 1] = xs[k] + qs[k] * (batch.at(p, k + 1, 0) - s);
            }
            chunk_abs[c] += std::fabs(xs[n]);
            // backward through time; loss = -|X_T| / m per path
            double gx = (xs[n] >= 0.0 ? -1.0 : 1.0) / m;
            for (int k = n - 1; k >= 0; --k) {
                const double ds = batch.at(p, k + 1, 0) - batch.at(p, k, 0);
                double dq = gx * ds;
                if (config.entropy_weight > 0.0) {
                    // binary-entropy shaping on p = (1+q)/2
                    const double pq = std::clamp(0.5 * (1.0 + qs[k]), 1e-12, 1.0 - 1e-12);
                    dq += config.entropy_weight * 0.5 * std::log(pq / (1.0 - pq)) / m;
                }
                const std::vector<double> dz = {dq * (1.0 - qs[k] * qs[k])};
                per_step[k].backward(
                    traces[k], dz,
                    std::span<double>(&chunk_grad[c][static_cast<std::size_t>(k) * n_params],
                                      n_params),
                    dinput);
                gx += dinput[1];  // chain through the portfolio feature
            }
        }
    });

    DeepHedgingGradient out;
    out.per_net.assign(n, std::vector<double>(n_params, 0.0));
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < n_chunks; ++c) {
            const double* src = &chunk_grad[c][static_cast<std::size_t>(k) * n_params];
            for (int i = 0; i < n_params; ++i) out.per_net[k][i] += src[i];
        }
        if (config.l2_weight > 0.0) {
            std::vector<double> theta(n_params);
            per_step[k].get_params(theta);
            for (int i = 0; i < n_params; ++i)
                out.per_net[k][i] += config.l2_weight * theta[i];
        }
    }
    for (int c = 0; c < n_chunks; ++c) out.mean_abs += chunk_abs[c];
    out.mean_abs /= m;
    return out;
}

DeepHedgingResult deep_hedging_train(const MarketParams& params, const TimeGrid& grid,
                                     const DeepHedgingConfig& config, std::uint64_t seed) {
    params.validate();
    grid.validate();
    if (params.n_assets() != 1) throw DomainError("deep hedging baseline is one-asset only");
    const int n = grid.n_steps();

    DeepHedgingResult result;
    result.per_step.reserve(n);
    for (int k = 0; k < n; ++k)
        result.per_step.push_back(Net::make_bounded_scalar(1, config.hidden, seed + k));

    // fixed training set of asset paths, standard deep-hedging style
    const PathBatch batch = simulate(params, grid, config.n_paths, seed);
    std::vector<Adam> opts;
    AdamConfig adam_cfg;
    adam_cfg.lr = config.lr;
    for (int k = 0; k < n; ++k) opts.emplace_back(adam_cfg);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_abs = 0.0;
        int n_batches = 0;
        for (int start = 0; start < config.n_paths; start += config.batch_size) {
            const int stop = std::min(config.n_paths, start + config.batch_size);
            const DeepHedgingGradient grad =
                deep_hedging_gradient(result.per_step, params, grid, batch, start, stop, config);
            for (int k = 0; k < n; ++k) opts[k].step(result.per_step[k], grad.per_net[k]);
            epoch_abs += grad.mean_abs;
            ++n_batches;
        }
        result.epoch_mean_abs.push_back(epoch_abs / n_batches);
    }
    return result;
}

DeepHedgingShape deep_hedging_shape(const std::vector<Net>& per_step, const MarketParams& params,
                                    const TimeGrid& grid, int n_states, std::uint64_t seed) {
    const int n = grid.n_steps();
    const PathBatch batch = simulate(params, grid, n_states, seed);
    DeepHedgingShape shape;
    std::vector<std::vector<double>> outputs(n, std::vector<double>(n_states));
    parallel_for(static_cast<std::size_t>(n_states), [&](std::size_t p) {
        double x = params.x0;
        for (int k = 0; k < n; ++k) {
            const double s = batch.at(static_cast<int>(p), k, 0);
            const std::vector<double> in = {s / params.s0[0], x};
            const double q = per_step[k].forward(in)[0];
            outputs[k][p] = q;
            x += q * (batch.at(static_cast<int>(p), k + 1, 0) - s);
        }
    });
    for (int k = 0; k < n; ++k) {
        const SampleStats st = sample_stats(outputs[k]);
        shape.max_output_sd = std::max(shape.max_output_sd, st.sd);
        for (double q : outputs[k])
            shape.max_distance_to_pm1 = std::max(shape.max_distance_to_pm1, 1.0 - std::fabs(q));
    }
    return shape;
}

}  // namespace evaluation
}  // namespace passport
