#include "passport/a2c.hpp"

#include <cmath>

#include "passport/csv.hpp"
#include "passport/threading.hpp"

namespace passport {
namespace a2c {

void A2CConfig::validate() const {
    if (niter < 0) throw ConfigError("a2c: niter must be >= 0");
    if (B < 1) throw ConfigError("a2c: B must be >= 1");
    if (!(gamma > 0.0) || gamma > 1.0) throw ConfigError("a2c: gamma must be in (0, 1]");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("a2c: lrs must be positive");
    if (hidden.empty()) throw ConfigError("a2c: need at least one hidden layer");
}

double A2CConfig::resolved_tau(int n_assets) const {
    if (tau >= 0.0) return tau;
    return n_assets >= 2 ? 1e-2 : 1e-3;
}

namespace {

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

}  // namespace

std::vector<EpisodeTape> forward(const Net& actor, const Net& critic, const MarketParams& params,
                                 const TimeGrid& grid, int B, double gamma, std::uint64_t seed,
                                 std::uint64_t iter) {
    const int d = params.n_assets();
    const int n = grid.n_steps();
    const auto chol = cholesky(params.rho);
    std::vector<EpisodeTape> tapes(B);

    parallel_for(static_cast<std::size_t>(B), [&](std::size_t b) {
        RngStream rng(seed, RngDomain::A2c, iter, b);
        EpisodeTape& tape = tapes[b];
        tape.critics.reserve(n + 1);
        tape.log_pis.reserve(n);
        tape.states.reserve(n + 1);
        tape.actions.reserve(n);

        MarketState st;
        st.k = 0;
        st.s = params.s0;
        st.x = params.x0;
        tape.states.push_back(st);
        std::vector<double> z(d);
        for (int k = 0; k < n; ++k) {
            const auto features =
                state_features(params, static_cast<double>(k) / n, st.s, st.x);
            tape.critics.push_back(critic.forward(features)[0]);
            ActionDistribution dist;
            dist.probs = actor.forward(features);
            const int a_idx = dist.sample(rng);
            bool floored = false;
            tape.log_pis.push_back(floored_log(dist.probs[a_idx], &floored));
            if (floored) ++tape.n_floored;
            double neg_ent = 0.0;
            for (double p : dist.probs) {
                if (p > 0.0) neg_ent += p * std::log(p);
            }
            tape.entropy_acc += gamma * neg_ent;
            tape.entropy_sum += -neg_ent;

            const CornerAction act = CornerAction::from_index(a_idx);
            for (auto& v : z) v = rng.next_normal();
            const double s_prev = st.s[act.asset];
            asset_step(params, chol, grid.dt(k), z, st.s);
            st.x += act.direction * (st.s[act.asset] - s_prev);
            ++st.k;
            tape.states.push_back(st);
            tape.actions.push_back(a_idx);
        }
        const auto terminal_features = state_features(params, 1.0, st.s, st.x);
        tape.critics.push_back(critic.forward(terminal_features)[0]);
        tape.x_terminal = st.x;
    });
    return tapes;
}

std::vector<double> advantages(const EpisodeTape& tape, double gamma) {
    const int n = static_cast<int>(tape.critics.size()) - 1;
    std::vector<double> adv(n + 1);
    const double abs_xt = std::fabs(tape.x_terminal);
    for (int t = 0; t <= n; ++t)
        adv[t] = std::pow(gamma, static_cast<double>(n - t)) * abs_xt - tape.critics[t];
    return adv;
}

A2CLosses losses(const Net& actor, const Net& critic, const MarketParams& params,
                 const TimeGrid& grid, const std::vector<EpisodeTape>& tapes, double gamma,
                 double tau) {
    if (tapes.empty()) throw DomainError("a2c losses: no tapes");
    const int n = grid.n_steps();
    const int B = static_cast<int>(tapes.size());
    const double inv_bn = 1.0 / (static_cast<double>(B) * n);

    A2CLosses out;
    out.actor_grad.assign(actor.param_count(), 0.0);
    out.critic_grad.assign(critic.param_count(), 0.0);

    // Per-chunk buffers with a fixed chunk count keep the reduction order
    // independent of the worker count.
    const int n_chunks = std::min(B, 16);
    std::vector<std::vector<double>> actor_buf(n_chunks),
        critic_buf(n_chunks);
    std::vector<double> actor_loss_buf(n_chunks, 0.0), critic_loss_buf(n_chunks, 0.0);
    for (int c = 0; c < n_chunks; ++c) {
        actor_buf[c].assign(actor.param_count(), 0.0);
        critic_buf[c].assign(critic.param_count(), 0.0);
    }

    parallel_for(static_cast<std::size_t>(n_chunks), [&](std::size_t c) {
        Net::Trace tr;
        for (int b = static_cast<int>(c); b < B; b += n_chunks) {
            const EpisodeTape& tape = tapes[b];
            const std::vector<double> adv = advantages(tape, gamma);
            double path_obj = 0.0;
            for (int t = 0; t < n; ++t) path_obj += tape.log_pis[t] * adv[t];
            actor_loss_buf[c] += -(path_obj / n - tau * tape.entropy_acc);
            for (int t = 0; t <= n; ++t) critic_loss_buf[c] += adv[t] * adv[t] / n;

            for (int t = 0; t <= n; ++t) {
                const MarketState& st = tape.states[t];
                const auto features =
                    state_features(params, static_cast<double>(t) / n, st.s, st.x);
                // critic: d/dphi of adv^2 / (B n) flows through -V only
                {
                    const double v = critic.forward(features, tr)[0];
                    (void)v;
                    const std::vector<double> dz = {-2.0 * adv[t] * inv_bn};
                    critic.backward(tr, dz, critic_buf[c]);
                }
                if (t == n) continue;
                // actor: -(adv/(B n)) d log pi(a_t) + (tau gamma / B) d(-H)
                const auto pi = actor.forward(features, tr);
                std::vector<double> dz = log_prob_grad_logits(pi, tape.actions[t]);
                const double w = -adv[t] * inv_bn;
                for (auto& v : dz) v *= w;
                if (tau != 0.0) {
                    const auto ez = neg_entropy_grad_logits(pi);
                    const double ew = tau * gamma / B;
                    for (std::size_t j = 0; j < dz.size(); ++j) dz[j] += ew * ez[j];
                }
                actor.backward(tr, dz, actor_buf[c]);
            }
        }
    });

    for (int c = 0; c < n_chunks; ++c) {
        out.actor_loss += actor_loss_buf[c];
        out.critic_loss += critic_loss_buf[c];
        for (std::size_t i = 0; i < out.actor_grad.size(); ++i)
            out.actor_grad[i] += actor_buf[c][i];
        for (std::size_t i = 0; i < out.critic_grad.size(); ++i)
            out.critic_grad[i] += critic_buf[c][i];
    }
    out.actor_loss /= B;
    out.critic_loss /= B;
    if (!std::isfinite(out.actor_loss) || !std::isfinite(out.critic_loss))
        throw NonFiniteLoss("a2c: non-finite loss");
    return out;
}

A2CResult train(const A2CConfig& config, const MarketParams& params, const TimeGrid& grid,
                std::uint64_t seed) {
    config.validate();
    params.validate();
    grid.validate();
    const int d = params.n_assets();
    const double tau = config.resolved_tau(d);

    A2CResult result;
    result.actor = Net::make_policy(d, config.hidden, seed);
    result.critic = Net::make_value(d, config.hidden, seed + 1);
    AdamConfig actor_cfg, critic_cfg;
    actor_cfg.lr = config.actor_lr;
    critic_cfg.lr = config.critic_lr;
    Adam actor_opt(actor_cfg), critic_opt(critic_cfg);

    for (int iter = 0; iter < config.niter; ++iter) {
        const auto tapes = forward(result.actor, result.critic, params, grid, config.B,
                                   config.gamma, seed, static_cast<std::uint64_t>(iter));
        const A2CLosses step =
            losses(result.actor, result.critic, params, grid, tapes, config.gamma, tau);
        // actor first, then critic, matching the pseudocode line order
        actor_opt.step(result.actor, step.actor_grad);
        critic_opt.step(result.critic, step.critic_grad);

        A2CLogRow row;
        row.iter = iter;
        double abs_sum = 0.0, ent_sum = 0.0;
        for (const auto& tape : tapes) {
            abs_sum += std::fabs(tape.x_terminal);
            ent_sum += tape.entropy_sum / grid.n_steps();
        }
        row.mean_abs_xt = abs_sum / config.B;
        row.mean_entropy = ent_sum / config.B;
        row.actor_loss = step.actor_loss;
        row.critic_loss = step.critic_loss;
        result.log.push_back(row);
    }
    return result;
}

void write_log_csv(const std::string& path, const std::vector<A2CLogRow>& log) {
    CsvWriter csv(path);
    csv.header({"iter", "mean_abs_xT", "actor_loss", "critic_loss", "mean_entropy"});
    for (const auto& row : log) {
        csv.row()
            .cell(row.iter)
            .cell(row.mean_abs_xt)
            .cell(row.actor_loss)
            .cell(row.critic_loss)
            .cell(row.mean_entropy);
    }
}

}  // namespace a2c
}  // namespace passport
