#include "passport/env.hpp"

#include <cmath>

#include "passport/csv.hpp"
#include "passport/threading.hpp"

namespace passport {

void ActionDistribution::validate() const {
    if (probs.empty() || probs.size() % 2 != 0)
        throw InvalidDistribution("action distribution needs 2d entries");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InvalidDistribution("action probability < 0");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw InvalidDistribution("action probabilities must sum to 1");
}

ActionDistribution ActionDistribution::uniform(int n_assets) {
    ActionDistribution d;
    d.probs.assign(2 * n_assets, 1.0 / (2.0 * n_assets));
    return d;
}

ActionDistribution ActionDistribution::dirac(const CornerAction& a, int n_assets) {
    ActionDistribution d;
    d.probs.assign(2 * n_assets, 0.0);
    d.probs[a.index()] = 1.0;
    return d;
}

std::vector<double> ActionDistribution::mean_action() const {
    std::vector<double> q(n_assets());
    for (int i = 0; i < n_assets(); ++i) q[i] = probs[2 * i] - probs[2 * i + 1];
    return q;
}

int ActionDistribution::sample(RngStream& rng) const {
    const double u = rng.next_uniform();
    double acc = 0.0;
    const int last = static_cast<int>(probs.size()) - 1;
    for (int i = 0; i < last; ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return last;
}

int ActionDistribution::modal() const {
    int best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) best = static_cast<int>(i);
    }
    return best;
}

MarketState step_mixture(const MarketState& state, const ActionDistribution& dist,
                         std::span<const double> s_next) {
    dist.validate();
    const auto q = dist.mean_action();
    MarketState out;
    out.k = state.k + 1;
    out.s.assign(s_next.begin(), s_next.end());
    out.x = portfolio_step(state.x, state.s, s_next, q);
    return out;
}

std::pair<MarketState, CornerAction> step_sampled(const MarketState& state,
                                                  const ActionDistribution& dist,
                                                  std::span<const double> s_next, RngStream& rng) {
    dist.validate();
    const CornerAction a = CornerAction::from_index(dist.sample(rng));
    MarketState out;
    out.k = state.k + 1;
    out.s.assign(s_next.begin(), s_next.end());
    out.x = state.x + a.direction * (s_next[a.asset] - state.s[a.asset]);
    return {out, a};
}

namespace {

template <typename PerPath>
void run_paths(const PathBatch& batch, PerPath&& per_path) {
    parallel_for(static_cast<std::size_t>(batch.n_paths),
                 [&](std::size_t p) { per_path(static_cast<int>(p)); });
}

}  // namespace

std::vector<double> rollout_terminal(const Policy& policy, const MarketParams& params,
                                     const TimeGrid& grid, const PathBatch& batch, StepMode mode,
                                     std::uint64_t action_seed) {
    const int n = grid.n_steps();
    if (batch.n_steps != n || batch.n_assets != params.n_assets())
        throw DomainError("rollout: batch does not match grid/params");
    std::vector<double> x_t(batch.n_paths);
    run_paths(batch, [&](int p) {
        RngStream rng(action_seed, RngDomain::Actions, static_cast<std::uint64_t>(p));
        MarketState st;
        st.k = 0;
        st.s.assign(batch.prices(p, 0).begin(), batch.prices(p, 0).end());
        st.x = params.x0;
        for (int k = 0; k < n; ++k) {
            const ActionDistribution dist =
                policy(k, static_cast<double>(k) / n, st.s, st.x);
            if (mode == StepMode::Mixture) {
                st = step_mixture(st, dist, batch.prices(p, k + 1));
            } else {
                st = step_sampled(st, dist, batch.prices(p, k + 1), rng).first;
            }
        }
        x_t[p] = st.x;
    });
    return x_t;
}

std::vector<Trajectory> rollout_trajectories(const Policy& policy, const MarketParams& params,
                                             const TimeGrid& grid, const PathBatch& batch,
                                             StepMode mode, std::uint64_t action_seed) {
    const int n = grid.n_steps();
    if (batch.n_steps != n || batch.n_assets != params.n_assets())
        throw DomainError("rollout: batch does not match grid/params");
    std::vector<Trajectory> out(batch.n_paths);
    run_paths(batch, [&](int p) {
        RngStream rng(action_seed, RngDomain::Actions, static_cast<std::uint64_t>(p));
        Trajectory& tr = out[p];
        tr.states.reserve(n + 1);
        tr.dists.reserve(n);
        tr.actions.reserve(n);
        MarketState st;
        st.k = 0;
        st.s.assign(batch.prices(p, 0).begin(), batch.prices(p, 0).end());
        st.x = params.x0;
        tr.states.push_back(st);
        for (int k = 0; k < n; ++k) {
            ActionDistribution dist = policy(k, static_cast<double>(k) / n, st.s, st.x);
            int action = -1;
            if (mode == StepMode::Mixture) {
                st = step_mixture(st, dist, batch.prices(p, k + 1));
            } else {
                auto [next, a] = step_sampled(st, dist, batch.prices(p, k + 1), rng);
                st = next;
                action = a.index();
            }
            tr.dists.push_back(std::move(dist));
            tr.actions.push_back(action);
            tr.states.push_back(st);
        }
        tr.terminal_payoff = std::fabs(st.x);
    });
    return out;
}

std::vector<Trajectory> rollout(const Policy& policy, const MarketParams& params,
                                const TimeGrid& grid, int n_paths, std::uint64_t seed,
                                StepMode mode) {
    const PathBatch batch = simulate(params, grid, n_paths, seed);
    return rollout_trajectories(policy, params, grid, batch, mode, seed);
}

void write_trajectories_csv(const std::string& path, std::span<const Trajectory> trajectories) {
    CsvWriter csv(path);
    std::vector<std::string> cols = {"path", "step", "x"};
    const int d = trajectories.empty() ? 0 : static_cast<int>(trajectories[0].states[0].s.size());
    for (int i = 1; i <= d; ++i) cols.push_back("s" + std::to_string(i));
    cols.push_back("action_index");
    cols.push_back("prob_assigned");
    csv.header(cols);
    for (std::size_t p = 0; p < trajectories.size(); ++p) {
        const Trajectory& tr = trajectories[p];
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            auto row = csv.row();
            row.cell(p).cell(k).cell(tr.states[k].x);
            for (double s : tr.states[k].s) row.cell(s);
            if (k < tr.actions.size()) {
                const int a = tr.actions[k] >= 0 ? tr.actions[k] : tr.dists[k].modal();
                row.cell(a).cell(tr.dists[k].probs[a]);
            } else {
                row.cell(-1).cell(0.0);
            }
        }
    }
}

}  // namespace passport
