#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passport/env.hpp"

namespace passport {

enum class Head { Softmax, Linear, Tanh };

// Small dense network with exact reverse-mode gradients. Hidden layers use
// tanh; the head is softmax (strategy), linear (critic) or tanh (bounded
// scalar action). Parameters are flat-indexed layer by layer, W then b.
class Net {
public:
    Net() = default;
    Net(std::vector<int> dims, Head head);

    // Strategy network: inputs (t_norm, s/s0, x), softmax over 2d corners,
    // zero-initialized final layer so training starts at the uniform policy.
    static Net make_policy(int n_assets, const std::vector<int>& hidden, std::uint64_t seed);
    // Value network: same trunk, zero-initialized linear scalar head.
    static Net make_value(int n_assets, const std::vector<int>& hidden, std::uint64_t seed);
    // Per-step continuous-action net for the deep-hedging baseline: inputs
    // (s/s0, x), tanh head in [-1, 1], all layers randomly initialized.
    static Net make_bounded_scalar(int n_assets, const std::vector<int>& hidden,
                                   std::uint64_t seed);

    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    Head head() const { return head_; }
    const std::vector<int>& dims() const { return dims_; }
    int param_count() const { return n_params_; }

    std::vector<double> forward(std::span<const double> input) const;

    struct Trace {
        std::vector<std::vector<double>> acts;  // acts[0] = input, acts[L] = post-head output
        std::vector<std::vector<double>> pre;   // pre-activations per layer
    };
    std::vector<double> forward(std::span<const double> input, Trace& trace) const;

    // Backpropagates dL/d(pre-head output): for softmax heads pass dL/dlogits,
    // for linear/tanh heads dL/d(pre-activation). Adds into grad (flat layout)
    // and optionally fills dL/dinput.
    void backward(const Trace& trace, std::span<const double> d_pre_head,
                  std::span<double> grad, std::span<double> d_input = {}) const;

    void get_params(std::span<double> out) const;
    void set_params(std::span<const double> in);

    // Raw parameter access for hand-written updates in tests.
    std::vector<std::vector<double>>& weights() { return w_; }
    std::vector<std::vector<double>>& biases() { return b_; }
    const std::vector<std::vector<double>>& weights() const { return w_; }
    const std::vector<std::vector<double>>& biases() const { return b_; }

private:
    std::vector<int> dims_;
    Head head_ = Head::Linear;
    std::vector<std::vector<double>> w_;  // row-major (dims[l+1] x dims[l])
    std::vector<std::vector<double>> b_;
    int n_params_ = 0;
};

// Shared feature map for policy/critic nets: [t_norm, s_i/s0_i ..., x].
std::vector<double> state_features(const MarketParams& params, double t_norm,
                                   std::span<const double> s, double x);

// Policy adapter around a softmax net.
Policy net_policy(const Net& net, const MarketParams& params);

struct GradientRecord {
    std::vector<double> grad;
    double loss = 0.0;
};

// Exact gradient of log pi(a) w.r.t. all parameters; the final-layer bias
// component is 1 - pi(a) at the chosen action and -pi(a) elsewhere.
GradientRecord grad_log_prob(const Net& net, std::span<const double> features, int action_index);

// Distribution utilities.
double tv_distance(const ActionDistribution& p, const ActionDistribution& q);
struct KlValue {
    double value = 0.0;
    bool saturated = false;  // q_i = 0 < p_i occurred; value capped, not inf
};
KlValue kl_divergence(const ActionDistribution& p, const ActionDistribution& q);
double entropy(const ActionDistribution& p);

// log max(p, 1e-12); sets *floored when the floor activates.
double floored_log(double p, bool* floored = nullptr);

// dL/dlogits helpers for softmax outputs pi.
std::vector<double> tv_grad_logits(std::span<const double> pi, std::span<const double> target);
std::vector<double> kl_grad_logits(std::span<const double> pi, std::span<const double> target);
std::vector<double> neg_entropy_grad_logits(std::span<const double> pi);
std::vector<double> log_prob_grad_logits(std::span<const double> pi, int action_index);

// Adaptive-moment update: m/v moment recursions with bias correction,
//   m_t = b1 m_{t-1} + (1-b1) g,  v_t = b2 v_{t-1} + (1-b2) g^2,
//   theta -= lr * (m_t / (1-b1^t)) / (sqrt(v_t / (1-b2^t)) + eps).
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class Adam {
public:
    explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}
    void step(Net& net, std::span<const double> grad);
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    long long t_ = 0;
};

// Versioned self-describing text checkpoints; round-trips are bit-exact.
void save_checkpoint(const Net& net, const std::string& path);
Net load_checkpoint(const std::string& path);

}  // namespace passport
