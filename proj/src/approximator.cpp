#include "passport/approximator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "passport/rng.hpp"

namespace passport {

namespace {

constexpr double kProbFloor = 1e-12;

void glorot_init(std::vector<double>& w, int fan_out, int fan_in, RngStream& rng) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : w) v = a * (2.0 * rng.next_uniform() - 1.0);
}

}  // namespace

Net::Net(std::vector<int> dims, Head head) : dims_(std::move(dims)), head_(head) {
    if (dims_.size() < 2) throw ShapeMismatch("net needs at least input and output dims");
    const int layers = static_cast<int>(dims_.size()) - 1;
    w_.resize(layers);
    b_.resize(layers);
    n_params_ = 0;
    for (int l = 0; l < layers; ++l) {
        if (dims_[l] < 1 || dims_[l + 1] < 1) throw ShapeMismatch("net layer width < 1");
        w_[l].assign(static_cast<std::size_t>(dims_[l + 1]) * dims_[l], 0.0);
        b_[l].assign(dims_[l + 1], 0.0);
        n_params_ += dims_[l + 1] * dims_[l] + dims_[l + 1];
    }
}

Net Net::make_policy(int n_assets, const std::vector<int>& hidden, std::uint64_t seed) {
    std::vector<int> dims = {n_assets + 2};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(2 * n_assets);
    Net net(dims, Head::Softmax);
    RngStream rng(seed, RngDomain::Init, 0);
    const int layers = static_cast<int>(dims.size()) - 1;
    for (int l = 0; l + 1 < layers; ++l) glorot_init(net.w_[l], dims[l + 1], dims[l], rng);
    return net;  // final layer stays zero: uniform start
}

Net Net::make_value(int n_assets, const std::vector<int>& hidden, std::uint64_t seed) {
    std::vector<int> dims = {n_assets + 2};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    Net net(dims, Head::Linear);
    RngStream rng(seed, RngDomain::Init, 1);
    const int layers = static_cast<int>(dims.size()) - 1;
    for (int l = 0; l + 1 < layers; ++l) glorot_init(net.w_[l], dims[l + 1], dims[l], rng);
    return net;
}

Net Net::make_bounded_scalar(int n_assets, const std::vector<int>& hidden, std::uint64_t seed) {
    std::vector<int> dims = {n_assets + 1};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(1);
    Net net(dims, Head::Tanh);
    RngStream rng(seed, RngDomain::Init, 2);
    const int layers = static_cast<int>(dims.size()) - 1;
    for (int l = 0; l < layers; ++l) glorot_init(net.w_[l], dims[l + 1], dims[l], rng);
    return net;
}

std::vector<double> Net::forward(std::span<const double> input) const {
    Trace tr;
    return forward(input, tr);
}

std::vector<double> Net::forward(std::span<const double> input, Trace& trace) const {
    if (static_cast<int>(input.size()) != dims_.front())
        throw ShapeMismatch("net forward: input dimension mismatch");
    const int layers = static_cast<int>(dims_.size()) - 1;
    trace.acts.assign(layers + 1, {});
    trace.pre.assign(layers, {});
    trace.acts[0].assign(input.begin(), input.end());

    for (int l = 0; l < layers; ++l) {
        const int rows = dims_[l + 1], cols = dims_[l];
        std::vector<double>& z = trace.pre[l];
        z.assign(rows, 0.0);
        const std::vector<double>& in = trace.acts[l];
        for (int r = 0; r < rows; ++r) {
            double acc = b_[l][r];
            const double* wr = &w_[l][static_cast<std::size_t>(r) * cols];
            for (int c = 0; c < cols; ++c) acc += wr[c] * in[c];
            z[r] = acc;
        }
        std::vector<double>& a = trace.acts[l + 1];
        if (l + 1 < layers) {
            a.resize(rows);
            for (int r = 0; r < rows; ++r) a[r] = std::tanh(z[r]);
        } else {
            switch (head_) {
                case Head::Softmax: {
                    a.resize(rows);
                    double zmax = z[0];
                    for (double v : z) zmax = std::max(zmax, v);
                    double sum = 0.0;
                    for (int r = 0; r < rows; ++r) {
                        a[r] = std::exp(z[r] - zmax);
                        sum += a[r];
                    }
                    for (int r = 0; r < rows; ++r) a[r] /= sum;
                    break;
                }
                case Head::Linear:
                    a = z;
                    break;
                case Head::Tanh:
                    a.resize(rows);
                    for (int r = 0; r < rows; ++r) a[r] = std::tanh(z[r]);
                    break;
            }
        }
    }
    return trace.acts.back();
}

void Net::backward(const Trace& trace, std::span<const double> d_pre_head,
                   std::span<double> grad, std::span<double> d_input) const {
    const int layers = static_cast<int>(dims_.size()) - 1;
    if (static_cast<int>(d_pre_head.size()) != dims_.back())
        throw ShapeMismatch("net backward: output dimension mismatch");
    if (static_cast<int>(grad.size()) != n_params_)
        throw ShapeMismatch("net backward: gradient buffer size mismatch");

    std::vector<double> delta(d_pre_head.begin(), d_pre_head.end());
    // Parameter offsets of the last layer first.
    std::vector<std::size_t> offset(layers, 0);
    {
        std::size_t off = 0;
        for (int l = 0; l < layers; ++l) {
            offset[l] = off;
            off += static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
        }
    }
    for (int l = layers - 1; l >= 0; --l) {
        const int rows = dims_[l + 1], cols = dims_[l];
        const std::vector<double>& in = trace.acts[l];
        double* gw = grad.data() + offset[l];
        double* gb = gw + static_cast<std::size_t>(rows) * cols;
        for (int r = 0; r < rows; ++r) {
            gb[r] += delta[r];
            double* gwr = gw + static_cast<std::size_t>(r) * cols;
            for (int c = 0; c < cols; ++c) gwr[c] += delta[r] * in[c];
        }
        if (l == 0 && d_input.empty()) break;
        std::vector<double> prev(cols, 0.0);
        for (int r = 0; r < rows; ++r) {
            const double* wr = &w_[l][static_cast<std::size_t>(r) * cols];
            for (int c = 0; c < cols; ++c) prev[c] += wr[c] * delta[r];
        }
        if (l == 0) {
            for (int c = 0; c < cols; ++c) d_input[c] = prev[c];
            break;
        }
        // chain through tanh of the previous hidden layer
        const std::vector<double>& a = trace.acts[l];
        delta.assign(cols, 0.0);
        for (int c = 0; c < cols; ++c) delta[c] = prev[c] * (1.0 - a[c] * a[c]);
    }
}

void Net::get_params(std::span<double> out) const {
    if (static_cast<int>(out.size()) != n_params_) throw ShapeMismatch("get_params: size");
    std::size_t off = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        for (double v : w_[l]) out[off++] = v;
        for (double v : b_[l]) out[off++] = v;
    }
}

void Net::set_params(std::span<const double> in) {
    if (static_cast<int>(in.size()) != n_params_) throw ShapeMismatch("set_params: size");
    std::size_t off = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) {
        for (double& v : w_[l]) v = in[off++];
        for (double& v : b_[l]) v = in[off++];
    }
}

std::vector<double> state_features(const MarketParams& params, double t_norm,
                                   std::span<const double> s, double x) {
    std::vector<double> f;
    f.reserve(s.size() + 2);
    f.push_back(t_norm);
    for (std::size_t i = 0; i < s.size(); ++i) f.push_back(s[i] / params.s0[i]);
    f.push_back(x);
    return f;
}

Policy net_policy(const Net& net, const MarketParams& params) {
    if (net.head() != Head::Softmax) throw ShapeMismatch("net_policy: needs a softmax head");
    return [net, params](int /*k*/, double t_norm, std::span<const double> s, double x) {
        ActionDistribution d;
        d.probs = net.forward(state_features(params, t_norm, s, x));
        return d;
    };
}

GradientRecord grad_log_prob(const Net& net, std::span<const double> features, int action_index) {
    if (net.head() != Head::Softmax) throw ShapeMismatch("grad_log_prob: needs a softmax head");
    if (action_index < 0 || action_index >= net.output_dim())
        throw ShapeMismatch("grad_log_prob: action index out of range");
    Net::Trace tr;
    const std::vector<double> pi = net.forward(features, tr);
    GradientRecord rec;
    rec.grad.assign(net.param_count(), 0.0);
    rec.loss = floored_log(pi[action_index]);
    const std::vector<double> dz = log_prob_grad_logits(pi, action_index);
    net.backward(tr, dz, rec.grad);
    return rec;
}

double tv_distance(const ActionDistribution& p, const ActionDistribution& q) {
    p.validate();
    q.validate();
    if (p.probs.size() != q.probs.size()) throw ShapeMismatch("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) s += std::fabs(p.probs[i] - q.probs[i]);
    return 0.5 * s;
}

KlValue kl_divergence(const ActionDistribution& p, const ActionDistribution& q) {
    p.validate();
    q.validate();
    if (p.probs.size() != q.probs.size()) throw ShapeMismatch("kl_divergence: size mismatch");
    KlValue out;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        if (p.probs[i] == 0.0) continue;  // 0 log 0 := 0
        if (q.probs[i] == 0.0) {
            out.saturated = true;
            out.value += p.probs[i] * (std::log(p.probs[i]) - std::log(kProbFloor));
            continue;
        }
        out.value += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
    }
    return out;
}

double entropy(const ActionDistribution& p) {
    p.validate();
    double h = 0.0;
    for (double v : p.probs) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

double floored_log(double p, bool* floored) {
    if (p < kProbFloor) {
        if (floored) *floored = true;
        return std::log(kProbFloor);
    }
    if (floored) *floored = false;
    return std::log(p);
}

std::vector<double> tv_grad_logits(std::span<const double> pi, std::span<const double> target) {
    if (pi.size() != target.size()) throw ShapeMismatch("tv_grad_logits: size mismatch");
    const std::size_t n = pi.size();
    // dTV/dpi_i = 0.5 sign(pi_i - q_i), subgradient 0 at the kink.
    std::vector<double> dpi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = pi[i] - target[i];
        dpi[i] = diff > 0.0 ? 0.5 : (diff < 0.0 ? -0.5 : 0.0);
    }
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) inner += dpi[i] * pi[i];
    std::vector<double> dz(n);
    for (std::size_t j = 0; j < n; ++j) dz[j] = pi[j] * (dpi[j] - inner);
    return dz;
}

std::vector<double> kl_grad_logits(std::span<const double> pi, std::span<const double> target) {
    if (pi.size() != target.size()) throw ShapeMismatch("kl_grad_logits: size mismatch");
    // KL(target || pi): dL/dz_j = pi_j - target_j
    std::vector<double> dz(pi.size());
    for (std::size_t j = 0; j < pi.size(); ++j) dz[j] = pi[j] - target[j];
    return dz;
}

std::vector<double> neg_entropy_grad_logits(std::span<const double> pi) {
    // -H(pi) = sum pi log pi; d(-H)/dz_j = pi_j (log pi_j + H)
    double h = 0.0;
    for (double v : pi) {
        if (v > 0.0) h -= v * std::log(v);
    }
    std::vector<double> dz(pi.size());
    for (std::size_t j = 0; j < pi.size(); ++j) {
        const double logp = floored_log(pi[j]);
        dz[j] = pi[j] * (logp + h);
    }
    return dz;
}

std::vector<double> log_prob_grad_logits(std::span<const double> pi, int action_index) {
    std::vector<double> dz(pi.size());
    for (std::size_t j = 0; j < pi.size(); ++j)
        dz[j] = (static_cast<int>(j) == action_index ? 1.0 : 0.0) - pi[j];
    return dz;
}

void Adam::step(Net& net, std::span<const double> grad) {
    const int n = net.param_count();
    if (static_cast<int>(grad.size()) != n) throw ShapeMismatch("adam: gradient size mismatch");
    for (double g : grad) {
        if (!std::isfinite(g)) throw NonFiniteGradient("adam: non-finite gradient entry");
    }
    if (m_.empty()) {
        m_.assign(n, 0.0);
        v_.assign(n, 0.0);
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    std::vector<double> params(n);
    net.get_params(params);
    for (int i = 0; i < n; ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    net.set_params(params);
}

namespace {

const char* head_name(Head h) {
    switch (h) {
        case Head::Softmax: return "softmax";
        case Head::Linear: return "linear";
        case Head::Tanh: return "tanh";
    }
    return "?";
}

std::string action_order_string(const Net& net) {
    if (net.head() != Head::Softmax) return "scalar";
    std::string s;
    const int d = net.output_dim() / 2;
    for (int i = 1; i <= d; ++i) {
        if (!s.empty()) s += ",";
        s += "+e" + std::to_string(i) + ",-e" + std::to_string(i);
    }
    return s;
}

}  // namespace

void save_checkpoint(const Net& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open checkpoint for writing: " + path);
    out << "passport-ckpt 1\n";
    out << "head " << head_name(net.head()) << "\n";
    out << "activation tanh\n";
    out << "action_order " << action_order_string(net) << "\n";
    out << "layers " << net.dims().size();
    for (int dim : net.dims()) out << ' ' << dim;
    out << "\n";
    out << std::hexfloat;
    const auto& w = net.weights();
    const auto& b = net.biases();
    for (std::size_t l = 0; l < w.size(); ++l) {
        out << "W " << l << "\n";
        for (double v : w[l]) out << v << "\n";
        out << "b " << l << "\n";
        for (double v : b[l]) out << v << "\n";
    }
    out << "end\n";
    if (!out) throw Error("failed writing checkpoint: " + path);
}

Net load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CorruptFile("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version)) throw CorruptFile("checkpoint: missing header");
    if (magic != "passport-ckpt") throw CorruptFile("checkpoint: bad magic");
    if (version != 1) throw VersionMismatch("checkpoint: unsupported version");

    std::string key, head_s, act_s, order_s;
    if (!(in >> key >> head_s) || key != "head") throw CorruptFile("checkpoint: missing head");
    if (!(in >> key >> act_s) || key != "activation")
        throw CorruptFile("checkpoint: missing activation");
    if (!(in >> key >> order_s) || key != "action_order")
        throw CorruptFile("checkpoint: missing action order");
    std::size_t n_dims = 0;
    if (!(in >> key >> n_dims) || key != "layers" || n_dims < 2)
        throw CorruptFile("checkpoint: missing layers");
    std::vector<int> dims(n_dims);
    for (auto& d : dims) {
        if (!(in >> d) || d < 1) throw CorruptFile("checkpoint: bad layer dims");
    }
    Head head;
    if (head_s == "softmax")
        head = Head::Softmax;
    else if (head_s == "linear")
        head = Head::Linear;
    else if (head_s == "tanh")
        head = Head::Tanh;
    else
        throw CorruptFile("checkpoint: unknown head " + head_s);

    Net net(dims, head);
    auto& w = net.weights();
    auto& b = net.biases();
    auto read_value = [&in]() {
        std::string token;
        if (!(in >> token)) throw CorruptFile("checkpoint: truncated parameter block");
        try {
            return std::strtod(token.c_str(), nullptr);
        } catch (...) {
            throw CorruptFile("checkpoint: bad numeric token");
        }
    };
    for (std::size_t l = 0; l < w.size(); ++l) {
        std::size_t idx = 0;
        if (!(in >> key >> idx) || key != "W" || idx != l)
            throw CorruptFile("checkpoint: missing W block");
        for (double& v : w[l]) v = read_value();
        if (!(in >> key >> idx) || key != "b" || idx != l)
            throw CorruptFile("checkpoint: missing b block");
        for (double& v : b[l]) v = read_value();
    }
    if (!(in >> key) || key != "end") throw CorruptFile("checkpoint: missing end marker");
    return net;
}

}  // namespace passport
