#pragma once

// The two model families: a pre-norm causal transformer over per-timestep
// feature sequences, and the 3-layer / 128-unit MLP baseline for the
// temporally collapsed representations.  Parameters live in a ParamStore
// (named matrices, insertion-ordered) and are bound onto a tape as leaves
// for every forward pass, so the same code path serves training, eval, and
// 64-bit gradient checking.

#include <map>
#include <string>
#include <vector>

#include "overgaze/common/error.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/neural/ops.hpp"

namespace og::neural {

struct ModelConfig {
    int d_model = 64;  // desk-scale default; scale up per experiment config
    int n_layers = 2;
    int n_heads = 4;
    int d_ff = 128;
    double dropout_p = 0.1;
    int max_seq_len = 20;
    int input_dim = 0;  // flattened per-timestep representation size
    int n_classes = 0;

    void check() const {
        if (input_dim < 1) throw ConfigError("model.input_dim: must be positive");
        if (n_classes < 2) throw ConfigError("model.n_classes: need at least 2 classes");
        if (d_model < 1 || n_layers < 1 || n_heads < 1 || d_ff < 1 || max_seq_len < 1)
            throw ConfigError("model: dimensions must be positive");
        if (d_model % n_heads != 0)
            throw ConfigError("model.d_model: not divisible by n_heads");
        if (dropout_p < 0 || dropout_p >= 1)
            throw ConfigError("model.dropout_p: must be in [0, 1)");
    }
};

inline constexpr int kMlpHidden = 128;

template <typename T>
class ParamStore {
  public:
    Mat<T>& add(const std::string& name, Mat<T> m) {
        auto [it, inserted] = values_.try_emplace(name, std::move(m));
        if (!inserted) throw ConfigError("parameter '" + name + "' registered twice");
        names_.push_back(name);
        return it->second;
    }
    Mat<T>& at(const std::string& name) {
        auto it = values_.find(name);
        if (it == values_.end()) throw ConfigError("unknown parameter '" + name + "'");
        return it->second;
    }
    const Mat<T>& at(const std::string& name) const {
        return const_cast<ParamStore*>(this)->at(name);
    }
    bool has(const std::string& name) const { return values_.count(name) > 0; }
    const std::vector<std::string>& names() const { return names_; }  // insertion order

    size_t scalar_count() const {
        size_t n = 0;
        for (const auto& name : names_) n += at(name).size();
        return n;
    }
    void zero() {
        for (auto& [name, m] : values_)
            std::fill(m.v.begin(), m.v.end(), T(0));
    }
    ParamStore like_zeros() const {
        ParamStore out;
        for (const auto& name : names_) {
            const Mat<T>& m = at(name);
            out.add(name, Mat<T>(m.rows, m.cols));
        }
        return out;
    }
    template <typename U>
    ParamStore<U> cast() const {
        ParamStore<U> out;
        for (const auto& name : names_) {
            const Mat<T>& m = at(name);
            Mat<U> c(m.rows, m.cols);
            for (size_t i = 0; i < m.v.size(); ++i) c.v[i] = static_cast<U>(m.v[i]);
            out.add(name, std::move(c));
        }
        return out;
    }

  private:
    std::vector<std::string> names_;
    std::map<std::string, Mat<T>> values_;
};

// Node ids of one forward pass's parameter leaves, keyed by name.
using Binding = std::map<std::string, int>;

template <typename T>
Binding bind_params(Tape<T>& tape, const ParamStore<T>& params) {
    Binding bound;
    for (const auto& name : params.names()) bound[name] = tape.push(params.at(name));
    return bound;
}

// Adds this pass's parameter gradients into an accumulator (same names).
template <typename T>
void accumulate_grads(Tape<T>& tape, const Binding& bound, ParamStore<T>& acc) {
    for (const auto& [name, id] : bound) {
        Mat<T>& g = tape.grad(id);
        Mat<T>& a = acc.at(name);
        for (size_t i = 0; i < a.v.size(); ++i) a.v[i] += g.v[i];
    }
}

namespace detail {

// Weights U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
template <typename T>
void init_affine(ParamStore<T>& p, const std::string& prefix, int in, int out, Rng& rng) {
    Mat<T> W(in, out);
    double bound = 1.0 / std::sqrt(double(in));
    for (T& v : W.v) v = T((rng.uniform() * 2.0 - 1.0) * bound);
    p.add(prefix + ".W", std::move(W));
    p.add(prefix + ".b", Mat<T>(1, out));
}

template <typename T>
void init_layer_norm(ParamStore<T>& p, const std::string& prefix, int dim) {
    Mat<T> gamma(1, dim);
    std::fill(gamma.v.begin(), gamma.v.end(), T(1));
    p.add(prefix + ".gamma", std::move(gamma));
    p.add(prefix + ".beta", Mat<T>(1, dim));
}

}  // namespace detail

template <typename T>
class Transformer {
  public:
    explicit Transformer(const ModelConfig& cfg) : cfg_(cfg) {
        cfg_.check();
        pe_ = Mat<T>(cfg_.max_seq_len, cfg_.d_model);
        for (int pos = 0; pos < cfg_.max_seq_len; ++pos)
            for (int i = 0; i < cfg_.d_model; i += 2) {
                double freq = std::pow(10000.0, -double(i) / cfg_.d_model);
                pe_(pos, i) = T(std::sin(pos * freq));
                if (i + 1 < cfg_.d_model) pe_(pos, i + 1) = T(std::cos(pos * freq));
            }
    }

    void init(Rng& rng) {
        detail::init_affine(params_, "embed", cfg_.input_dim, cfg_.d_model, rng);
        for (int l = 0; l < cfg_.n_layers; ++l) {
            std::string p = "layer" + std::to_string(l);
            detail::init_layer_norm(params_, p + ".ln1", cfg_.d_model);
            for (const char* w : {".attn.q", ".attn.k", ".attn.v", ".attn.o"})
                detail::init_affine(params_, p + w, cfg_.d_model, cfg_.d_model, rng);
            detail::init_layer_norm(params_, p + ".ln2", cfg_.d_model);
            detail::init_affine(params_, p + ".ffn.1", cfg_.d_model, cfg_.d_ff, rng);
            detail::init_affine(params_, p + ".ffn.2", cfg_.d_ff, cfg_.d_model, rng);
        }
        detail::init_layer_norm(params_, "final_ln", cfg_.d_model);
        detail::init_affine(params_, "head", cfg_.d_model, cfg_.n_classes, rng);
    }

    const ModelConfig& config() const { return cfg_; }
    ParamStore<T>& params() { return params_; }
    const ParamStore<T>& params() const { return params_; }

    // Builds the graph for one sequence [S, input_dim]; returns the logits
    // node [S, n_classes].  `bound` (if given) receives the parameter leaf
    // ids so the caller can collect gradients after backward().
    int forward(Tape<T>& tape, const Mat<T>& inputs, bool train, Rng& rng,
                Binding* bound_out = nullptr) const {
        if (inputs.rows < 1 || inputs.rows > cfg_.max_seq_len)
            throw ConfigError("transformer: sequence length " + std::to_string(inputs.rows) +
                              " outside 1.." + std::to_string(cfg_.max_seq_len));
        if (inputs.cols != cfg_.input_dim)
            throw ConfigError("transformer: input dim " + std::to_string(inputs.cols) +
                              " != configured " + std::to_string(cfg_.input_dim));
        Binding bound = bind_params(tape, params_);
        auto P = [&](const std::string& name) { return bound.at(name); };

        int h = linear(tape, input(tape, inputs), P("embed.W"), P("embed.b"));
        Mat<T> pe_slice(inputs.rows, cfg_.d_model);
        for (int r = 0; r < inputs.rows; ++r)
            for (int c = 0; c < cfg_.d_model; ++c) pe_slice(r, c) = pe_(r, c);
        h = add(tape, h, tape.push(std::move(pe_slice)));
        h = dropout(tape, h, cfg_.dropout_p, train, rng);

        for (int l = 0; l < cfg_.n_layers; ++l) {
            std::string p = "layer" + std::to_string(l);
            int a = layer_norm(tape, h, P(p + ".ln1.gamma"), P(p + ".ln1.beta"));
            a = causal_self_attention(tape, a, P(p + ".attn.q.W"), P(p + ".attn.q.b"),
                                      P(p + ".attn.k.W"), P(p + ".attn.k.b"),
                                      P(p + ".attn.v.W"), P(p + ".attn.v.b"),
                                      P(p + ".attn.o.W"), P(p + ".attn.o.b"), cfg_.n_heads,
                                      cfg_.dropout_p, train, rng);
            a = dropout(tape, a, cfg_.dropout_p, train, rng);
            h = add(tape, h, a);

            int f = layer_norm(tape, h, P(p + ".ln2.gamma"), P(p + ".ln2.beta"));
            f = linear(tape, f, P(p + ".ffn.1.W"), P(p + ".ffn.1.b"));
            f = relu(tape, f);
            f = linear(tape, f, P(p + ".ffn.2.W"), P(p + ".ffn.2.b"));
            f = dropout(tape, f, cfg_.dropout_p, train, rng);
            h = add(tape, h, f);
        }
        h = layer_norm(tape, h, P("final_ln.gamma"), P("final_ln.beta"));
        int logits = linear(tape, h, P("head.W"), P("head.b"));
        if (bound_out) *bound_out = std::move(bound);
        return logits;
    }

    // Eval-mode logits without keeping the tape around.
    Mat<T> logits(const Mat<T>& inputs) const {
        Tape<T> tape;
        Rng rng(0);  // dropout is off in eval mode; never consulted
        return tape.val(forward(tape, inputs, false, rng));
    }

  private:
    ModelConfig cfg_;
    ParamStore<T> params_;
    Mat<T> pe_;  // fixed sinusoidal positional encodings (not trained)
};

template <typename T>
class Mlp {
  public:
    // input_dim and n_classes are taken from cfg; depth and width are fixed
    // by the baseline definition (3 affine layers, 128 hidden units).
    explicit Mlp(const ModelConfig& cfg) : cfg_(cfg) { cfg_.check(); }

    void init(Rng& rng) {
        detail::init_affine(params_, "fc1", cfg_.input_dim, kMlpHidden, rng);
        detail::init_affine(params_, "fc2", kMlpHidden, kMlpHidden, rng);
        detail::init_affine(params_, "fc3", kMlpHidden, cfg_.n_classes, rng);
    }

    const ModelConfig& config() const { return cfg_; }
    ParamStore<T>& params() { return params_; }
    const ParamStore<T>& params() const { return params_; }

    int forward(Tape<T>& tape, const Mat<T>& inputs, bool /*train*/, Rng& /*rng*/,
                Binding* bound_out = nullptr) const {
        if (inputs.cols != cfg_.input_dim)
            throw ConfigError("mlp: input dim " + std::to_string(inputs.cols) +
                              " != configured " + std::to_string(cfg_.input_dim));
        Binding bound = bind_params(tape, params_);
        int h = input(tape, inputs);
        h = relu(tape, linear(tape, h, bound.at("fc1.W"), bound.at("fc1.b")));
        h = relu(tape, linear(tape, h, bound.at("fc2.W"), bound.at("fc2.b")));
        int logits = linear(tape, h, bound.at("fc3.W"), bound.at("fc3.b"));
        if (bound_out) *bound_out = std::move(bound);
        return logits;
    }

    Mat<T> logits(const Mat<T>& inputs) const {
        Tape<T> tape;
        Rng rng(0);
        return tape.val(forward(tape, inputs, false, rng));
    }

  private:
    ModelConfig cfg_;
    ParamStore<T> params_;
};

}  // namespace og::neural
