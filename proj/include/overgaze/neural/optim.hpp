#pragma once

// RAdam with linear warmup.  The rectification rule follows the published
// update equations: with second-moment decay β₂, ρ_∞ = 2/(1-β₂) - 1 and
//
//   ρ_t = ρ_∞ - 2·t·β₂ᵗ / (1-β₂ᵗ)
//
// When ρ_t > 4 the variance estimate is considered tractable and the step is
// the variance-rectified adaptive update; otherwise (early steps) the step
// falls back to bias-corrected momentum only.

#include <cmath>
#include <cstdint>

#include "overgaze/common/error.hpp"
#include "overgaze/neural/model.hpp"

namespace og::neural {

struct TrainConfig {
    double lr = 3e-5;  // peak learning rate
    int bs = 128;
    int ws = 2000;  // warmup steps
    int epochs = 200;
    uint64_t seed = 0;
    double label_smoothing = 0.0;

    void check() const {
        if (lr <= 0) throw ConfigError("train.lr: must be positive");
        if (bs < 1) throw ConfigError("train.bs: must be at least 1");
        if (ws < 0) throw ConfigError("train.ws: must be non-negative");
        if (epochs < 1) throw ConfigError("train.epochs: must be at least 1");
        if (label_smoothing != 0.0)
            throw ConfigError("train.label_smoothing: only 0 is implemented");
    }
};

// Linear ramp 0 → peak over `ws` steps, then constant. `step` is 1-based.
inline double lr_schedule(int step, int ws, double peak_lr) {
    if (step < 1) throw Error("lr_schedule: step index is 1-based");
    if (ws <= 0 || step >= ws) return peak_lr;
    return peak_lr * double(step) / double(ws);
}

template <typename T>
class RAdam {
  public:
    explicit RAdam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : beta1_(beta1), beta2_(beta2), eps_(eps) {}

    // One update with step index t (1-based) at learning rate lr_t.  Moments
    // are allocated on first use and keyed to the parameter names.
    void step(ParamStore<T>& params, const ParamStore<T>& grads, int t, double lr_t) {
        if (t < 1) throw Error("radam: step index is 1-based");
        if (m_.names().empty()) {
            m_ = params.like_zeros();
            v_ = params.like_zeros();
        }
        const double b1t = std::pow(beta1_, t);
        const double b2t = std::pow(beta2_, t);
        const double rho_inf = 2.0 / (1.0 - beta2_) - 1.0;
        const double rho_t = rho_inf - 2.0 * t * b2t / (1.0 - b2t);
        double rect = 0.0;
        const bool rectified = rho_t > 4.0;
        if (rectified)
            rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                             ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));

        for (const auto& name : params.names()) {
            Mat<T>& w = params.at(name);
            const Mat<T>& g = grads.at(name);
            if (!w.same_shape(g)) throw Error("radam: gradient shape mismatch for " + name);
            if (!g.all_finite()) throw Error("radam: non-finite gradient in " + name);
            Mat<T>& m = m_.at(name);
            Mat<T>& v = v_.at(name);
            for (size_t i = 0; i < w.v.size(); ++i) {
                double gi = g.v[i];
                double mi = beta1_ * double(m.v[i]) + (1.0 - beta1_) * gi;
                double vi = beta2_ * double(v.v[i]) + (1.0 - beta2_) * gi * gi;
                m.v[i] = T(mi);
                v.v[i] = T(vi);
                double mhat = mi / (1.0 - b1t);
                if (rectified) {
                    double vhat = std::sqrt(vi / (1.0 - b2t));
                    w.v[i] -= T(lr_t * rect * mhat / (vhat + eps_));
                } else {
                    w.v[i] -= T(lr_t * mhat);
                }
            }
        }
    }

    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double eps() const { return eps_; }

  private:
    double beta1_, beta2_, eps_;
    ParamStore<T> m_, v_;
};

}  // namespace og::neural
