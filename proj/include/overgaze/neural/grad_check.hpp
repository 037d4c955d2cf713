#pragma once

// Finite-difference verification of the backward pass, always in 64-bit.
// Analytic gradients come from one recorded forward/backward; numeric ones
// from central differences on the loss, parameter element by parameter
// element.  The report carries the max relative error per parameter so a
// broken backward is attributable to a specific layer.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "overgaze/neural/model.hpp"
#include "overgaze/neural/ops.hpp"

namespace og::neural {

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;
    double worst = 0.0;

    bool all_below(double tol) const { return worst < tol; }
    std::string to_string() const {
        std::string out;
        for (const auto& g : groups) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3e", g.max_rel_err);
            out += g.name + ": " + buf + "\n";
        }
        return out;
    }
};

namespace detail {

template <typename Model>
double loss_value(const Model& model, const Mat<double>& inputs, const std::vector<int>& labels,
                  const std::vector<unsigned char>& mask) {
    Tape<double> tape;
    Rng rng(0);  // eval mode: no dropout, rng unused
    int logits = model.forward(tape, inputs, false, rng);
    int loss = softmax_xent(tape, logits, labels, mask);
    return tape.val(loss)(0, 0);
}

}  // namespace detail

template <typename Model>
ParamStore<double> analytic_grads(const Model& model, const Mat<double>& inputs,
                                  const std::vector<int>& labels,
                                  const std::vector<unsigned char>& mask) {
    Tape<double> tape;
    Rng rng(0);
    Binding bound;
    int logits = model.forward(tape, inputs, false, rng, &bound);
    int loss = softmax_xent(tape, logits, labels, mask);
    tape.backward(loss);
    ParamStore<double> grads = model.params().like_zeros();
    accumulate_grads(tape, bound, grads);
    return grads;
}

template <typename Model>
ParamStore<double> numeric_grads(Model& model, const Mat<double>& inputs,
                                 const std::vector<int>& labels,
                                 const std::vector<unsigned char>& mask, double h = 1e-5) {
    ParamStore<double> grads = model.params().like_zeros();
    for (const auto& name : model.params().names()) {
        Mat<double>& w = model.params().at(name);
        Mat<double>& g = grads.at(name);
        for (size_t i = 0; i < w.v.size(); ++i) {
            double saved = w.v[i];
            w.v[i] = saved + h;
            double up = detail::loss_value(model, inputs, labels, mask);
            w.v[i] = saved - h;
            double down = detail::loss_value(model, inputs, labels, mask);
            w.v[i] = saved;
            g.v[i] = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

inline GradCheckReport compare_grads(const ParamStore<double>& analytic,
                                     const ParamStore<double>& numeric) {
    GradCheckReport report;
    for (const auto& name : analytic.names()) {
        const Mat<double>& ga = analytic.at(name);
        const Mat<double>& gn = numeric.at(name);
        double worst = 0.0;
        for (size_t i = 0; i < ga.v.size(); ++i) {
            double denom = std::max({std::abs(ga.v[i]), std::abs(gn.v[i]), 1e-6});
            worst = std::max(worst, std::abs(ga.v[i] - gn.v[i]) / denom);
        }
        report.groups.push_back({name, worst});
        report.worst = std::max(report.worst, worst);
    }
    return report;
}

template <typename Model>
GradCheckReport grad_check(Model& model, const Mat<double>& inputs,
                           const std::vector<int>& labels,
                           const std::vector<unsigned char>& mask, double h = 1e-5) {
    return compare_grads(analytic_grads(model, inputs, labels, mask),
                         numeric_grads(model, inputs, labels, mask, h));
}

}  // namespace og::neural
