#include "overgaze/experiments/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/experiments/metrics.hpp"

namespace og::experiments {

using json = nlohmann::ordered_json;
using neural::Binding;
using neural::Mat;
using neural::ParamStore;
using neural::Tape;

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Transformer: return "transformer";
        case ModelKind::Mlp: return "mlp";
        case ModelKind::Majority: return "majority";
    }
    throw Error("unreachable model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "transformer") return ModelKind::Transformer;
    if (name == "mlp") return ModelKind::Mlp;
    if (name == "majority") return ModelKind::Majority;
    throw ValidationError("model", "unknown model '" + name + "'");
}

void ExperimentSpec::check() const {
    if (name.empty()) throw ConfigError("experiment.name: must not be empty");
    train.check();
    bool seq = features::repr_is_sequence(representation);
    if (model == ModelKind::Transformer && !seq)
        throw ConfigError("experiment '" + name + "': transformer needs a sequence "
                          "representation, got " + features::repr_kind_name(representation));
    if (model == ModelKind::Mlp && seq)
        throw ConfigError("experiment '" + name + "': mlp needs a collapsed "
                          "representation, got " + features::repr_kind_name(representation));
    if (window.length < 1) throw ConfigError("experiment '" + name + "': empty window");
}

DatasetSplit partition_examples(const Dataset& ds, const SplitSpec& split) {
    DatasetSplit out;
    for (const Example& ex : ds.examples) {
        if (split.contains_train(ex.participant_id))
            out.train.push_back(ex);
        else if (std::find(split.val.begin(), split.val.end(), ex.participant_id) !=
                 split.val.end())
            out.val.push_back(ex);
        else if (split.contains_test(ex.participant_id))
            out.test.push_back(ex);
        else
            throw ValidationError("split",
                                  "participant '" + ex.participant_id + "' not in any partition");
    }
    return out;
}

namespace {

bool has_signal(const Example& ex) {
    for (unsigned char m : ex.mask)
        if (m) return true;
    return false;
}

template <typename Model>
std::vector<Mat<double>> probs_of(const Model& model, const std::vector<Example>& examples) {
    std::vector<Mat<double>> out;
    out.reserve(examples.size());
    for (const Example& ex : examples) {
        Mat<float> logits = model.logits(ex.inputs);
        Mat<float> p = neural::softmax_rows(logits);
        Mat<double> pd(p.rows, p.cols);
        for (size_t i = 0; i < p.v.size(); ++i) pd.v[i] = double(p.v[i]);
        out.push_back(std::move(pd));
    }
    return out;
}

template <typename Model>
TrainOutcome fit(Model& model, const neural::TrainConfig& cfg,
                 const std::vector<Example>& train_set, const std::vector<Example>& val_set) {
    cfg.check();
    if (train_set.empty()) throw ValidationError("train", "no training examples");

    Rng init_rng(derive_seed(cfg.seed, "init"));
    model.init(init_rng);
    Rng train_rng(derive_seed(cfg.seed, "train"));

    neural::RAdam<float> opt;
    const int n_classes = model.config().n_classes;
    TrainOutcome best;
    best.params = model.params();
    double best_f1 = -1.0;
    double best_loss = std::numeric_limits<double>::infinity();
    int bad_epochs = 0;
    int global_step = 0;

    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), size_t{0});

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        train_rng.shuffle(order);
        for (size_t at = 0; at < order.size(); at += cfg.bs) {
            size_t end = std::min(order.size(), at + cfg.bs);
            ParamStore<float> acc = model.params().like_zeros();
            int counted = 0;
            for (size_t i = at; i < end; ++i) {
                const Example& ex = train_set[order[i]];
                if (!has_signal(ex)) continue;
                Tape<float> tape;
                Binding bound;
                int logits = model.forward(tape, ex.inputs, true, train_rng, &bound);
                int loss = neural::softmax_xent(tape, logits, ex.labels, ex.mask);
                tape.backward(loss);
                neural::accumulate_grads(tape, bound, acc);
                ++counted;
            }
            if (counted == 0) continue;
            for (const std::string& name : acc.names()) {
                Mat<float>& g = acc.at(name);
                for (float& v : g.v) v /= float(counted);
            }
            ++global_step;
            opt.step(model.params(), acc, global_step,
                     neural::lr_schedule(global_step, cfg.ws, cfg.lr));
        }
        best.epochs_trained = epoch;

        if (val_set.empty()) {
            best.params = model.params();
            best.best_epoch = epoch;
            continue;
        }
        std::vector<Mat<double>> val_probs = probs_of(model, val_set);
        double f1 = pooled_f1(val_probs, val_set, n_classes);
        double loss = pooled_loss(val_probs, val_set, n_classes);
        // A handful of validation rounds saturates macro F1 quickly, so ties
        // fall back to cross-entropy: keep training while confidence still
        // improves, stop when both plateau for `kEarlyStopPatience` epochs.
        if (f1 > best_f1 || (f1 == best_f1 && loss < best_loss)) {
            best_f1 = f1;
            best_loss = loss;
            best.params = model.params();
            best.best_epoch = epoch;
            best.best_val_f1 = f1;
            bad_epochs = 0;
        } else if (++bad_epochs >= kEarlyStopPatience) {
            break;
        }
    }
    return best;
}

}  // namespace

TrainOutcome fit_transformer(const neural::ModelConfig& arch, const neural::TrainConfig& train,
                             const std::vector<Example>& train_set,
                             const std::vector<Example>& val_set) {
    neural::Transformer<float> model(arch);
    return fit(model, train, train_set, val_set);
}

TrainOutcome fit_mlp(const neural::ModelConfig& arch, const neural::TrainConfig& train,
                     const std::vector<Example>& train_set,
                     const std::vector<Example>& val_set) {
    neural::Mlp<float> model(arch);
    return fit(model, train, train_set, val_set);
}

std::vector<Mat<double>> model_probs(ModelKind kind, const neural::ModelConfig& arch,
                                     const ParamStore<float>& params,
                                     const std::vector<Example>& examples) {
    switch (kind) {
        case ModelKind::Transformer: {
            neural::Transformer<float> model(arch);
            model.params() = params;
            return probs_of(model, examples);
        }
        case ModelKind::Mlp: {
            neural::Mlp<float> model(arch);
            model.params() = params;
            return probs_of(model, examples);
        }
        case ModelKind::Majority:
            throw ConfigError("majority baseline has no probabilities");
    }
    throw Error("unreachable model kind");
}

double pooled_f1(const std::vector<Mat<double>>& probs, const std::vector<Example>& examples,
                 int n_classes) {
    if (probs.size() != examples.size())
        throw ValidationError("eval", "probability rounds != example rounds");
    std::vector<int> preds, golds;
    for (size_t i = 0; i < examples.size(); ++i) {
        const Example& ex = examples[i];
        for (size_t t = 0; t < ex.mask.size(); ++t) {
            if (!ex.mask[t]) continue;
            const double* row = &probs[i].v[t * n_classes];
            int best = 0;
            for (int k = 1; k < n_classes; ++k)
                if (row[k] > row[best]) best = k;
            preds.push_back(best);
            golds.push_back(ex.labels[t]);
        }
    }
    if (preds.empty()) return 0.0;
    return f1_macro(preds, golds, n_classes);
}

double pooled_loss(const std::vector<Mat<double>>& probs, const std::vector<Example>& examples,
                   int n_classes) {
    if (probs.size() != examples.size())
        throw ValidationError("eval", "probability rounds != example rounds");
    double total = 0.0;
    size_t count = 0;
    for (size_t i = 0; i < examples.size(); ++i) {
        const Example& ex = examples[i];
        for (size_t t = 0; t < ex.mask.size(); ++t) {
            if (!ex.mask[t]) continue;
            double p = probs[i].v[t * n_classes + ex.labels[t]];
            total += -std::log(std::max(p, 1e-12));
            ++count;
        }
    }
    return count == 0 ? 0.0 : total / static_cast<double>(count);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const Dataset& ds,
                                const SplitSpec& split) {
    spec.check();
    if (ds.positions != (features::repr_is_sequence(spec.representation) ? spec.window.length : 1))
        throw ValidationError("dataset", "window length does not match experiment spec");

    DatasetSplit parts = partition_examples(ds, split);
    if (parts.train.empty()) throw ValidationError("split", "no training examples in dataset");
    if (parts.test.empty()) throw ValidationError("split", "no test examples in dataset");

    ExperimentResult res;
    res.spec = spec;
    res.split = split;
    res.n_classes = ds.n_classes;
    res.input_dim = ds.input_dim;
    res.n_train = parts.train.size();
    res.n_val = parts.val.size();
    res.n_test = parts.test.size();

    std::vector<int> train_labels;
    for (const Example& ex : parts.train)
        for (size_t t = 0; t < ex.mask.size(); ++t)
            if (ex.mask[t]) train_labels.push_back(ex.labels[t]);
    if (train_labels.empty())
        throw ValidationError("train", "every training label is masked");
    res.majority = majority_class(train_labels, ds.n_classes);
    res.baseline_curve = constant_curves(res.majority, parts.test, ds.n_classes);

    if (spec.model == ModelKind::Majority) {
        res.test_curve = res.baseline_curve;
        return res;
    }

    neural::ModelConfig arch = spec.arch;
    arch.input_dim = ds.input_dim;
    arch.n_classes = ds.n_classes;
    arch.max_seq_len = std::max(arch.max_seq_len, ds.positions);
    res.arch_used = arch;

    TrainOutcome fitted = spec.model == ModelKind::Transformer
                              ? fit_transformer(arch, spec.train, parts.train, parts.val)
                              : fit_mlp(arch, spec.train, parts.train, parts.val);
    res.epochs_trained = fitted.epochs_trained;
    res.best_epoch = fitted.best_epoch;
    res.weights = std::move(fitted.params);
    res.test_curve =
        eval_curves(model_probs(spec.model, arch, res.weights, parts.test), parts.test,
                    ds.n_classes);
    return res;
}

namespace {

json curve_json(const EvalCurve& curve) {
    return json{{"per_timestep", curve.per_timestep},
                {"cumulative", curve.cumulative},
                {"support", curve.support}};
}

}  // namespace

std::string report_json(const ExperimentResult& r) {
    json doc;
    doc["experiment"] = r.spec.name;
    doc["task"] = task_name(r.spec.task);
    doc["representation"] = features::repr_kind_name(r.spec.representation);
    doc["model"] = model_kind_name(r.spec.model);
    doc["window"] = {{"start_t", r.spec.window.start_t}, {"length", r.spec.window.length}};
    doc["group"] = {{"agent", r.spec.agent}, {"layout", r.spec.layout}};
    doc["arch"] = {{"d_model", r.spec.arch.d_model},
                   {"n_layers", r.spec.arch.n_layers},
                   {"n_heads", r.spec.arch.n_heads},
                   {"d_ff", r.spec.arch.d_ff},
                   {"dropout_p", r.spec.arch.dropout_p}};
    doc["train_config"] = {{"lr", r.spec.train.lr},
                           {"bs", r.spec.train.bs},
                           {"ws", r.spec.train.ws},
                           {"epochs", r.spec.train.epochs},
                           {"seed", r.spec.train.seed}};
    doc["split"] = {{"seed", r.split.seed},
                    {"train", r.split.train},
                    {"val", r.split.val},
                    {"test", r.split.test}};
    doc["counts"] = {{"train", r.n_train},
                     {"val", r.n_val},
                     {"test", r.n_test},
                     {"classes", r.n_classes},
                     {"input_dim", r.input_dim}};
    doc["majority_class"] = r.majority;
    doc["epochs_trained"] = r.epochs_trained;
    doc["best_epoch"] = r.best_epoch;
    doc["curves"] = curve_json(r.test_curve);
    doc["baseline"] = curve_json(r.baseline_curve);
    doc["final_f1"] = r.final_f1();
    doc["baseline_final_f1"] = r.baseline_final_f1();
    return doc.dump(2) + "\n";
}

std::string report_csv(const ExperimentResult& r) {
    std::string out = "position,f1,cumulative_f1,support,baseline_f1\n";
    char buf[160];
    for (size_t t = 0; t < r.test_curve.per_timestep.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%d,%.6f\n", t,
                      r.test_curve.per_timestep[t], r.test_curve.cumulative[t],
                      r.test_curve.support[t], r.baseline_curve.per_timestep[t]);
        out += buf;
    }
    return out;
}

}  // namespace og::experiments
