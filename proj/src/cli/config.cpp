#include "overgaze/cli/config.hpp"

#include <cctype>
#include <cstdio>
#include <set>

#include "overgaze/cli/toml.hpp"
#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/policy.hpp"

namespace og::cli {

using experiments::ExperimentSpec;
using experiments::ModelKind;
using features::ReprKind;
using features::WindowSpec;

namespace {

void check_keys(const TomlValue& table, const std::set<std::string>& allowed,
                const std::string& context) {
    for (const auto& [key, value] : table.entries)
        if (!allowed.count(key))
            throw ConfigError(context + ": unknown key '" + key + "'");
}

WindowSpec parse_window(const TomlValue& v, const std::string& where) {
    const auto& pair = v.as_array(where);
    if (pair.size() != 2)
        throw ConfigError(where + ": a window is [start_t, length]");
    WindowSpec w;
    w.start_t = static_cast<int>(pair[0].as_int(where + "[0]"));
    w.length = static_cast<int>(pair[1].as_int(where + "[1]"));
    if (w.start_t < 0 || w.length < 1)
        throw ConfigError(where + ": start_t must be >= 0 and length >= 1");
    return w;
}

std::vector<std::string> parse_strings(const TomlValue& v, const std::string& where) {
    std::vector<std::string> out;
    for (const TomlValue& item : v.as_array(where)) out.push_back(item.as_string(where));
    if (out.empty()) throw ConfigError(where + ": must not be empty");
    return out;
}

void parse_dataset(const TomlValue& table, DatasetConfig& ds) {
    check_keys(table, {"participants", "skill_levels", "agents", "layouts"}, "dataset");
    if (const TomlValue* v = table.find("participants")) {
        ds.participants = static_cast<int>(v->as_int("dataset.participants"));
        if (ds.participants < 1)
            throw ConfigError("dataset.participants: must be at least 1");
    }
    if (const TomlValue* v = table.find("skill_levels")) {
        ds.skill_levels.clear();
        for (const TomlValue& item : v->as_array("dataset.skill_levels")) {
            double s = item.as_float("dataset.skill_levels");
            if (s < 0.0 || s > 1.0)
                throw ConfigError("dataset.skill_levels: values must be in [0, 1]");
            ds.skill_levels.push_back(s);
        }
        if (ds.skill_levels.empty())
            throw ConfigError("dataset.skill_levels: must not be empty");
    }
    if (const TomlValue* v = table.find("agents")) {
        ds.agents = parse_strings(*v, "dataset.agents");
        for (const std::string& name : ds.agents)
            gridworld::policy_kind_from_name(name);  // validates
    }
    if (const TomlValue* v = table.find("layouts")) {
        ds.layouts = parse_strings(*v, "dataset.layouts");
        for (const std::string& name : ds.layouts)
            gridworld::builtin_layout(name);  // validates
    }
}

ExperimentSpec parse_experiment(const TomlValue& table, uint64_t global_seed) {
    check_keys(table,
               {"name", "task", "representation", "model", "agent", "layout", "window", "lr",
                "bs", "ws", "epochs", "seed", "d_model", "n_layers", "n_heads", "d_ff",
                "dropout_p"},
               "experiment");
    ExperimentSpec spec;
    const TomlValue* name = table.find("name");
    if (!name) throw ConfigError("experiment: 'name' is required");
    spec.name = name->as_string("experiment.name");
    for (char ch : spec.name)
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-' &&
            ch != '.')
            throw ConfigError("experiment.name: '" + spec.name +
                              "' may only use letters, digits, '_', '-', '.'");
    const std::string where = "experiment '" + spec.name + "'";

    if (const TomlValue* v = table.find("task"))
        spec.task = experiments::task_from_name(v->as_string(where + ".task"));
    if (const TomlValue* v = table.find("representation"))
        spec.representation =
            features::repr_kind_from_name(v->as_string(where + ".representation"));
    if (const TomlValue* v = table.find("model"))
        spec.model = experiments::model_kind_from_name(v->as_string(where + ".model"));
    else
        spec.model = features::repr_is_sequence(spec.representation) ? ModelKind::Transformer
                                                                     : ModelKind::Mlp;
    if (const TomlValue* v = table.find("agent")) {
        spec.agent = v->as_string(where + ".agent");
        gridworld::policy_kind_from_name(spec.agent);
    }
    if (const TomlValue* v = table.find("layout")) {
        spec.layout = v->as_string(where + ".layout");
        gridworld::builtin_layout(spec.layout);
    }
    if (const TomlValue* v = table.find("window"))
        spec.window = parse_window(*v, where + ".window");

    if (const TomlValue* v = table.find("lr")) spec.train.lr = v->as_float(where + ".lr");
    if (const TomlValue* v = table.find("bs"))
        spec.train.bs = static_cast<int>(v->as_int(where + ".bs"));
    if (const TomlValue* v = table.find("ws"))
        spec.train.ws = static_cast<int>(v->as_int(where + ".ws"));
    if (const TomlValue* v = table.find("epochs"))
        spec.train.epochs = static_cast<int>(v->as_int(where + ".epochs"));
    if (const TomlValue* v = table.find("seed"))
        spec.train.seed = static_cast<uint64_t>(v->as_int(where + ".seed"));
    else
        spec.train.seed = derive_seed(global_seed, "train/" + spec.name);

    if (const TomlValue* v = table.find("d_model"))
        spec.arch.d_model = static_cast<int>(v->as_int(where + ".d_model"));
    if (const TomlValue* v = table.find("n_layers"))
        spec.arch.n_layers = static_cast<int>(v->as_int(where + ".n_layers"));
    if (const TomlValue* v = table.find("n_heads"))
        spec.arch.n_heads = static_cast<int>(v->as_int(where + ".n_heads"));
    if (const TomlValue* v = table.find("d_ff"))
        spec.arch.d_ff = static_cast<int>(v->as_int(where + ".d_ff"));
    if (const TomlValue* v = table.find("dropout_p"))
        spec.arch.dropout_p = v->as_float(where + ".dropout_p");

    spec.check();
    return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const uint64_t* seed_override) {
    TomlValue root = toml_parse(text);
    check_keys(root, {"seed", "paths", "dataset", "featurize", "experiment"}, "config");

    RunConfig cfg;
    if (const TomlValue* v = root.find("seed"))
        cfg.seed = static_cast<uint64_t>(v->as_int("seed"));
    if (seed_override) cfg.seed = *seed_override;

    if (const TomlValue* paths = root.find("paths")) {
        check_keys(*paths, {"sessions", "features", "reports"}, "paths");
        if (const TomlValue* v = paths->find("sessions"))
            cfg.paths.sessions = v->as_string("paths.sessions");
        if (const TomlValue* v = paths->find("features"))
            cfg.paths.features = v->as_string("paths.features");
        if (const TomlValue* v = paths->find("reports"))
            cfg.paths.reports = v->as_string("paths.reports");
    }
    if (const TomlValue* dataset = root.find("dataset")) parse_dataset(*dataset, cfg.dataset);

    for (int k = 0; k < features::kNumReprKinds; ++k)
        cfg.featurize_kinds.push_back(static_cast<ReprKind>(k));
    if (const TomlValue* feat = root.find("featurize")) {
        check_keys(*feat, {"kinds", "windows"}, "featurize");
        if (const TomlValue* v = feat->find("kinds")) {
            cfg.featurize_kinds.clear();
            for (const std::string& name : parse_strings(*v, "featurize.kinds"))
                cfg.featurize_kinds.push_back(features::repr_kind_from_name(name));
        }
        if (const TomlValue* v = feat->find("windows")) {
            cfg.featurize_windows.clear();
            for (const TomlValue& item : v->as_array("featurize.windows"))
                cfg.featurize_windows.push_back(parse_window(item, "featurize.windows"));
            if (cfg.featurize_windows.empty())
                throw ConfigError("featurize.windows: must not be empty");
        }
    }

    if (const TomlValue* exps = root.find("experiment")) {
        if (exps->kind != TomlValue::Kind::Array)
            throw ConfigError("experiment: use [[experiment]] tables");
        std::set<std::string> seen;
        for (const TomlValue& table : exps->items) {
            ExperimentSpec spec = parse_experiment(table, cfg.seed);
            if (!seen.insert(spec.name).second)
                throw ConfigError("experiment '" + spec.name + "' defined twice");
            cfg.experiments.push_back(std::move(spec));
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const uint64_t* seed_override) {
    return parse_run_config(read_text_file(path), seed_override);
}

std::string RoundPlan::file() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_t%02d.jsonl", participant_id.c_str(), trial_id);
    return buf;
}

std::vector<RoundPlan> plan_rounds(const RunConfig& config) {
    const DatasetConfig& ds = config.dataset;
    const int combos = static_cast<int>(ds.agents.size() * ds.layouts.size());
    const int rounds = ds.rounds_per_participant();
    std::vector<RoundPlan> plans;
    plans.reserve(static_cast<size_t>(ds.participants) * rounds);
    for (int p = 0; p < ds.participants; ++p) {
        char pid[16];
        std::snprintf(pid, sizeof pid, "p%03d", p);
        double skill = ds.skill_levels[p % ds.skill_levels.size()];
        for (int r = 0; r < rounds; ++r) {
            int pair = r % combos;
            RoundPlan plan;
            plan.participant_id = pid;
            plan.trial_id = r;
            plan.agent = ds.agents[pair / ds.layouts.size()];
            plan.layout = ds.layouts[pair % ds.layouts.size()];
            plan.skill = skill;
            plan.seed = derive_seed(config.seed,
                                    "simulate/" + plan.participant_id + "/t" + std::to_string(r));
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

}  // namespace og::cli
