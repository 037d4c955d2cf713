#include "overgaze/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/experiments/dataset.hpp"
#include "overgaze/experiments/runner.hpp"
#include "overgaze/experiments/split.hpp"
#include "overgaze/features/archive.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/simulate.hpp"
#include "overgaze/labels/labels.hpp"
#include "overgaze/neural/checkpoint.hpp"
#include "overgaze/sessions/session_io.hpp"

namespace og::cli {

using json = nlohmann::ordered_json;

namespace {

// Runs fn(0..n-1) on up to `jobs` threads.  Work items must be independent;
// the first thrown error wins and is rethrown after all threads drain.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    jobs = std::clamp<int>(jobs, 1, static_cast<int>(std::max<size_t>(n, 1)));
    if (jobs == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::mutex mtx;
    std::string first_error;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mtx);
                if (first_error.empty()) first_error = e.what();
                next.store(n);  // stop claiming new work
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!first_error.empty()) throw Error(first_error);
}

std::string window_tag(const features::WindowSpec& w) {
    return "w" + std::to_string(w.start_t) + "+" + std::to_string(w.length);
}

std::filesystem::path validation_manifest(const RunConfig& cfg) {
    return cfg.paths.sessions / "validation.json";
}

}  // namespace

int cmd_simulate(const RunConfig& config, int jobs, bool dry_run, std::ostream& out) {
    std::vector<RoundPlan> plans = plan_rounds(config);
    out << "simulate: " << plans.size() << " sessions (" << config.dataset.participants
        << " participants x " << config.dataset.rounds_per_participant() << " rounds) -> "
        << config.paths.sessions.string() << "\n";
    if (dry_run) return 0;

    ensure_dir(config.paths.sessions);
    parallel_for(plans.size(), jobs, [&](size_t i) {
        const RoundPlan& plan = plans[i];
        gridworld::SimConfig sim;
        sim.layout = plan.layout;
        sim.agent = gridworld::policy_kind_from_name(plan.agent);
        sim.skill = plan.skill;
        sim.participant_id = plan.participant_id;
        sim.trial_id = plan.trial_id;
        sim.seed = plan.seed;
        sessions::SessionLog log = gridworld::simulate_session(sim);
        sessions::write_session(log, config.paths.sessions / plan.file());
    });

    json manifest;
    manifest["sessions"] = json::array();
    for (const RoundPlan& plan : plans)
        manifest["sessions"].push_back({{"file", plan.file()},
                                        {"participant_id", plan.participant_id},
                                        {"trial_id", plan.trial_id},
                                        {"agent", plan.agent},
                                        {"layout", plan.layout},
                                        {"skill", plan.skill},
                                        {"seed", plan.seed}});
    atomic_write_file(config.paths.sessions / "manifest.json", manifest.dump(2) + "\n");
    out << "simulate: wrote " << plans.size() << " sessions\n";
    return 0;
}

int cmd_validate(const RunConfig& config, int jobs, std::ostream& out) {
    std::vector<std::string> files = list_files(config.paths.sessions, ".jsonl");
    std::vector<std::string> verdicts(files.size());  // "" = accepted
    parallel_for(files.size(), jobs, [&](size_t i) {
        try {
            sessions::SessionLog log =
                sessions::read_session(config.paths.sessions / files[i]);
            sessions::GazeCoverage cov = sessions::validate_gaze_coverage(log);
            if (!cov.acceptable) {
                char buf[96];
                std::snprintf(buf, sizeof buf,
                              "gaze coverage: %.4f of samples missing (limit 0.40)",
                              cov.missing_fraction);
                verdicts[i] = buf;
            }
        } catch (const std::exception& e) {
            verdicts[i] = e.what();
        }
    });

    json manifest;
    manifest["accepted"] = json::array();
    manifest["rejected"] = json::array();
    size_t rejects = 0;
    for (size_t i = 0; i < files.size(); ++i) {
        if (verdicts[i].empty()) {
            manifest["accepted"].push_back(files[i]);
        } else {
            manifest["rejected"].push_back({{"file", files[i]}, {"reason", verdicts[i]}});
            out << "validate: rejected " << files[i] << ": " << verdicts[i] << "\n";
            ++rejects;
        }
    }
    atomic_write_file(validation_manifest(config), manifest.dump(2) + "\n");
    out << "validate: " << files.size() - rejects << " accepted, " << rejects << " rejected\n";
    return 0;
}

namespace {

struct SessionDigest {
    std::string file;
    std::string key;  // file stem, e.g. "p000_t07"
    std::string participant_id;
    int trial_id = 0;
    std::string agent;
    std::string layout;
    int score = 0;
    int trust = -1;
};

std::vector<std::string> accepted_sessions(const RunConfig& config) {
    std::filesystem::path path = validation_manifest(config);
    if (!std::filesystem::exists(path))
        throw ConfigError("featurize: " + path.string() +
                          " not found; run 'validate' first");
    json manifest;
    try {
        manifest = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("validation manifest: " + std::string(e.what()));
    }
    std::vector<std::string> files;
    for (const auto& f : manifest.at("accepted")) files.push_back(f.get<std::string>());
    return files;
}

}  // namespace

int cmd_featurize(const RunConfig& config, int jobs, bool dry_run, std::ostream& out) {
    std::vector<std::string> files = accepted_sessions(config);
    out << "featurize: " << files.size() << " sessions x " << config.featurize_kinds.size()
        << " kinds x " << config.featurize_windows.size() << " windows -> "
        << config.paths.features.string() << "\n";
    if (dry_run) return 0;

    // First pass: light per-session facts, enough to bin proficiency within
    // each agent-layout group.
    std::vector<SessionDigest> digests(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), jobs, [&](size_t i) {
        try {
            sessions::SessionLog log =
                sessions::read_session(config.paths.sessions / files[i]);
            SessionDigest& d = digests[i];
            d.file = files[i];
            d.key = std::filesystem::path(files[i]).stem().string();
            d.participant_id = log.meta.participant_id;
            d.trial_id = log.meta.trial_id;
            d.agent = log.meta.agent;
            d.layout = log.meta.layout;
            d.score = labels::final_score(log);
            d.trust = log.survey.present() ? labels::trust_label(log) : -1;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::map<std::string, std::vector<std::pair<std::string, int>>> group_scores;
    for (size_t i = 0; i < files.size(); ++i)
        if (errors[i].empty())
            group_scores[digests[i].agent + "/" + digests[i].layout].emplace_back(
                digests[i].key, digests[i].score);
    std::map<std::string, int> bins;  // session key -> tertile
    for (const auto& [group, scores] : group_scores) {
        try {
            for (const auto& [key, bin] : labels::proficiency_bins(scores, group))
                bins[key] = bin;
        } catch (const ValidationError& e) {
            out << "featurize: no proficiency labels for group " << group << " ("
                << e.what() << ")\n";
        }
    }

    // Second pass: build and write every (kind, window) archive plus the
    // per-session label sidecar.  A bad session stops only itself.
    for (const features::ReprKind kind : config.featurize_kinds)
        ensure_dir(config.paths.features / features::repr_kind_name(kind));
    ensure_dir(config.paths.features / "labels");
    parallel_for(files.size(), jobs, [&](size_t i) {
        if (!errors[i].empty()) return;
        const SessionDigest& d = digests[i];
        try {
            sessions::SessionLog log =
                sessions::read_session(config.paths.sessions / files[i]);
            const gridworld::Layout& layout = gridworld::builtin_layout(log.meta.layout);
            sessions::ViewportMap viewport =
                sessions::default_viewport(layout.rows, layout.cols);
            int proficiency = bins.count(d.key) ? bins.at(d.key) : -1;

            for (const features::ReprKind kind : config.featurize_kinds)
                for (const features::WindowSpec& window : config.featurize_windows) {
                    features::Representation rep =
                        features::build_representation(log, window, kind, viewport);
                    features::FeatureMeta meta;
                    meta.participant_id = d.participant_id;
                    meta.trial_id = d.trial_id;
                    meta.layout = d.layout;
                    meta.agent = d.agent;
                    meta.kind = features::repr_kind_name(kind);
                    meta.window = window;
                    meta.trust = d.trust;
                    meta.proficiency = proficiency;
                    meta.intent = labels::intent_labels(log, window);
                    features::write_feature(config.paths.features / meta.kind /
                                                (d.key + "_" + window_tag(window)),
                                            rep, meta);
                }
            atomic_write_file(config.paths.features / "labels" / (d.key + ".json"),
                              labels::label_sidecar(log, proficiency));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    json manifest;
    manifest["featurized"] = json::array();
    manifest["errors"] = json::array();
    size_t failed = 0;
    for (size_t i = 0; i < files.size(); ++i) {
        if (errors[i].empty()) {
            manifest["featurized"].push_back(files[i]);
        } else {
            manifest["errors"].push_back({{"file", files[i]}, {"reason", errors[i]}});
            out << "featurize: failed on " << files[i] << ": " << errors[i] << "\n";
            ++failed;
        }
    }
    atomic_write_file(config.paths.features / "manifest.json", manifest.dump(2) + "\n");
    out << "featurize: " << files.size() - failed << " sessions featurized, " << failed
        << " failed\n";
    return failed == 0 ? 0 : 1;
}

int cmd_run(const RunConfig& config, const std::string& only, int jobs, bool dry_run,
            std::ostream& out) {
    std::vector<experiments::ExperimentSpec> specs = config.experiments;
    if (!only.empty()) {
        auto it = std::find_if(specs.begin(), specs.end(),
                               [&](const auto& s) { return s.name == only; });
        if (it == specs.end())
            throw ConfigError("run: no experiment named '" + only + "' in the config");
        specs = {*it};
    }
    if (specs.empty()) {
        out << "run: no experiments configured\n";
        return 0;
    }
    for (const auto& spec : specs) {
        out << "run: " << spec.name << " (task=" << experiments::task_name(spec.task)
            << " representation=" << features::repr_kind_name(spec.representation)
            << " model=" << experiments::model_kind_name(spec.model)
            << " window=" << window_tag(spec.window);
        if (!spec.agent.empty()) out << " agent=" << spec.agent;
        if (!spec.layout.empty()) out << " layout=" << spec.layout;
        out << ")\n";
    }
    if (dry_run) return 0;

    ensure_dir(config.paths.reports);
    std::vector<std::string> failures(specs.size());
    std::vector<std::string> outcomes(specs.size());
    parallel_for(specs.size(), jobs, [&](size_t i) {
        const experiments::ExperimentSpec& spec = specs[i];
        try {
            experiments::Dataset ds = experiments::load_dataset(
                config.paths.features, spec.representation, spec.window, spec.task,
                spec.agent, spec.layout);
            if (ds.examples.empty())
                throw ConfigError("no feature archives match; run 'featurize' first");
            std::vector<std::string> ids;
            for (const auto& ex : ds.examples) ids.push_back(ex.participant_id);
            experiments::SplitSpec split = experiments::split_participants(
                ids, experiments::kStudyRatios, derive_seed(config.seed, "split"));
            experiments::ExperimentResult result =
                experiments::run_experiment(spec, ds, split);

            atomic_write_file(config.paths.reports / (spec.name + ".json"),
                              experiments::report_json(result));
            atomic_write_file(config.paths.reports / (spec.name + ".csv"),
                              experiments::report_csv(result));
            if (spec.model != experiments::ModelKind::Majority) {
                neural::Checkpoint ckpt;
                ckpt.model = experiments::model_kind_name(spec.model);
                ckpt.config = result.arch_used;
                ckpt.extra = json{{"experiment", spec.name},
                                  {"task", experiments::task_name(spec.task)},
                                  {"representation",
                                   features::repr_kind_name(spec.representation)},
                                  {"best_epoch", result.best_epoch}}
                                 .dump();
                ckpt.blobs = neural::to_blobs(result.weights);
                neural::write_checkpoint(config.paths.reports / (spec.name + ".ckpt"), ckpt);
            }
            char buf[96];
            std::snprintf(buf, sizeof buf, "final F1 %.4f (baseline %.4f, %d epochs)",
                          result.final_f1(), result.baseline_final_f1(),
                          result.epochs_trained);
            outcomes[i] = buf;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    int failed = 0;
    for (size_t i = 0; i < specs.size(); ++i) {
        if (failures[i].empty()) {
            out << "run: " << specs[i].name << ": " << outcomes[i] << "\n";
        } else {
            out << "run: " << specs[i].name << " FAILED: " << failures[i] << "\n";
            ++failed;
        }
    }
    return failed == 0 ? 0 : 1;
}

int cmd_report(const RunConfig& config, std::ostream& out) {
    std::vector<std::string> files = list_files(config.paths.reports, ".json");
    files.erase(std::remove(files.begin(), files.end(), std::string("summary.json")),
                files.end());
    if (files.empty()) {
        out << "report: nothing to summarize in " << config.paths.reports.string() << "\n";
        return 0;
    }

    struct Entry {
        std::string name, task, representation, model, agent, layout;
        double final_f1 = 0, baseline = 0;
        std::vector<double> cumulative, per_timestep;
        int window_start = 0, window_length = 0;
    };
    std::vector<Entry> entries;
    for (const std::string& file : files) {
        json doc;
        try {
            doc = json::parse(read_text_file(config.paths.reports / file));
        } catch (const json::parse_error& e) {
            throw ParseError("report " + file + ": " + std::string(e.what()));
        }
        Entry e;
        e.name = doc.at("experiment").get<std::string>();
        e.task = doc.at("task").get<std::string>();
        e.representation = doc.at("representation").get<std::string>();
        e.model = doc.at("model").get<std::string>();
        e.agent = doc.at("group").at("agent").get<std::string>();
        e.layout = doc.at("group").at("layout").get<std::string>();
        e.final_f1 = doc.at("final_f1").get<double>();
        e.baseline = doc.at("baseline_final_f1").get<double>();
        e.cumulative = doc.at("curves").at("cumulative").get<std::vector<double>>();
        e.per_timestep = doc.at("curves").at("per_timestep").get<std::vector<double>>();
        e.window_start = doc.at("window").at("start_t").get<int>();
        e.window_length = doc.at("window").at("length").get<int>();
        entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.name < b.name; });

    json summary;
    summary["experiments"] = json::array();
    for (const Entry& e : entries)
        summary["experiments"].push_back({{"experiment", e.name},
                                          {"task", e.task},
                                          {"representation", e.representation},
                                          {"model", e.model},
                                          {"agent", e.agent},
                                          {"layout", e.layout},
                                          {"final_f1", e.final_f1},
                                          {"baseline_final_f1", e.baseline}});

    // Across-group means: same task/representation/model/window, averaged
    // over the agent-layout cells.
    std::map<std::string, std::vector<const Entry*>> groups;
    for (const Entry& e : entries)
        groups[e.task + "|" + e.representation + "|" + e.model + "|" +
               std::to_string(e.window_start) + "+" + std::to_string(e.window_length)]
            .push_back(&e);
    summary["across_groups"] = json::array();
    for (const auto& [key, members] : groups) {
        const Entry& head = *members.front();
        std::vector<double> mean_cum(head.cumulative.size(), 0.0);
        std::vector<double> mean_step(head.per_timestep.size(), 0.0);
        double mean_final = 0, mean_base = 0;
        json names = json::array();
        for (const Entry* e : members) {
            if (e->cumulative.size() != mean_cum.size())
                throw ValidationError("report", "curve lengths differ within group " + key);
            for (size_t t = 0; t < mean_cum.size(); ++t) {
                mean_cum[t] += e->cumulative[t] / members.size();
                mean_step[t] += e->per_timestep[t] / members.size();
            }
            mean_final += e->final_f1 / members.size();
            mean_base += e->baseline / members.size();
            names.push_back(e->name);
        }
        summary["across_groups"].push_back({{"task", head.task},
                                            {"representation", head.representation},
                                            {"model", head.model},
                                            {"window",
                                             {{"start_t", head.window_start},
                                              {"length", head.window_length}}},
                                            {"experiments", names},
                                            {"mean_final_f1", mean_final},
                                            {"mean_baseline_final_f1", mean_base},
                                            {"mean_cumulative", mean_cum},
                                            {"mean_per_timestep", mean_step}});
    }
    atomic_write_file(config.paths.reports / "summary.json", summary.dump(2) + "\n");

    std::string csv =
        "experiment,task,representation,model,agent,layout,final_f1,baseline_final_f1\n";
    char buf[256];
    for (const Entry& e : entries) {
        std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%s,%s,%.6f,%.6f\n", e.name.c_str(),
                      e.task.c_str(), e.representation.c_str(), e.model.c_str(),
                      e.agent.c_str(), e.layout.c_str(), e.final_f1, e.baseline);
        csv += buf;
    }
    atomic_write_file(config.paths.reports / "summary.csv", csv);

    for (const Entry& e : entries) {
        std::snprintf(buf, sizeof buf, "report: %-32s %-12s %-16s %-12s F1 %.4f (baseline %.4f)",
                      e.name.c_str(), e.task.c_str(), e.representation.c_str(),
                      e.model.c_str(), e.final_f1, e.baseline);
        out << buf << "\n";
    }
    out << "report: summarized " << entries.size() << " experiments -> "
        << (config.paths.reports / "summary.json").string() << "\n";
    return 0;
}

}  // namespace og::cli
