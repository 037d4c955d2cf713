// Run configuration and the pipeline verbs: the TOML reader, config
// validation and round planning, and a miniature simulate -> validate ->
// featurize -> run -> report round-trip on disk.

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <map>
#include <sstream>

#include "overgaze/cli/commands.hpp"
#include "overgaze/cli/config.hpp"
#include "overgaze/cli/toml.hpp"
#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/experiments/dataset.hpp"

using namespace og;
using namespace og::cli;

namespace {

const TomlValue& at(const TomlValue& table, const std::string& key) {
    const TomlValue* v = table.find(key);
    REQUIRE(v != nullptr);
    return *v;
}

}  // namespace

TEST_CASE("the toml reader covers the config grammar") {
    TomlValue root = toml_parse(
        "# run settings\n"
        "seed = 1_234\n"
        "title = \"over \\\"gaze\\\"\\n\"\n"
        "ratio = 0.5\n"
        "big = 1e3\n"
        "flag = true\n"
        "\n"
        "[paths]\n"
        "sessions = \"tmp/sessions\"  # trailing comment\n"
        "\n"
        "[dataset]\n"
        "skills = [0.1, 0.5, 0.9]\n"
        "windows = [[0, 20],\n"
        "           [200, 20]]\n"
        "\n"
        "[[experiment]]\n"
        "name = \"one\"\n"
        "\n"
        "[[experiment]]\n"
        "name = \"two\"\n");

    CHECK(at(root, "seed").as_int("seed") == 1234);
    CHECK(at(root, "title").as_string("title") == "over \"gaze\"\n");
    CHECK(at(root, "ratio").as_float("ratio") == 0.5);
    CHECK(at(root, "big").as_float("big") == 1000.0);
    CHECK(at(root, "flag").as_bool("flag"));
    CHECK(at(root, "seed").as_float("seed") == 1234.0);  // int promotes to float

    const TomlValue& paths = at(root, "paths");
    CHECK(at(paths, "sessions").as_string("paths.sessions") == "tmp/sessions");

    const auto& windows = at(at(root, "dataset"), "windows").as_array("windows");
    CHECK(windows.size() == 2);
    CHECK(windows[1].as_array("w")[0].as_int("w") == 200);

    const auto& exps = at(root, "experiment").as_array("experiment");
    CHECK(exps.size() == 2);
    CHECK(at(exps[0], "name").as_string("name") == "one");
    CHECK(at(exps[1], "name").as_string("name") == "two");

    CHECK(root.find("absent") == nullptr);
}

TEST_CASE("toml parse errors carry 1-based line numbers") {
    try {
        toml_parse("a = 1\nb = 2\n\n# ok\nc = [1,\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 5);
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }

    CHECK_THROWS_AS(toml_parse("a = 1\na = 2\n"), ParseError);
    CHECK_THROWS_AS(toml_parse("[table\n"), ParseError);
    CHECK_THROWS_AS(toml_parse("a = 1 2\n"), ParseError);
    CHECK_THROWS_AS(toml_parse("a = @\n"), ParseError);
    CHECK_THROWS_AS(toml_parse("a = \"open\n"), ParseError);
    CHECK_THROWS_AS(toml_parse("a = 5\n[a.b]\n"), ParseError);

    // Typed access failures are config errors that name the key.
    TomlValue root = toml_parse("x = 5\n");
    try {
        at(root, "x").as_string("cfg.x");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        std::string what = e.what();
        CHECK(what.find("cfg.x") != std::string::npos);
        CHECK(what.find("string") != std::string::npos);
    }
}

TEST_CASE("an empty config yields the documented defaults") {
    RunConfig cfg = parse_run_config("");
    CHECK(cfg.seed == 0);
    CHECK(cfg.paths.sessions == "data/sessions");
    CHECK(cfg.dataset.participants == 6);
    CHECK(cfg.dataset.skill_levels.size() == 3);
    CHECK(cfg.dataset.agents == std::vector<std::string>{"random", "rigid", "adaptive"});
    CHECK(cfg.dataset.layouts.size() == 3);
    CHECK(cfg.dataset.rounds_per_participant() == 18);
    CHECK(cfg.featurize_kinds.size() == 5);
    CHECK(cfg.featurize_windows.size() == 2);
    CHECK(cfg.featurize_windows[1].start_t == 200);
    CHECK(cfg.experiments.empty());
}

TEST_CASE("run configs parse fully and reject unknown keys everywhere") {
    const std::string text =
        "seed = 7\n"
        "[paths]\n"
        "sessions = \"s\"\n"
        "features = \"f\"\n"
        "reports = \"r\"\n"
        "[dataset]\n"
        "participants = 4\n"
        "skill_levels = [0.2, 0.8]\n"
        "agents = [\"rigid\"]\n"
        "layouts = [\"coordination_ring\"]\n"
        "[featurize]\n"
        "kinds = [\"game\", \"gaze_object\"]\n"
        "windows = [[100, 20]]\n"
        "[[experiment]]\n"
        "name = \"exp-a\"\n"
        "task = \"proficiency\"\n"
        "representation = \"gaze_object\"\n"
        "window = [100, 20]\n"
        "lr = 0.001\n"
        "bs = 8\n"
        "ws = 10\n"
        "epochs = 5\n"
        "agent = \"rigid\"\n"
        "layout = \"coordination_ring\"\n"
        "[[experiment]]\n"
        "name = \"exp-b\"\n"
        "task = \"intent\"\n"
        "representation = \"game\"\n"
        "window = [100, 20]\n"
        "lr = 0.001\n"
        "epochs = 5\n"
        "d_model = 32\n"
        "n_heads = 4\n";

    RunConfig cfg = parse_run_config(text);
    CHECK(cfg.seed == 7);
    CHECK(cfg.paths.features == "f");
    CHECK(cfg.dataset.participants == 4);
    CHECK(cfg.dataset.rounds_per_participant() == 2);
    CHECK(cfg.featurize_kinds.size() == 2);
    CHECK(cfg.featurize_windows.size() == 1);
    REQUIRE(cfg.experiments.size() == 2);

    // Model defaults follow the representation; seeds derive from the global.
    const auto& a = cfg.experiments[0];
    CHECK(a.model == experiments::ModelKind::Mlp);
    CHECK(a.agent == "rigid");
    CHECK(a.train.seed == derive_seed(7, "train/exp-a"));
    const auto& b = cfg.experiments[1];
    CHECK(b.model == experiments::ModelKind::Transformer);
    CHECK(b.arch.d_model == 32);
    CHECK(b.train.seed == derive_seed(7, "train/exp-b"));

    uint64_t override_seed = 99;
    RunConfig forced = parse_run_config(text, &override_seed);
    CHECK(forced.seed == 99);
    CHECK(forced.experiments[0].train.seed == derive_seed(99, "train/exp-a"));

    CHECK_THROWS_AS(parse_run_config("mystery = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[paths]\ncache = \"x\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[dataset]\nrounds = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[featurize]\nstride = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[[experiment]]\nname = \"x\"\nwidth = 3\n"), ConfigError);
}

TEST_CASE("config validation catches bad values") {
    CHECK_THROWS_AS(parse_run_config("[dataset]\nparticipants = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[dataset]\nskill_levels = [1.5]\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[dataset]\nskill_levels = []\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[dataset]\nagents = [\"chaotic\"]\n"), Error);
    CHECK_THROWS_AS(parse_run_config("[dataset]\nlayouts = [\"mystery_kitchen\"]\n"), Error);
    CHECK_THROWS_AS(parse_run_config("[featurize]\nwindows = [[0]]\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[featurize]\nwindows = [[-1, 20]]\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[featurize]\nwindows = [[0, 0]]\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[[experiment]]\ntask = \"trust\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[[experiment]]\nname = \"bad name!\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("[[experiment]]\nname = \"a\"\n"
                                     "[[experiment]]\nname = \"a\"\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("[[experiment]]\nname = \"a\"\n"
                                     "model = \"transformer\"\n"
                                     "representation = \"gaze_object\"\n"),
                    ConfigError);
}

TEST_CASE("round planning covers every pair twice with round-robin skills") {
    RunConfig cfg = parse_run_config("");
    std::vector<RoundPlan> plans = plan_rounds(cfg);
    CHECK(plans.size() == 6u * 18u);

    // Participant ids are zero-padded; skills cycle over the roster.
    CHECK(plans[0].participant_id == "p000");
    CHECK(plans.back().participant_id == "p005");
    CHECK(plans[0].skill == 0.1);
    CHECK(plans[18].skill == 0.5);
    CHECK(plans[36].skill == 0.9);
    CHECK(plans[54].skill == 0.1);

    // Agent-major pair order, two full cycles per participant.
    std::map<std::string, int> pair_counts;
    for (int r = 0; r < 18; ++r) {
        const RoundPlan& p = plans[r];
        CHECK(p.trial_id == r);
        ++pair_counts[p.agent + "/" + p.layout];
    }
    CHECK(pair_counts.size() == 9);
    for (const auto& [pair, count] : pair_counts) CHECK(count == 2);
    CHECK(plans[0].agent == "random");
    CHECK(plans[3].agent == "rigid");
    CHECK(plans[9].agent == "random");  // second cycle restarts

    CHECK(plans[7].file() == "p000_t07.jsonl");
    CHECK(plans[18 + 3].seed == derive_seed(0, "simulate/p001/t3"));

    uint64_t forced = 5;
    RunConfig seeded = parse_run_config("", &forced);
    CHECK(plan_rounds(seeded)[0].seed == derive_seed(5, "simulate/p000/t0"));
}

TEST_CASE("the pipeline verbs round-trip a miniature corpus on disk") {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / "og-test-cli";
    fs::remove_all(base);
    ensure_dir(base);

    auto config_text = [&](const fs::path& root) {
        return "seed = 17\n"
               "[paths]\n"
               "sessions = \"" + (root / "sessions").string() + "\"\n"
               "features = \"" + (root / "features").string() + "\"\n"
               "reports = \"" + (root / "reports").string() + "\"\n"
               "[dataset]\n"
               "participants = 3\n"
               "skill_levels = [0.3, 0.8]\n"
               "agents = [\"random\"]\n"
               "layouts = [\"coordination_ring\"]\n"
               "[featurize]\n"
               "kinds = [\"gaze_object\"]\n"
               "windows = [[0, 20]]\n"
               "[[experiment]]\n"
               "name = \"tiny-prof\"\n"
               "task = \"proficiency\"\n"
               "representation = \"gaze_object\"\n"
               "window = [0, 20]\n"
               "lr = 0.01\n"
               "bs = 2\n"
               "ws = 2\n"
               "epochs = 3\n"
               "[[experiment]]\n"
               "name = \"tiny-base\"\n"
               "task = \"proficiency\"\n"
               "representation = \"gaze_object\"\n"
               "model = \"majority\"\n"
               "window = [0, 20]\n";
    };
    RunConfig cfg = parse_run_config(config_text(base / "a"));
    std::ostringstream log;

    // Dry runs only narrate.
    CHECK(cmd_simulate(cfg, 1, true, log) == 0);
    CHECK_FALSE(fs::exists(cfg.paths.sessions));

    // Featurize before validate is an ordering error.
    CHECK_THROWS_AS(cmd_featurize(cfg, 1, false, log), ConfigError);

    CHECK(cmd_simulate(cfg, 1, false, log) == 0);
    CHECK(list_files(cfg.paths.sessions, ".jsonl").size() == 6);
    nlohmann::json manifest =
        nlohmann::json::parse(read_text_file(cfg.paths.sessions / "manifest.json"));
    CHECK(manifest.at("sessions").size() == 6);
    CHECK(manifest.at("sessions")[0].at("file") == "p000_t00.jsonl");

    CHECK(cmd_validate(cfg, 1, log) == 0);
    nlohmann::json verdicts =
        nlohmann::json::parse(read_text_file(cfg.paths.sessions / "validation.json"));
    CHECK(verdicts.at("accepted").size() == 6);
    CHECK(verdicts.at("rejected").empty());

    CHECK(cmd_featurize(cfg, 1, false, log) == 0);
    CHECK(list_files(cfg.paths.features / "gaze_object", ".ogt").size() == 6);
    CHECK(list_files(cfg.paths.features / "labels", ".json").size() == 6);

    // The archives feed straight into a dataset with proficiency labels.
    experiments::Dataset ds =
        experiments::load_dataset(cfg.paths.features, features::ReprKind::GazeObject,
                                  features::WindowSpec{0, 20}, experiments::Task::Proficiency,
                                  "", "");
    CHECK(ds.examples.size() == 6);
    CHECK(ds.input_dim == 3);
    for (const auto& ex : ds.examples) {
        CHECK(ex.labels[0] >= 0);
        CHECK(ex.labels[0] <= 2);
    }

    CHECK_THROWS_AS(cmd_run(cfg, "absent-experiment", 1, false, log), ConfigError);
    CHECK(cmd_run(cfg, "", 1, false, log) == 0);
    CHECK(fs::exists(cfg.paths.reports / "tiny-prof.json"));
    CHECK(fs::exists(cfg.paths.reports / "tiny-prof.csv"));
    CHECK(fs::exists(cfg.paths.reports / "tiny-prof.ckpt"));
    CHECK(fs::exists(cfg.paths.reports / "tiny-base.json"));
    CHECK_FALSE(fs::exists(cfg.paths.reports / "tiny-base.ckpt"));  // no weights

    CHECK(cmd_report(cfg, log) == 0);
    nlohmann::json summary =
        nlohmann::json::parse(read_text_file(cfg.paths.reports / "summary.json"));
    CHECK(summary.at("experiments").size() == 2);
    CHECK(fs::exists(cfg.paths.reports / "summary.csv"));

    // Same config, fresh directory: the corpus is reproduced byte for byte.
    RunConfig cfg2 = parse_run_config(config_text(base / "b"));
    CHECK(cmd_simulate(cfg2, 1, false, log) == 0);
    CHECK(read_text_file(cfg2.paths.sessions / "p002_t01.jsonl") ==
          read_text_file(cfg.paths.sessions / "p002_t01.jsonl"));

    // A corrupted session is rejected by name, others stay accepted.
    fs::path victim = cfg.paths.sessions / "p000_t00.jsonl";
    atomic_write_file(victim, read_text_file(victim) + "not json\n");
    CHECK(cmd_validate(cfg, 1, log) == 0);
    verdicts = nlohmann::json::parse(read_text_file(cfg.paths.sessions / "validation.json"));
    CHECK(verdicts.at("accepted").size() == 5);
    REQUIRE(verdicts.at("rejected").size() == 1);
    CHECK(verdicts.at("rejected")[0].at("file") == "p000_t00.jsonl");

    fs::remove_all(base);
}
