// Feature extraction: the lossless 27-channel state encoding and its exact
// inverse, gaze preprocessing and heatmaps, the five window representations,
// and the binary tensor archive.

#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/features/archive.hpp"
#include "overgaze/features/encoding.hpp"
#include "overgaze/features/gaze_features.hpp"
#include "overgaze/features/representation.hpp"
#include "overgaze/gridworld/simulate.hpp"
#include "overgaze/gridworld/step.hpp"

using namespace og;
using namespace og::features;
using namespace og::gridworld;
using sessions::GazeSample;
using sessions::PixelPoint;
using sessions::SessionLog;
using sessions::ViewportMap;

namespace {

GazeSample sample_at(double x, double y) {
    GazeSample g;
    g.left = PixelPoint{x, y};
    g.right = PixelPoint{x, y};
    return g;
}

SessionLog demo_session(const char* layout, double skill, uint64_t salt) {
    SimConfig cfg;
    cfg.layout = layout;
    cfg.agent = PolicyKind::Rigid;
    cfg.skill = skill;
    cfg.participant_id = "p007";
    cfg.trial_id = 1;
    cfg.seed = derive_seed(salt, "features-demo");
    return simulate_session(cfg);
}

}  // namespace

TEST_CASE("encode/decode inverts every state of a random walk") {
    for (const std::string& name : builtin_layout_names()) {
        const Layout& lay = builtin_layout(name);
        Rng rng(derive_seed(17, "encode-fuzz/" + name));
        GameState s = initial_state(lay);
        for (int t = 0; t < kRoundSteps; ++t) {
            StateEncoding enc = encode_state(s, lay);
            CHECK(decode_state(enc, lay) == s);
            Action a0 = static_cast<Action>(rng.uniform_int(kNumActions));
            Action a1 = static_cast<Action>(rng.uniform_int(kNumActions));
            s = step(s, lay, {a0, a1}).state;
        }
    }
}

TEST_CASE("encoding channels carry the documented content") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    s.players[0].pos = {1, 1};
    s.players[0].dir = Orientation::Left;
    s.players[0].held = Item::Onion;
    s.players[1].pos = {3, 3};
    s.players[1].dir = Orientation::Right;
    s.players[1].held = Item::None;
    s.pots[{0, 2}] = {3, 7};  // cooking
    s.counters[{2, 2}] = Item::Soup;
    s.score = 40;
    s.t = 123;

    StateEncoding enc = encode_state(s, lay);
    CHECK(enc.rows == 5);
    CHECK(enc.cols == 5);

    CHECK(enc.at(1, 1, 0) == 1.0);  // player 0 position
    CHECK(enc.at(3, 3, 1) == 1.0);  // player 1 position
    CHECK(enc.at(1, 1, 1) == 0.0);
    CHECK(enc.at(1, 1, 2 + 2) == 1.0);      // player 0 facing left
    CHECK(enc.at(3, 3, 6 + 3) == 1.0);      // player 1 facing right
    CHECK(enc.at(1, 1, 10) == 1.0);         // held onion at the holder
    CHECK(enc.at(3, 3, 10) == 0.0);
    CHECK(enc.at(2, 2, 13) == 1.0);         // soup on counter (duplicate mask)
    CHECK(enc.at(2, 2, 24) == 1.0);
    CHECK(enc.at(2, 2, 14) == 1.0);         // counter static mask
    CHECK(enc.at(0, 2, 17) == 1.0);         // pot static mask
    CHECK(enc.at(0, 2, 19) == 3.0);         // onions in the pot
    CHECK(enc.at(0, 2, 20) == 7.0);         // cook timer remaining
    CHECK(enc.at(0, 2, 21) == 0.0);         // not done yet
    CHECK(enc.at(4, 4, 25) == 40.0 / kRoundSteps);  // score plane, broadcast
    CHECK(enc.at(0, 0, 26) == 123.0 / kRoundSteps);
    CHECK(decode_state(enc, lay) == s);

    // A finished pot flips ch21 and zeroes the timer channel.
    s.pots[{0, 2}] = {3, 0};
    enc = encode_state(s, lay);
    CHECK(enc.at(0, 2, 20) == 0.0);
    CHECK(enc.at(0, 2, 21) == 1.0);
    CHECK(decode_state(enc, lay) == s);
}

TEST_CASE("decode rejects grids no real state produces") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    s.players[0].held = Item::Dish;
    const StateEncoding clean = encode_state(s, lay);
    REQUIRE_NOTHROW(decode_state(clean, lay));

    auto corrupt = [&](auto&& mutate) {
        StateEncoding enc = clean;
        mutate(enc);
        CHECK_THROWS_AS(decode_state(enc, lay), ValidationError);
    };

    corrupt([](StateEncoding& e) { e.at(3, 2, 0) = 1.0; });   // two player-0 marks
    corrupt([&](StateEncoding& e) { e.at(s.players[0].pos.r, s.players[0].pos.c, 0) = 0.0; });
    corrupt([](StateEncoding& e) { e.at(1, 1, 0) = 0.5; });   // non-binary mask
    corrupt([&](StateEncoding& e) {                           // second orientation
        int other = 2 + (static_cast<int>(s.players[0].dir) + 1) % 4;
        e.at(s.players[0].pos.r, s.players[0].pos.c, other) = 1.0;
    });
    corrupt([&](StateEncoding& e) {                           // orientation away from the player
        int ch = 2 + static_cast<int>(s.players[0].dir);
        e.at(s.players[0].pos.r, s.players[0].pos.c, ch) = 0.0;
        e.at(3, 2, ch) = 1.0;
    });
    corrupt([&](StateEncoding& e) {                           // player with no orientation
        e.at(s.players[0].pos.r, s.players[0].pos.c, 2 + static_cast<int>(s.players[0].dir)) = 0.0;
    });
    corrupt([](StateEncoding& e) { e.at(3, 2, 10) = 1.0; });  // held item on empty floor
    corrupt([&](StateEncoding& e) {                           // two held items on one player
        e.at(s.players[0].pos.r, s.players[0].pos.c, 12) = 1.0;
    });
    corrupt([](StateEncoding& e) { e.at(2, 2, 14) = 0.0; });  // static mask flip
    corrupt([](StateEncoding& e) { e.at(1, 2, 19) = 1.0; });  // onions off a pot tile
    corrupt([](StateEncoding& e) { e.at(0, 2, 19) = 2.5; });  // fractional onion count
    corrupt([](StateEncoding& e) { e.at(0, 2, 20) = 5.0; });  // timer without three onions
    corrupt([](StateEncoding& e) { e.at(1, 2, 22) = 1.0; });  // loose onion on a floor tile
    corrupt([](StateEncoding& e) { e.at(2, 2, 24) = 1.0; });  // soup on counter, ch13 clear
    corrupt([](StateEncoding& e) { e.at(4, 1, 25) = 0.5; });  // broadcast not uniform
    corrupt([](StateEncoding& e) { e.at(0, 0, 26) = -0.1; }); // negative time plane

    // Shape mismatch against a different layout.
    CHECK_THROWS_AS(decode_state(clean, builtin_layout("counter_circuit")), ValidationError);
}

TEST_CASE("gaze preprocessing averages eyes and maps pixels to tiles") {
    ViewportMap vp = sessions::default_viewport(5, 5);  // origin (835, 415)

    // Both eyes straddling a point average onto its tile.
    GazeSample both;
    both.left = PixelPoint{835.0 + 70.0, 415.0 + 20.0};
    both.right = PixelPoint{835.0 + 80.0, 415.0 + 30.0};
    CHECK(preprocess_gaze(both, vp) == Coord{0, 1});

    // One eye missing: the reporting eye decides alone.
    GazeSample left_only;
    left_only.left = PixelPoint{835.0 + 220.0, 415.0 + 120.0};
    CHECK(preprocess_gaze(left_only, vp) == Coord{2, 4});
    GazeSample right_only;
    right_only.right = left_only.left;
    CHECK(preprocess_gaze(right_only, vp) == Coord{2, 4});

    // Tile boundaries are half-open: 49.999 is column 0, 50.0 is column 1.
    CHECK(preprocess_gaze(sample_at(835.0 + 49.999, 415.0), vp) == Coord{0, 0});
    CHECK(preprocess_gaze(sample_at(835.0 + 50.0, 415.0), vp) == Coord{0, 1});

    // Off-grid or absent samples vanish.
    CHECK_FALSE(preprocess_gaze(sample_at(834.999, 500.0), vp).has_value());
    CHECK_FALSE(preprocess_gaze(sample_at(835.0 + 250.0, 500.0), vp).has_value());
    CHECK_FALSE(preprocess_gaze(sample_at(900.0, 415.0 + 250.0), vp).has_value());
    CHECK_FALSE(preprocess_gaze(GazeSample{}, vp).has_value());
}

TEST_CASE("heatmaps are valid-sample frequencies") {
    ViewportMap vp = sessions::default_viewport(3, 3);
    auto center = [&](int r, int c) {
        return sample_at(vp.origin_x + (c + 0.5) * vp.tile_px,
                         vp.origin_y + (r + 0.5) * vp.tile_px);
    };

    std::vector<GazeSample> samples = {center(0, 0), center(0, 0), center(1, 2),
                                       center(2, 1), sample_at(0.0, 0.0), GazeSample{}};
    GazeHeatmap map = gaze_heatmap(samples, vp, 3, 3);
    CHECK(map.at(0, 0) == 0.5);  // off-grid and null samples shrink the denominator
    CHECK(map.at(1, 2) == 0.25);
    CHECK(map.at(2, 1) == 0.25);
    CHECK(std::accumulate(map.grid.begin(), map.grid.end(), 0.0) == doctest::Approx(1.0));

    GazeHeatmap empty = gaze_heatmap(std::vector<GazeSample>{GazeSample{}}, vp, 3, 3);
    for (double v : empty.grid) CHECK(v == 0.0);
}

TEST_CASE("object ratios split valid samples into own/teammate/environment") {
    const Layout& lay = builtin_layout("coordination_ring");
    ViewportMap vp = sessions::default_viewport(lay.rows, lay.cols);
    GameState s = initial_state(lay);  // players at (1,1) and (1,3)
    auto center = [&](int r, int c) {
        return sample_at(vp.origin_x + (c + 0.5) * vp.tile_px,
                         vp.origin_y + (r + 0.5) * vp.tile_px);
    };

    std::vector<GazeSample> samples = {center(1, 1), center(1, 1), center(1, 1),
                                       center(1, 3), center(0, 2), center(3, 3),
                                       GazeSample{}};
    std::array<double, 3> ratios = gaze_object_ratios(samples, s, vp);
    CHECK(ratios[0] == 0.5);
    CHECK(ratios[1] == doctest::Approx(1.0 / 6.0));
    CHECK(ratios[2] == doctest::Approx(2.0 / 6.0));

    std::array<double, 3> none = gaze_object_ratios(std::vector<GazeSample>{}, s, vp);
    CHECK(none == std::array<double, 3>{0.0, 0.0, 0.0});
}

TEST_CASE("gaze slices partition the synthetic stream 60 per timestep") {
    SessionLog log = demo_session("coordination_ring", 0.5, 31);
    auto slices = gaze_slices(log);
    REQUIRE(slices.size() == static_cast<size_t>(kRoundSteps));
    size_t expect_begin = 0;
    for (size_t t = 0; t < slices.size(); ++t) {
        CHECK(slices[t].first == expect_begin);
        CHECK(slices[t].second - slices[t].first == static_cast<size_t>(kGazePerStep));
        expect_begin = slices[t].second;
    }
    CHECK(expect_begin == log.gaze.size());
}

TEST_CASE("gaze slices follow timestamps, not sample counts") {
    SessionLog log = demo_session("coordination_ring", 0.5, 32);
    // Rewrite the stream: two samples in step 0, one exactly at the round
    // end (kept, closed on the right), one beyond it (dropped).
    log.gaze.clear();
    GazeSample g;
    g.left = PixelPoint{900.0, 500.0};
    g.ts_us = 0;
    log.gaze.push_back(g);
    g.ts_us = kStepMicros - 1;
    log.gaze.push_back(g);
    g.ts_us = static_cast<int64_t>(kRoundSteps - 1) * kStepMicros;
    log.gaze.push_back(g);
    g.ts_us = static_cast<int64_t>(kRoundSteps) * kStepMicros;  // exact round end
    log.gaze.push_back(g);
    g.ts_us = static_cast<int64_t>(kRoundSteps) * kStepMicros + 1;
    log.gaze.push_back(g);

    auto slices = gaze_slices(log);
    CHECK(slices[0] == std::pair<size_t, size_t>{0, 2});
    CHECK(slices[1] == std::pair<size_t, size_t>{2, 2});  // empty middle slices
    CHECK(slices[kRoundSteps - 1] == std::pair<size_t, size_t>{2, 4});
}

TEST_CASE("the five representations have the documented shapes and content") {
    SessionLog log = demo_session("coordination_ring", 0.8, 33);
    const Layout& lay = builtin_layout(log.meta.layout);
    ViewportMap vp = sessions::default_viewport(lay.rows, lay.cols);
    const WindowSpec win{100, 20};
    const int H = lay.rows, W = lay.cols;

    Representation game = build_representation(log, win, ReprKind::Game, vp);
    CHECK(game.shape == std::vector<int>{20, H, W, kStateChannels});
    CHECK(game.size() == static_cast<size_t>(20) * H * W * kStateChannels);

    Representation gaze = build_representation(log, win, ReprKind::Gaze, vp);
    CHECK(gaze.shape == std::vector<int>{20, H, W});

    Representation both = build_representation(log, win, ReprKind::GamePlusGaze, vp);
    CHECK(both.shape == std::vector<int>{20, H, W, kStateChannels + 1});

    Representation collapsed = build_representation(log, win, ReprKind::CollapsedGaze, vp);
    CHECK(collapsed.shape == std::vector<int>{H, W});

    Representation object = build_representation(log, win, ReprKind::GazeObject, vp);
    CHECK(object.shape == std::vector<int>{3});

    const size_t cells = static_cast<size_t>(H) * W;
    for (int t = 0; t < win.length; ++t) {
        // Game frames are exactly the per-state encodings.
        StateEncoding enc = encode_state(log.game[win.start_t + t].state, lay);
        for (size_t i = 0; i < cells * kStateChannels; ++i)
            CHECK(game.data[t * cells * kStateChannels + i] == enc.grid[i]);

        // Heatmap frames sum to one (or are all-zero when no sample lands).
        double sum = 0.0;
        for (size_t i = 0; i < cells; ++i) {
            double v = gaze.data[t * cells + i];
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            sum += v;
        }
        CHECK((sum == doctest::Approx(1.0).epsilon(1e-9) || sum == 0.0));

        // The combined tensor interleaves 27 game channels + 1 gaze channel.
        for (size_t cell = 0; cell < cells; ++cell) {
            size_t base = (t * cells + cell) * (kStateChannels + 1);
            for (int ch = 0; ch < kStateChannels; ++ch)
                CHECK(both.data[base + ch] == enc.grid[cell * kStateChannels + ch]);
            CHECK(both.data[base + kStateChannels] == gaze.data[t * cells + cell]);
        }
    }

    // Collapsed gaze is the arithmetic mean of the per-timestep heatmaps.
    for (size_t cell = 0; cell < cells; ++cell) {
        double mean = 0.0;
        for (int t = 0; t < win.length; ++t) mean += gaze.data[t * cells + cell];
        mean /= win.length;
        CHECK(collapsed.data[cell] == doctest::Approx(mean).epsilon(1e-12));
    }

    // Object ratios are the mean over timesteps that saw any valid sample.
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    int populated = 0;
    auto slices = gaze_slices(log);
    for (int t = win.start_t; t < win.start_t + win.length; ++t) {
        auto [b, e] = slices[t];
        std::span<const GazeSample> span(log.gaze.data() + b, e - b);
        auto r = gaze_object_ratios(span, log.game[t].state, vp);
        if (r[0] + r[1] + r[2] == 0.0) continue;
        for (int i = 0; i < 3; ++i) acc[i] += r[i];
        ++populated;
    }
    REQUIRE(populated > 0);
    for (int i = 0; i < 3; ++i)
        CHECK(object.data[i] == doctest::Approx(acc[i] / populated).epsilon(1e-12));
    CHECK(object.data[0] + object.data[1] + object.data[2] == doctest::Approx(1.0));
}

TEST_CASE("windows must fit inside the round") {
    CHECK_NOTHROW(check_window({0, 20}, kRoundSteps));
    CHECK_NOTHROW(check_window({380, 20}, kRoundSteps));
    CHECK_NOTHROW(check_window({0, kRoundSteps}, kRoundSteps));
    CHECK_THROWS_AS(check_window({-1, 20}, kRoundSteps), ValidationError);
    CHECK_THROWS_AS(check_window({0, 0}, kRoundSteps), ValidationError);
    CHECK_THROWS_AS(check_window({381, 20}, kRoundSteps), ValidationError);
    CHECK_THROWS_AS(check_window({400, 1}, kRoundSteps), ValidationError);
}

TEST_CASE("representation kind names round-trip") {
    for (int k = 0; k < kNumReprKinds; ++k) {
        ReprKind kind = static_cast<ReprKind>(k);
        CHECK(repr_kind_from_name(repr_kind_name(kind)) == kind);
    }
    CHECK(repr_is_sequence(ReprKind::Game));
    CHECK(repr_is_sequence(ReprKind::Gaze));
    CHECK(repr_is_sequence(ReprKind::GamePlusGaze));
    CHECK_FALSE(repr_is_sequence(ReprKind::CollapsedGaze));
    CHECK_FALSE(repr_is_sequence(ReprKind::GazeObject));
    CHECK_THROWS_AS(repr_kind_from_name("telepathy"), ValidationError);
}

TEST_CASE("tensor archives round-trip shape, payload, and sidecar") {
    auto dir = std::filesystem::temp_directory_path() / "og-test-features";
    ensure_dir(dir);

    std::vector<int> shape{2, 3, 4};
    std::vector<double> data(24);
    Rng rng(derive_seed(7, "archive"));
    for (double& v : data) v = rng.normal();

    write_tensor(dir / "t.ogt", shape, data);
    Tensor t = read_tensor(dir / "t.ogt");
    CHECK(t.shape == shape);
    REQUIRE(t.data.size() == data.size());
    for (size_t i = 0; i < data.size(); ++i)
        CHECK(t.data[i] == static_cast<float>(data[i]));  // f32 storage, bit-exact

    FeatureMeta meta;
    meta.participant_id = "p012";
    meta.trial_id = 4;
    meta.layout = "coordination_ring";
    meta.agent = "adaptive";
    meta.kind = "gaze_object";
    meta.window = {200, 20};
    meta.trust = 5;
    meta.proficiency = 2;
    meta.intent = {2, 2, -1};
    CHECK(meta.key() == "p012/4/gaze_object/200+20");

    Representation rep;
    rep.kind = ReprKind::GazeObject;
    rep.shape = {3};
    rep.data = {0.25, 0.125, 0.625};
    write_feature(dir / "f", rep, meta);

    Feature f = read_feature(dir / "f");
    CHECK(f.tensor.shape == rep.shape);
    CHECK(f.tensor.data == std::vector<float>{0.25f, 0.125f, 0.625f});
    CHECK(f.meta.participant_id == meta.participant_id);
    CHECK(f.meta.trial_id == meta.trial_id);
    CHECK(f.meta.layout == meta.layout);
    CHECK(f.meta.agent == meta.agent);
    CHECK(f.meta.kind == meta.kind);
    CHECK(f.meta.window.start_t == 200);
    CHECK(f.meta.window.length == 20);
    CHECK(f.meta.trust == 5);
    CHECK(f.meta.proficiency == 2);
    CHECK(f.meta.intent == meta.intent);
    CHECK(f.meta.key() == meta.key());

    // Bad magic and truncated payloads are parse errors.
    atomic_write_file(dir / "bad.ogt", std::string("NOPE"));
    CHECK_THROWS_AS(read_tensor(dir / "bad.ogt"), ParseError);
    std::vector<uint8_t> bytes = read_binary_file(dir / "t.ogt");
    bytes.pop_back();
    atomic_write_file(dir / "cut.ogt", bytes);
    CHECK_THROWS_AS(read_tensor(dir / "cut.ogt"), ParseError);

    // Shape/payload disagreement is caught before writing.
    CHECK_THROWS_AS(write_tensor(dir / "x.ogt", {2, 2}, data), ValidationError);
    CHECK_THROWS_AS(write_tensor(dir / "x.ogt", {0}, {}), ValidationError);

    std::filesystem::remove_all(dir);
}
