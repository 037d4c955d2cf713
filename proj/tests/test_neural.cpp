// The from-scratch differentiable stack: matmul against a naive oracle,
// per-op backward passes under finite differences, causal masking down to
// bit-identity, the RAdam update against a scalar re-derivation, and
// checkpoint round-trips.

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/neural/checkpoint.hpp"
#include "overgaze/neural/grad_check.hpp"
#include "overgaze/neural/model.hpp"
#include "overgaze/neural/ops.hpp"
#include "overgaze/neural/optim.hpp"

using namespace og;
using namespace og::neural;

namespace {

template <typename T>
Mat<T> random_mat(int r, int c, Rng& rng, double scale = 1.0) {
    Mat<T> m(r, c);
    for (T& v : m.v) v = static_cast<T>(rng.normal() * scale);
    return m;
}

// Integer-valued random matrix: products and sums stay exact in double, so
// the oracle comparison can demand equality even if Eigen reorders terms.
Mat<double> random_int_mat(int r, int c, Rng& rng) {
    Mat<double> m(r, c);
    for (double& v : m.v) v = static_cast<double>(rng.uniform_int(7) - 3);
    return m;
}

Mat<double> naive_matmul(const Mat<double>& a, bool ta, const Mat<double>& b, bool tb) {
    int ar = ta ? a.cols : a.rows, ac = ta ? a.rows : a.cols;
    int bc = tb ? b.rows : b.cols;
    Mat<double> out(ar, bc);
    for (int i = 0; i < ar; ++i)
        for (int j = 0; j < bc; ++j) {
            double s = 0;
            for (int k = 0; k < ac; ++k)
                s += (ta ? a(k, i) : a(i, k)) * (tb ? b(j, k) : b(k, j));
            out(i, j) = s;
        }
    return out;
}

ModelConfig tiny_transformer_config() {
    ModelConfig cfg;
    cfg.d_model = 16;
    cfg.n_layers = 2;
    cfg.n_heads = 2;
    cfg.d_ff = 32;
    cfg.dropout_p = 0.0;
    cfg.max_seq_len = 8;
    cfg.input_dim = 9;
    cfg.n_classes = 4;
    return cfg;
}

}  // namespace

TEST_CASE("matmul agrees with the naive triple loop in every transpose mode") {
    Rng rng(derive_seed(31, "matmul-oracle"));
    for (int trial = 0; trial < 40; ++trial) {
        int r = 1 + rng.uniform_int(6), k = 1 + rng.uniform_int(6), c = 1 + rng.uniform_int(6);
        for (int mode = 0; mode < 4; ++mode) {
            bool ta = mode & 1, tb = mode & 2;
            Mat<double> a = ta ? random_int_mat(k, r, rng) : random_int_mat(r, k, rng);
            Mat<double> b = tb ? random_int_mat(c, k, rng) : random_int_mat(k, c, rng);
            Mat<double> want = naive_matmul(a, ta, b, tb);

            Mat<double> got;
            matmul(a, ta, b, tb, got);
            CHECK(got.v == want.v);

            // accumulate adds on top of the existing contents.
            Mat<double> acc = random_int_mat(r, c, rng);
            Mat<double> expect = acc;
            for (size_t i = 0; i < expect.v.size(); ++i) expect.v[i] += want.v[i];
            matmul(a, ta, b, tb, acc, true);
            CHECK(acc.v == expect.v);
        }
    }

    Mat<double> a(2, 3), b(2, 3), out;
    CHECK_THROWS_AS(matmul(a, false, b, false, out), Error);
    Mat<double> wrong(5, 5);
    CHECK_THROWS_AS(matmul(a, false, b, true, wrong, true), Error);
}

TEST_CASE("tape accumulates gradients through shared nodes") {
    Tape<double> tape;
    Mat<double> x(1, 3);
    x.v = {1.0, -2.0, 3.0};
    int xi = input(tape, x);
    int doubled = add(tape, xi, xi);
    int y = relu(tape, doubled);  // (2, 0, 6)
    CHECK(tape.val(y).v == std::vector<double>{2.0, 0.0, 6.0});

    // Sum into a 1x1 loss through a linear layer of ones.
    Mat<double> W(3, 1);
    W.v = {1.0, 1.0, 1.0};
    int wi = tape.push(W);
    int bi = tape.push(Mat<double>(1, 1));
    int loss = linear(tape, y, wi, bi);
    tape.backward(loss);

    // dL/dx = 2 * relu'(2x); the negative lane is clipped.
    CHECK(tape.grad(xi).v == std::vector<double>{2.0, 0.0, 2.0});
    CHECK(tape.grad(wi).v == std::vector<double>{2.0, 0.0, 6.0});
    CHECK(tape.grad(bi).v == std::vector<double>{1.0});
}

TEST_CASE("backward demands a scalar loss node") {
    Tape<double> tape;
    int x = input(tape, Mat<double>(2, 2));
    CHECK_THROWS_AS(tape.backward(x), Error);
}

TEST_CASE("causal mask lets position i see only 0..i") {
    Mat<unsigned char> m = causal_mask(3);
    CHECK(m.rows == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(m(i, j) == (j <= i ? 1 : 0));
    CHECK_THROWS_AS(causal_mask(0), Error);
}

TEST_CASE("layer norm standardizes each row before scale and shift") {
    Rng rng(derive_seed(32, "ln"));
    Tape<double> tape;
    int x = input(tape, random_mat<double>(4, 8, rng, 3.0));
    Mat<double> gamma(1, 8), beta(1, 8);
    for (int c = 0; c < 8; ++c) {
        gamma(0, c) = 1.0;
        beta(0, c) = 0.0;
    }
    int y = layer_norm(tape, x, tape.push(gamma), tape.push(beta));
    for (int r = 0; r < 4; ++r) {
        double mean = 0, var = 0;
        for (int c = 0; c < 8; ++c) mean += tape.val(y)(r, c);
        mean /= 8;
        for (int c = 0; c < 8; ++c) var += tape.val(y)(r, c) * tape.val(y)(r, c);
        var /= 8;
        CHECK(mean == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(var == doctest::Approx(1.0).epsilon(1e-4));  // eps slightly deflates it
    }
}

TEST_CASE("softmax cross entropy: hand case, masking, and input checks") {
    Tape<double> tape;
    Mat<double> logits(2, 2);
    logits.v = {1.0, 1.0, 2.0, 0.0};
    int li = input(tape, logits);
    int loss = softmax_xent(tape, li, {0, 0}, {1, 0});
    CHECK(tape.val(loss)(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    tape.backward(loss);
    const Mat<double>& dl = tape.grad(li);
    CHECK(dl(0, 0) == doctest::Approx(-0.5));
    CHECK(dl(0, 1) == doctest::Approx(0.5));
    CHECK(dl(1, 0) == 0.0);  // masked row gets no gradient
    CHECK(dl(1, 1) == 0.0);

    Tape<double> t2;
    int l2 = input(t2, logits);
    CHECK_THROWS_AS(softmax_xent(t2, l2, {0, 5}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(softmax_xent(t2, l2, {0}, {1}), ConfigError);
    CHECK_THROWS_AS(softmax_xent(t2, l2, {0, 0}, {0, 0}), Error);

    Mat<double> one(1, 2);
    one.v = {0.0, std::log(3.0)};
    Mat<double> p = softmax_rows(one);
    CHECK(p(0, 0) == doctest::Approx(0.25));
    CHECK(p(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("dropout scales survivors and is an rng-free identity in eval") {
    Rng rng(derive_seed(33, "dropout"));
    Tape<double> tape;
    Mat<double> ones(1, 20000);
    std::fill(ones.v.begin(), ones.v.end(), 1.0);
    int x = input(tape, ones);

    int y = dropout(tape, x, 0.3, true, rng);
    CHECK(y != x);
    int zeros = 0;
    const double scale = 1.0 / 0.7;
    for (double v : tape.val(y).v) {
        CHECK((v == 0.0 || v == doctest::Approx(scale)));
        if (v == 0.0) ++zeros;
    }
    CHECK(zeros > 5600);
    CHECK(zeros < 6400);

    // Backward mirrors the forward mask exactly: sum y through a weight of
    // ones so dL/dx lands at mask * scale, which equals y when x is all ones.
    Tape<double> t2;
    Rng rng2(derive_seed(33, "dropout2"));
    int x2 = input(t2, ones);
    int y2 = dropout(t2, x2, 0.5, true, rng2);
    Mat<double> W(20000, 1);
    std::fill(W.v.begin(), W.v.end(), 1.0);
    int loss = linear(t2, y2, t2.push(W), t2.push(Mat<double>(1, 1)));
    t2.backward(loss);
    for (size_t i = 0; i < ones.v.size(); ++i)
        CHECK(t2.grad(x2).v[i] == t2.val(y2).v[i]);  // mask*scale both ways

    // Eval mode returns the same node and leaves the stream untouched.
    Rng before(77);
    Tape<double> t3;
    int x3 = input(t3, ones);
    CHECK(dropout(t3, x3, 0.3, false, before) == x3);
    CHECK(dropout(t3, x3, 0.0, true, before) == x3);
    CHECK(before.next_u64() == Rng(77).next_u64());

    CHECK_THROWS_AS(dropout(t3, x3, 1.0, true, before), ConfigError);
}

TEST_CASE("mlp analytic gradients match finite differences") {
    ModelConfig cfg;
    cfg.input_dim = 7;
    cfg.n_classes = 3;
    Mlp<double> model(cfg);
    Rng rng(derive_seed(34, "mlp-gc"));
    model.init(rng);

    Mat<double> inputs = random_mat<double>(4, 7, rng);
    std::vector<int> labels{0, 1, 2, 1};
    std::vector<unsigned char> mask{1, 1, 1, 0};
    GradCheckReport report = grad_check(model, inputs, labels, mask, 1e-4);
    INFO(report.to_string());
    CHECK(report.worst < 1e-4);
    CHECK(report.groups.size() == 6);  // three affine layers
}

TEST_CASE("transformer analytic gradients match finite differences") {
    Transformer<double> model(tiny_transformer_config());
    Rng rng(derive_seed(35, "tf-gc"));
    model.init(rng);

    Mat<double> inputs = random_mat<double>(6, 9, rng);
    std::vector<int> labels{1, 0, 3, 2, 1, 0};
    std::vector<unsigned char> mask{1, 1, 0, 1, 1, 1};
    GradCheckReport report = grad_check(model, inputs, labels, mask, 1e-5);
    INFO(report.to_string());
    CHECK(report.worst < 1e-4);
}

TEST_CASE("the gradient checker flags a corrupted backward pass") {
    Transformer<double> model(tiny_transformer_config());
    Rng rng(derive_seed(36, "tf-fault"));
    model.init(rng);
    Mat<double> inputs = random_mat<double>(5, 9, rng);
    std::vector<int> labels{1, 0, 3, 2, 1};
    std::vector<unsigned char> mask{1, 1, 1, 1, 1};

    ParamStore<double> analytic = analytic_grads(model, inputs, labels, mask);
    ParamStore<double> numeric = numeric_grads(model, inputs, labels, mask, 1e-5);
    CHECK(compare_grads(analytic, numeric).worst < 1e-4);

    // Sabotage one attention projection gradient; the checker must name it.
    Mat<double>& g = analytic.at("layer0.attn.q.W");
    size_t worst_i = 0;
    for (size_t i = 0; i < g.v.size(); ++i)
        if (std::abs(g.v[i]) > std::abs(g.v[worst_i])) worst_i = i;
    REQUIRE(std::abs(g.v[worst_i]) > 1e-6);
    g.v[worst_i] = -g.v[worst_i];

    GradCheckReport bad = compare_grads(analytic, numeric);
    CHECK(bad.worst > 1e-2);
    bool named = false;
    for (const auto& group : bad.groups)
        if (group.name == "layer0.attn.q.W" && group.max_rel_err > 1e-2) named = true;
    CHECK(named);
}

TEST_CASE("causal attention is bit-identical under future changes") {
    ModelConfig cfg = tiny_transformer_config();
    Transformer<float> model(cfg);
    Rng rng(derive_seed(37, "causality"));
    model.init(rng);

    for (int trial = 0; trial < 10; ++trial) {
        int seq = 2 + rng.uniform_int(cfg.max_seq_len - 1);
        int split = rng.uniform_int(seq - 1);  // rows 0..split stay fixed
        Mat<float> a = random_mat<float>(seq, cfg.input_dim, rng);
        Mat<float> b = a;
        for (int r = split + 1; r < seq; ++r)
            for (int c = 0; c < cfg.input_dim; ++c) b(r, c) = static_cast<float>(rng.normal());

        Mat<float> la = model.logits(a);
        Mat<float> lb = model.logits(b);
        for (int r = 0; r <= split; ++r)
            CHECK(std::memcmp(&la.v[r * la.cols], &lb.v[r * lb.cols],
                              sizeof(float) * la.cols) == 0);
    }
}

TEST_CASE("eval-mode forwards are pure functions of inputs and params") {
    Transformer<float> model(tiny_transformer_config());
    Rng rng(derive_seed(38, "pure"));
    model.init(rng);
    Mat<float> x = random_mat<float>(5, 9, rng);
    Mat<float> l1 = model.logits(x);
    Mat<float> l2 = model.logits(x);
    CHECK(l1.v == l2.v);
}

TEST_CASE("sequence length and input width are validated") {
    ModelConfig cfg = tiny_transformer_config();
    Transformer<float> model(cfg);
    Rng rng(0);
    model.init(rng);
    CHECK_THROWS_AS(model.logits(Mat<float>(cfg.max_seq_len + 1, cfg.input_dim)), ConfigError);
    CHECK_THROWS_AS(model.logits(Mat<float>(3, cfg.input_dim + 1)), ConfigError);

    ModelConfig bad = cfg;
    bad.d_model = 15;  // not divisible by n_heads
    CHECK_THROWS_AS(Transformer<float>{bad}, ConfigError);
    bad = cfg;
    bad.n_classes = 1;
    CHECK_THROWS_AS(Transformer<float>{bad}, ConfigError);
    bad = cfg;
    bad.dropout_p = 1.0;
    CHECK_THROWS_AS(Transformer<float>{bad}, ConfigError);
}

TEST_CASE("param stores keep insertion order and reject duplicates") {
    ParamStore<float> store;
    store.add("b", Mat<float>(1, 2));
    store.add("a", Mat<float>(2, 2));
    CHECK(store.names() == std::vector<std::string>{"b", "a"});
    CHECK(store.scalar_count() == 6);
    CHECK_THROWS_AS(store.add("a", Mat<float>(1, 1)), ConfigError);
    CHECK_THROWS_AS(store.at("missing"), ConfigError);

    store.at("a")(1, 1) = 2.5f;
    ParamStore<double> wide = store.cast<double>();
    CHECK(wide.at("a")(1, 1) == 2.5);
    CHECK(wide.names() == store.names());
}

TEST_CASE("initialization is seed-deterministic") {
    ModelConfig cfg = tiny_transformer_config();
    Transformer<float> a(cfg), b(cfg), c(cfg);
    Rng r1(42), r2(42), r3(43);
    a.init(r1);
    b.init(r2);
    c.init(r3);
    for (const auto& name : a.params().names()) {
        CHECK(a.params().at(name).v == b.params().at(name).v);
    }
    CHECK(a.params().at("embed.W").v != c.params().at("embed.W").v);
}

TEST_CASE("radam momentum branch: two warm-up steps by hand") {
    // Minimize w²/2 from w=1 at constant lr 0.2: the first two steps stay
    // in the bias-corrected momentum branch (rho_t <= 4), giving exactly
    // w1 = 1 - 0.2 * 1.0 = 0.8 and w2 = 0.8 - 0.2 * (0.17 / 0.19).
    ParamStore<double> params;
    params.add("w", Mat<double>(1, 1));
    params.at("w")(0, 0) = 1.0;
    RAdam<double> opt;

    auto grad_now = [&]() {
        ParamStore<double> g = params.like_zeros();
        g.at("w")(0, 0) = params.at("w")(0, 0);
        return g;
    };
    ParamStore<double> g1 = grad_now();
    opt.step(params, g1, 1, 0.2);
    CHECK(params.at("w")(0, 0) == doctest::Approx(0.8).epsilon(1e-12));

    ParamStore<double> g2 = grad_now();
    opt.step(params, g2, 2, 0.2);
    CHECK(params.at("w")(0, 0) == doctest::Approx(0.6210526315789474).epsilon(1e-12));
}

TEST_CASE("radam matches a scalar re-derivation through rectification") {
    // beta2 = 0.9 pushes rho_t past 4 at t = 5, so a 10-step run covers
    // both branches.
    const double beta1 = 0.9, beta2 = 0.9, eps = 1e-8, lr = 0.1;
    ParamStore<double> params;
    params.add("w", Mat<double>(1, 1));
    params.at("w")(0, 0) = 2.0;
    RAdam<double> opt(beta1, beta2, eps);

    double w = 2.0, m = 0.0, v = 0.0;
    const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
    bool saw_momentum = false, saw_rectified = false;
    for (int t = 1; t <= 10; ++t) {
        double g = std::sin(static_cast<double>(t)) + w;  // arbitrary but shared
        ParamStore<double> grads = params.like_zeros();
        grads.at("w")(0, 0) = g;
        opt.step(params, grads, t, lr);

        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g * g;
        double b1t = std::pow(beta1, t), b2t = std::pow(beta2, t);
        double mhat = m / (1.0 - b1t);
        double rho_t = rho_inf - 2.0 * t * b2t / (1.0 - b2t);
        if (rho_t > 4.0) {
            saw_rectified = true;
            double rect = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                                    ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
            w -= lr * rect * mhat / (std::sqrt(v / (1.0 - b2t)) + eps);
        } else {
            saw_momentum = true;
            w -= lr * mhat;
        }
        CHECK(params.at("w")(0, 0) == doctest::Approx(w).epsilon(1e-12));
    }
    CHECK(saw_momentum);
    CHECK(saw_rectified);
}

TEST_CASE("radam rejects bad steps and broken gradients") {
    ParamStore<double> params;
    params.add("w", Mat<double>(1, 1));
    RAdam<double> opt;
    ParamStore<double> g = params.like_zeros();
    CHECK_THROWS_AS(opt.step(params, g, 0, 0.1), Error);

    g.at("w")(0, 0) = std::nan("");
    CHECK_THROWS_AS(opt.step(params, g, 1, 0.1), Error);
}

TEST_CASE("warmup ramps linearly and then holds the peak") {
    CHECK(lr_schedule(1, 100, 1.0) == doctest::Approx(0.01));
    CHECK(lr_schedule(50, 100, 1.0) == doctest::Approx(0.5));
    CHECK(lr_schedule(100, 100, 1.0) == 1.0);
    CHECK(lr_schedule(100000, 100, 1.0) == 1.0);
    CHECK(lr_schedule(1, 0, 0.25) == 0.25);  // no warmup configured
    CHECK_THROWS_AS(lr_schedule(0, 100, 1.0), Error);
}

TEST_CASE("train config validation") {
    TrainConfig cfg;
    cfg.lr = 1e-3;
    CHECK_NOTHROW(cfg.check());
    cfg.lr = 0;
    CHECK_THROWS_AS(cfg.check(), ConfigError);
    cfg.lr = 1e-3;
    cfg.bs = 0;
    CHECK_THROWS_AS(cfg.check(), ConfigError);
    cfg.bs = 8;
    cfg.label_smoothing = 0.1;
    CHECK_THROWS_AS(cfg.check(), ConfigError);
}

TEST_CASE("checkpoints restore weights bit-exactly") {
    auto dir = std::filesystem::temp_directory_path() / "og-test-neural";
    ensure_dir(dir);
    auto path = dir / "model.ckpt";

    ModelConfig cfg;
    cfg.input_dim = 5;
    cfg.n_classes = 3;
    Mlp<float> model(cfg);
    Rng rng(derive_seed(39, "ckpt"));
    model.init(rng);

    Checkpoint out;
    out.model = "mlp";
    out.config = cfg;
    out.extra = "{\"best_epoch\":7}";
    out.blobs = to_blobs(model.params());
    write_checkpoint(path, out);

    Checkpoint in = read_checkpoint(path);
    CHECK(in.model == "mlp");
    CHECK(in.config.input_dim == 5);
    CHECK(in.config.n_classes == 3);
    CHECK(in.config.d_model == cfg.d_model);
    CHECK(nlohmann::json::parse(in.extra) == nlohmann::json::parse(out.extra));

    Mlp<float> restored(model_config_from_json(model_config_json(in.config)));
    Rng other(999);
    restored.init(other);  // deliberately different init, then overwritten
    from_blobs(in.blobs, restored.params());
    Mat<float> x = random_mat<float>(3, 5, rng);
    CHECK(restored.logits(x).v == model.logits(x).v);

    // Wrong-shaped stores and corrupt bytes are rejected.
    ModelConfig narrow = cfg;
    narrow.input_dim = 4;
    Mlp<float> wrong(narrow);
    wrong.init(other);
    CHECK_THROWS_AS(from_blobs(in.blobs, wrong.params()), ConfigError);

    atomic_write_file(dir / "junk.ckpt", std::string("OGXXjunk"));
    CHECK_THROWS_AS(read_checkpoint(dir / "junk.ckpt"), ParseError);
    std::vector<uint8_t> bytes = read_binary_file(path);
    bytes.resize(bytes.size() / 2);
    atomic_write_file(dir / "cut.ckpt", bytes);
    CHECK_THROWS_AS(read_checkpoint(dir / "cut.ckpt"), ParseError);

    std::filesystem::remove_all(dir);
}

TEST_CASE("float training weights pass through checkpoints undamaged") {
    // f32 -> f64 blob -> f32 must be the identity on every payload value.
    Rng rng(derive_seed(40, "f32-roundtrip"));
    ParamStore<float> store;
    store.add("w", random_mat<float>(13, 7, rng, 10.0));
    auto blobs = to_blobs(store);
    ParamStore<float> back;
    back.add("w", Mat<float>(13, 7));
    from_blobs(blobs, back);
    CHECK(back.at("w").v == store.at("w").v);
}
