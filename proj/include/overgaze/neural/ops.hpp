#pragma once

// Differentiable building blocks.  Each op pushes a node onto the tape and
// installs a closure with its hand-derived backward pass; Eigen appears only
// through matmul.  Dropout is "inverted" (activations scaled by 1/(1-p) at
// train time) and is the identity in eval mode, consuming no randomness, so
// eval-mode forwards are pure functions of (inputs, params).

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "overgaze/common/error.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/neural/tape.hpp"

namespace og::neural {

// Attention mask: entry (i, j) is 1 iff position i may attend to j (j ≤ i).
inline Mat<unsigned char> causal_mask(int seq_len) {
    if (seq_len < 1) throw Error("causal_mask: sequence length must be >= 1");
    Mat<unsigned char> m(seq_len, seq_len);
    for (int i = 0; i < seq_len; ++i)
        for (int j = 0; j <= i; ++j) m(i, j) = 1;
    return m;
}

template <typename T>
int input(Tape<T>& tape, Mat<T> x) {
    return tape.push(std::move(x));
}

// y = x·W + b (b broadcast over rows).
template <typename T>
int linear(Tape<T>& tape, int x, int W, int b) {
    const Mat<T>& xv = tape.val(x);
    const Mat<T>& wv = tape.val(W);
    const Mat<T>& bv = tape.val(b);
    if (xv.cols != wv.rows || bv.rows != 1 || bv.cols != wv.cols)
        throw ConfigError("linear: shape mismatch (input " + std::to_string(xv.cols) +
                          ", weight " + std::to_string(wv.rows) + ")");
    Mat<T> y;
    matmul(xv, false, wv, false, y);
    for (int r = 0; r < y.rows; ++r)
        for (int c = 0; c < y.cols; ++c) y(r, c) += bv(0, c);
    int id = tape.push(std::move(y));
    tape.set_back(id, [&tape, x, W, b, id]() {
        const Mat<T>& dy = tape.grad(id);
        matmul(dy, false, tape.val(W), true, tape.grad(x), true);
        matmul(tape.val(x), true, dy, false, tape.grad(W), true);
        Mat<T>& db = tape.grad(b);
        for (int r = 0; r < dy.rows; ++r)
            for (int c = 0; c < dy.cols; ++c) db(0, c) += dy(r, c);
    });
    return id;
}

template <typename T>
int relu(Tape<T>& tape, int x) {
    Mat<T> y = tape.val(x);
    for (T& v : y.v) v = v > T(0) ? v : T(0);
    int id = tape.push(std::move(y));
    tape.set_back(id, [&tape, x, id]() {
        const Mat<T>& dy = tape.grad(id);
        const Mat<T>& xv = tape.val(x);
        Mat<T>& dx = tape.grad(x);
        for (size_t i = 0; i < dy.v.size(); ++i)
            if (xv.v[i] > T(0)) dx.v[i] += dy.v[i];
    });
    return id;
}

template <typename T>
int add(Tape<T>& tape, int a, int b) {
    const Mat<T>& av = tape.val(a);
    const Mat<T>& bv = tape.val(b);
    if (!av.same_shape(bv)) throw ConfigError("add: shape mismatch");
    Mat<T> y = av;
    for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += bv.v[i];
    int id = tape.push(std::move(y));
    tape.set_back(id, [&tape, a, b, id]() {
        const Mat<T>& dy = tape.grad(id);
        Mat<T>& da = tape.grad(a);
        Mat<T>& db = tape.grad(b);
        for (size_t i = 0; i < dy.v.size(); ++i) {
            da.v[i] += dy.v[i];
            db.v[i] += dy.v[i];
        }
    });
    return id;
}

// Inverted dropout; identity (and no RNG draws) when !train or p == 0.
template <typename T>
int dropout(Tape<T>& tape, int x, double p, bool train, Rng& rng) {
    if (!train || p <= 0.0) return x;
    if (p >= 1.0) throw ConfigError("dropout: rate must be < 1");
    const Mat<T>& xv = tape.val(x);
    auto mask = std::make_shared<std::vector<T>>(xv.v.size());
    const T scale = T(1.0 / (1.0 - p));
    Mat<T> y = xv;
    for (size_t i = 0; i < y.v.size(); ++i) {
        (*mask)[i] = rng.uniform() < p ? T(0) : scale;
        y.v[i] *= (*mask)[i];
    }
    int id = tape.push(std::move(y));
    tape.set_back(id, [&tape, x, id, mask]() {
        const Mat<T>& dy = tape.grad(id);
        Mat<T>& dx = tape.grad(x);
        for (size_t i = 0; i < dy.v.size(); ++i) dx.v[i] += dy.v[i] * (*mask)[i];
    });
    return id;
}

// Per-row layer normalization with learned scale/shift.
template <typename T>
int layer_norm(Tape<T>& tape, int x, int gamma, int beta, double eps = 1e-5) {
    const Mat<T>& xv = tape.val(x);
    const Mat<T>& gv = tape.val(gamma);
    const Mat<T>& bv = tape.val(beta);
    if (gv.rows != 1 || gv.cols != xv.cols || bv.rows != 1 || bv.cols != xv.cols)
        throw ConfigError("layer_norm: scale/shift must be 1 x feature_dim");

    const int R = xv.rows, C = xv.cols;
    auto xhat = std::make_shared<Mat<T>>(R, C);
    auto inv_sd = std::make_shared<std::vector<T>>(R);
    Mat<T> y(R, C);
    for (int r = 0; r < R; ++r) {
        double mean = 0;
        for (int c = 0; c < C; ++c) mean += xv(r, c);
        mean /= C;
        double var = 0;
        for (int c = 0; c < C; ++c) {
            double d = double(xv(r, c)) - mean;
            var += d * d;
        }
        var /= C;
        T is = T(1.0 / std::sqrt(var + eps));
        (*inv_sd)[r] = is;
        for (int c = 0; c < C; ++c) {
            (*xhat)(r, c) = (xv(r, c) - T(mean)) * is;
            y(r, c) = (*xhat)(r, c) * gv(0, c) + bv(0, c);
        }
    }
    int id = tape.push(std::move(y));
    tape.set_back(id, [&tape, x, gamma, beta, id, xhat, inv_sd]() {
        const Mat<T>& dy = tape.grad(id);
        const Mat<T>& gv = tape.val(gamma);
        Mat<T>& dx = tape.grad(x);
        Mat<T>& dg = tape.grad(gamma);
        Mat<T>& db = tape.grad(beta);
        const int R = dy.rows, C = dy.cols;
        for (int r = 0; r < R; ++r) {
            double sum_dxhat = 0, sum_dxhat_xhat = 0;
            for (int c = 0; c < C; ++c) {
                T dyv = dy(r, c);
                db(0, c) += dyv;
                dg(0, c) += dyv * (*xhat)(r, c);
                double dxhat = double(dyv) * gv(0, c);
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * (*xhat)(r, c);
            }
            for (int c = 0; c < C; ++c) {
                double dxhat = double(dy(r, c)) * gv(0, c);
                dx(r, c) += T(double((*inv_sd)[r]) *
                              (dxhat - sum_dxhat / C - double((*xhat)(r, c)) * sum_dxhat_xhat / C));
            }
        }
    });
    return id;
}

// Fused causal multi-head self-attention.  Attention weights are dropped out
// at `dropout_p` in train mode, the same rate as the residual dropout.
template <typename T>
int causal_self_attention(Tape<T>& tape, int x, int Wq, int bq, int Wk, int bk, int Wv, int bv,
                          int Wo, int bo, int n_heads, double dropout_p, bool train, Rng& rng) {
    const Mat<T>& xv = tape.val(x);
    const int S = xv.rows, D = xv.cols;
    if (D % n_heads != 0) throw ConfigError("attention: d_model not divisible by n_heads");
    const int dk = D / n_heads;
    const T inv_sqrt_dk = T(1.0 / std::sqrt(double(dk)));

    auto project = [&](int W, int b) {
        Mat<T> out;
        matmul(xv, false, tape.val(W), false, out);
        const Mat<T>& bias = tape.val(b);
        for (int r = 0; r < out.rows; ++r)
            for (int c = 0; c < out.cols; ++c) out(r, c) += bias(0, c);
        return out;
    };
    auto Q = std::make_shared<Mat<T>>(project(Wq, bq));
    auto K = std::make_shared<Mat<T>>(project(Wk, bk));
    auto V = std::make_shared<Mat<T>>(project(Wv, bv));

    auto attn = std::make_shared<std::vector<Mat<T>>>();  // post-softmax weights
    auto keep = std::make_shared<std::vector<Mat<T>>>();  // dropout multipliers
    auto Z = std::make_shared<Mat<T>>(S, D);
    const T scale = T(dropout_p > 0 ? 1.0 / (1.0 - dropout_p) : 1.0);

    for (int h = 0; h < n_heads; ++h) {
        Mat<T> A(S, S), M(S, S);
        for (int i = 0; i < S; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (int j = 0; j <= i; ++j) {
                double s = 0;
                for (int c = 0; c < dk; ++c)
                    s += double((*Q)(i, h * dk + c)) * double((*K)(j, h * dk + c));
                s *= double(inv_sqrt_dk);
                A(i, j) = T(s);
                mx = std::max(mx, s);
            }
            double denom = 0;
            for (int j = 0; j <= i; ++j) denom += std::exp(double(A(i, j)) - mx);
            for (int j = 0; j <= i; ++j) A(i, j) = T(std::exp(double(A(i, j)) - mx) / denom);
            for (int j = 0; j <= i; ++j)
                M(i, j) = (train && dropout_p > 0) ? (rng.uniform() < dropout_p ? T(0) : scale)
                                                   : T(1);
        }
        for (int i = 0; i < S; ++i)
            for (int c = 0; c < dk; ++c) {
                double z = 0;
                for (int j = 0; j <= i; ++j)
                    z += double(A(i, j)) * double(M(i, j)) * double((*V)(j, h * dk + c));
                (*Z)(i, h * dk + c) = T(z);
            }
        attn->push_back(std::move(A));
        keep->push_back(std::move(M));
    }

    Mat<T> out;
    matmul(*Z, false, tape.val(Wo), false, out);
    const Mat<T>& bov = tape.val(bo);
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c) out(r, c) += bov(0, c);
    int id = tape.push(std::move(out));

    tape.set_back(id, [&tape, x, Wq, bq, Wk, bk, Wv, bv, Wo, bo, n_heads, dk, inv_sqrt_dk, Q, K,
                       V, attn, keep, Z, id]() {
        const Mat<T>& dout = tape.grad(id);
        const int S = dout.rows, D = dout.cols;

        matmul(*Z, true, dout, false, tape.grad(Wo), true);
        Mat<T>& dbo = tape.grad(bo);
        for (int r = 0; r < S; ++r)
            for (int c = 0; c < D; ++c) dbo(0, c) += dout(r, c);
        Mat<T> dZ;
        matmul(dout, false, tape.val(Wo), true, dZ);

        Mat<T> dQ(S, D), dK(S, D), dV(S, D);
        for (int h = 0; h < n_heads; ++h) {
            const Mat<T>& A = (*attn)[h];
            const Mat<T>& M = (*keep)[h];
            for (int i = 0; i < S; ++i) {
                // dV, then dropout and softmax backward over the causal row.
                for (int j = 0; j <= i; ++j)
                    for (int c = 0; c < dk; ++c)
                        dV(j, h * dk + c) +=
                            T(double(A(i, j)) * double(M(i, j)) * double(dZ(i, h * dk + c)));
                std::vector<double> dA(i + 1);
                for (int j = 0; j <= i; ++j) {
                    double s = 0;
                    for (int c = 0; c < dk; ++c)
                        s += double(dZ(i, h * dk + c)) * double((*V)(j, h * dk + c));
                    dA[j] = s * double(M(i, j));
                }
                double dot = 0;
                for (int j = 0; j <= i; ++j) dot += dA[j] * double(A(i, j));
                for (int j = 0; j <= i; ++j) {
                    double dS = double(A(i, j)) * (dA[j] - dot);
                    for (int c = 0; c < dk; ++c) {
                        dQ(i, h * dk + c) +=
                            T(dS * double((*K)(j, h * dk + c)) * double(inv_sqrt_dk));
                        dK(j, h * dk + c) +=
                            T(dS * double((*Q)(i, h * dk + c)) * double(inv_sqrt_dk));
                    }
                }
            }
        }

        const Mat<T>& xv = tape.val(x);
        Mat<T>& dx = tape.grad(x);
        matmul(dQ, false, tape.val(Wq), true, dx, true);
        matmul(dK, false, tape.val(Wk), true, dx, true);
        matmul(dV, false, tape.val(Wv), true, dx, true);
        matmul(xv, true, dQ, false, tape.grad(Wq), true);
        matmul(xv, true, dK, false, tape.grad(Wk), true);
        matmul(xv, true, dV, false, tape.grad(Wv), true);
        Mat<T>& dbq = tape.grad(bq);
        Mat<T>& dbk = tape.grad(bk);
        Mat<T>& dbv = tape.grad(bv);
        for (int r = 0; r < S; ++r)
            for (int c = 0; c < D; ++c) {
                dbq(0, c) += dQ(r, c);
                dbk(0, c) += dK(r, c);
                dbv(0, c) += dV(r, c);
            }
    });
    return id;
}

// Mean over unmasked rows of -log softmax(logits)[label].  Returns a 1x1
// loss node; masked rows receive zero gradient.
template <typename T>
int softmax_xent(Tape<T>& tape, int logits, const std::vector<int>& labels,
                 const std::vector<unsigned char>& mask_keep) {
    const Mat<T>& lv = tape.val(logits);
    const int N = lv.rows, Kc = lv.cols;
    if (static_cast<int>(labels.size()) != N || static_cast<int>(mask_keep.size()) != N)
        throw ConfigError("cross_entropy: label/mask length mismatch");

    auto probs = std::make_shared<Mat<T>>(N, Kc);
    int n_kept = 0;
    double total = 0;
    for (int r = 0; r < N; ++r) {
        if (!mask_keep[r]) continue;
        if (labels[r] < 0 || labels[r] >= Kc)
            throw ConfigError("cross_entropy: label out of range");
        ++n_kept;
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < Kc; ++c) mx = std::max(mx, double(lv(r, c)));
        double denom = 0;
        for (int c = 0; c < Kc; ++c) denom += std::exp(double(lv(r, c)) - mx);
        for (int c = 0; c < Kc; ++c) (*probs)(r, c) = T(std::exp(double(lv(r, c)) - mx) / denom);
        total += std::log(denom) - (double(lv(r, labels[r])) - mx);
    }
    if (n_kept == 0) throw Error("cross_entropy: every position is masked");

    Mat<T> loss(1, 1);
    loss(0, 0) = T(total / n_kept);
    int id = tape.push(std::move(loss));
    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    auto mask_copy = std::make_shared<std::vector<unsigned char>>(mask_keep);
    tape.set_back(id, [&tape, logits, id, probs, labels_copy, mask_copy, n_kept]() {
        const T dl = tape.grad(id)(0, 0);
        Mat<T>& dlogits = tape.grad(logits);
        for (int r = 0; r < probs->rows; ++r) {
            if (!(*mask_copy)[r]) continue;
            for (int c = 0; c < probs->cols; ++c)
                dlogits(r, c) += dl * ((*probs)(r, c) - T(c == (*labels_copy)[r])) / T(n_kept);
        }
    });
    return id;
}

// Row-wise softmax of raw logits (eval-side helper, not differentiable).
template <typename T>
Mat<T> softmax_rows(const Mat<T>& logits) {
    Mat<T> p(logits.rows, logits.cols);
    for (int r = 0; r < logits.rows; ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < logits.cols; ++c) mx = std::max(mx, double(logits(r, c)));
        double denom = 0;
        for (int c = 0; c < logits.cols; ++c) denom += std::exp(double(logits(r, c)) - mx);
        for (int c = 0; c < logits.cols; ++c)
            p(r, c) = T(std::exp(double(logits(r, c)) - mx) / denom);
    }
    return p;
}

}  // namespace og::neural
