#pragma once

// Minimal reverse-mode autodiff: a tape of value/gradient pairs plus one
// backward closure per recorded op.  backward() seeds dLoss = 1 and replays
// the closures newest-first, so each op's closure sees the full upstream
// gradient of its output before it runs.

#include <functional>
#include <vector>

#include "overgaze/neural/mat.hpp"

namespace og::neural {

template <typename T>
class Tape {
  public:
    // Returns the id of a new node. Leaves pass no closure.
    int push(Mat<T> value, std::function<void()> back = nullptr) {
        nodes_.push_back({std::move(value), Mat<T>(), std::move(back)});
        return static_cast<int>(nodes_.size()) - 1;
    }

    // Ops that need their own node id inside the closure install it after
    // pushing the value.
    void set_back(int id, std::function<void()> back) { nodes_[id].back = std::move(back); }

    Mat<T>& val(int id) { return nodes_[id].val; }
    const Mat<T>& val(int id) const { return nodes_[id].val; }

    // Gradients are allocated lazily so untouched nodes stay cheap.
    Mat<T>& grad(int id) {
        auto& n = nodes_[id];
        if (n.grad.rows == 0) n.grad = Mat<T>::zeros(n.val.rows, n.val.cols);
        return n.grad;
    }

    void backward(int loss_id) {
        auto& g = grad(loss_id);
        if (g.rows != 1 || g.cols != 1) throw Error("backward: loss must be a 1x1 node");
        g(0, 0) = T(1);
        for (int id = loss_id; id >= 0; --id)
            if (nodes_[id].back && nodes_[id].grad.rows > 0) nodes_[id].back();
    }

    size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

  private:
    struct Node {
        Mat<T> val;
        Mat<T> grad;  // empty until first touched
        std::function<void()> back;
    };
    std::vector<Node> nodes_;
};

}  // namespace og::neural
