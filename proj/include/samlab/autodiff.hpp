#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "samlab/common.hpp"
#include "samlab/dataset.hpp"
#include "samlab/model.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

// Reverse-mode autodiff over a straight-line graph of matrix-valued nodes.
// The graph is built per (model, params, batch) triple; construction order
// is the topological order, so backward is a single reverse sweep that
// touches every node exactly once.

enum class OpKind {
    input,        // batch inputs
    target,       // batch targets (constant)
    affine,       // X W^T + 1 b^T
    act_tanh,
    act_softplus,
    act_relu,
    loss_mse,         // mean over rows of 0.5 * squared error
    loss_softmax_ce,  // mean over rows of -log softmax at the target
    loss_mean,        // mean over rows of the output-entry sum (linear readout)
};

struct GraphNode {
    OpKind kind;
    int in0 = -1;
    int in1 = -1;
    int layer = -1;  // affine nodes: index into the model layout
    Matrix value;
    Matrix adjoint;
};

class CompGraph {
  public:
    CompGraph(const ModelSpec& model, const ParamVector& params, const Batch& batch)
        : model_(model), params_(params), layout_(layer_layout(model)) {
        if (static_cast<int>(params.size()) != param_count(model))
            throw ConfigError("parameter vector length does not match model layout");
        if (batch.inputs.rows == 0) throw ConfigError("empty batch");
        if (batch.inputs.cols != model.input_dim())
            throw ConfigError("batch input dim does not match model input width");
        const int want_cols = model.loss == LossKind::mse || model.loss == LossKind::softmax_ce
                                  ? model.output_dim()
                                  : batch.targets.cols;
        if (model.loss != LossKind::mean_output && batch.targets.cols != want_cols)
            throw ConfigError("batch target dim does not match model output width");

        int x = add_node({OpKind::input, -1, -1, -1, batch.inputs, {}});
        const int t = add_node({OpKind::target, -1, -1, -1, batch.targets, {}});
        for (int l = 0; l < model.layer_count(); ++l) {
            x = add_node({OpKind::affine, x, -1, l, {}, {}});
            switch (model.activations[static_cast<std::size_t>(l)]) {
                case Activation::identity: break;
                case Activation::tanh_fn: x = add_node({OpKind::act_tanh, x, -1, -1, {}, {}}); break;
                case Activation::softplus: x = add_node({OpKind::act_softplus, x, -1, -1, {}, {}}); break;
                case Activation::relu: x = add_node({OpKind::act_relu, x, -1, -1, {}, {}}); break;
            }
        }
        switch (model.loss) {
            case LossKind::mse: add_node({OpKind::loss_mse, x, t, -1, {}, {}}); break;
            case LossKind::softmax_ce: add_node({OpKind::loss_softmax_ce, x, t, -1, {}, {}}); break;
            case LossKind::mean_output: add_node({OpKind::loss_mean, x, -1, -1, {}, {}}); break;
        }
    }

    /// Evaluate every node; returns the scalar loss.
    double forward() {
        for (auto& node : nodes_) eval(node);
        forwarded_ = true;
        return loss();
    }

    double loss() const {
        if (!forwarded_) throw StateError("forward() has not been run on this graph");
        return nodes_.back().value.at(0, 0);
    }

    /// Reverse sweep; exact gradient of the loss w.r.t. every parameter.
    GradVector backward() {
        if (!forwarded_) throw StateError("backward() before forward()");
        GradVector grad(params_.size(), 0.0);
        for (auto& node : nodes_) node.adjoint = Matrix(node.value.rows, node.value.cols);
        nodes_.back().adjoint.at(0, 0) = 1.0;
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) propagate(*it, grad);
        return grad;
    }

  private:
    int add_node(GraphNode node) {
        nodes_.push_back(std::move(node));
        return static_cast<int>(nodes_.size()) - 1;
    }

    void eval(GraphNode& node) {
        switch (node.kind) {
            case OpKind::input:
            case OpKind::target:
                return;  // values set at construction
            case OpKind::affine: {
                const Matrix& x = nodes_[static_cast<std::size_t>(node.in0)].value;
                const LayerLayout& ll = layout_[static_cast<std::size_t>(node.layer)];
                node.value = Matrix(x.rows, ll.out);
                for (int r = 0; r < x.rows; ++r) {
                    for (int o = 0; o < ll.out; ++o) {
                        double acc = ll.bias_offset >= 0 ? params_[static_cast<std::size_t>(ll.bias_offset + o)] : 0.0;
                        const double* w = params_.data() + ll.weight_offset + static_cast<std::size_t>(o) * ll.in;
                        for (int i = 0; i < ll.in; ++i) acc += w[i] * x.at(r, i);
                        node.value.at(r, o) = acc;
                    }
                }
                return;
            }
            case OpKind::act_tanh: {
                const Matrix& x = nodes_[static_cast<std::size_t>(node.in0)].value;
                node.value = x;
                for (auto& v : node.value.data) v = std::tanh(v);
                return;
            }
            case OpKind::act_softplus: {
                const Matrix& x = nodes_[static_cast<std::size_t>(node.in0)].value;
                node.value = x;
                for (auto& v : node.value.data) v = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
                return;
            }
            case OpKind::act_relu: {
                const Matrix& x = nodes_[static_cast<std::size_t>(node.in0)].value;
                node.value = x;
                for (auto& v : node.value.data) v = v > 0.0 ? v : 0.0;
                return;
            }
            case OpKind::loss_mse: {
                const Matrix& y = nodes_[static_cast<std::size_t>(node.in0)].value;
                const Matrix& t = nodes_[static_cast<std::size_t>(node.in1)].value;
                double acc = 0.0;
                for (std::size_t i = 0; i < y.data.size(); ++i) {
                    const double d = y.data[i] - t.data[i];
                    acc += 0.5 * d * d;
                }
                node.value = Matrix(1, 1);
                node.value.at(0, 0) = acc / y.rows;
                return;
            }
            case OpKind::loss_softmax_ce: {
                const Matrix& z = nodes_[static_cast<std::size_t>(node.in0)].value;
                const Matrix& t = nodes_[static_cast<std::size_t>(node.in1)].value;
                double acc = 0.0;
                softmax_ = Matrix(z.rows, z.cols);
                for (int r = 0; r < z.rows; ++r) {
                    double m = z.at(r, 0);
                    for (int c = 1; c < z.cols; ++c) m = std::max(m, z.at(r, c));
                    double denom = 0.0;
                    for (int c = 0; c < z.cols; ++c) denom += std::exp(z.at(r, c) - m);
                    const double log_denom = std::log(denom);
                    for (int c = 0; c < z.cols; ++c) {
                        softmax_.at(r, c) = std::exp(z.at(r, c) - m) / denom;
                        acc -= t.at(r, c) * (z.at(r, c) - m - log_denom);
                    }
                }
                node.value = Matrix(1, 1);
                node.value.at(0, 0) = acc / z.rows;
                return;
            }
            case OpKind::loss_mean: {
                const Matrix& y = nodes_[static_cast<std::size_t>(node.in0)].value;
                double acc = 0.0;
                for (double v : y.data) acc += v;
                node.value = Matrix(1, 1);
                node.value.at(0, 0) = acc / y.rows;
                return;
            }
        }
    }

    void propagate(GraphNode& node, GradVector& grad) {
        switch (node.kind) {
            case OpKind::input:
            case OpKind::target:
                return;
            case OpKind::affine: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                const Matrix& x = src.value;
                const LayerLayout& ll = layout_[static_cast<std::size_t>(node.layer)];
                for (int r = 0; r < x.rows; ++r) {
                    for (int o = 0; o < ll.out; ++o) {
                        const double up = node.adjoint.at(r, o);
                        if (up == 0.0) continue;
                        double* gw = grad.data() + ll.weight_offset + static_cast<std::size_t>(o) * ll.in;
                        const double* w = params_.data() + ll.weight_offset + static_cast<std::size_t>(o) * ll.in;
                        for (int i = 0; i < ll.in; ++i) {
                            gw[i] += up * x.at(r, i);
                            src.adjoint.at(r, i) += up * w[i];
                        }
                        if (ll.bias_offset >= 0) grad[static_cast<std::size_t>(ll.bias_offset + o)] += up;
                    }
                }
                return;
            }
            case OpKind::act_tanh: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                for (std::size_t i = 0; i < node.value.data.size(); ++i) {
                    const double y = node.value.data[i];
                    src.adjoint.data[i] += node.adjoint.data[i] * (1.0 - y * y);
                }
                return;
            }
            case OpKind::act_softplus: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                for (std::size_t i = 0; i < node.value.data.size(); ++i) {
                    const double x = src.value.data[i];
                    const double sig = 1.0 / (1.0 + std::exp(-x));
                    src.adjoint.data[i] += node.adjoint.data[i] * sig;
                }
                return;
            }
            case OpKind::act_relu: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                for (std::size_t i = 0; i < node.value.data.size(); ++i) {
                    if (src.value.data[i] > 0.0) src.adjoint.data[i] += node.adjoint.data[i];
                }
                return;
            }
            case OpKind::loss_mse: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                const Matrix& t = nodes_[static_cast<std::size_t>(node.in1)].value;
                const double up = node.adjoint.at(0, 0) / src.value.rows;
                for (std::size_t i = 0; i < src.value.data.size(); ++i)
                    src.adjoint.data[i] += up * (src.value.data[i] - t.data[i]);
                return;
            }
            case OpKind::loss_softmax_ce: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                const Matrix& t = nodes_[static_cast<std::size_t>(node.in1)].value;
                const double up = node.adjoint.at(0, 0) / src.value.rows;
                for (std::size_t i = 0; i < src.value.data.size(); ++i)
                    src.adjoint.data[i] += up * (softmax_.data[i] - t.data[i]);
                return;
            }
            case OpKind::loss_mean: {
                GraphNode& src = nodes_[static_cast<std::size_t>(node.in0)];
                const double up = node.adjoint.at(0, 0) / src.value.rows;
                for (auto& a : src.adjoint.data) a += up;
                return;
            }
        }
    }

    ModelSpec model_;
    ParamVector params_;
    std::vector<LayerLayout> layout_;
    std::vector<GraphNode> nodes_;
    Matrix softmax_;  // cached by the CE forward pass
    bool forwarded_ = false;
};

/// Mean loss of the model on the batch.
inline double forward(const ModelSpec& model, const ParamVector& params, const Batch& batch) {
    CompGraph graph(model, params, batch);
    return graph.forward();
}

/// Plain network outputs (no loss head) for a matrix of inputs.
inline Matrix forward_outputs(const ModelSpec& model, const ParamVector& params, const Matrix& inputs) {
    if (static_cast<int>(params.size()) != param_count(model))
        throw ConfigError("parameter vector length does not match model layout");
    const auto layout = layer_layout(model);
    Matrix x = inputs;
    for (int l = 0; l < model.layer_count(); ++l) {
        const LayerLayout& ll = layout[static_cast<std::size_t>(l)];
        Matrix y(x.rows, ll.out);
        for (int r = 0; r < x.rows; ++r) {
            for (int o = 0; o < ll.out; ++o) {
                double acc = ll.bias_offset >= 0 ? params[static_cast<std::size_t>(ll.bias_offset + o)] : 0.0;
                const double* w = params.data() + ll.weight_offset + static_cast<std::size_t>(o) * ll.in;
                for (int i = 0; i < ll.in; ++i) acc += w[i] * x.at(r, i);
                switch (model.activations[static_cast<std::size_t>(l)]) {
                    case Activation::identity: break;
                    case Activation::tanh_fn: acc = std::tanh(acc); break;
                    case Activation::softplus:
                        acc = acc > 0.0 ? acc + std::log1p(std::exp(-acc)) : std::log1p(std::exp(acc));
                        break;
                    case Activation::relu: acc = acc > 0.0 ? acc : 0.0; break;
                }
                y.at(r, o) = acc;
            }
        }
        x = std::move(y);
    }
    return x;
}

inline std::pair<double, GradVector> loss_and_grad(const ModelSpec& model, const ParamVector& params,
                                                   const Batch& batch) {
    CompGraph graph(model, params, batch);
    const double loss = graph.forward();
    return {loss, graph.backward()};
}

} // namespace samlab
