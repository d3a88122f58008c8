#pragma once

#include <functional>
#include <span>
#include <utility>

#include "samlab/autodiff.hpp"
#include "samlab/common.hpp"
#include "samlab/dataset.hpp"
#include "samlab/model.hpp"
#include "samlab/vecmath.hpp"

namespace samlab {

struct EvalCounts {
    long values = 0;     // loss-only evaluations
    long gradients = 0;  // backward passes (each implies one forward)
};

/// A differentiable scalar objective over a flat parameter vector. Every
/// evaluation is counted, which is what the optimizer cost assertions read.
class Objective {
  public:
    virtual ~Objective() = default;

    virtual int dim() const = 0;

    double value(std::span<const double> w) const {
        ++counts_.values;
        return eval_value(w);
    }

    GradVector gradient(std::span<const double> w) const {
        ++counts_.gradients;
        return eval_gradient(w);
    }

    EvalCounts counts() const { return counts_; }
    void reset_counts() const { counts_ = EvalCounts{}; }

  protected:
    virtual double eval_value(std::span<const double> w) const = 0;
    virtual GradVector eval_gradient(std::span<const double> w) const = 0;

  private:
    mutable EvalCounts counts_;
};

/// Model loss on one fixed batch, evaluated through the autodiff graph.
class ModelObjective final : public Objective {
  public:
    ModelObjective(ModelSpec model, Batch batch) : model_(std::move(model)), batch_(std::move(batch)) {}

    int dim() const override { return param_count(model_); }
    const ModelSpec& model() const { return model_; }
    const Batch& batch() const { return batch_; }

  protected:
    double eval_value(std::span<const double> w) const override {
        ParamVector params(w.begin(), w.end());
        return forward(model_, params, batch_);
    }

    GradVector eval_gradient(std::span<const double> w) const override {
        ParamVector params(w.begin(), w.end());
        CompGraph graph(model_, params, batch_);
        graph.forward();
        return graph.backward();
    }

  private:
    ModelSpec model_;
    Batch batch_;
};

/// Closed-form objective from callables; used by tests, toy losses and the
/// brute-force oracle.
class AnalyticObjective final : public Objective {
  public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using GradFn = std::function<GradVector(std::span<const double>)>;

    AnalyticObjective(int dim, ValueFn value, GradFn grad)
        : dim_(dim), value_(std::move(value)), grad_(std::move(grad)) {}

    int dim() const override { return dim_; }

  protected:
    double eval_value(std::span<const double> w) const override { return value_(w); }
    GradVector eval_gradient(std::span<const double> w) const override { return grad_(w); }

  private:
    int dim_;
    ValueFn value_;
    GradFn grad_;
};

/// H v by central differences of exact gradients:
///   (grad(w + h v) - grad(w - h v)) / (2h),  h = 1e-4 (1 + |w|) / |v|.
inline GradVector hessian_vector_product(const Objective& obj, std::span<const double> w,
                                         std::span<const double> v) {
    const double vnorm = norm(v);
    if (vnorm <= 0.0) throw NumericError("hessian_vector_product: zero direction vector");
    const double h = 1e-4 * (1.0 + norm(w)) / vnorm;
    const GradVector gp = obj.gradient(add_scaled(w, h, v));
    const GradVector gm = obj.gradient(add_scaled(w, -h, v));
    GradVector out(w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (gp[i] - gm[i]) / (2.0 * h);
    return out;
}

inline GradVector hessian_vector_product(const ModelSpec& model, const ParamVector& params, const Batch& batch,
                                         std::span<const double> v) {
    ModelObjective obj(model, batch);
    return hessian_vector_product(obj, params, v);
}

} // namespace samlab
