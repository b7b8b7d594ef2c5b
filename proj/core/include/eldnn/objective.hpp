#ifndef ELDNN_OBJECTIVE_HPP
#define ELDNN_OBJECTIVE_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "eldnn/network.hpp"

namespace eldnn {

struct LossBreakdown {
    double nll = 0.0;
    double penalty = 0.0;
    double total = 0.0; // nll + lambda * penalty
    double lambda = 0.0;
};

/// Per-layer parameter gradients, shapes mirroring the network.
struct GradientSet {
    std::vector<Matrix> weight_grads;
    std::vector<Vector> bias_grads;

    static GradientSet zeros_like(const Network& net);
    void scale(double s);
    void add(const GradientSet& other);
};

struct LabeledExample {
    Vector x;
    int label = 0;
};

using Batch = std::vector<LabeledExample>;

/// -log h^(L)_y(x, s). Predicted probabilities are floored at 1e-300 before
/// the log; pass `clamped` to learn whether the floor fired.
double nll_loss(const Network& net, const Vector& x, int label, const MaskSample& s,
                bool* clamped = nullptr);

/// || enumerate_expectation(x) - forward_deterministic(x) ||^2 — the exact
/// single-example expectation-linearization penalty.
double el_penalty_exact(const Network& net, const Vector& x,
                        std::size_t max_units = kDefaultEnumerationCap);

/// || h^(L)(x,s) - h^(L)(x,E[S]) ||^2 — the Monte-Carlo surrogate, one mask.
double el_penalty_mc(const Network& net, const Vector& x, const MaskSample& s);

/// Mean over the batch of nll(x,y,s) + lambda * el_penalty_mc(x,s), with
/// exact backprop through both the stochastic and the deterministic branch
/// (they share parameters; contributions are summed). One mask per example,
/// shared by the NLL and penalty terms.
std::pair<LossBreakdown, GradientSet>
loss_and_grad(const Network& net, const Batch& batch,
              const std::vector<MaskSample>& masks, double lambda);

/// Same objective value without gradients (used by the finite-difference
/// checker and the trainers' diagnostics).
LossBreakdown loss_only(const Network& net, const Batch& batch,
                        const std::vector<MaskSample>& masks, double lambda);

/// Worst parameter coordinate found by central finite differences.
struct GradientCheckReport {
    double max_rel_error = 0.0;
    std::size_t layer = 0;
    bool is_bias = false;
    std::size_t flat_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

/// Central-difference check of loss_and_grad over every parameter.
/// Relative error uses denominator max(1, |fd|, |analytic|).
GradientCheckReport check_gradients(const Network& net, const Batch& batch,
                                    const std::vector<MaskSample>& masks,
                                    double lambda, double step = 1e-5);

} // namespace eldnn

#endif
