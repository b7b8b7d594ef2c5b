#include "eldnn/objective.hpp"

#include <cmath>
#include <string>

#include "eldnn/errors.hpp"

namespace eldnn {

namespace {

constexpr double kProbFloor = 1e-300;

/// dL/dz for a softmax output given dL/dh: h .* g - h (h . g).
Vector softmax_vjp(const Vector& h, const Vector& g) {
    const double hg = dot(h, g);
    Vector dz(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) dz[i] = h[i] * (g[i] - hg);
    return dz;
}

/// Backpropagate one branch (stochastic when mask != nullptr, deterministic
/// otherwise). g_out is dLoss/d(h^(L)); when nll_label >= 0 the softmax-NLL
/// shortcut (h - e_y) is added at the final pre-activation, which keeps the
/// pass free of 1/h_y factors.
void backprop_branch(const Network& net, const ForwardTrace& trace, const MaskSample* mask,
                     Vector g, int nll_label, GradientSet& grads) {
    for (std::size_t l = net.depth(); l-- > 0;) {
        const DenseLayer& layer = net.layer(l);
        const Vector& h = trace.outputs[l + 1];
        const Vector u = mask ? hadamard(trace.outputs[l], mask->masks[l])
                              : scaled(trace.outputs[l], layer.keep_prob);
        Vector dz;
        if (layer.activation == Activation::kSoftmax) {
            dz = softmax_vjp(h, g);
            if (nll_label >= 0) {
                for (std::size_t i = 0; i < dz.size(); ++i)
                    dz[i] += h[i] - (static_cast<int>(i) == nll_label ? 1.0 : 0.0);
            }
        } else {
            dz.resize(h.size());
            for (std::size_t i = 0; i < h.size(); ++i)
                dz[i] = g[i] * activation_derivative(layer.activation, h[i]);
        }
        add_outer(grads.weight_grads[l], 1.0, dz, u);
        axpy(1.0, dz, grads.bias_grads[l]);
        if (l > 0) {
            g = matvec_transposed(layer.weights, dz);
            if (mask)
                g = hadamard(g, mask->masks[l]);
            else
                for (double& v : g) v *= layer.keep_prob;
        }
    }
}

struct ExampleLoss {
    double nll;
    double penalty;
};

ExampleLoss example_loss(const Network& net, const LabeledExample& ex, const MaskSample& s,
                         ForwardTrace* stoch_out = nullptr, ForwardTrace* det_out = nullptr) {
    ForwardTrace stoch = forward_stochastic(net, ex.x, s);
    ForwardTrace det = forward_deterministic(net, ex.x);
    const double p = stoch.output()[static_cast<std::size_t>(ex.label)];
    const double nll = -std::log(std::max(p, kProbFloor));
    const double pen = squared_norm(sub(stoch.output(), det.output()));
    if (stoch_out) *stoch_out = std::move(stoch);
    if (det_out) *det_out = std::move(det);
    return {nll, pen};
}

void require_classifier(const Network& net, int label, const char* who) {
    if (!net.has_softmax_output())
        throw DomainError(std::string(who) + ": needs a softmax output layer");
    if (label < 0 || static_cast<std::size_t>(label) >= net.output_dim())
        throw DomainError(std::string(who) + ": label " + std::to_string(label) +
                          " out of range for " + std::to_string(net.output_dim()) + " classes");
}

} // namespace

GradientSet GradientSet::zeros_like(const Network& net) {
    GradientSet g;
    g.weight_grads.reserve(net.depth());
    g.bias_grads.reserve(net.depth());
    for (const DenseLayer& layer : net.layers()) {
        g.weight_grads.emplace_back(layer.out_dim(), layer.in_dim());
        g.bias_grads.emplace_back(layer.out_dim(), 0.0);
    }
    return g;
}

void GradientSet::scale(double s) {
    for (Matrix& m : weight_grads)
        for (double& v : m.data) v *= s;
    for (Vector& b : bias_grads)
        for (double& v : b) v *= s;
}

void GradientSet::add(const GradientSet& other) {
    for (std::size_t l = 0; l < weight_grads.size(); ++l) {
        for (std::size_t i = 0; i < weight_grads[l].data.size(); ++i)
            weight_grads[l].data[i] += other.weight_grads[l].data[i];
        for (std::size_t i = 0; i < bias_grads[l].size(); ++i)
            bias_grads[l][i] += other.bias_grads[l][i];
    }
}

double nll_loss(const Network& net, const Vector& x, int label, const MaskSample& s,
                bool* clamped) {
    require_classifier(net, label, "nll_loss");
    const ForwardTrace t = forward_stochastic(net, x, s);
    const double p = t.output()[static_cast<std::size_t>(label)];
    if (clamped) *clamped = p < kProbFloor;
    return -std::log(std::max(p, kProbFloor));
}

double el_penalty_exact(const Network& net, const Vector& x, std::size_t max_units) {
    const Vector expectation = enumerate_expectation(net, x, max_units);
    const ForwardTrace det = forward_deterministic(net, x);
    return squared_norm(sub(expectation, det.output()));
}

double el_penalty_mc(const Network& net, const Vector& x, const MaskSample& s) {
    const ForwardTrace stoch = forward_stochastic(net, x, s);
    const ForwardTrace det = forward_deterministic(net, x);
    return squared_norm(sub(stoch.output(), det.output()));
}

std::pair<LossBreakdown, GradientSet>
loss_and_grad(const Network& net, const Batch& batch, const std::vector<MaskSample>& masks,
              double lambda) {
    if (batch.empty()) throw DomainError("loss_and_grad: empty batch");
    if (masks.size() != batch.size())
        throw DimensionError("loss_and_grad: need one mask per example");
    if (lambda < 0.0) throw DomainError("loss_and_grad: lambda must be >= 0");

    GradientSet grads = GradientSet::zeros_like(net);
    LossBreakdown loss;
    loss.lambda = lambda;

    for (std::size_t i = 0; i < batch.size(); ++i) {
        const LabeledExample& ex = batch[i];
        require_classifier(net, ex.label, "loss_and_grad");
        ForwardTrace stoch, det;
        const ExampleLoss el = example_loss(net, ex, masks[i], &stoch, &det);
        loss.nll += el.nll;
        loss.penalty += el.penalty;

        const Vector diff = sub(stoch.output(), det.output());
        // d(lambda ||p - q||^2)/dp = 2 lambda (p - q); NLL enters via the
        // softmax shortcut inside backprop_branch.
        backprop_branch(net, stoch, &masks[i], scaled(diff, 2.0 * lambda), ex.label, grads);
        backprop_branch(net, det, nullptr, scaled(diff, -2.0 * lambda), -1, grads);
    }

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    loss.nll *= inv_n;
    loss.penalty *= inv_n;
    loss.total = loss.nll + lambda * loss.penalty;
    grads.scale(inv_n);

    for (std::size_t l = 0; l < net.depth(); ++l)
        if (!all_finite(grads.weight_grads[l]) || !all_finite(grads.bias_grads[l]))
            throw NumericError("loss_and_grad: non-finite gradient in layer " +
                                   std::to_string(l),
                               l);
    return {loss, std::move(grads)};
}

LossBreakdown loss_only(const Network& net, const Batch& batch,
                        const std::vector<MaskSample>& masks, double lambda) {
    if (batch.empty()) throw DomainError("loss_only: empty batch");
    if (masks.size() != batch.size())
        throw DimensionError("loss_only: need one mask per example");
    LossBreakdown loss;
    loss.lambda = lambda;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        require_classifier(net, batch[i].label, "loss_only");
        const ExampleLoss el = example_loss(net, batch[i], masks[i]);
        loss.nll += el.nll;
        loss.penalty += el.penalty;
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    loss.nll *= inv_n;
    loss.penalty *= inv_n;
    loss.total = loss.nll + lambda * loss.penalty;
    return loss;
}

GradientCheckReport check_gradients(const Network& net, const Batch& batch,
                                    const std::vector<MaskSample>& masks, double lambda,
                                    double step) {
    if (step <= 0.0) throw DomainError("check_gradients: step must be positive");
    const GradientSet analytic = loss_and_grad(net, batch, masks, lambda).second;

    GradientCheckReport report;
    Network probe = net;
    auto consider = [&](std::size_t l, bool is_bias, std::size_t idx, double* slot,
                        double analytic_value) {
        const double saved = *slot;
        *slot = saved + step;
        const double up = loss_only(probe, batch, masks, lambda).total;
        *slot = saved - step;
        const double down = loss_only(probe, batch, masks, lambda).total;
        *slot = saved;
        const double fd = (up - down) / (2.0 * step);
        const double rel = std::abs(fd - analytic_value) /
                           std::max({1.0, std::abs(fd), std::abs(analytic_value)});
        if (rel > report.max_rel_error) {
            report.max_rel_error = rel;
            report.layer = l;
            report.is_bias = is_bias;
            report.flat_index = idx;
            report.analytic = analytic_value;
            report.numeric = fd;
        }
    };

    for (std::size_t l = 0; l < probe.depth(); ++l) {
        DenseLayer& layer = probe.layer(l);
        for (std::size_t i = 0; i < layer.weights.data.size(); ++i)
            consider(l, false, i, &layer.weights.data[i], analytic.weight_grads[l].data[i]);
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            consider(l, true, i, &layer.bias[i], analytic.bias_grads[l][i]);
    }
    return report;
}

} // namespace eldnn
