#include "eldnn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "json.hpp"

#include "eldnn/errors.hpp"
#include "eldnn/inference.hpp"
#include "eldnn/rng.hpp"

namespace eldnn {

namespace {

constexpr double kLogFloor = 1e-300;

/// f_l applied to an already-masked input u.
Vector layer_apply(const DenseLayer& layer, const Vector& u) {
    Vector z = matvec(layer.weights, u);
    axpy(1.0, layer.bias, z);
    return apply_activation(layer.activation, z);
}

std::size_t layer_bits(const DenseLayer& layer) {
    return layer.keep_prob < 1.0 ? layer.in_dim() : 0;
}

std::size_t prefix_bits(const Network& net, std::size_t upto) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < upto; ++l) n += layer_bits(net.layer(l));
    return n;
}

/// Exact E over this layer's own mask of f(h .* mask).
Vector layer_mask_expectation(const DenseLayer& layer, const Vector& h) {
    if (layer.keep_prob >= 1.0) return layer_apply(layer, h);
    const std::size_t d = layer.in_dim();
    Vector acc(layer.out_dim(), 0.0);
    Vector u(d);
    const std::uint64_t total = 1ull << d;
    for (std::uint64_t code = 0; code < total; ++code) {
        double prob = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const bool on = (code >> i) & 1u;
            u[i] = on ? h[i] : 0.0;
            prob *= on ? layer.keep_prob : 1.0 - layer.keep_prob;
        }
        axpy(prob, layer_apply(layer, u), acc);
    }
    return acc;
}

/// Exact gap of one layer at a fixed input h:
/// || E_G f(h .* G) - f(h .* keep) ||_2.
double layer_gap_at(const DenseLayer& layer, const Vector& h) {
    const Vector mean = layer_mask_expectation(layer, h);
    const Vector det = layer_apply(layer, scaled(h, layer.keep_prob));
    return norm2(sub(mean, det));
}

/// MC gap of one layer at a fixed input h (mc masks).
double layer_gap_at_mc(const DenseLayer& layer, const Vector& h, RngStream& rng,
                       std::size_t mc_samples) {
    Vector mean(layer.out_dim(), 0.0);
    for (std::size_t m = 0; m < mc_samples; ++m) {
        const Vector mask = bernoulli_vector(rng, h.size(), layer.keep_prob);
        axpy(1.0, layer_apply(layer, hadamard(h, mask)), mean);
    }
    const double inv = 1.0 / static_cast<double>(mc_samples);
    for (double& v : mean) v *= inv;
    const Vector det = layer_apply(layer, scaled(h, layer.keep_prob));
    return norm2(sub(mean, det));
}

/// Enumerate the stochastic marginal of layer `upto`'s input for one x:
/// fn(prob, h) over all mask configurations of layers [0, upto).
void enumerate_layer_input(const Network& net, const Vector& x, std::size_t upto,
                           const std::function<void(double, const Vector&)>& fn) {
    struct Bit {
        std::size_t layer, index;
        double keep;
    };
    std::vector<Bit> bits;
    std::vector<Vector> masks;
    for (std::size_t l = 0; l < upto; ++l) {
        const DenseLayer& layer = net.layer(l);
        masks.emplace_back(layer.in_dim(), 1.0);
        if (layer.keep_prob < 1.0)
            for (std::size_t i = 0; i < layer.in_dim(); ++i)
                bits.push_back({l, i, layer.keep_prob});
    }
    const std::uint64_t total = 1ull << bits.size();
    for (std::uint64_t code = 0; code < total; ++code) {
        double prob = 1.0;
        for (std::size_t b = 0; b < bits.size(); ++b) {
            const bool on = (code >> b) & 1u;
            masks[bits[b].layer][bits[b].index] = on ? 1.0 : 0.0;
            prob *= on ? bits[b].keep : 1.0 - bits[b].keep;
        }
        Vector h = x;
        for (std::size_t l = 0; l < upto; ++l)
            h = layer_apply(net.layer(l), hadamard(h, masks[l]));
        fn(prob, h);
    }
}

/// Stochastic-path input of layer `layer` for one x, sampled.
Vector sample_layer_input(const Network& net, const Vector& x, std::size_t layer,
                          RngStream& rng) {
    Vector h = x;
    for (std::size_t l = 0; l < layer; ++l) {
        const Vector mask = bernoulli_vector(rng, h.size(), net.layer(l).keep_prob);
        h = layer_apply(net.layer(l), hadamard(h, mask));
    }
    return h;
}

/// One full enumeration pass per input: per-layer first/second moments plus
/// the norm extremes used by the deviation bound and the scaling lemma.
struct NetMoments {
    std::vector<Vector> mean;     // E h^(l), l = 1..L
    std::vector<double> mean_sq;  // E ||h^(l)||^2
    double max_output_norm = 0.0; // max_s ||h^(L)||
    double max_hidden_norm = 0.0; // max_s ||h^(L-1)||
};

NetMoments enumerate_moments(const Network& net, const Vector& x, std::size_t max_units) {
    NetMoments m;
    m.mean.reserve(net.depth());
    for (const DenseLayer& layer : net.layers()) m.mean.emplace_back(layer.out_dim(), 0.0);
    m.mean_sq.assign(net.depth(), 0.0);
    for_each_mask(
        net,
        [&](double prob, const MaskSample& s) {
            const ForwardTrace t = forward_stochastic(net, x, s);
            for (std::size_t l = 0; l < net.depth(); ++l) {
                axpy(prob, t.outputs[l + 1], m.mean[l]);
                m.mean_sq[l] += prob * squared_norm(t.outputs[l + 1]);
            }
            m.max_output_norm = std::max(m.max_output_norm, norm2(t.output()));
            m.max_hidden_norm =
                std::max(m.max_hidden_norm, norm2(t.outputs[net.depth() - 1]));
        },
        max_units);
    return m;
}

void require_softmax(const Network& net, const char* who) {
    if (!net.has_softmax_output())
        throw DomainError(std::string(who) + ": needs a softmax output layer");
}

void require_labels(const Network& net, const Dataset& ds, const char* who) {
    for (int y : ds.labels)
        if (y < 0 || static_cast<std::size_t>(y) >= net.output_dim())
            throw DomainError(std::string(who) + ": label out of range");
}

} // namespace

JensenCheck jensen_check(const Network& net, const Dataset& ds, std::size_t max_units) {
    require_softmax(net, "jensen_check");
    require_labels(net, ds, "jensen_check");
    if (ds.size() == 0) throw DomainError("jensen_check: empty dataset");
    JensenCheck out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto y = static_cast<std::size_t>(ds.labels[i]);
        double marginal = 0.0;
        double expected_log = 0.0;
        for_each_mask(
            net,
            [&](double prob, const MaskSample& s) {
                const double p = forward_stochastic(net, ds.inputs[i], s).output()[y];
                marginal += prob * p;
                expected_log += prob * std::log(std::max(p, kLogFloor));
            },
            max_units);
        out.lvm_nll -= std::log(std::max(marginal, kLogFloor));
        out.dropout_expected_nll -= expected_log;
    }
    return out;
}

double measure_layer_delta(const Network& net, std::size_t layer, const Dataset& ds,
                           std::size_t mc_samples, std::uint64_t seed, LayerInputPath path) {
    if (layer >= net.depth()) throw DomainError("measure_layer_delta: layer out of range");
    if (ds.size() == 0) throw DomainError("measure_layer_delta: empty dataset");
    if (mc_samples < 1) throw DomainError("measure_layer_delta: mc_samples must be >= 1");
    const DenseLayer& target = net.layer(layer);
    if (target.keep_prob >= 1.0) return 0.0; // no mask randomness at all
    double acc = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        RngStream rng(seed, streams::per_example(streams::kTheory, i));
        if (path == LayerInputPath::kDeterministic || layer == 0) {
            const ForwardTrace det = forward_deterministic(net, ds.inputs[i]);
            acc += layer_gap_at_mc(target, det.outputs[layer], rng, mc_samples);
        } else {
            double inner = 0.0;
            for (std::size_t o = 0; o < mc_samples; ++o) {
                const Vector h = sample_layer_input(net, ds.inputs[i], layer, rng);
                inner += layer_gap_at_mc(target, h, rng, mc_samples);
            }
            acc += inner / static_cast<double>(mc_samples);
        }
    }
    return acc / static_cast<double>(ds.size());
}

double measure_layer_delta_exact(const Network& net, std::size_t layer, const Dataset& ds,
                                 LayerInputPath path, std::size_t max_units) {
    if (layer >= net.depth()) throw DomainError("measure_layer_delta_exact: layer out of range");
    if (ds.size() == 0) throw DomainError("measure_layer_delta_exact: empty dataset");
    const DenseLayer& target = net.layer(layer);
    const std::size_t needed =
        layer_bits(target) +
        (path == LayerInputPath::kStochastic ? prefix_bits(net, layer) : 0);
    if (needed > max_units)
        throw CapacityError("measure_layer_delta_exact: " + std::to_string(needed) +
                            " dropout units exceed cap " + std::to_string(max_units));
    double acc = 0.0;
    for (const Vector& x : ds.inputs) {
        if (path == LayerInputPath::kDeterministic || layer == 0) {
            const ForwardTrace det = forward_deterministic(net, x);
            acc += layer_gap_at(target, det.outputs[layer]);
        } else {
            double weighted = 0.0;
            enumerate_layer_input(net, x, layer, [&](double prob, const Vector& h) {
                weighted += prob * layer_gap_at(target, h);
            });
            acc += weighted;
        }
    }
    return acc / static_cast<double>(ds.size());
}

double thm3_bound(const BoundInputs& in) {
    if (in.L == 0) return 0.0;
    const double bg = in.B * in.gamma;
    const double lm1 = static_cast<double>(in.L - 1);
    if (std::abs(bg - 1.0) < 1e-12)
        return in.delta_layer + (in.delta_layer + in.sigma) * lm1;
    const double pw = std::pow(bg, lm1);
    return pw * in.delta_layer +
           (in.delta_layer + bg * in.sigma) * ((1.0 - pw) / (1.0 - bg));
}

double thm4_bound(const BoundInputs& in) {
    if (in.n < 1) throw DomainError("thm4_bound: n must be >= 1");
    if (!(in.nu > 0.0 && in.nu < 1.0)) throw DomainError("thm4_bound: nu must be in (0,1)");
    const double sqrt_n = std::sqrt(static_cast<double>(in.n));
    const double first = 2.0 * in.alpha_bound * std::pow(in.B, static_cast<double>(in.L)) *
                         (std::pow(in.gamma, static_cast<double>(in.L) / 2.0) + 1.0) / sqrt_n;
    const double second = in.beta * std::sqrt(std::log(1.0 / in.nu) / static_cast<double>(in.n));
    return first + second;
}

const char* regime_name(BGammaRegime r) {
    switch (r) {
    case BGammaRegime::kContracting: return "contracting";
    case BGammaRegime::kCritical: return "critical";
    case BGammaRegime::kExpanding: return "expanding";
    }
    return "?";
}

GapReport validate_thm3(const Network& net, const Dataset& ds, const Thm3Options& opts) {
    if (ds.size() == 0) throw DomainError("validate_thm3: empty dataset");
    const std::size_t L = net.depth();
    GapReport report;
    report.delta_path = opts.delta_path;
    report.layers.resize(L);

    double B = 0.0;
    double gamma = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        report.layers[l].operator_norm = layer_operator_norm(net.layer(l));
        B = std::max(B, report.layers[l].operator_norm);
        gamma = std::max(gamma, net.layer(l).keep_prob);
    }

    report.exact = net.dropout_unit_count() <= opts.max_units;
    const std::size_t n = ds.size();
    double alpha = 0.0;
    for (const Vector& x : ds.inputs) alpha = std::max(alpha, norm2(x));

    std::vector<double> per_layer_var(L, 0.0); // mean_x tr Var[h^(l)|x]
    std::vector<double> gaps(n, 0.0);          // per-example ||E h^L - det||
    std::vector<double> gap_se(n, 0.0);        // MC-only noise, 0 when exact
    double beta = 0.0;

    if (report.exact) {
        for (std::size_t i = 0; i < n; ++i) {
            const NetMoments m = enumerate_moments(net, ds.inputs[i], opts.max_units);
            for (std::size_t l = 0; l < L; ++l)
                per_layer_var[l] += (m.mean_sq[l] - squared_norm(m.mean[l])) /
                                    static_cast<double>(n);
            const ForwardTrace det = forward_deterministic(net, ds.inputs[i]);
            gaps[i] = norm2(sub(m.mean[L - 1], det.output()));
            beta = std::max({beta, m.max_output_norm, norm2(det.output())});
        }
        for (std::size_t l = 0; l < L; ++l)
            report.layers[l].delta =
                measure_layer_delta_exact(net, l, ds, opts.delta_path, opts.max_units);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            RngStream rng(opts.seed, streams::per_example(streams::kTheory, i));
            std::vector<Vector> sums(L);
            std::vector<Vector> sq_sums(L); // componentwise, for tr Var
            for (std::size_t l = 0; l < L; ++l) {
                sums[l].assign(net.layer(l).out_dim(), 0.0);
                sq_sums[l].assign(net.layer(l).out_dim(), 0.0);
            }
            for (std::size_t s = 0; s < opts.mc_samples; ++s) {
                const MaskSample mask = sample_mask(net, rng);
                const ForwardTrace t = forward_stochastic(net, ds.inputs[i], mask);
                for (std::size_t l = 0; l < L; ++l)
                    for (std::size_t c = 0; c < sums[l].size(); ++c) {
                        sums[l][c] += t.outputs[l + 1][c];
                        sq_sums[l][c] += t.outputs[l + 1][c] * t.outputs[l + 1][c];
                    }
                beta = std::max(beta, norm2(t.output()));
            }
            const auto m = static_cast<double>(opts.mc_samples);
            double out_var = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                double tr = 0.0;
                for (std::size_t c = 0; c < sums[l].size(); ++c) {
                    const double mu = sums[l][c] / m;
                    // unbiased: sum (v - mu)^2 / (m-1)
                    tr += std::max(0.0, (sq_sums[l][c] - m * mu * mu) / (m - 1.0));
                }
                per_layer_var[l] += tr / static_cast<double>(n);
                if (l + 1 == L) out_var = tr;
            }
            Vector mean = sums[L - 1];
            for (double& v : mean) v /= m;
            const ForwardTrace det = forward_deterministic(net, ds.inputs[i]);
            gaps[i] = norm2(sub(mean, det.output()));
            gap_se[i] = std::sqrt(out_var / m);
            beta = std::max(beta, norm2(det.output()));
        }
        for (std::size_t l = 0; l < L; ++l)
            report.layers[l].delta = measure_layer_delta(net, l, ds, opts.mc_samples,
                                                         opts.seed + 1, opts.delta_path);
    }

    double delta_layer = 0.0;
    double max_var = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        delta_layer = std::max(delta_layer, report.layers[l].delta);
        max_var = std::max(max_var, per_layer_var[l]);
    }
    double mean_gap = 0.0;
    for (double g : gaps) mean_gap += g;
    mean_gap /= static_cast<double>(n);
    double se_sq = 0.0;
    for (double s : gap_se) se_sq += s * s;
    const double se = std::sqrt(se_sq) / static_cast<double>(n);

    report.gamma = gamma;
    report.sigma = std::sqrt(max_var);
    report.delta_hat = measure_gap(net, ds, std::max<std::size_t>(opts.mc_samples, 2), opts.seed);
    report.delta_mean = mean_gap;
    report.delta_mean_se = se;

    report.inputs.B = B;
    report.inputs.gamma = gamma;
    report.inputs.sigma = report.sigma;
    report.inputs.delta_layer = delta_layer;
    report.inputs.L = L;
    report.inputs.alpha_bound = alpha;
    report.inputs.beta = beta;
    report.inputs.n = n;
    report.inputs.nu = opts.nu;

    report.thm3 = thm3_bound(report.inputs);
    report.thm4 = thm4_bound(report.inputs);
    const double bg = B * gamma;
    report.regime = bg < 1.0   ? BGammaRegime::kContracting
                    : bg == 1.0 ? BGammaRegime::kCritical
                                : BGammaRegime::kExpanding;
    report.bound_holds = report.delta_mean <= report.thm3 + 3.0 * se + 1e-12;
    return report;
}

namespace {

/// max ||h^(L-1)||_2 over the data: every mask when enumerable, sampled
/// masks plus the deterministic pass otherwise.
double measure_hidden_beta(const Network& net, const Dataset& ds, std::size_t mask_samples,
                           std::uint64_t seed, std::size_t max_units) {
    const std::size_t L = net.depth();
    double beta = 0.0;
    if (net.dropout_unit_count() <= max_units) {
        for (const Vector& x : ds.inputs) {
            for_each_mask(
                net,
                [&](double, const MaskSample& s) {
                    beta = std::max(beta,
                                    norm2(forward_stochastic(net, x, s).outputs[L - 1]));
                },
                max_units);
            beta = std::max(beta, norm2(forward_deterministic(net, x).outputs[L - 1]));
        }
        return beta;
    }
    RngStream rng(seed, streams::kTheory);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t m = 0; m < mask_samples; ++m) {
            const MaskSample s = sample_mask(net, rng);
            beta = std::max(beta,
                            norm2(forward_stochastic(net, ds.inputs[i], s).outputs[L - 1]));
        }
        beta = std::max(beta, norm2(forward_deterministic(net, ds.inputs[i]).outputs[L - 1]));
    }
    return beta;
}

} // namespace

Network scale_to_linearize(const Network& net, double delta_target, const Dataset& ds,
                           std::size_t mask_samples, std::uint64_t seed,
                           std::size_t max_units) {
    require_softmax(net, "scale_to_linearize");
    if (delta_target < 0.0) throw DomainError("scale_to_linearize: delta_target must be >= 0");
    if (ds.size() == 0) throw DomainError("scale_to_linearize: empty dataset");

    const double beta = measure_hidden_beta(net, ds, mask_samples, seed, max_units);
    const double eta_norm = frobenius_norm(net.layers().back().weights);
    if (eta_norm == 0.0 || beta == 0.0) return net;

    const double alpha = std::min(1.0, delta_target / (4.0 * beta * eta_norm));
    if (alpha >= 1.0) return net; // constraint already satisfied at the MLE
    Network scaled_net = net;
    DenseLayer& out = scaled_net.layers().back();
    for (double& w : out.weights.data) w *= alpha;
    for (double& b : out.bias) b *= alpha;
    return scaled_net;
}

ScalingTradeoff measure_scaling_tradeoff(const Network& net, const Dataset& ds,
                                         double delta_target, std::size_t mask_samples,
                                         std::uint64_t seed, std::size_t max_units) {
    require_softmax(net, "measure_scaling_tradeoff");
    require_labels(net, ds, "measure_scaling_tradeoff");
    if (ds.size() == 0) throw DomainError("measure_scaling_tradeoff: empty dataset");

    ScalingTradeoff out;
    out.delta_target = delta_target;
    out.beta = measure_hidden_beta(net, ds, mask_samples, seed, max_units);
    out.eta_norm = frobenius_norm(net.layers().back().weights);
    out.alpha = out.eta_norm > 0.0 && out.beta > 0.0
                    ? std::min(1.0, delta_target / (4.0 * out.beta * out.eta_norm))
                    : 1.0;

    const Network scaled = scale_to_linearize(net, delta_target, ds, mask_samples, seed,
                                              max_units);
    out.gap = likelihood_gap(net, scaled, ds, 100000, seed, max_units);

    const std::size_t k = net.output_dim();
    const bool exact = net.dropout_unit_count() <= max_units;
    double kl = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < k; ++c) {
            double p;
            if (exact) {
                p = marginal_likelihood(net, ds.inputs[i], static_cast<int>(c), max_units);
            } else {
                RngStream rng(seed, streams::per_example(streams::kTheory, i));
                double sum = 0.0;
                const std::size_t m = std::max<std::size_t>(mask_samples, 2);
                for (std::size_t s = 0; s < m; ++s)
                    sum += forward_stochastic(net, ds.inputs[i], sample_mask(net, rng))
                               .output()[c];
                p = sum / static_cast<double>(m);
            }
            if (p > 0.0) kl += p * std::log(p * static_cast<double>(k));
        }
    }
    out.mean_kl_to_uniform = kl / static_cast<double>(ds.size());
    out.uniform_limit_bound = (1.0 - out.alpha) * out.mean_kl_to_uniform;
    return out;
}

double marginal_likelihood(const Network& net, const Vector& x, int label,
                           std::size_t max_units) {
    require_softmax(net, "marginal_likelihood");
    if (label < 0 || static_cast<std::size_t>(label) >= net.output_dim())
        throw DomainError("marginal_likelihood: label out of range");
    const auto y = static_cast<std::size_t>(label);
    double acc = 0.0;
    for_each_mask(
        net,
        [&](double prob, const MaskSample& s) {
            acc += prob * forward_stochastic(net, x, s).output()[y];
        },
        max_units);
    return acc;
}

LikelihoodGap likelihood_gap(const Network& net_hat, const Network& net_tilde,
                             const Dataset& ds, std::size_t mc_samples, std::uint64_t seed,
                             std::size_t max_units) {
    require_softmax(net_hat, "likelihood_gap");
    require_softmax(net_tilde, "likelihood_gap");
    require_labels(net_hat, ds, "likelihood_gap");
    if (ds.size() == 0) throw DomainError("likelihood_gap: empty dataset");
    if (net_hat.input_dim() != net_tilde.input_dim() ||
        net_hat.output_dim() != net_tilde.output_dim())
        throw DimensionError("likelihood_gap: architecture mismatch");

    const std::size_t n = ds.size();
    const bool exact = net_hat.dropout_unit_count() <= max_units &&
                       net_tilde.dropout_unit_count() <= max_units;
    LikelihoodGap out;
    out.exact = exact;
    if (exact) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ph = marginal_likelihood(net_hat, ds.inputs[i], ds.labels[i], max_units);
            const double pt =
                marginal_likelihood(net_tilde, ds.inputs[i], ds.labels[i], max_units);
            out.value += std::log(std::max(ph, kLogFloor)) - std::log(std::max(pt, kLogFloor));
        }
        out.value /= static_cast<double>(n);
        return out;
    }

    auto mc_marginal = [&](const Network& net, std::size_t i, double& se_log) {
        RngStream rng(seed, streams::per_example(streams::kTheory, i));
        double sum = 0.0, sum_sq = 0.0;
        const auto y = static_cast<std::size_t>(ds.labels[i]);
        for (std::size_t m = 0; m < mc_samples; ++m) {
            const MaskSample s = sample_mask(net, rng);
            const double p = forward_stochastic(net, ds.inputs[i], s).output()[y];
            sum += p;
            sum_sq += p * p;
        }
        const auto m = static_cast<double>(mc_samples);
        const double mean = sum / m;
        const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
        // delta method: sd(log p) ~= sd(p) / p
        se_log = mean > 0.0 ? std::sqrt(var / m) / mean : 0.0;
        return mean;
    };

    double se_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double se_h = 0.0, se_t = 0.0;
        const double ph = mc_marginal(net_hat, i, se_h);
        const double pt = mc_marginal(net_tilde, i, se_t);
        out.value += std::log(std::max(ph, kLogFloor)) - std::log(std::max(pt, kLogFloor));
        se_sq += se_h * se_h + se_t * se_t;
    }
    out.value /= static_cast<double>(n);
    out.std_error = std::sqrt(se_sq) / static_cast<double>(n);
    return out;
}

double exact_network_delta(const Network& net, const Dataset& ds, std::size_t max_units) {
    if (ds.size() == 0) throw DomainError("exact_network_delta: empty dataset");
    double acc = 0.0;
    for (const Vector& x : ds.inputs) {
        const Vector mean = enumerate_expectation(net, x, max_units);
        acc += norm2(sub(mean, forward_deterministic(net, x).output()));
    }
    return acc / static_cast<double>(ds.size());
}

double exact_el_v(const Network& net, const Dataset& ds, std::size_t max_units) {
    if (ds.size() == 0) throw DomainError("exact_el_v: empty dataset");
    double acc = 0.0;
    for (const Vector& x : ds.inputs) {
        const Vector mean = enumerate_expectation(net, x, max_units);
        acc += squared_norm(sub(mean, forward_deterministic(net, x).output()));
    }
    return acc / static_cast<double>(ds.size());
}

double exact_sigma(const Network& net, const Dataset& ds, std::size_t max_units) {
    if (ds.size() == 0) throw DomainError("exact_sigma: empty dataset");
    std::vector<double> per_layer(net.depth(), 0.0);
    for (const Vector& x : ds.inputs) {
        const NetMoments m = enumerate_moments(net, x, max_units);
        for (std::size_t l = 0; l < net.depth(); ++l)
            per_layer[l] += (m.mean_sq[l] - squared_norm(m.mean[l])) /
                            static_cast<double>(ds.size());
    }
    double mx = 0.0;
    for (double v : per_layer) mx = std::max(mx, v);
    return std::sqrt(mx);
}

std::string gap_report_json(const GapReport& report) {
    nlohmann::json j;
    j["layers"] = nlohmann::json::array();
    for (const LayerGapStats& layer : report.layers)
        j["layers"].push_back({{"delta", layer.delta}, {"B", layer.operator_norm}});
    j["gamma"] = report.gamma;
    j["sigma"] = report.sigma;
    j["delta_hat"] = report.delta_hat;
    j["delta_mean"] = report.delta_mean;
    j["delta_mean_se"] = report.delta_mean_se;
    j["thm3_bound"] = report.thm3;
    j["thm4_bound"] = report.thm4;
    j["regime"] = regime_name(report.regime);
    j["bound_holds"] = report.bound_holds;
    j["exact"] = report.exact;
    j["delta_path"] =
        report.delta_path == LayerInputPath::kStochastic ? "stochastic" : "deterministic";
    j["delta_layer"] = report.inputs.delta_layer;
    j["alpha"] = report.inputs.alpha_bound;
    j["beta"] = report.inputs.beta;
    j["n"] = report.inputs.n;
    j["nu"] = report.inputs.nu;
    return j.dump(2);
}

void write_gap_report_json(const GapReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << gap_report_json(report) << "\n";
}

} // namespace eldnn
