// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each check pins its tolerances in code; nothing is calibrated at
// runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "eldnn/data.hpp"
#include "eldnn/inference.hpp"
#include "eldnn/network.hpp"
#include "eldnn/objective.hpp"
#include "eldnn/theory.hpp"
#include "eldnn/trainer.hpp"
#include "support/tiny_nets.hpp"

using namespace eldnn;
using eldnn_tests::make_tiny_dataset;
using eldnn_tests::make_tiny_net;
using eldnn_tests::TinyNetSpec;

namespace {

struct PerExampleMc {
    Vector mean;          // MC mean of h^(L)
    Vector se;            // per-component standard error
    double gap_norm;      // || mc mean - deterministic ||
    double gap_noise;     // sqrt(tr Var / m)
    double penalty_mean;  // MC mean of ||h - det||^2
    double penalty_se;
};

PerExampleMc mc_estimates(const Network& net, const Vector& x, std::size_t m,
                          RngStream& rng) {
    const Vector det = forward_deterministic(net, x).output();
    const std::size_t k = net.output_dim();
    Vector sum(k, 0.0), sq(k, 0.0);
    double pen_sum = 0.0, pen_sq = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
        const Vector h = forward_stochastic(net, x, sample_mask(net, rng)).output();
        for (std::size_t c = 0; c < k; ++c) {
            sum[c] += h[c];
            sq[c] += h[c] * h[c];
        }
        const double pen = squared_norm(sub(h, det));
        pen_sum += pen;
        pen_sq += pen * pen;
    }
    PerExampleMc out;
    out.mean.resize(k);
    out.se.resize(k);
    const auto dm = static_cast<double>(m);
    double tr = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        out.mean[c] = sum[c] / dm;
        const double var = std::max(0.0, sq[c] / dm - out.mean[c] * out.mean[c]);
        out.se[c] = std::sqrt(var / dm);
        tr += var;
    }
    out.gap_norm = norm2(sub(out.mean, det));
    out.gap_noise = std::sqrt(tr / dm);
    out.penalty_mean = pen_sum / dm;
    const double pen_var = std::max(0.0, pen_sq / dm - out.penalty_mean * out.penalty_mean);
    out.penalty_se = std::sqrt(pen_var / dm);
    return out;
}

// ---------------------------------------------------------------------------

bool criterion1_oracle_equivalence(std::ostream& log) {
    const std::size_t m = 100000;
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(5000 + trial, 0);
        TinyNetSpec spec;
        spec.hidden_pool = {Activation::kSigmoid, Activation::kTanh, Activation::kIdentity};
        spec.output = Activation::kSoftmax;
        const Network net = make_tiny_net(rng, spec);
        const Dataset ds = make_tiny_dataset(rng, 3, net.input_dim(),
                                             static_cast<int>(net.output_dim()));
        bool net_ok = true;
        double mc_gap_sum = 0.0, gap_noise_sum = 0.0, exact_gap_sum = 0.0;
        double mc_pen_sum = 0.0, pen_se_sq = 0.0, exact_pen_sum = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            RngStream mask_rng(trial, streams::per_example(streams::kMask, i));
            const PerExampleMc mc = mc_estimates(net, ds.inputs[i], m, mask_rng);
            const Vector exact = enumerate_expectation(net, ds.inputs[i]);
            const Vector det = forward_deterministic(net, ds.inputs[i]).output();
            for (std::size_t c = 0; c < exact.size(); ++c)
                if (std::abs(mc.mean[c] - exact[c]) > 4.0 * mc.se[c] + 1e-12)
                    net_ok = false;
            mc_gap_sum += mc.gap_norm;
            gap_noise_sum += mc.gap_noise;
            exact_gap_sum += norm2(sub(exact, det));
            mc_pen_sum += mc.penalty_mean;
            pen_se_sq += mc.penalty_se * mc.penalty_se;
            // enumerated mean of the MC surrogate ||h - det||^2
            double pen_exact = 0.0;
            for_each_mask(net, [&](double prob, const MaskSample& s) {
                pen_exact +=
                    prob * squared_norm(
                               sub(forward_stochastic(net, ds.inputs[i], s).output(), det));
            });
            exact_pen_sum += pen_exact;
        }
        const auto n = static_cast<double>(ds.size());
        if (std::abs(mc_gap_sum / n - exact_gap_sum / n) > 4.0 * gap_noise_sum / n)
            net_ok = false;
        if (std::abs(mc_pen_sum / n - exact_pen_sum / n) > 4.0 * std::sqrt(pen_se_sq) / n)
            net_ok = false;
        if (net_ok) ++ok;
    }
    log << ok << "/20 nets, m = " << m;
    return ok == 20;
}

bool criterion2_gradient_exactness(std::ostream& log) {
    int ok = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(6000 + trial, 0);
        const Network net = make_tiny_net(rng); // sigmoid/tanh mixes
        Batch batch;
        std::vector<MaskSample> masks;
        RngStream mask_rng(trial, streams::kMask);
        for (int i = 0; i < 3; ++i) {
            Vector x(net.input_dim());
            for (double& v : x) v = rng.next_double();
            batch.push_back({x, static_cast<int>(rng.next_below(
                                    static_cast<std::uint32_t>(net.output_dim())))});
            masks.push_back(sample_mask(net, mask_rng));
        }
        bool net_ok = true;
        for (double lambda : {0.0, 0.5, 5.0}) {
            const GradientCheckReport rep =
                check_gradients(net, batch, masks, lambda, 1e-5);
            worst = std::max(worst, rep.max_rel_error);
            if (rep.max_rel_error >= 1e-6) net_ok = false;
        }
        if (net_ok) ++ok;
    }
    log << ok << "/20 nets, worst rel err " << worst;
    return ok == 20;
}

bool criterion3_jensen(std::ostream& log) {
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(7000 + trial, 0);
        const Network net = make_tiny_net(rng);
        const Dataset ds = make_tiny_dataset(rng, 5, net.input_dim(),
                                             static_cast<int>(net.output_dim()));
        const JensenCheck jc = jensen_check(net, ds);
        if (jc.lvm_nll <= jc.dropout_expected_nll + 1e-12) ++ok;
    }
    log << ok << "/20 nets";
    return ok == 20;
}

bool criterion4_affine_exactness(std::ostream& log) {
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(8000 + trial, 0);
        TinyNetSpec spec;
        spec.hidden_pool = {Activation::kIdentity};
        spec.output = Activation::kIdentity;
        const Network net = make_tiny_net(rng, spec);
        const Dataset ds = make_tiny_dataset(rng, 4, net.input_dim(), 2);
        bool net_ok = exact_el_v(net, ds) <= 1e-12;

        // delta_hat within MC noise of zero
        const std::size_t m = 2000;
        const double gap = measure_gap(net, ds, m, trial);
        double noise = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            RngStream probe_rng(900 + trial, streams::per_example(streams::kTheory, i));
            const PerExampleMc mc = mc_estimates(net, ds.inputs[i], 400, probe_rng);
            noise += std::sqrt(static_cast<double>(400) / static_cast<double>(m)) *
                     mc.gap_noise;
        }
        noise /= static_cast<double>(ds.size());
        if (gap > 3.0 * noise) net_ok = false;
        if (net_ok) ++ok;
    }
    log << ok << "/20 nets";
    return ok == 20;
}

bool criterion5_thm3_domination(std::ostream& log) {
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(9000 + trial, 0);
        TinyNetSpec spec;
        spec.hidden_pool = {Activation::kSigmoid};
        spec.output = Activation::kSigmoid;
        const Network net = make_tiny_net(rng, spec);
        const Dataset ds = make_tiny_dataset(rng, 4, net.input_dim(), 2);
        const GapReport report = validate_thm3(net, ds);
        if (report.exact && report.bound_holds) ++ok;
    }
    log << ok << "/20 nets (measured delta, sigma, B, gamma)";
    return ok == 20;
}

bool criterion6_scaling_lemma(std::ostream& log) {
    int ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
        RngStream rng(10000 + trial, 0);
        const Network net = make_tiny_net(rng); // softmax output
        const Dataset ds = make_tiny_dataset(rng, 4, net.input_dim(),
                                             static_cast<int>(net.output_dim()));
        bool net_ok = true;
        for (double target : {0.05, 0.2, 0.5}) {
            const Network scaled = scale_to_linearize(net, target, ds);
            if (exact_el_v(scaled, ds) > target) net_ok = false;
        }
        if (net_ok) ++ok;
    }
    log << ok << "/20 nets, targets {0.05, 0.2, 0.5}";
    return ok == 20;
}

Network lambda_trend_net(std::uint64_t seed) {
    std::vector<DenseLayer> layers;
    std::size_t in = 16;
    for (std::size_t width : {64u, 64u}) {
        DenseLayer h;
        h.weights = Matrix(width, in);
        h.bias.assign(width, 0.0);
        h.activation = Activation::kRelu;
        h.keep_prob = in == 16 ? 0.8 : 0.5;
        layers.push_back(std::move(h));
        in = width;
    }
    DenseLayer out;
    out.weights = Matrix(4, in);
    out.bias.assign(4, 0.0);
    out.activation = Activation::kSoftmax;
    out.keep_prob = 0.5;
    layers.push_back(std::move(out));
    Network net(std::move(layers));
    RngStream rng(seed, streams::kInit);
    init_weights(net, rng);
    return net;
}

bool criterion7_lambda_trend(std::ostream& log) {
    const double lambdas[] = {0.0, 1.0, 10.0};
    int trend_ok = 0, error_ok = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Dataset train_ds = synth_gaussians(4, 16, 500, 3.0, 1000 + seed);
        const Dataset test_ds = synth_gaussians(4, 16, 500, 3.0, 2000 + seed);

        double gaps[3], errors[3];
        for (int li = 0; li < 3; ++li) {
            TrainConfig cfg;
            cfg.lambda = lambdas[li];
            cfg.eta0 = 0.1;
            cfg.rho = 0.025;
            cfg.momentum = 0.9;
            cfg.momentum_kind = MomentumKind::kStandard;
            cfg.max_norm = 3.5;
            cfg.batch_size = 50;
            cfg.epochs = 100;
            cfg.seed = seed;
            auto [net, train_log] = train(lambda_trend_net(seed), train_ds, {}, cfg);
            gaps[li] = measure_gap(net, test_ds, 100, 7);
            InferenceConfig standard;
            errors[li] = error_rate(net, test_ds, standard);
        }
        const bool strictly_down = gaps[0] > gaps[1] && gaps[1] > gaps[2];
        const bool error_held = errors[1] <= errors[0] + 0.5;
        trend_ok += strictly_down ? 1 : 0;
        error_ok += error_held ? 1 : 0;
        log << "\n  seed " << seed << ": delta_hat {" << gaps[0] << ", " << gaps[1] << ", "
            << gaps[2] << "}" << (strictly_down ? "" : " NOT strictly decreasing")
            << "; err {" << errors[0] << "%, " << errors[1] << "%, " << errors[2] << "%}"
            << (error_held ? "" : " lambda=1 regression > 0.5pp");
    }
    log << "\n  strict decrease " << trend_ok << "/5 seeds, error held " << error_ok
        << "/5 seeds";
    return trend_ok >= 4 && error_ok >= 4;
}

bool criterion8_trainer_mechanics(std::ostream& log) {
    const Dataset data = synth_gaussians(3, 8, 100, 3.0, 77);
    auto [train_ds, val_ds] = split(data, 60, 13);

    auto build = [] {
        std::vector<DenseLayer> layers;
        DenseLayer h;
        h.weights = Matrix(10, 8);
        h.bias.assign(10, 0.0);
        h.activation = Activation::kTanh;
        h.keep_prob = 0.8;
        layers.push_back(std::move(h));
        DenseLayer out;
        out.weights = Matrix(3, 10);
        out.bias.assign(3, 0.0);
        out.activation = Activation::kSoftmax;
        out.keep_prob = 0.5;
        layers.push_back(std::move(out));
        Network net(std::move(layers));
        RngStream rng(3, streams::kInit);
        init_weights(net, rng);
        return net;
    };

    TrainConfig cfg;
    cfg.lambda = 1.0;
    cfg.eta0 = 0.4; // aggressive so the projection actually engages
    cfg.rho = 0.025;
    cfg.momentum = 0.9;
    cfg.max_norm = 1.0;
    cfg.batch_size = 30;
    cfg.epochs = 8;
    cfg.seed = 21;

    bool max_norm_ok = true;
    std::size_t updates = 0;
    auto hook = [&](const Network& net, std::size_t, std::size_t) {
        ++updates;
        for (const DenseLayer& layer : net.layers())
            for (std::size_t r = 0; r < layer.weights.rows; ++r) {
                double sq = 0.0;
                for (std::size_t c = 0; c < layer.weights.cols; ++c)
                    sq += layer.weights(r, c) * layer.weights(r, c);
                if (std::sqrt(sq) > *cfg.max_norm + 1e-12) max_norm_ok = false;
            }
    };
    auto [net1, log1] = train(build(), train_ds, val_ds, cfg, hook);
    auto [net2, log2] = train(build(), train_ds, val_ds, cfg);

    bool lr_ok = true;
    for (const EpochRecord& rec : log1.epochs)
        if (rec.lr != cfg.eta0 / (1.0 + cfg.rho * static_cast<double>(rec.epoch)))
            lr_ok = false;

    std::stringstream b1, b2;
    save_network(net1, b1);
    save_network(net2, b2);
    const bool rerun_ok = b1.str() == b2.str();
    bool logs_ok = log1.epochs.size() == log2.epochs.size();
    if (logs_ok)
        for (std::size_t e = 0; e < log1.epochs.size(); ++e)
            logs_ok = logs_ok &&
                      log1.epochs[e].train_loss.total == log2.epochs[e].train_loss.total &&
                      log1.epochs[e].val_error == log2.epochs[e].val_error;

    log << updates << " updates max-norm " << (max_norm_ok ? "held" : "VIOLATED")
        << ", decay law " << (lr_ok ? "exact" : "WRONG") << ", rerun "
        << (rerun_ok && logs_ok ? "bit-identical" : "DIVERGED");
    return max_norm_ok && lr_ok && rerun_ok && logs_ok;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::ostream&)> check;
    };
    const std::vector<Criterion> criteria = {
        {"1 oracle equivalence (MC vs enumeration, 4 SE)", criterion1_oracle_equivalence},
        {"2 gradient exactness (central FD, step 1e-5, rel < 1e-6)",
         criterion2_gradient_exactness},
        {"3 theorem 1 jensen (lvm_nll <= expected dropout nll + 1e-12)", criterion3_jensen},
        {"4 affine exactness (V <= 1e-12, gap within MC noise)",
         criterion4_affine_exactness},
        {"5 theorem 3 bound domination (delta <= bound + 3 SE)",
         criterion5_thm3_domination},
        {"6 scaling lemma (exact V(theta~) <= delta_target)", criterion6_scaling_lemma},
        {"7 lambda trend (delta_hat down, error held, 4/5 seeds)",
         criterion7_lambda_trend},
        {"8 trainer mechanics (max-norm, decay law, bit-identical rerun)",
         criterion8_trainer_mechanics},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = criterion.check(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.name << " — "
                  << detail.str() << " (" << std::fixed << secs << "s)\n";
        std::cout.unsetf(std::ios::fixed);
        if (!ok) ++failures;
    }
    if (failures) std::cout << failures << " criterion(s) failed\n";
    return failures == 0 ? 0 : 1;
}
