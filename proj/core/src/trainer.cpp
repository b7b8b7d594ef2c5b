#include "eldnn/trainer.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "eldnn/errors.hpp"
#include "eldnn/inference.hpp"
#include "eldnn/rng.hpp"

namespace eldnn {

double lr_at_epoch(const TrainConfig& cfg, std::size_t t) {
    return cfg.eta0 / (1.0 + cfg.rho * static_cast<double>(t));
}

void max_norm_project(DenseLayer& layer, double c) {
    if (c <= 0.0) throw DomainError("max_norm_project: c must be positive");
    for (std::size_t r = 0; r < layer.weights.rows; ++r) {
        double* row = layer.weights.data.data() + r * layer.weights.cols;
        double sq = 0.0;
        for (std::size_t i = 0; i < layer.weights.cols; ++i) sq += row[i] * row[i];
        const double norm = std::sqrt(sq);
        if (norm > c) {
            const double scale = c / norm;
            for (std::size_t i = 0; i < layer.weights.cols; ++i) row[i] *= scale;
        }
    }
}

namespace {

void validate_config(const TrainConfig& cfg) {
    if (cfg.lambda < 0.0) throw DomainError("train: lambda must be >= 0");
    if (cfg.eta0 <= 0.0) throw DomainError("train: eta0 must be > 0");
    if (cfg.rho < 0.0) throw DomainError("train: rho must be >= 0");
    if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
        throw DomainError("train: momentum must be in [0,1)");
    if (cfg.max_norm && *cfg.max_norm <= 0.0)
        throw DomainError("train: max_norm must be positive");
    if (cfg.l2 < 0.0) throw DomainError("train: l2 must be >= 0");
    if (cfg.batch_size == 0) throw DomainError("train: batch_size must be >= 1");
}

struct Velocity {
    std::vector<Matrix> w;
    std::vector<Vector> b;

    static Velocity zeros_like(const Network& net) {
        Velocity v;
        for (const DenseLayer& layer : net.layers()) {
            v.w.emplace_back(layer.out_dim(), layer.in_dim());
            v.b.emplace_back(layer.out_dim(), 0.0);
        }
        return v;
    }
};

} // namespace

std::pair<Network, TrainLog> train(Network net, const Dataset& train_set,
                                   const Dataset& val_set, const TrainConfig& cfg,
                                   const UpdateHook& hook) {
    validate_config(cfg);
    if (train_set.size() == 0) throw DomainError("train: empty training set");
    if (train_set.dim() != net.input_dim())
        throw DimensionError("train: data dim " + std::to_string(train_set.dim()) +
                             " != network input dim " + std::to_string(net.input_dim()));

    RngStream shuffle_rng(cfg.seed, streams::kShuffle);
    RngStream mask_rng(cfg.seed, streams::kMask);
    Velocity vel = Velocity::zeros_like(net);

    TrainLog log;
    Network best = net;
    double best_val = -1.0;
    std::size_t best_epoch = 0;

    const std::size_t n = train_set.size();
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = lr_at_epoch(cfg, epoch);
        const std::vector<std::size_t> order = shuffle_rng.permutation(n);

        LossBreakdown epoch_loss;
        epoch_loss.lambda = cfg.lambda;
        std::size_t batch_count = 0;

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, n);
            Batch batch;
            std::vector<MaskSample> masks;
            batch.reserve(end - start);
            masks.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch.push_back({train_set.inputs[order[i]], train_set.labels[order[i]]});
                masks.push_back(sample_mask(net, mask_rng));
            }

            LossBreakdown loss;
            GradientSet grads;
            try {
                if (cfg.momentum_kind == MomentumKind::kNesterov && cfg.momentum > 0.0) {
                    // Gradient at the lookahead point theta + momentum * v.
                    Network ahead = net;
                    for (std::size_t l = 0; l < ahead.depth(); ++l) {
                        for (std::size_t i = 0; i < ahead.layer(l).weights.data.size(); ++i)
                            ahead.layer(l).weights.data[i] += cfg.momentum * vel.w[l].data[i];
                        for (std::size_t i = 0; i < ahead.layer(l).bias.size(); ++i)
                            ahead.layer(l).bias[i] += cfg.momentum * vel.b[l][i];
                    }
                    std::tie(loss, grads) = loss_and_grad(ahead, batch, masks, cfg.lambda);
                    if (cfg.l2 > 0.0)
                        for (std::size_t l = 0; l < net.depth(); ++l)
                            for (std::size_t i = 0; i < grads.weight_grads[l].data.size(); ++i)
                                grads.weight_grads[l].data[i] +=
                                    cfg.l2 * ahead.layer(l).weights.data[i];
                } else {
                    std::tie(loss, grads) = loss_and_grad(net, batch, masks, cfg.lambda);
                    if (cfg.l2 > 0.0)
                        for (std::size_t l = 0; l < net.depth(); ++l)
                            for (std::size_t i = 0; i < grads.weight_grads[l].data.size(); ++i)
                                grads.weight_grads[l].data[i] +=
                                    cfg.l2 * net.layer(l).weights.data[i];
                }
            } catch (const NumericError& e) {
                throw NumericError("train: " + std::string(e.what()) + " (epoch " +
                                       std::to_string(epoch) + ", batch " +
                                       std::to_string(batch_count) + ")",
                                   e.layer_index);
            }
            if (!std::isfinite(loss.total))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_count));

            for (std::size_t l = 0; l < net.depth(); ++l) {
                DenseLayer& layer = net.layer(l);
                for (std::size_t i = 0; i < layer.weights.data.size(); ++i) {
                    vel.w[l].data[i] =
                        cfg.momentum * vel.w[l].data[i] - lr * grads.weight_grads[l].data[i];
                    layer.weights.data[i] += vel.w[l].data[i];
                }
                for (std::size_t i = 0; i < layer.bias.size(); ++i) {
                    vel.b[l][i] = cfg.momentum * vel.b[l][i] - lr * grads.bias_grads[l][i];
                    layer.bias[i] += vel.b[l][i];
                }
                if (cfg.max_norm) max_norm_project(layer, *cfg.max_norm);
            }
            if (hook) hook(net, epoch, batch_count);

            epoch_loss.nll += loss.nll;
            epoch_loss.penalty += loss.penalty;
            epoch_loss.total += loss.total;
            ++batch_count;
        }

        const double inv_batches = 1.0 / static_cast<double>(batch_count);
        epoch_loss.nll *= inv_batches;
        epoch_loss.penalty *= inv_batches;
        epoch_loss.total *= inv_batches;

        EpochRecord rec;
        rec.epoch = epoch;
        rec.lr = lr;
        rec.train_loss = epoch_loss;
        if (val_set.size() > 0) {
            InferenceConfig standard;
            rec.val_error = error_rate(net, val_set, standard);
            if (best_val < 0.0 || rec.val_error < best_val) {
                best_val = rec.val_error;
                best = net;
                best_epoch = epoch;
            }
        }
        if (cfg.gap_every > 0 && (epoch + 1) % cfg.gap_every == 0)
            rec.delta_hat = measure_gap(net, val_set.size() > 0 ? val_set : train_set,
                                        cfg.gap_samples, cfg.seed);
        log.epochs.push_back(std::move(rec));
    }

    log.best_epoch = best_epoch;
    log.best_val_error = best_val;
    if (val_set.size() > 0) return {std::move(best), std::move(log)};
    return {std::move(net), std::move(log)};
}

void write_train_log_csv(const TrainLog& log, std::ostream& out,
                         const std::vector<std::string>& preamble) {
    for (const std::string& line : preamble) out << "# " << line << "\n";
    out << "epoch,lr,nll,penalty,total,val_error,delta_hat\n";
    std::ostringstream row;
    row.precision(17);
    for (const EpochRecord& rec : log.epochs) {
        row.str("");
        row << rec.epoch << ',' << rec.lr << ',' << rec.train_loss.nll << ','
            << rec.train_loss.penalty << ',' << rec.train_loss.total << ',';
        if (rec.val_error >= 0.0) row << rec.val_error;
        row << ',';
        if (rec.delta_hat) row << *rec.delta_hat;
        out << row.str() << "\n";
    }
}

} // namespace eldnn
