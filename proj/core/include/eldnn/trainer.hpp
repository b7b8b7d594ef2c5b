#ifndef ELDNN_TRAINER_HPP
#define ELDNN_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eldnn/data.hpp"
#include "eldnn/network.hpp"
#include "eldnn/objective.hpp"

namespace eldnn {

enum class MomentumKind { kStandard, kNesterov };

struct TrainConfig {
    double lambda = 0.0;        // expectation-linearization weight
    double eta0 = 0.1;          // initial learning rate
    double rho = 0.025;         // decay: eta_t = eta0 / (1 + rho t)
    double momentum = 0.9;      // in [0,1)
    MomentumKind momentum_kind = MomentumKind::kStandard;
    std::optional<double> max_norm = 3.5; // per-row l2 cap, nullopt = off
    double l2 = 0.0;            // weight decay on weights only
    std::size_t batch_size = 200;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    std::size_t gap_every = 0;   // measure delta_hat every K epochs (0 = never)
    std::size_t gap_samples = 100;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double lr = 0.0;
    LossBreakdown train_loss;
    double val_error = -1.0;          // percent; -1 when no validation set
    std::optional<double> delta_hat;  // unsquared gap measure, when sampled
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_error = -1.0;
};

/// eta0 / (1 + rho t); t counts completed epochs, so epoch 0 trains at eta0.
double lr_at_epoch(const TrainConfig& cfg, std::size_t t);

/// Rescale every weight row with l2 norm above c back onto the ball of
/// radius c. Zero rows are left alone.
void max_norm_project(DenseLayer& layer, double c);

/// Called after every parameter update (used by tests to check invariants).
using UpdateHook = std::function<void(const Network&, std::size_t epoch, std::size_t batch)>;

/// Mini-batch SGD with momentum on the regularized dropout objective:
/// per epoch shuffle, per batch one mask per example, velocity update
/// v <- momentum v - eta_t g (standard) or the gradient-at-lookahead
/// Nesterov variant, then max-norm projection of every layer. Validation
/// error is evaluated with the deterministic scaled pass; when a validation
/// set is present the best-validation parameters are returned, otherwise
/// the final ones.
std::pair<Network, TrainLog> train(Network net, const Dataset& train_set,
                                   const Dataset& val_set, const TrainConfig& cfg,
                                   const UpdateHook& hook = {});

/// CSV rows epoch,lr,nll,penalty,total,val_error,delta_hat (blank when not
/// measured). `preamble` lines are emitted first, each prefixed with '# '.
void write_train_log_csv(const TrainLog& log, std::ostream& out,
                         const std::vector<std::string>& preamble = {});

} // namespace eldnn

#endif
