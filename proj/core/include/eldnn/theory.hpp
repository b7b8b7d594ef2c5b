#ifndef ELDNN_THEORY_HPP
#define ELDNN_THEORY_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eldnn/data.hpp"
#include "eldnn/network.hpp"

namespace eldnn {

/// Which forward dynamics generate a layer's input marginal when measuring
/// per-layer expectation-linearity. The deviation-bound statement leaves
/// this open; both readings are available.
enum class LayerInputPath { kDeterministic, kStochastic };

struct JensenCheck {
    double lvm_nll = 0.0;              // -sum log E_S p(y|x,S)
    double dropout_expected_nll = 0.0; // -sum E_S log p(y|x,S)
};

/// Exact (enumerated) comparison of the marginalized likelihood against the
/// dropout expected loss. The first is never larger (Jensen).
JensenCheck jensen_check(const Network& net, const Dataset& ds,
                         std::size_t max_units = kDefaultEnumerationCap);

/// E_X || E_G f_l(h .* G) - f_l(h .* p_l) ||_2 for layer `layer`, the layer
/// input h produced by the chosen path. MC over mc_samples masks per input.
double measure_layer_delta(const Network& net, std::size_t layer, const Dataset& ds,
                           std::size_t mc_samples, std::uint64_t seed,
                           LayerInputPath path = LayerInputPath::kDeterministic);

/// Same quantity with both the input distribution and the layer mask
/// enumerated exactly.
double measure_layer_delta_exact(const Network& net, std::size_t layer, const Dataset& ds,
                                 LayerInputPath path = LayerInputPath::kDeterministic,
                                 std::size_t max_units = kDefaultEnumerationCap);

struct BoundInputs {
    double B = 0.0;           // max layer operator norm
    double gamma = 0.0;       // max keep probability
    double sigma = 0.0;       // sqrt(max_l E_X[tr Var[H^(l)|X]])
    double delta_layer = 0.0; // max per-layer delta
    std::size_t L = 0;        // layer count
    double alpha_bound = 0.0; // ||x||_2 <= alpha over the data
    double beta = 0.0;        // ||h^(L)|| <= beta over data and masks
    std::size_t n = 0;        // sample size
    double nu = 0.05;         // confidence parameter
};

/// (B g)^{L-1} d + (d + B g s) (1-(B g)^{L-1})/(1-B g); the removable
/// singularity at B g == 1 is filled with the analytic limit
/// d + (d + s)(L-1).
double thm3_bound(const BoundInputs& in);

/// 2 a B^L (g^{L/2}+1)/sqrt(n) + beta sqrt(log(1/nu)/n).
double thm4_bound(const BoundInputs& in);

enum class BGammaRegime { kContracting, kCritical, kExpanding };
const char* regime_name(BGammaRegime r);

struct LayerGapStats {
    double delta = 0.0;         // per-layer expectation-linearity gap
    double operator_norm = 0.0; // per-layer B
};

struct GapReport {
    std::vector<LayerGapStats> layers;
    double gamma = 0.0;
    double sigma = 0.0;
    double delta_hat = 0.0;     // empirical measure, MC masks
    double delta_mean = 0.0;    // mean-gap estimate (exact when enumerable)
    double delta_mean_se = 0.0; // standard error of delta_mean
    BoundInputs inputs;
    double thm3 = 0.0;
    double thm4 = 0.0;
    BGammaRegime regime = BGammaRegime::kContracting;
    bool bound_holds = false;   // delta_mean <= thm3 + 3 se
    bool exact = false;         // true when enumeration replaced MC
    LayerInputPath delta_path = LayerInputPath::kStochastic;
};

struct Thm3Options {
    std::size_t mc_samples = 100;
    std::uint64_t seed = 0;
    double nu = 0.05;
    /// The deviation bound's proof composes per-layer gaps along the
    /// stochastic forward dynamics, so that is the default here.
    LayerInputPath delta_path = LayerInputPath::kStochastic;
    std::size_t max_units = kDefaultEnumerationCap;
};

/// Measure (delta, B, gamma, sigma) from the network and data, evaluate the
/// depth-composition bound, measure the network gap, and record whether the
/// bound dominates it. Enumeration is used when the net fits under the cap,
/// MC otherwise. A violated bound flags the report, never passes silently.
GapReport validate_thm3(const Network& net, const Dataset& ds,
                        const Thm3Options& opts = {});

/// Output-layer eta-scaling: measure beta = max ||h^(L-1)||_2 over the data
/// (all masks when enumerable, `mask_samples` sampled ones plus the
/// deterministic pass otherwise), then scale the softmax layer's weights and
/// biases by alpha = min(1, delta_target / (4 beta ||eta||_2)), where
/// ||eta||_2 is the l2 norm of the flattened output weight block.
Network scale_to_linearize(const Network& net, double delta_target, const Dataset& ds,
                           std::size_t mask_samples = 1000, std::uint64_t seed = 0,
                           std::size_t max_units = kDefaultEnumerationCap);

/// Exact marginal p(y|x) = E_S p(y|x,S) by enumeration.
double marginal_likelihood(const Network& net, const Vector& x, int label,
                           std::size_t max_units = kDefaultEnumerationCap);

struct LikelihoodGap {
    double value = 0.0;     // (1/n)(l(D; hat) - l(D; tilde))
    double std_error = 0.0; // 0 when exact
    bool exact = true;
};

/// Mean marginal log-likelihood difference between two same-architecture
/// networks. Falls back to an MC marginal (with reported standard error)
/// when either net is over the enumeration cap.
LikelihoodGap likelihood_gap(const Network& net_hat, const Network& net_tilde,
                             const Dataset& ds, std::size_t mc_samples = 100000,
                             std::uint64_t seed = 0,
                             std::size_t max_units = kDefaultEnumerationCap);

/// Everything measurable around the likelihood cost of eta-scaling. The
/// uniform-limit bound value is reported for inspection, never asserted:
/// its remaining constants are distribution-dependent.
struct ScalingTradeoff {
    double delta_target = 0.0;
    double alpha = 1.0;             // applied output scale, min(1, ...)
    double beta = 0.0;              // max ||h^(L-1)|| over data and masks
    double eta_norm = 0.0;          // flattened output weight norm
    LikelihoodGap gap;              // measured likelihood gap hat vs scaled
    double mean_kl_to_uniform = 0.0;
    double uniform_limit_bound = 0.0; // (1 - alpha) * mean KL to uniform
};

ScalingTradeoff measure_scaling_tradeoff(const Network& net, const Dataset& ds,
                                         double delta_target,
                                         std::size_t mask_samples = 1000,
                                         std::uint64_t seed = 0,
                                         std::size_t max_units = kDefaultEnumerationCap);

/// Exact helpers shared with the test oracles.
double exact_network_delta(const Network& net, const Dataset& ds,
                           std::size_t max_units = kDefaultEnumerationCap);
double exact_el_v(const Network& net, const Dataset& ds,
                  std::size_t max_units = kDefaultEnumerationCap);
double exact_sigma(const Network& net, const Dataset& ds,
                   std::size_t max_units = kDefaultEnumerationCap);

std::string gap_report_json(const GapReport& report);
void write_gap_report_json(const GapReport& report, const std::string& path);

} // namespace eldnn

#endif
