#ifndef ELDNN_NETWORK_HPP
#define ELDNN_NETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "eldnn/tensor.hpp"

namespace eldnn {

enum class Activation : std::uint8_t {
    kIdentity = 0,
    kSigmoid = 1,
    kTanh = 2,
    kRelu = 3,
    kSoftmax = 4, // final layer only
};

Vector apply_activation(Activation act, const Vector& pre);
/// d(activation)/d(pre-activation), expressed through the activation output.
/// Not defined for softmax (its Jacobian is handled where needed).
double activation_derivative(Activation act, double output);
const char* activation_name(Activation act);
Activation activation_from_name(const std::string& name);

/// One dense layer h = act(W u + b), where u is this layer's masked input.
/// keep_prob is the Bernoulli keep probability of the mask applied to this
/// layer's INPUT (for the first layer that is the network input).
struct DenseLayer {
    Matrix weights; // out x in
    Vector bias;    // out
    Activation activation = Activation::kIdentity;
    double keep_prob = 1.0;

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
};

/// Feedforward network h^(l) = f_l(h^(l-1) .* mask_l). The mask on layer l's
/// input is Bernoulli(layers[l].keep_prob); the final output is never masked,
/// so there are exactly layers.size() masks.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<DenseLayer> layers);

    std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
    std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
    std::size_t depth() const { return layers_.size(); }
    double input_keep_prob() const { return layers_.front().keep_prob; }

    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const DenseLayer& layer(std::size_t l) const { return layers_[l]; }
    DenseLayer& layer(std::size_t l) { return layers_[l]; }

    bool has_softmax_output() const;
    /// Count of mask positions with keep_prob < 1 (the ones enumeration has
    /// to branch on).
    std::size_t dropout_unit_count() const;

private:
    std::vector<DenseLayer> layers_;
};

/// One realization of all dropout variables: masks[l] applies to the input
/// of layer l, entries in {0,1}.
struct MaskSample {
    std::vector<Vector> masks;
};

/// All layer outputs of one pass: outputs[0] is the input, outputs[L] the
/// network output. deterministic == true means the pass used the mean mask
/// (inputs scaled by keep_prob) instead of a sampled one.
struct ForwardTrace {
    std::vector<Vector> outputs;
    bool deterministic = false;

    const Vector& input() const { return outputs.front(); }
    const Vector& output() const { return outputs.back(); }
};

MaskSample all_ones_mask(const Network& net);
MaskSample sample_mask(const Network& net, RngStream& rng);

ForwardTrace forward_stochastic(const Network& net, const Vector& x, const MaskSample& s);
/// Eq-(1) pass with every mask replaced by its mean: layer input scaled by
/// keep_prob. Standard dropout inference.
ForwardTrace forward_deterministic(const Network& net, const Vector& x);

/// Exact E_S[h^(L)(x,S)] by exhaustive enumeration over every mask
/// configuration. Positions with keep_prob == 1 are pinned to 1 and not
/// branched on. Throws CapacityError when dropout_unit_count() > max_units.
inline constexpr std::size_t kDefaultEnumerationCap = 24;
Vector enumerate_expectation(const Network& net, const Vector& x,
                             std::size_t max_units = kDefaultEnumerationCap);

/// Enumerate all mask configurations, invoking fn(probability, mask) for
/// each. Shared driver for the exact oracles in the theory module.
void for_each_mask(const Network& net, const std::function<void(double, const MaskSample&)>& fn,
                   std::size_t max_units = kDefaultEnumerationCap);

/// sup|act'| * ||W||_op; the softmax output layer is bounded by twice the
/// l2 norm of its concatenated weight block instead.
double layer_operator_norm(const DenseLayer& layer);

/// Flat binary container, magic "ELDN": header (magic, version u32, layer
/// count u32), then per layer out/in dims (u32 x2), activation tag (u8),
/// keep_prob (f64), row-major f64 weights, f64 biases. Little-endian.
void save_network(const Network& net, std::ostream& out);
void save_network(const Network& net, const std::string& path);
Network load_network(std::istream& in);
Network load_network(const std::string& path);

/// Uniform(-sqrt(6/(fan_in+fan_out)), +...) weights, zero biases.
void init_weights(Network& net, RngStream& rng);

} // namespace eldnn

#endif
