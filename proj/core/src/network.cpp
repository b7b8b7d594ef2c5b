#include "eldnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "eldnn/errors.hpp"

namespace eldnn {

Vector apply_activation(Activation act, const Vector& pre) {
    Vector out(pre.size());
    switch (act) {
    case Activation::kIdentity:
        out = pre;
        break;
    case Activation::kSigmoid:
        for (std::size_t i = 0; i < pre.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-pre[i]));
        break;
    case Activation::kTanh:
        for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
        break;
    case Activation::kRelu:
        for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
        break;
    case Activation::kSoftmax: {
        // max-shifted for stability; renormalized sum is 1 to rounding
        double mx = -std::numeric_limits<double>::infinity();
        for (double z : pre) mx = std::max(mx, z);
        double sum = 0.0;
        for (std::size_t i = 0; i < pre.size(); ++i) {
            out[i] = std::exp(pre[i] - mx);
            sum += out[i];
        }
        for (double& o : out) o /= sum;
        break;
    }
    }
    return out;
}

double activation_derivative(Activation act, double output) {
    switch (act) {
    case Activation::kIdentity: return 1.0;
    case Activation::kSigmoid: return output * (1.0 - output);
    case Activation::kTanh: return 1.0 - output * output;
    case Activation::kRelu: return output > 0.0 ? 1.0 : 0.0; // subgradient 0 at the kink
    case Activation::kSoftmax: break;
    }
    throw DomainError("activation_derivative: softmax has no elementwise derivative");
}

const char* activation_name(Activation act) {
    switch (act) {
    case Activation::kIdentity: return "identity";
    case Activation::kSigmoid: return "sigmoid";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSoftmax: return "softmax";
    }
    return "?";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::kIdentity;
    if (name == "sigmoid" || name == "logistic") return Activation::kSigmoid;
    if (name == "tanh") return Activation::kTanh;
    if (name == "relu") return Activation::kRelu;
    if (name == "softmax") return Activation::kSoftmax;
    throw DomainError("unknown activation '" + name + "'");
}

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw DimensionError("Network: needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const DenseLayer& layer = layers_[l];
        if (layer.weights.data.size() != layer.weights.rows * layer.weights.cols)
            throw DimensionError("Network: layer " + std::to_string(l) + " weight storage");
        if (layer.bias.size() != layer.out_dim())
            throw DimensionError("Network: layer " + std::to_string(l) + " bias length");
        if (l > 0 && layer.in_dim() != layers_[l - 1].out_dim())
            throw DimensionError("Network: dim chain breaks at layer " + std::to_string(l));
        if (!(layer.keep_prob > 0.0 && layer.keep_prob <= 1.0))
            throw DomainError("Network: keep_prob of layer " + std::to_string(l) +
                              " outside (0,1]");
        if (layer.activation == Activation::kSoftmax && l + 1 != layers_.size())
            throw DomainError("Network: softmax only allowed on the final layer");
    }
}

bool Network::has_softmax_output() const {
    return !layers_.empty() && layers_.back().activation == Activation::kSoftmax;
}

std::size_t Network::dropout_unit_count() const {
    std::size_t n = 0;
    for (const DenseLayer& layer : layers_)
        if (layer.keep_prob < 1.0) n += layer.in_dim();
    return n;
}

MaskSample all_ones_mask(const Network& net) {
    MaskSample s;
    s.masks.reserve(net.depth());
    for (const DenseLayer& layer : net.layers()) s.masks.emplace_back(layer.in_dim(), 1.0);
    return s;
}

MaskSample sample_mask(const Network& net, RngStream& rng) {
    MaskSample s;
    s.masks.reserve(net.depth());
    for (const DenseLayer& layer : net.layers())
        s.masks.push_back(bernoulli_vector(rng, layer.in_dim(), layer.keep_prob));
    return s;
}

ForwardTrace forward_stochastic(const Network& net, const Vector& x, const MaskSample& s) {
    if (x.size() != net.input_dim())
        throw DimensionError("forward_stochastic: input length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(net.input_dim()));
    if (s.masks.size() != net.depth())
        throw DimensionError("forward_stochastic: mask count mismatch");
    ForwardTrace trace;
    trace.outputs.reserve(net.depth() + 1);
    trace.outputs.push_back(x);
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const DenseLayer& layer = net.layer(l);
        if (s.masks[l].size() != layer.in_dim())
            throw DimensionError("forward_stochastic: mask " + std::to_string(l) + " length");
        Vector u = hadamard(trace.outputs.back(), s.masks[l]);
        Vector z = matvec(layer.weights, u);
        axpy(1.0, layer.bias, z);
        trace.outputs.push_back(apply_activation(layer.activation, z));
    }
    return trace;
}

ForwardTrace forward_deterministic(const Network& net, const Vector& x) {
    if (x.size() != net.input_dim())
        throw DimensionError("forward_deterministic: input length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(net.input_dim()));
    ForwardTrace trace;
    trace.deterministic = true;
    trace.outputs.reserve(net.depth() + 1);
    trace.outputs.push_back(x);
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const DenseLayer& layer = net.layer(l);
        Vector u = scaled(trace.outputs.back(), layer.keep_prob);
        Vector z = matvec(layer.weights, u);
        axpy(1.0, layer.bias, z);
        trace.outputs.push_back(apply_activation(layer.activation, z));
    }
    return trace;
}

namespace {

struct MaskBit {
    std::size_t layer;
    std::size_t index;
    double keep;
};

std::vector<MaskBit> collect_mask_bits(const Network& net, std::size_t max_units) {
    std::vector<MaskBit> bits;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        const DenseLayer& layer = net.layer(l);
        if (layer.keep_prob >= 1.0) continue;
        for (std::size_t i = 0; i < layer.in_dim(); ++i)
            bits.push_back({l, i, layer.keep_prob});
    }
    if (bits.size() > max_units)
        throw CapacityError("mask enumeration: " + std::to_string(bits.size()) +
                            " dropout units exceed cap " + std::to_string(max_units));
    return bits;
}

} // namespace

void for_each_mask(const Network& net,
                   const std::function<void(double, const MaskSample&)>& fn,
                   std::size_t max_units) {
    const std::vector<MaskBit> bits = collect_mask_bits(net, max_units);
    MaskSample s = all_ones_mask(net);
    const std::uint64_t total = 1ull << bits.size();
    for (std::uint64_t code = 0; code < total; ++code) {
        double prob = 1.0;
        for (std::size_t b = 0; b < bits.size(); ++b) {
            const bool on = (code >> b) & 1u;
            s.masks[bits[b].layer][bits[b].index] = on ? 1.0 : 0.0;
            prob *= on ? bits[b].keep : 1.0 - bits[b].keep;
        }
        fn(prob, s);
    }
}

Vector enumerate_expectation(const Network& net, const Vector& x, std::size_t max_units) {
    Vector acc(net.output_dim(), 0.0);
    for_each_mask(
        net,
        [&](double prob, const MaskSample& s) {
            const ForwardTrace t = forward_stochastic(net, x, s);
            axpy(prob, t.output(), acc);
        },
        max_units);
    return acc;
}

double layer_operator_norm(const DenseLayer& layer) {
    switch (layer.activation) {
    case Activation::kIdentity:
    case Activation::kTanh:
    case Activation::kRelu:
        return spectral_norm(layer.weights);
    case Activation::kSigmoid:
        return 0.25 * spectral_norm(layer.weights);
    case Activation::kSoftmax:
        // Jacobian of softmax(W u) is bounded by twice the l2 norm of the
        // flattened weight block, uniformly in u.
        return 2.0 * frobenius_norm(layer.weights);
    }
    return 0.0;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError(std::string("network file truncated reading ") + what);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& in, const char* what) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw FormatError(std::string("network file truncated reading ") + what);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

constexpr std::uint32_t kFormatVersion = 1;

} // namespace

void save_network(const Network& net, std::ostream& out) {
    out.write("ELDN", 4);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(net.depth()));
    for (const DenseLayer& layer : net.layers()) {
        put_u32(out, static_cast<std::uint32_t>(layer.out_dim()));
        put_u32(out, static_cast<std::uint32_t>(layer.in_dim()));
        const auto tag = static_cast<unsigned char>(layer.activation);
        out.write(reinterpret_cast<const char*>(&tag), 1);
        put_f64(out, layer.keep_prob);
        for (double w : layer.weights.data) put_f64(out, w);
        for (double b : layer.bias) put_f64(out, b);
    }
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    save_network(net, out);
    if (!out) throw FormatError("short write to '" + path + "'");
}

Network load_network(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "ELDN", 4) != 0)
        throw FormatError("bad network magic at byte offset 0 (want \"ELDN\")");
    const std::uint32_t version = get_u32(in, "version");
    if (version != kFormatVersion)
        throw FormatError("unsupported network format version " + std::to_string(version));
    const std::uint32_t count = get_u32(in, "layer count");
    std::vector<DenseLayer> layers;
    layers.reserve(count);
    for (std::uint32_t l = 0; l < count; ++l) {
        DenseLayer layer;
        const std::uint32_t out_dim = get_u32(in, "out dim");
        const std::uint32_t in_dim = get_u32(in, "in dim");
        unsigned char tag;
        if (!in.read(reinterpret_cast<char*>(&tag), 1))
            throw FormatError("network file truncated reading activation tag");
        if (tag > static_cast<unsigned char>(Activation::kSoftmax))
            throw FormatError("unknown activation tag " + std::to_string(tag) + " in layer " +
                              std::to_string(l));
        layer.activation = static_cast<Activation>(tag);
        layer.keep_prob = get_f64(in, "keep_prob");
        layer.weights = Matrix(out_dim, in_dim);
        for (double& w : layer.weights.data) w = get_f64(in, "weights");
        layer.bias.resize(out_dim);
        for (double& b : layer.bias) b = get_f64(in, "biases");
        layers.push_back(std::move(layer));
    }
    return Network(std::move(layers));
}

Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open network file '" + path + "'");
    return load_network(in);
}

void init_weights(Network& net, RngStream& rng) {
    for (DenseLayer& layer : net.layers()) {
        const double bound =
            std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
        for (double& w : layer.weights.data) w = rng.next_uniform(-bound, bound);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
}

} // namespace eldnn
