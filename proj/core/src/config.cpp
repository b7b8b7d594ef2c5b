#include "eldnn/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eldnn/errors.hpp"

namespace eldnn {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
    throw FormatError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& origin, std::size_t line) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        fail(origin, line, "expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& v, const std::string& origin, std::size_t line) {
    try {
        std::size_t used = 0;
        const std::uint64_t n = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        fail(origin, line, "expected a non-negative integer, got '" + v + "'");
    }
}

/// "size:activation[:keep_prob]"
LayerSpec parse_layer(const std::string& item, bool first, const std::string& origin,
                      std::size_t line) {
    const std::vector<std::string> parts = split_list(item, ':');
    if (parts.size() < 2 || parts.size() > 3)
        fail(origin, line, "layer spec '" + item + "' wants size:activation[:keep_prob]");
    LayerSpec spec;
    spec.size = static_cast<std::size_t>(parse_u64(parts[0], origin, line));
    try {
        spec.activation = activation_from_name(parts[1]);
    } catch (const DomainError& e) {
        fail(origin, line, e.what());
    }
    // defaults: 0.2 keep on the input mask, 0.5 on hidden masks
    spec.keep_prob = first ? 0.2 : 0.5;
    if (parts.size() == 3) spec.keep_prob = parse_double(parts[2], origin, line);
    if (!(spec.keep_prob > 0.0 && spec.keep_prob <= 1.0))
        fail(origin, line, "keep_prob must be in (0,1]");
    return spec;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    bool saw_lambdas = false;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "network" && section != "train" && section != "inference" &&
                section != "data" && section != "sweep" && section != "output")
                fail(origin, line_no, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, line_no, "empty key");
        if (section.empty()) fail(origin, line_no, "key '" + key + "' outside any section");

        if (section == "network") {
            if (key == "input_dim") {
                cfg.input_dim = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            } else if (key == "layers") {
                cfg.layers.clear();
                for (const std::string& item : split_list(value, ','))
                    cfg.layers.push_back(
                        parse_layer(item, cfg.layers.empty(), origin, line_no));
                if (cfg.layers.empty()) fail(origin, line_no, "empty layer list");
            } else {
                fail(origin, line_no, "unknown [network] key '" + key + "'");
            }
        } else if (section == "train") {
            if (key == "lambda") cfg.train.lambda = parse_double(value, origin, line_no);
            else if (key == "eta0") cfg.train.eta0 = parse_double(value, origin, line_no);
            else if (key == "rho") cfg.train.rho = parse_double(value, origin, line_no);
            else if (key == "momentum") cfg.train.momentum = parse_double(value, origin, line_no);
            else if (key == "momentum_kind") {
                if (value == "standard") cfg.train.momentum_kind = MomentumKind::kStandard;
                else if (value == "nesterov") cfg.train.momentum_kind = MomentumKind::kNesterov;
                else fail(origin, line_no, "momentum_kind must be standard or nesterov");
            } else if (key == "max_norm") {
                if (value == "none") cfg.train.max_norm.reset();
                else cfg.train.max_norm = parse_double(value, origin, line_no);
            } else if (key == "l2") cfg.train.l2 = parse_double(value, origin, line_no);
            else if (key == "batch_size")
                cfg.train.batch_size = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            else if (key == "epochs")
                cfg.train.epochs = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            else if (key == "seed") cfg.train.seed = parse_u64(value, origin, line_no);
            else if (key == "gap_every")
                cfg.train.gap_every = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            else if (key == "gap_samples")
                cfg.train.gap_samples = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            else fail(origin, line_no, "unknown [train] key '" + key + "'");
        } else if (section == "inference") {
            if (key == "mode") {
                if (value == "standard") cfg.inference.mode = InferenceMode::kStandard;
                else if (value == "monte_carlo") cfg.inference.mode = InferenceMode::kMonteCarlo;
                else fail(origin, line_no, "mode must be standard or monte_carlo");
            } else if (key == "mc_samples") {
                cfg.inference.mc_samples =
                    static_cast<std::size_t>(parse_u64(value, origin, line_no));
            } else if (key == "seed") {
                cfg.inference.seed = parse_u64(value, origin, line_no);
            } else {
                fail(origin, line_no, "unknown [inference] key '" + key + "'");
            }
        } else if (section == "data") {
            if (key == "source") {
                if (value != "synth" && value != "idx")
                    fail(origin, line_no, "source must be synth or idx");
                cfg.source = value;
            } else if (key == "synth_classes") cfg.synth_classes = static_cast<int>(parse_u64(value, origin, line_no));
            else if (key == "synth_dim") cfg.synth_dim = static_cast<int>(parse_u64(value, origin, line_no));
            else if (key == "synth_per_class") cfg.synth_per_class = static_cast<int>(parse_u64(value, origin, line_no));
            else if (key == "synth_separation") cfg.synth_separation = parse_double(value, origin, line_no);
            else if (key == "data_seed") cfg.data_seed = parse_u64(value, origin, line_no);
            else if (key == "idx_images") cfg.idx_images = value;
            else if (key == "idx_labels") cfg.idx_labels = value;
            else if (key == "idx_test_images") cfg.idx_test_images = value;
            else if (key == "idx_test_labels") cfg.idx_test_labels = value;
            else if (key == "holdout")
                cfg.holdout = static_cast<std::size_t>(parse_u64(value, origin, line_no));
            else fail(origin, line_no, "unknown [data] key '" + key + "'");
        } else if (section == "sweep") {
            if (key == "lambdas") {
                cfg.lambdas.clear();
                for (const std::string& item : split_list(value, ','))
                    cfg.lambdas.push_back(parse_double(item, origin, line_no));
                if (cfg.lambdas.empty()) fail(origin, line_no, "empty lambda list");
                saw_lambdas = true;
            } else {
                fail(origin, line_no, "unknown [sweep] key '" + key + "'");
            }
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = value;
            else fail(origin, line_no, "unknown [output] key '" + key + "'");
        }
    }

    if (cfg.input_dim == 0) fail(origin, line_no, "[network] input_dim missing or zero");
    if (cfg.layers.empty()) fail(origin, line_no, "[network] layers missing");
    (void)saw_lambdas;
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[network]\n";
    out << "input_dim = " << cfg.input_dim << "\n";
    out << "layers = ";
    for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
        if (i) out << ", ";
        out << cfg.layers[i].size << ':' << activation_name(cfg.layers[i].activation) << ':'
            << cfg.layers[i].keep_prob;
    }
    out << "\n\n[train]\n";
    out << "lambda = " << cfg.train.lambda << "\n";
    out << "eta0 = " << cfg.train.eta0 << "\n";
    out << "rho = " << cfg.train.rho << "\n";
    out << "momentum = " << cfg.train.momentum << "\n";
    out << "momentum_kind = "
        << (cfg.train.momentum_kind == MomentumKind::kNesterov ? "nesterov" : "standard")
        << "\n";
    if (cfg.train.max_norm) out << "max_norm = " << *cfg.train.max_norm << "\n";
    else out << "max_norm = none\n";
    out << "l2 = " << cfg.train.l2 << "\n";
    out << "batch_size = " << cfg.train.batch_size << "\n";
    out << "epochs = " << cfg.train.epochs << "\n";
    out << "seed = " << cfg.train.seed << "\n";
    out << "gap_every = " << cfg.train.gap_every << "\n";
    out << "gap_samples = " << cfg.train.gap_samples << "\n";
    out << "\n[inference]\n";
    out << "mode = "
        << (cfg.inference.mode == InferenceMode::kMonteCarlo ? "monte_carlo" : "standard")
        << "\n";
    out << "mc_samples = " << cfg.inference.mc_samples << "\n";
    out << "seed = " << cfg.inference.seed << "\n";
    out << "\n[data]\n";
    out << "source = " << cfg.source << "\n";
    if (cfg.source == "synth") {
        out << "synth_classes = " << cfg.synth_classes << "\n";
        out << "synth_dim = " << cfg.synth_dim << "\n";
        out << "synth_per_class = " << cfg.synth_per_class << "\n";
        out << "synth_separation = " << cfg.synth_separation << "\n";
        out << "data_seed = " << cfg.data_seed << "\n";
    } else {
        out << "idx_images = " << cfg.idx_images << "\n";
        out << "idx_labels = " << cfg.idx_labels << "\n";
        out << "idx_test_images = " << cfg.idx_test_images << "\n";
        out << "idx_test_labels = " << cfg.idx_test_labels << "\n";
    }
    out << "holdout = " << cfg.holdout << "\n";
    out << "\n[sweep]\nlambdas = ";
    for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
        if (i) out << ", ";
        out << cfg.lambdas[i];
    }
    out << "\n\n[output]\ndir = " << cfg.out_dir << "\n";
    return out.str();
}

Network build_network(const ExperimentConfig& cfg) {
    std::vector<DenseLayer> layers;
    std::size_t in_dim = cfg.input_dim;
    for (const LayerSpec& spec : cfg.layers) {
        DenseLayer layer;
        layer.weights = Matrix(spec.size, in_dim);
        layer.bias.assign(spec.size, 0.0);
        layer.activation = spec.activation;
        layer.keep_prob = spec.keep_prob;
        layers.push_back(std::move(layer));
        in_dim = spec.size;
    }
    return Network(std::move(layers));
}

} // namespace eldnn
