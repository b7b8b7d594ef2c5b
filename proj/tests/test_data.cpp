#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "eldnn/data.hpp"
#include "eldnn/errors.hpp"
#include "eldnn/inference.hpp"
#include "eldnn/network.hpp"
#include "eldnn/trainer.hpp"

using namespace eldnn;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("eldnn_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void put_be(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_pair(const std::string& images, const std::string& labels, std::uint32_t n,
                std::uint32_t rows, std::uint32_t cols,
                const std::vector<unsigned char>& pixels,
                const std::vector<unsigned char>& label_bytes,
                std::uint32_t image_magic = 2051, std::uint32_t label_magic = 2049,
                std::uint32_t label_count_override = 0) {
    std::ofstream img(images, std::ios::binary);
    put_be(img, image_magic);
    put_be(img, n);
    put_be(img, rows);
    put_be(img, cols);
    img.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    std::ofstream lab(labels, std::ios::binary);
    put_be(lab, label_magic);
    put_be(lab, label_count_override ? label_count_override : n);
    lab.write(reinterpret_cast<const char*>(label_bytes.data()),
              static_cast<std::streamsize>(label_bytes.size()));
}

std::vector<std::pair<Vector, int>> sorted_pairs(const Dataset& ds) {
    std::vector<std::pair<Vector, int>> v;
    for (std::size_t i = 0; i < ds.size(); ++i) v.emplace_back(ds.inputs[i], ds.labels[i]);
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("load_idx parses a minimal well-formed pair") {
    TempDir tmp;
    write_pair(tmp.file("img"), tmp.file("lab"), 2, 2, 2,
               {0, 51, 102, 255, 255, 204, 153, 0}, {3, 1});
    const Dataset ds = load_idx(tmp.file("img"), tmp.file("lab"));
    REQUIRE(ds.size() == 2);
    CHECK(ds.dim() == 4);
    CHECK(ds.labels == std::vector<int>{3, 1});
    CHECK(ds.num_classes == 4);
    CHECK(ds.inputs[0][0] == 0.0);
    CHECK(ds.inputs[0][3] == 1.0); // byte 255 scales to exactly 1.0
    CHECK(ds.inputs[0][1] == doctest::Approx(51.0 / 255.0));
    CHECK(ds.inputs[1][0] == 1.0);
}

TEST_CASE("load_idx failure modes name the problem") {
    TempDir tmp;
    write_pair(tmp.file("img"), tmp.file("lab"), 2, 2, 2,
               {0, 1, 2, 3, 4, 5, 6, 7}, {1, 0}, /*image_magic=*/1234);
    CHECK_THROWS_WITH_AS(load_idx(tmp.file("img"), tmp.file("lab")),
                         doctest::Contains("bad magic"), FormatError);

    write_pair(tmp.file("img2"), tmp.file("lab2"), 2, 2, 2,
               {0, 1, 2, 3, 4, 5, 6, 7}, {1, 0, 2}, 2051, 2049,
               /*label_count_override=*/3);
    CHECK_THROWS_WITH_AS(load_idx(tmp.file("img2"), tmp.file("lab2")),
                         doctest::Contains("does not match label count"), FormatError);

    // truncated pixel payload names the byte offset
    write_pair(tmp.file("img3"), tmp.file("lab3"), 2, 2, 2, {0, 1, 2, 3, 4}, {1, 0});
    CHECK_THROWS_WITH_AS(load_idx(tmp.file("img3"), tmp.file("lab3")),
                         doctest::Contains("byte offset"), FormatError);

    CHECK_THROWS_AS(load_idx(tmp.file("missing"), tmp.file("lab")), FormatError);
}

TEST_CASE("IDX round-trip is bit-identical") {
    TempDir tmp;
    RngStream rng(15, streams::kData);
    Dataset ds;
    ds.num_classes = 10;
    for (int i = 0; i < 23; ++i) {
        Vector x(9);
        for (double& v : x) v = static_cast<double>(rng.next_below(256)) / 255.0;
        ds.inputs.push_back(std::move(x));
        ds.labels.push_back(static_cast<int>(rng.next_below(10)));
    }
    save_idx(ds, 3, 3, tmp.file("img"), tmp.file("lab"));
    const Dataset back = load_idx(tmp.file("img"), tmp.file("lab"));
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.inputs[i] == ds.inputs[i]);
        CHECK(back.labels[i] == ds.labels[i]);
    }
}

TEST_CASE("synth_gaussians is deterministic and in range") {
    const Dataset a = synth_gaussians(4, 16, 50, 3.0, 11);
    const Dataset b = synth_gaussians(4, 16, 50, 3.0, 11);
    const Dataset c = synth_gaussians(4, 16, 50, 3.0, 12);
    REQUIRE(a.size() == 200);
    CHECK(a.inputs == b.inputs);
    CHECK(a.labels == b.labels);
    CHECK(a.inputs != c.inputs);
    for (const Vector& x : a.inputs)
        for (double v : x) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    CHECK_THROWS_AS(synth_gaussians(1, 4, 10, 1.0, 0), DomainError);
}

TEST_CASE("well-separated blobs are linearly separable") {
    // logistic-regression oracle: a bare softmax layer without dropout
    const Dataset train_ds = synth_gaussians(2, 2, 400, 8.0, 21);
    const Dataset test = synth_gaussians(2, 2, 400, 8.0, 22);

    DenseLayer head;
    head.weights = Matrix(2, 2);
    head.bias.assign(2, 0.0);
    head.activation = Activation::kSoftmax;
    head.keep_prob = 1.0;
    Network net({head});
    RngStream init(1, streams::kInit);
    init_weights(net, init);

    TrainConfig cfg;
    cfg.lambda = 0.0;
    cfg.eta0 = 0.5;
    cfg.rho = 0.0;
    cfg.momentum = 0.9;
    cfg.max_norm.reset();
    cfg.batch_size = 50;
    cfg.epochs = 40;
    cfg.seed = 5;
    auto [model, log] = train(std::move(net), train_ds, {}, cfg);

    InferenceConfig standard;
    CHECK(error_rate(model, test, standard) < 1.0);
}

TEST_CASE("indistinguishable classes stay at chance error") {
    const Dataset train_ds = synth_gaussians(2, 4, 300, 0.0, 31);
    const Dataset test = synth_gaussians(2, 4, 500, 0.0, 32);

    DenseLayer head;
    head.weights = Matrix(2, 4);
    head.bias.assign(2, 0.0);
    head.activation = Activation::kSoftmax;
    head.keep_prob = 1.0;
    Network net({head});
    RngStream init(2, streams::kInit);
    init_weights(net, init);

    TrainConfig cfg;
    cfg.lambda = 0.0;
    cfg.eta0 = 0.1;
    cfg.momentum = 0.0;
    cfg.max_norm.reset();
    cfg.batch_size = 50;
    cfg.epochs = 10;
    cfg.seed = 6;
    auto [model, log] = train(std::move(net), train_ds, {}, cfg);

    InferenceConfig standard;
    const double err = error_rate(model, test, standard);
    // Bayes error (k-1)/k = 50%; binomial 3 sigma at n = 1000 is 4.7pp
    CHECK(std::abs(err - 50.0) < 3.0 * 50.0 / std::sqrt(1000.0));
}

TEST_CASE("split is deterministic, disjoint, exhaustive") {
    const Dataset ds = synth_gaussians(3, 4, 40, 2.0, 41);
    auto [train1, val1] = split(ds, 30, 17);
    auto [train2, val2] = split(ds, 30, 17);
    CHECK(train1.inputs == train2.inputs);
    CHECK(val1.labels == val2.labels);
    CHECK(val1.size() == 30);
    CHECK(train1.size() == ds.size() - 30);

    // union of both splits equals the original multiset
    Dataset merged;
    merged.num_classes = ds.num_classes;
    for (const Dataset* part : {&train1, &val1}) {
        for (std::size_t i = 0; i < part->size(); ++i) {
            merged.inputs.push_back(part->inputs[i]);
            merged.labels.push_back(part->labels[i]);
        }
    }
    CHECK(sorted_pairs(merged) == sorted_pairs(ds));

    auto [train3, val3] = split(ds, 0, 17);
    CHECK(val3.size() == 0);
    CHECK(sorted_pairs(train3) == sorted_pairs(ds));

    CHECK_THROWS_AS(split(ds, ds.size(), 17), DomainError);
}
