#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "dgasn/model_io.hpp"
#include "dgasn/presets.hpp"
#include "dgasn/trainer.hpp"
#include "test_util.hpp"

using namespace dgasn;
using namespace dgasn::testutil;

namespace {

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.head_dim = 4;
    cfg.epochs = 25;
    cfg.seed = 5;
    return cfg;
}

SynthParams small_synth() {
    SynthParams p;
    p.nodes = 48;
    p.intra_class_edge_prob = 0.2;
    p.inter_class_edge_prob = 0.05;
    return p;
}

bool params_bitwise_equal(const ModelParams& a, const ModelParams& b) {
    bool equal = true;
    std::vector<const DenseMatrix*> ta, tb;
    a.for_each([&](const std::string&, const DenseMatrix& m) { ta.push_back(&m); });
    b.for_each([&](const std::string&, const DenseMatrix& m) { tb.push_back(&m); });
    if (ta.size() != tb.size()) return false;
    for (size_t i = 0; i < ta.size(); ++i) {
        if (!ta[i]->same_shape(*tb[i])) return false;
        for (size_t k = 0; k < ta[i]->data.size(); ++k)
            if (ta[i]->data[k] != tb[i]->data[k]) equal = false;
    }
    return equal;
}

}  // namespace

TEST_CASE("learning-rate schedule matches its closed form") {
    CHECK(std::fabs(lr_schedule(0.0) - 1e-3) <= 1e-18);
    CHECK(std::fabs(lr_schedule(1.0) - 1e-3 / std::pow(11.0, 0.75)) <= 1e-18);
    CHECK(std::fabs(lr_schedule(0.5) - 1e-3 / std::pow(6.0, 0.75)) <= 1e-18);
    CHECK(std::fabs(lr_schedule(0.5, 2e-2) - 2e-2 / std::pow(6.0, 0.75)) <= 1e-16);
}

TEST_CASE("adversarial weight schedule matches its closed form") {
    CHECK(lambda_schedule(0.0) == 0.0);
    CHECK(std::fabs(lambda_schedule(1.0) - (2.0 / (1.0 + std::exp(-10.0)) - 1.0) * 0.1) <= 1e-18);
    CHECK(std::fabs(lambda_schedule(0.5) - (2.0 / (1.0 + std::exp(-5.0)) - 1.0) * 0.1) <= 1e-18);
    CHECK(std::fabs(lambda_schedule(0.3, 0.4) - (2.0 / (1.0 + std::exp(-3.0)) - 1.0) * 0.4) <=
          1e-18);
}

TEST_CASE("first Adam step moves by mu times the sign of the gradient") {
    std::mt19937_64 rng(71);
    Graph g = random_labeled_graph(10, 4, 2, 0.3, rng);
    TrainConfig cfg = small_config();
    ModelParams params = init_params(model_shape(g, cfg), 3);
    const ModelParams before = params;

    std::vector<DenseMatrix> grads;
    params.for_each([&](const std::string&, DenseMatrix& m) {
        grads.push_back(DenseMatrix::full(m.rows, m.cols, 2.0));
    });
    AdamState state;
    const double mu = 1e-3;
    adam_step(params, grads, state, mu, 0.0, cfg);

    // Bias-corrected first step: m_hat = g, v_hat = g^2, delta = -mu g/(|g|+eps).
    const double expect = -mu * 2.0 / (2.0 + cfg.adam_eps);
    std::vector<const DenseMatrix*> old_t, new_t;
    const ModelParams& after = params;
    before.for_each([&](const std::string&, const DenseMatrix& m) { old_t.push_back(&m); });
    after.for_each([&](const std::string&, const DenseMatrix& m) { new_t.push_back(&m); });
    for (size_t t = 0; t < old_t.size(); ++t)
        for (size_t i = 0; i < old_t[t]->data.size(); ++i)
            CHECK(std::fabs(new_t[t]->data[i] - old_t[t]->data[i] - expect) <= 1e-12);
    CHECK(state.step == 1);
}

TEST_CASE("weight decay alone shrinks the parameters") {
    std::mt19937_64 rng(72);
    Graph g = random_labeled_graph(8, 4, 2, 0.3, rng);
    TrainConfig cfg = small_config();
    ModelParams params = init_params(model_shape(g, cfg), 3);
    params.for_each([](const std::string&, DenseMatrix& m) {
        std::fill(m.data.begin(), m.data.end(), 0.5);
    });

    std::vector<DenseMatrix> grads;
    params.for_each([&](const std::string&, DenseMatrix& m) {
        grads.push_back(DenseMatrix::zeros(m.rows, m.cols));
    });
    AdamState state;
    adam_step(params, grads, state, 1e-3, 1e-2, cfg);
    params.for_each([](const std::string&, DenseMatrix& m) {
        for (double v : m.data) {
            CHECK(v < 0.5);
            CHECK(v > 0.4);
        }
    });
}

TEST_CASE("training is deterministic across runs") {
    auto [source, target] = synth_pair(9, small_synth());
    TrainConfig cfg = small_config();
    TrainResult r1 = train(source, target, cfg);
    TrainResult r2 = train(source, target, cfg);
    REQUIRE_FALSE(r1.diverged);
    REQUIRE(r1.traces.size() == r2.traces.size());
    for (size_t e = 0; e < r1.traces.size(); ++e) {
        CHECK(std::fabs(r1.traces[e].losses.l_total - r2.traces[e].losses.l_total) <= 1e-12);
        CHECK(std::fabs(r1.traces[e].losses.l_edge - r2.traces[e].losses.l_edge) <= 1e-12);
    }
    CHECK(params_bitwise_equal(r1.params, r2.params));
}

TEST_CASE("target labels never influence the learned parameters") {
    auto [source, target] = synth_pair(10, small_synth());
    Graph corrupted = target;
    for (auto& l : corrupted.node_labels) l = {0};  // absurd labels
    for (size_t e = 0; e < corrupted.edge_labels.size(); ++e)
        corrupted.edge_labels[e] = static_cast<uint8_t>(e % 2);
    TrainConfig cfg = small_config();
    TrainResult with_labels = train(source, corrupted, cfg);
    TrainResult stripped = train(source, target.without_labels(), cfg);
    CHECK(params_bitwise_equal(with_labels.params, stripped.params));
}

TEST_CASE("training reduces the source losses") {
    auto [source, target] = synth_pair(11, small_synth());
    TrainConfig cfg = small_config();
    cfg.epochs = 120;
    TrainResult r = train(source, target, cfg);
    REQUIRE_FALSE(r.diverged);
    const LossReport& first = r.traces.front().losses;
    const LossReport& last = r.traces.back().losses;
    CHECK(last.l_edge < first.l_edge);
    CHECK(last.l_attn < first.l_attn);
    CHECK(last.l_node < first.l_node);
}

TEST_CASE("loss switches zero out their terms") {
    auto [source, target] = synth_pair(12, small_synth());
    TrainConfig cfg = small_config();
    cfg.epochs = 3;
    cfg.use_node_loss = false;
    cfg.use_attn_loss = false;
    cfg.use_domain_loss = false;
    TrainResult r = train(source, target, cfg);
    for (const EpochTrace& t : r.traces) {
        CHECK(t.losses.l_node == 0.0);
        CHECK(t.losses.l_attn == 0.0);
        CHECK(t.losses.l_domain == 0.0);
        CHECK(t.losses.l_total == t.losses.l_edge);
    }
}

TEST_CASE("trace bookkeeping combines the reported losses") {
    auto [source, target] = synth_pair(13, small_synth());
    TrainConfig cfg = small_config();
    cfg.epochs = 6;
    TrainResult r = train(source, target, cfg);
    for (const EpochTrace& t : r.traces) {
        const LossReport& l = t.losses;
        const double expect =
            l.l_edge + cfg.eta * l.l_node + cfg.xi * l.l_attn - t.lambda_p * l.l_domain;
        CHECK(std::fabs(l.l_total - expect) <= 1e-12);
        CHECK(std::fabs(t.mu_p - lr_schedule(t.p, cfg.mu0)) <= 1e-18);
        CHECK(std::fabs(t.lambda_p - lambda_schedule(t.p, cfg.lambda_max)) <= 1e-18);
    }
}

TEST_CASE("predictions and attention stats are per-edge probabilities") {
    auto [source, target] = synth_pair(14, small_synth());
    TrainConfig cfg = small_config();
    cfg.epochs = 10;
    TrainResult r = train(source, target, cfg);
    std::vector<double> z = predict_target(r.params, target.without_labels(), cfg);
    REQUIRE(static_cast<int>(z.size()) == target.num_edges());
    for (double v : z) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    std::vector<double> sigma = attention_sigma_stats(r.params, source, cfg);
    REQUIRE(static_cast<int>(sigma.size()) == source.num_edges());
    for (double v : sigma) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("parameter container round-trips bit-exactly") {
    std::mt19937_64 rng(73);
    Graph g = random_labeled_graph(8, 4, 2, 0.3, rng);
    TrainConfig cfg = small_config();
    ModelShape shape = model_shape(g, cfg);
    ModelParams params = init_params(shape, 99);

    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "dgasn_tests";
    fs::create_directories(dir);
    const std::string path = (dir / "params.bin").string();
    save_params(path, params);

    ModelParams loaded = init_params(shape, 1);  // different values, same shapes
    load_params(path, loaded);
    CHECK(params_bitwise_equal(params, loaded));

    ModelParams wrong_shape = init_params(model_shape(g, small_config()), 1);
    wrong_shape.node_head.layers[0].first = DenseMatrix::zeros(3, 3);
    CHECK_THROWS(load_params(path, wrong_shape));
}

TEST_CASE("task presets carry their published hyperparameters") {
    TrainConfig cfg;
    apply_preset(cfg, "A->C");
    CHECK(cfg.layers == 7);
    CHECK(cfg.heads == 8);
    CHECK(cfg.head_dim == 64);
    CHECK(cfg.eta == 1.0);
    CHECK(cfg.xi == 1e-3);
    CHECK(cfg.weight_decay == 5e-4);
    CHECK(cfg.gamma == 5.0);
    CHECK(cfg.lambda_max == 0.1);

    apply_preset(cfg, "C->A");
    CHECK(cfg.layers == 8);
    CHECK(cfg.xi == 1e-1);
    CHECK(cfg.weight_decay == 1e-3);

    apply_preset(cfg, "D->A");
    CHECK(cfg.eta == 1e-2);
    CHECK_THROWS(apply_preset(cfg, "X->Y"));
}

TEST_CASE("single-epoch schedules evaluate at progress zero") {
    auto [source, target] = synth_pair(15, small_synth());
    TrainConfig cfg = small_config();
    cfg.epochs = 1;
    TrainResult r = train(source, target, cfg);
    REQUIRE(r.traces.size() == 1);
    CHECK(r.traces[0].p == 0.0);
    CHECK(r.traces[0].lambda_p == 0.0);
}
