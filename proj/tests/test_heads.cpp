#include <cmath>
#include <random>

#include "doctest.h"
#include "dgasn/heads.hpp"
#include "dgasn/trainer.hpp"
#include "test_util.hpp"

using namespace dgasn;
using namespace dgasn::testutil;

TEST_CASE("edge operator names round-trip and size the embedding") {
    for (const char* name : {"concatenate", "hadamard", "average", "l1", "l2"}) {
        EdgeOperator op = parse_edge_operator(name);
        CHECK(edge_operator_name(op) == name);
        CHECK(edge_embed_dim(op, 6) == (op == EdgeOperator::concatenate ? 12 : 6));
    }
    CHECK_THROWS(parse_edge_operator("l3"));
}

TEST_CASE("edge operators compute their defining combinations") {
    DenseMatrix h(3, 2);
    h.data = {1.0, -2.0, 3.0, 5.0, -4.0, 0.5};
    std::vector<std::pair<int, int>> pairs = {{0, 2}, {1, 2}};

    auto embed = [&](EdgeOperator op) {
        ad::Tape tape;
        return edge_embed(tape, tape.leaf(h), pairs, op).val();
    };

    DenseMatrix cat = embed(EdgeOperator::concatenate);
    REQUIRE(cat.cols == 4);
    CHECK(cat(0, 0) == 1.0);
    CHECK(cat(0, 1) == -2.0);
    CHECK(cat(0, 2) == -4.0);
    CHECK(cat(0, 3) == 0.5);

    DenseMatrix had = embed(EdgeOperator::hadamard);
    CHECK(had(0, 0) == 1.0 * -4.0);
    CHECK(had(1, 1) == 5.0 * 0.5);

    DenseMatrix avg = embed(EdgeOperator::average);
    CHECK(avg(0, 0) == doctest::Approx((1.0 + -4.0) / 2));
    CHECK(avg(1, 0) == doctest::Approx((3.0 + -4.0) / 2));

    DenseMatrix l1 = embed(EdgeOperator::l1);
    CHECK(l1(0, 0) == doctest::Approx(5.0));
    CHECK(l1(0, 1) == doctest::Approx(2.5));

    DenseMatrix l2 = embed(EdgeOperator::l2);
    CHECK(l2(0, 0) == doctest::Approx(25.0));
    CHECK(l2(1, 1) == doctest::Approx(4.5 * 4.5));
}

TEST_CASE("symmetric operators are invariant to endpoint order") {
    std::mt19937_64 rng(51);
    DenseMatrix h = random_matrix(4, 3, rng);
    for (EdgeOperator op : {EdgeOperator::hadamard, EdgeOperator::average, EdgeOperator::l1,
                            EdgeOperator::l2}) {
        ad::Tape t1, t2;
        DenseMatrix a = edge_embed(t1, t1.leaf(h), {{1, 3}}, op).val();
        DenseMatrix b = edge_embed(t2, t2.leaf(h), {{3, 1}}, op).val();
        for (size_t i = 0; i < a.data.size(); ++i) CHECK(a.data[i] == b.data[i]);
    }
}

TEST_CASE("mlp_logits applies ReLU between layers and none at the end") {
    // One hidden unit with weight -1 so the hidden pre-activation is negative
    // for positive input; ReLU zeroes it, leaving only the output bias.
    MlpValues mlp;
    ad::Tape tape;
    DenseMatrix w1(1, 1), b1(1, 1), w2(1, 1), b2(1, 1);
    w1(0, 0) = -1.0;
    b1(0, 0) = 0.0;
    w2(0, 0) = 3.0;
    b2(0, 0) = -0.25;
    mlp.emplace_back(tape.leaf(w1), tape.leaf(b1));
    mlp.emplace_back(tape.leaf(w2), tape.leaf(b2));

    DenseMatrix x(2, 1);
    x(0, 0) = 2.0;   // hidden = relu(-2) = 0, out = -0.25
    x(1, 0) = -2.0;  // hidden = relu(2) = 2, out = 5.75
    ad::Value out = mlp_logits(tape, tape.leaf(x), mlp);
    CHECK(out.val()(0, 0) == doctest::Approx(-0.25));
    CHECK(out.val()(1, 0) == doctest::Approx(5.75));
}

TEST_CASE("zero parameters make every head output one half") {
    std::mt19937_64 rng(52);
    Graph g = random_labeled_graph(10, 6, 2, 0.3, rng);
    TrainConfig cfg;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.head_dim = 4;
    ModelParams params = zero_params(model_shape(g, cfg));

    ad::Tape tape;
    TapeParams tp = TapeParams::insert(tape, params);
    EncodeResult enc = encode(tape, g, tp.gat);
    ad::Value e = edge_embed(tape, enc.h, g.und_edges, cfg.edge_operator);
    ad::Value y = node_classify(tape, enc.h, tp.node_head);
    ad::Value z = edge_classify(tape, e, tp.edge_head);
    ad::Value d = domain_discriminate(tape, e, tp.domain_head, 0.1);
    for (double v : y.val().data) CHECK(v == 0.5);
    for (double v : z.val().data) CHECK(v == 0.5);
    for (double v : d.val().data) CHECK(v == 0.5);
}

TEST_CASE("head MLP shapes follow the fixed hidden sizes") {
    std::mt19937_64 rng(53);
    Graph g = random_labeled_graph(6, 5, 3, 0.4, rng);
    TrainConfig cfg;
    ModelShape shape = model_shape(g, cfg);
    ModelParams params = init_params(shape, 7);

    const int emb = encoder_output_dim(shape);
    REQUIRE(params.node_head.layers.size() == 2);
    CHECK(params.node_head.layers[0].first.rows == emb);
    CHECK(params.node_head.layers.back().first.cols == 3);
    CHECK(params.edge_head.layers[0].first.rows == edge_embed_dim(cfg.edge_operator, emb));
    CHECK(params.edge_head.layers.back().first.cols == 1);
    CHECK(params.domain_head.layers.back().first.cols == 1);
    for (auto& [w, b] : params.node_head.layers)
        for (double v : b.data) CHECK(v == 0.0);  // biases start at zero
}
