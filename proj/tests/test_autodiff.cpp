#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "dgasn/autodiff.hpp"
#include "dgasn/graph.hpp"
#include "test_util.hpp"

using namespace dgasn;
using namespace dgasn::testutil;

namespace {

// Finite-difference check of a scalar-valued tape program over `params`.
double fd_check(std::vector<DenseMatrix*> params,
                const std::function<ad::Value(ad::Tape&, std::vector<ad::Value>&)>& program) {
    auto eval = [&](std::vector<DenseMatrix>* grads_out) {
        ad::Tape tape;
        std::vector<ad::Value> leaves;
        for (DenseMatrix* p : params) leaves.push_back(tape.leaf(*p));
        ad::Value root = program(tape, leaves);
        if (grads_out) {
            tape.backward(root);
            grads_out->clear();
            for (ad::Value l : leaves) grads_out->push_back(l.grad());
        }
        return root.scalar();
    };
    return ad::check_gradients(std::span<DenseMatrix* const>(params), eval);
}

}  // namespace

TEST_CASE("matmul gradients match finite differences") {
    std::mt19937_64 rng(11);
    DenseMatrix a = random_matrix(3, 4, rng);
    DenseMatrix b = random_matrix(4, 2, rng);
    double err = fd_check({&a, &b}, [](ad::Tape&, std::vector<ad::Value>& v) {
        return ad::sum_all(ad::matmul(v[0], v[1]));
    });
    CHECK(err <= 1e-6);
}

TEST_CASE("elementwise op chain gradients match finite differences") {
    std::mt19937_64 rng(12);
    DenseMatrix a = random_matrix(4, 3, rng);
    DenseMatrix b = random_matrix(4, 3, rng);
    double err = fd_check({&a, &b}, [](ad::Tape&, std::vector<ad::Value>& v) {
        ad::Value x = ad::mul(ad::elu(v[0]), ad::sigmoid(v[1]));
        x = ad::add(x, ad::abs(ad::sub(v[0], v[1])));
        x = ad::add(x, ad::leaky_relu(v[0], 0.2));
        x = ad::add(x, ad::exp(ad::scale(v[1], 0.3)));
        x = ad::add(x, ad::log_sigmoid(v[0]));
        x = ad::add(x, ad::relu(v[1]));
        return ad::sum_all(x);
    });
    CHECK(err <= 1e-6);
}

TEST_CASE("structural op gradients match finite differences") {
    std::mt19937_64 rng(13);
    DenseMatrix a = random_matrix(3, 2, rng);
    DenseMatrix b = random_matrix(3, 2, rng);
    DenseMatrix bias = random_matrix(1, 4, rng);
    double err = fd_check({&a, &b, &bias}, [](ad::Tape&, std::vector<ad::Value>& v) {
        ad::Value cat = ad::concat_cols(v[0], v[1]);           // 3 x 4
        ad::Value rows = ad::concat_rows(cat, cat);            // 6 x 4
        ad::Value g = ad::gather_rows(rows, {0, 5, 2, 2});     // repeated index
        return ad::sum_all(ad::mul(ad::add_bias(g, v[2]), g));
    });
    CHECK(err <= 1e-6);
}

TEST_CASE("mean_over_group averages and distributes gradients") {
    std::mt19937_64 rng(14);
    DenseMatrix a = random_matrix(2, 2, rng);
    DenseMatrix b = random_matrix(2, 2, rng);
    DenseMatrix c = random_matrix(2, 2, rng);
    double err = fd_check({&a, &b, &c}, [](ad::Tape&, std::vector<ad::Value>& v) {
        std::array<ad::Value, 3> group = {v[0], v[1], v[2]};
        return ad::sum_all(ad::mul(ad::mean_over_group(group), v[0]));
    });
    CHECK(err <= 1e-6);

    ad::Tape tape;
    ad::Value va = tape.leaf(a), vb = tape.leaf(b), vc = tape.leaf(c);
    std::array<ad::Value, 3> group = {va, vb, vc};
    ad::Value m = ad::mean_over_group(group);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(m.val()(i, j) == doctest::Approx((a(i, j) + b(i, j) + c(i, j)) / 3.0));
}

TEST_CASE("segment softmax sums to one per destination segment") {
    std::mt19937_64 rng(15);
    auto edges = random_edges(12, 0.3, rng);
    EdgeIndex ei = EdgeIndex::build(12, edges);
    DenseMatrix logits = random_matrix(ei.num_slots(), 1, rng, -5.0, 5.0);

    ad::Tape tape;
    ad::Value w = ad::segment_softmax(tape.leaf(logits), ei);
    for (int i = 0; i < ei.num_nodes(); ++i) {
        double s = 0.0;
        for (int k = ei.seg_offsets[i]; k < ei.seg_offsets[i + 1]; ++k) s += w.val()(k, 0);
        CHECK(std::fabs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("segment softmax and weighted sum gradients match finite differences") {
    std::mt19937_64 rng(16);
    auto edges = random_edges(8, 0.4, rng);
    EdgeIndex ei = EdgeIndex::build(8, edges);
    DenseMatrix logits = random_matrix(ei.num_slots(), 1, rng);
    DenseMatrix msgs = random_matrix(ei.num_slots(), 3, rng);
    double err = fd_check({&logits, &msgs}, [&](ad::Tape&, std::vector<ad::Value>& v) {
        ad::Value w = ad::segment_softmax(v[0], ei);
        ad::Value h = ad::segment_weighted_sum(w, v[1], ei);
        return ad::sum_all(ad::mul(h, h));
    });
    CHECK(err <= 1e-6);
}

TEST_CASE("grad_reverse is the identity forward and -lambda backward") {
    std::mt19937_64 rng(17);
    DenseMatrix a = random_matrix(3, 3, rng);

    ad::Tape tape;
    ad::Value x = tape.leaf(a);
    ad::Value r = ad::grad_reverse(x, 0.7);
    for (size_t i = 0; i < a.data.size(); ++i) CHECK(r.val().data[i] == a.data[i]);  // bit exact

    tape.backward(ad::sum_all(ad::mul(r, r)));
    DenseMatrix rev = x.grad();

    ad::Tape tape2;
    ad::Value x2 = tape2.leaf(a);
    ad::Value p = ad::grad_reverse(x2, 0.0);
    tape2.backward(ad::sum_all(ad::mul(p, p)));
    for (double g : x2.grad().data) CHECK(g == 0.0);  // lambda = 0 kills the path

    ad::Tape tape3;
    ad::Value x3 = tape3.leaf(a);
    ad::Value q = ad::mul(x3, x3);
    tape3.backward(ad::sum_all(q));
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(std::fabs(rev.data[i] + 0.7 * x3.grad().data[i]) <= 1e-15);
}

TEST_CASE("backward twice without zeroing doubles every gradient exactly") {
    std::mt19937_64 rng(18);
    DenseMatrix a = random_matrix(4, 4, rng);
    ad::Tape tape;
    ad::Value x = tape.leaf(a);
    ad::Value root = ad::sum_all(ad::sigmoid(ad::matmul(x, x)));
    tape.backward(root);
    DenseMatrix once = x.grad();
    tape.backward(root);
    for (size_t i = 0; i < once.data.size(); ++i)
        CHECK(x.grad().data[i] == 2.0 * once.data[i]);  // bit exact, not approximate
}

TEST_CASE("zero_grad resets accumulators") {
    ad::Tape tape;
    ad::Value x = tape.leaf(DenseMatrix::full(2, 2, 1.5));
    tape.backward(ad::sum_all(ad::mul(x, x)));
    tape.zero_grad();
    for (double g : x.grad().data) CHECK(g == 0.0);
}

TEST_CASE("check_gradients flags a corrupted gradient") {
    std::mt19937_64 rng(19);
    DenseMatrix a = random_matrix(3, 3, rng);
    std::vector<DenseMatrix*> params = {&a};
    auto eval = [&](std::vector<DenseMatrix>* grads_out) {
        ad::Tape tape;
        ad::Value x = tape.leaf(a);
        ad::Value root = ad::sum_all(ad::mul(x, x));
        if (grads_out) {
            tape.backward(root);
            grads_out->assign(1, x.grad());
            (*grads_out)[0](1, 1) += 0.5;  // deliberate corruption
        }
        return root.scalar();
    };
    double err = ad::check_gradients(std::span<DenseMatrix* const>(params), eval);
    CHECK(err > 1e-2);
}

TEST_CASE("non-finite op output raises NumericError with the op tag") {
    ad::Tape tape;
    ad::Value x = tape.leaf(DenseMatrix::full(1, 1, 1e308));
    CHECK_THROWS_AS(ad::exp(x), NumericError);
}
