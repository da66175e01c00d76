// Compares the OpenMP kernels against the serial reference.
#include <chrono>
#include <cstdio>
#include <random>

#include "dgasn/kernels.hpp"

using namespace dgasn;
using clk = std::chrono::steady_clock;

namespace {

DenseMatrix random_matrix(int r, int c, std::mt19937_64& rng) {
    DenseMatrix m(r, c);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : m.data) v = u(rng);
    return m;
}

template <typename F>
double time_ms(F&& f, int reps) {
    const auto t0 = clk::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = clk::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::mt19937_64 rng(42);

    const int n = 2000, k = 512, m = 256;
    DenseMatrix a = random_matrix(n, k, rng);
    DenseMatrix b = random_matrix(k, m, rng);
    const double t_par = time_ms([&] { kernels::matmul(a, b); }, 5);
    const double t_ser = time_ms([&] { kernels::serial::matmul(a, b); }, 5);
    std::printf("matmul %dx%dx%d: parallel %.2f ms, serial %.2f ms, speedup %.2fx\n", n, k, m,
                t_par, t_ser, t_ser / t_par);

    // Random graph for the segment kernels.
    const int nodes = 20000;
    std::vector<std::pair<int, int>> edges;
    std::uniform_int_distribution<int> pick(0, nodes - 1);
    for (int e = 0; e < 8 * nodes; ++e) {
        int i = pick(rng), j = pick(rng);
        if (i != j) edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    EdgeIndex ei = EdgeIndex::build(nodes, edges);
    DenseMatrix logits = random_matrix(ei.num_slots(), 1, rng);
    DenseMatrix msgs = random_matrix(ei.num_slots(), 64, rng);
    DenseMatrix weights = kernels::segment_softmax(logits, ei);

    const double s_par = time_ms([&] { kernels::segment_softmax(logits, ei); }, 20);
    const double s_ser = time_ms([&] { kernels::serial::segment_softmax(logits, ei); }, 20);
    std::printf("segment_softmax %d slots: parallel %.3f ms, serial %.3f ms, speedup %.2fx\n",
                ei.num_slots(), s_par, s_ser, s_ser / s_par);

    const double w_par = time_ms([&] { kernels::segment_weighted_sum(weights, msgs, ei); }, 20);
    const double w_ser =
        time_ms([&] { kernels::serial::segment_weighted_sum(weights, msgs, ei); }, 20);
    std::printf("segment_weighted_sum %d slots x 64: parallel %.3f ms, serial %.3f ms, "
                "speedup %.2fx\n",
                ei.num_slots(), w_par, w_ser, w_ser / w_par);
    return 0;
}
