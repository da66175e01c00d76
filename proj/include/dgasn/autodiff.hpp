#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dgasn/edge_index.hpp"
#include "dgasn/kernels.hpp"
#include "dgasn/matrix.hpp"

namespace dgasn::ad {

class Tape;

// Lightweight handle into the tape.
struct Value {
    Tape* tape = nullptr;
    int id = -1;

    const DenseMatrix& val() const;
    const DenseMatrix& grad() const;
    int rows() const { return val().rows; }
    int cols() const { return val().cols; }
    double scalar() const;
};

// Reverse-mode tape. Nodes are appended in topological order; backward walks
// the tape once in reverse with pass-local adjoints, then folds them into the
// persistent gradient accumulators. Running backward twice without zeroing
// therefore doubles every gradient exactly.
class Tape {
  public:
    using BackFn = std::function<void(Tape&, std::vector<DenseMatrix>&, const DenseMatrix&)>;

    Value leaf(DenseMatrix m);
    Value emplace(DenseMatrix val, BackFn back, const char* op_tag);

    void backward(Value root);
    void zero_grad();

    const DenseMatrix& val(int id) const { return nodes_[id].val; }
    DenseMatrix& grad(int id);
    size_t size() const { return nodes_.size(); }

    // Adjoint accumulator for a parent node inside a backward rule.
    static DenseMatrix& adj_of(std::vector<DenseMatrix>& adj, int id, int rows, int cols);

  private:
    struct Node {
        DenseMatrix val;
        DenseMatrix grad;  // lazily sized to val's shape
        BackFn back;       // empty for leaves
    };
    std::vector<Node> nodes_;
};

Value matmul(Value a, Value b);
Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);  // elementwise
Value scale(Value a, double c);
Value add_bias(Value a, Value bias);  // bias is 1 x cols, broadcast over rows
Value concat_cols(Value a, Value b);
Value concat_rows(Value a, Value b);
Value gather_rows(Value h, std::vector<int> idx);
Value segment_softmax(Value logits, const EdgeIndex& edges);
Value segment_weighted_sum(Value weights, Value messages, const EdgeIndex& edges);
Value grad_reverse(Value x, double lambda);

Value elu(Value x);
Value relu(Value x);
Value leaky_relu(Value x, double slope);
Value sigmoid(Value x);
Value log_sigmoid(Value x);
Value exp(Value x);
Value abs(Value x);

Value mean_over_group(std::span<const Value> group);
Value sum_all(Value x);

// Central-difference verification of tape gradients. `eval` computes the
// scalar loss for the current parameter values; when `grads_out` is non-null
// it must also fill one gradient matrix per parameter (same order, same
// shape). Returns the worst relative error across all parameter entries, with
// absolute differences below `abs_floor` counted as zero.
double check_gradients(std::span<DenseMatrix* const> params,
                       const std::function<double(std::vector<DenseMatrix>* grads_out)>& eval,
                       double eps = 1e-5, double abs_floor = 1e-7);

}  // namespace dgasn::ad
