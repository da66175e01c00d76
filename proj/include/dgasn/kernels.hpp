#pragma once

#include "dgasn/edge_index.hpp"
#include "dgasn/matrix.hpp"

namespace dgasn::kernels {

// OpenMP-parallel kernels. Each output element is accumulated serially by a
// single thread, so results are bitwise identical to the serial reference
// below for any thread count.

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

// out[i, :] = in[idx[i], :]
DenseMatrix gather_rows(const DenseMatrix& in, const std::vector<int>& idx);

// acc[idx[i], :] += in[i, :]; accumulation order follows i ascending.
void scatter_add_rows(DenseMatrix& acc, const DenseMatrix& in, const std::vector<int>& idx);

// Per-segment softmax with max-subtraction over slot logits (slots x 1).
DenseMatrix segment_softmax(const DenseMatrix& logits, const EdgeIndex& edges);

// out[i, :] = sum over slots s with dst==i of weights[s] * messages[s, :]
DenseMatrix segment_weighted_sum(const DenseMatrix& weights, const DenseMatrix& messages,
                                 const EdgeIndex& edges);

namespace serial {

// Serial reference implementations, kept for testing and benchmarking.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix segment_softmax(const DenseMatrix& logits, const EdgeIndex& edges);
DenseMatrix segment_weighted_sum(const DenseMatrix& weights, const DenseMatrix& messages,
                                 const EdgeIndex& edges);

}  // namespace serial

}  // namespace dgasn::kernels
