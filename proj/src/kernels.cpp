#include "dgasn/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace dgasn::kernels {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require_shape(a.cols == b.rows, "matmul: inner dimensions disagree");
    DenseMatrix c(a.rows, b.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<size_t>(i) * a.cols];
        double* crow = &c.data[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

DenseMatrix gather_rows(const DenseMatrix& in, const std::vector<int>& idx) {
    DenseMatrix out(static_cast<int>(idx.size()), in.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < out.rows; ++i) {
        const int r = idx[i];
        std::copy_n(&in.data[static_cast<size_t>(r) * in.cols], in.cols,
                    &out.data[static_cast<size_t>(i) * in.cols]);
    }
    return out;
}

void scatter_add_rows(DenseMatrix& acc, const DenseMatrix& in, const std::vector<int>& idx) {
    for (int i = 0; i < in.rows; ++i) {
        const int r = idx[i];
        double* dst = &acc.data[static_cast<size_t>(r) * acc.cols];
        const double* srcp = &in.data[static_cast<size_t>(i) * in.cols];
        for (int j = 0; j < in.cols; ++j) dst[j] += srcp[j];
    }
}

DenseMatrix segment_softmax(const DenseMatrix& logits, const EdgeIndex& edges) {
    require_shape(logits.cols == 1 && logits.rows == edges.num_slots(),
                  "segment_softmax: one logit per slot expected");
    DenseMatrix out(logits.rows, 1);
    const int n = edges.num_nodes();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const int lo = edges.seg_offsets[i], hi = edges.seg_offsets[i + 1];
        double mx = logits.data[lo];
        for (int s = lo + 1; s < hi; ++s) mx = std::max(mx, logits.data[s]);
        double denom = 0.0;
        for (int s = lo; s < hi; ++s) {
            out.data[s] = std::exp(logits.data[s] - mx);
            denom += out.data[s];
        }
        for (int s = lo; s < hi; ++s) out.data[s] /= denom;
    }
    return out;
}

DenseMatrix segment_weighted_sum(const DenseMatrix& weights, const DenseMatrix& messages,
                                 const EdgeIndex& edges) {
    require_shape(weights.cols == 1 && weights.rows == edges.num_slots() &&
                      messages.rows == edges.num_slots(),
                  "segment_weighted_sum: one weight and one message row per slot expected");
    const int n = edges.num_nodes();
    DenseMatrix out(n, messages.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double* orow = &out.data[static_cast<size_t>(i) * out.cols];
        for (int s = edges.seg_offsets[i]; s < edges.seg_offsets[i + 1]; ++s) {
            const double w = weights.data[s];
            const double* mrow = &messages.data[static_cast<size_t>(s) * messages.cols];
            for (int j = 0; j < messages.cols; ++j) orow[j] += w * mrow[j];
        }
    }
    return out;
}

namespace serial {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    require_shape(a.cols == b.rows, "matmul: inner dimensions disagree");
    DenseMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[static_cast<size_t>(i) * a.cols];
        double* crow = &c.data[static_cast<size_t>(i) * c.cols];
        for (int k = 0; k < a.cols; ++k) {
            const double av = arow[k];
            if (av == 0.0) continue;
            const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

DenseMatrix segment_softmax(const DenseMatrix& logits, const EdgeIndex& edges) {
    DenseMatrix out(logits.rows, 1);
    for (int i = 0; i < edges.num_nodes(); ++i) {
        const int lo = edges.seg_offsets[i], hi = edges.seg_offsets[i + 1];
        double mx = logits.data[lo];
        for (int s = lo + 1; s < hi; ++s) mx = std::max(mx, logits.data[s]);
        double denom = 0.0;
        for (int s = lo; s < hi; ++s) {
            out.data[s] = std::exp(logits.data[s] - mx);
            denom += out.data[s];
        }
        for (int s = lo; s < hi; ++s) out.data[s] /= denom;
    }
    return out;
}

DenseMatrix segment_weighted_sum(const DenseMatrix& weights, const DenseMatrix& messages,
                                 const EdgeIndex& edges) {
    DenseMatrix out(edges.num_nodes(), messages.cols);
    for (int i = 0; i < edges.num_nodes(); ++i) {
        double* orow = &out.data[static_cast<size_t>(i) * out.cols];
        for (int s = edges.seg_offsets[i]; s < edges.seg_offsets[i + 1]; ++s) {
            const double w = weights.data[s];
            const double* mrow = &messages.data[static_cast<size_t>(s) * messages.cols];
            for (int j = 0; j < messages.cols; ++j) orow[j] += w * mrow[j];
        }
    }
    return out;
}

}  // namespace serial

}  // namespace dgasn::kernels
