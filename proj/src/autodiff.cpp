#include "dgasn/autodiff.hpp"

#include <cmath>
#include <cstring>

namespace dgasn::ad {

namespace {

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

void check_finite(const DenseMatrix& m, const char* op_tag) {
    if (!m.all_finite()) throw NumericError(std::string("non-finite output of op ") + op_tag);
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double stable_log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// Unary elementwise op with analytic derivative given the input value.
Value unary(Value x, const char* tag, double (*f)(double), double (*df)(double)) {
    Tape& t = *x.tape;
    const DenseMatrix& in = t.val(x.id);
    DenseMatrix out(in.rows, in.cols);
    for (size_t i = 0; i < in.data.size(); ++i) out.data[i] = f(in.data[i]);
    check_finite(out, tag);
    const int xid = x.id;
    return t.emplace(std::move(out),
                     [xid, df](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& in = tp.val(xid);
                         DenseMatrix& a = Tape::adj_of(adj, xid, in.rows, in.cols);
                         for (size_t i = 0; i < in.data.size(); ++i)
                             a.data[i] += df(in.data[i]) * up.data[i];
                     },
                     tag);
}

}  // namespace

const DenseMatrix& Value::val() const { return tape->val(id); }
const DenseMatrix& Value::grad() const { return tape->grad(id); }
double Value::scalar() const {
    const DenseMatrix& v = val();
    require_shape(v.rows == 1 && v.cols == 1, "scalar() on non-scalar Value");
    return v.data[0];
}

Value Tape::leaf(DenseMatrix m) {
    check_finite(m, "leaf");
    nodes_.push_back(Node{std::move(m), {}, {}});
    return Value{this, static_cast<int>(nodes_.size()) - 1};
}

Value Tape::emplace(DenseMatrix val, BackFn back, const char* op_tag) {
    check_finite(val, op_tag);
    nodes_.push_back(Node{std::move(val), {}, std::move(back)});
    return Value{this, static_cast<int>(nodes_.size()) - 1};
}

DenseMatrix& Tape::grad(int id) {
    Node& n = nodes_[id];
    if (n.grad.data.empty()) n.grad = DenseMatrix(n.val.rows, n.val.cols);
    return n.grad;
}

DenseMatrix& Tape::adj_of(std::vector<DenseMatrix>& adj, int id, int rows, int cols) {
    if (adj[id].data.empty()) adj[id] = DenseMatrix(rows, cols);
    return adj[id];
}

void Tape::backward(Value root) {
    require_shape(root.tape == this, "backward: Value from another tape");
    const DenseMatrix& rv = nodes_[root.id].val;
    require_shape(rv.rows == 1 && rv.cols == 1, "backward: root must be scalar");

    std::vector<DenseMatrix> adj(nodes_.size());
    adj[root.id] = DenseMatrix::scalar(1.0);
    for (int i = root.id; i >= 0; --i) {
        if (adj[i].data.empty()) continue;
        if (nodes_[i].back) nodes_[i].back(*this, adj, adj[i]);
    }
    for (size_t i = 0; i < adj.size(); ++i) {
        if (adj[i].data.empty()) continue;
        DenseMatrix& g = grad(static_cast<int>(i));
        for (size_t k = 0; k < g.data.size(); ++k) g.data[k] += adj[i].data[k];
    }
}

void Tape::zero_grad() {
    for (Node& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
}

Value matmul(Value a, Value b) {
    Tape& t = *a.tape;
    DenseMatrix out = kernels::matmul(t.val(a.id), t.val(b.id));
    const int aid = a.id, bid = b.id;
    return t.emplace(std::move(out),
                     [aid, bid](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& av = tp.val(aid);
                         const DenseMatrix& bv = tp.val(bid);
                         DenseMatrix da = kernels::matmul(up, transpose(bv));
                         DenseMatrix db = kernels::matmul(transpose(av), up);
                         DenseMatrix& ga = Tape::adj_of(adj, aid, av.rows, av.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, bv.rows, bv.cols);
                         for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += da.data[i];
                         for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += db.data[i];
                     },
                     "matmul");
}

Value add(Value a, Value b) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(b.id);
    require_shape(av.same_shape(bv), "add: shape mismatch");
    DenseMatrix out = av;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
    const int aid = a.id, bid = b.id;
    return t.emplace(std::move(out),
                     [aid, bid](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, up.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, up.rows, up.cols);
                         for (size_t i = 0; i < up.data.size(); ++i) {
                             ga.data[i] += up.data[i];
                             gb.data[i] += up.data[i];
                         }
                     },
                     "add");
}

Value sub(Value a, Value b) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(b.id);
    require_shape(av.same_shape(bv), "sub: shape mismatch");
    DenseMatrix out = av;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= bv.data[i];
    const int aid = a.id, bid = b.id;
    return t.emplace(std::move(out),
                     [aid, bid](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, up.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, up.rows, up.cols);
                         for (size_t i = 0; i < up.data.size(); ++i) {
                             ga.data[i] += up.data[i];
                             gb.data[i] -= up.data[i];
                         }
                     },
                     "sub");
}

Value mul(Value a, Value b) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(b.id);
    require_shape(av.same_shape(bv), "mul: shape mismatch");
    DenseMatrix out = av;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= bv.data[i];
    const int aid = a.id, bid = b.id;
    return t.emplace(std::move(out),
                     [aid, bid](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& av = tp.val(aid);
                         const DenseMatrix& bv = tp.val(bid);
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, up.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, up.rows, up.cols);
                         for (size_t i = 0; i < up.data.size(); ++i) {
                             ga.data[i] += bv.data[i] * up.data[i];
                             gb.data[i] += av.data[i] * up.data[i];
                         }
                     },
                     "mul");
}

Value scale(Value a, double c) {
    Tape& t = *a.tape;
    DenseMatrix out = t.val(a.id);
    for (double& v : out.data) v *= c;
    const int aid = a.id;
    return t.emplace(std::move(out),
                     [aid, c](Tape&, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, up.cols);
                         for (size_t i = 0; i < up.data.size(); ++i) ga.data[i] += c * up.data[i];
                     },
                     "scale");
}

Value add_bias(Value a, Value bias) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(bias.id);
    require_shape(bv.rows == 1 && bv.cols == av.cols, "add_bias: bias must be 1 x cols");
    DenseMatrix out = av;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) += bv.data[j];
    const int aid = a.id, bid = bias.id;
    return t.emplace(std::move(out),
                     [aid, bid](Tape&, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, up.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, 1, up.cols);
                         for (int i = 0; i < up.rows; ++i)
                             for (int j = 0; j < up.cols; ++j) {
                                 ga(i, j) += up(i, j);
                                 gb.data[j] += up(i, j);
                             }
                     },
                     "add_bias");
}

Value concat_cols(Value a, Value b) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(b.id);
    require_shape(av.rows == bv.rows, "concat_cols: row counts differ");
    DenseMatrix out(av.rows, av.cols + bv.cols);
    for (int i = 0; i < av.rows; ++i) {
        std::memcpy(&out(i, 0), &av.data[static_cast<size_t>(i) * av.cols],
                    sizeof(double) * av.cols);
        std::memcpy(&out(i, av.cols), &bv.data[static_cast<size_t>(i) * bv.cols],
                    sizeof(double) * bv.cols);
    }
    const int aid = a.id, bid = b.id;
    const int ac = av.cols, bc = bv.cols;
    return t.emplace(std::move(out),
                     [aid, bid, ac, bc](Tape&, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, up.rows, ac);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, up.rows, bc);
                         for (int i = 0; i < up.rows; ++i) {
                             for (int j = 0; j < ac; ++j) ga(i, j) += up(i, j);
                             for (int j = 0; j < bc; ++j) gb(i, j) += up(i, ac + j);
                         }
                     },
                     "concat_cols");
}

Value concat_rows(Value a, Value b) {
    Tape& t = *a.tape;
    const DenseMatrix& av = t.val(a.id);
    const DenseMatrix& bv = t.val(b.id);
    require_shape(av.cols == bv.cols, "concat_rows: column counts differ");
    DenseMatrix out(av.rows + bv.rows, av.cols);
    std::memcpy(out.data.data(), av.data.data(), sizeof(double) * av.data.size());
    std::memcpy(out.data.data() + av.data.size(), bv.data.data(), sizeof(double) * bv.data.size());
    const int aid = a.id, bid = b.id;
    const int ar = av.rows, br = bv.rows;
    return t.emplace(std::move(out),
                     [aid, bid, ar, br](Tape&, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& ga = Tape::adj_of(adj, aid, ar, up.cols);
                         DenseMatrix& gb = Tape::adj_of(adj, bid, br, up.cols);
                         const size_t na = ga.data.size();
                         for (size_t i = 0; i < na; ++i) ga.data[i] += up.data[i];
                         for (size_t i = 0; i < gb.data.size(); ++i) gb.data[i] += up.data[na + i];
                     },
                     "concat_rows");
}

Value gather_rows(Value h, std::vector<int> idx) {
    Tape& t = *h.tape;
    const DenseMatrix& hv = t.val(h.id);
    for (int r : idx)
        if (r < 0 || r >= hv.rows) throw DimensionError("gather_rows: index out of range");
    DenseMatrix out = kernels::gather_rows(hv, idx);
    const int hid = h.id;
    return t.emplace(std::move(out),
                     [hid, idx = std::move(idx)](Tape& tp, std::vector<DenseMatrix>& adj,
                                                 const DenseMatrix& up) {
                         const DenseMatrix& hv = tp.val(hid);
                         DenseMatrix& gh = Tape::adj_of(adj, hid, hv.rows, hv.cols);
                         kernels::scatter_add_rows(gh, up, idx);
                     },
                     "gather_rows");
}

Value segment_softmax(Value logits, const EdgeIndex& edges) {
    Tape& t = *logits.tape;
    DenseMatrix out = kernels::segment_softmax(t.val(logits.id), edges);
    const int lid = logits.id;
    const EdgeIndex* ep = &edges;  // EdgeIndex is owned by the Graph, which outlives the tape
    return t.emplace(
        std::move(out),
        [lid, ep](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
            // dL/dlogit_s = y_s * (up_s - sum_t in segment up_t * y_t)
            const DenseMatrix y = kernels::segment_softmax(tp.val(lid), *ep);
            DenseMatrix& gl = Tape::adj_of(adj, lid, y.rows, 1);
            for (int i = 0; i < ep->num_nodes(); ++i) {
                const int lo = ep->seg_offsets[i], hi = ep->seg_offsets[i + 1];
                double dot = 0.0;
                for (int s = lo; s < hi; ++s) dot += up.data[s] * y.data[s];
                for (int s = lo; s < hi; ++s) gl.data[s] += y.data[s] * (up.data[s] - dot);
            }
        },
        "segment_softmax");
}

Value segment_weighted_sum(Value weights, Value messages, const EdgeIndex& edges) {
    Tape& t = *weights.tape;
    DenseMatrix out = kernels::segment_weighted_sum(t.val(weights.id), t.val(messages.id), edges);
    const int wid = weights.id, mid = messages.id;
    const EdgeIndex* ep = &edges;
    return t.emplace(std::move(out),
                     [wid, mid, ep](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& wv = tp.val(wid);
                         const DenseMatrix& mv = tp.val(mid);
                         DenseMatrix& gw = Tape::adj_of(adj, wid, wv.rows, 1);
                         DenseMatrix& gm = Tape::adj_of(adj, mid, mv.rows, mv.cols);
                         for (int s = 0; s < ep->num_slots(); ++s) {
                             const int i = ep->dst[s];
                             const double* urow = &up.data[static_cast<size_t>(i) * up.cols];
                             const double* mrow = &mv.data[static_cast<size_t>(s) * mv.cols];
                             double* grow = &gm.data[static_cast<size_t>(s) * gm.cols];
                             double dot = 0.0;
                             for (int j = 0; j < mv.cols; ++j) {
                                 dot += urow[j] * mrow[j];
                                 grow[j] += wv.data[s] * urow[j];
                             }
                             gw.data[s] += dot;
                         }
                     },
                     "segment_weighted_sum");
}

Value grad_reverse(Value x, double lambda) {
    require_shape(lambda >= 0.0, "grad_reverse: lambda must be >= 0");
    Tape& t = *x.tape;
    DenseMatrix out = t.val(x.id);  // forward is identity, bit-exact
    const int xid = x.id;
    return t.emplace(std::move(out),
                     [xid, lambda](Tape&, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         DenseMatrix& gx = Tape::adj_of(adj, xid, up.rows, up.cols);
                         for (size_t i = 0; i < up.data.size(); ++i)
                             gx.data[i] += -lambda * up.data[i];
                     },
                     "grad_reverse");
}

Value elu(Value x) {
    return unary(
        x, "elu", [](double v) { return v > 0.0 ? v : std::expm1(v); },
        [](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

Value relu(Value x) {
    return unary(
        x, "relu", [](double v) { return v > 0.0 ? v : 0.0; },
        [](double v) { return v > 0.0 ? 1.0 : 0.0; });
}

Value leaky_relu(Value x, double slope) {
    Tape& t = *x.tape;
    const DenseMatrix& in = t.val(x.id);
    DenseMatrix out(in.rows, in.cols);
    for (size_t i = 0; i < in.data.size(); ++i)
        out.data[i] = in.data[i] > 0.0 ? in.data[i] : slope * in.data[i];
    const int xid = x.id;
    return t.emplace(std::move(out),
                     [xid, slope](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& in = tp.val(xid);
                         DenseMatrix& gx = Tape::adj_of(adj, xid, in.rows, in.cols);
                         for (size_t i = 0; i < in.data.size(); ++i)
                             gx.data[i] += (in.data[i] > 0.0 ? 1.0 : slope) * up.data[i];
                     },
                     "leaky_relu");
}

Value sigmoid(Value x) {
    return unary(
        x, "sigmoid", [](double v) { return stable_sigmoid(v); },
        [](double v) {
            const double s = stable_sigmoid(v);
            return s * (1.0 - s);
        });
}

Value log_sigmoid(Value x) {
    return unary(
        x, "log_sigmoid", [](double v) { return stable_log_sigmoid(v); },
        [](double v) { return stable_sigmoid(-v); });
}

Value exp(Value x) {
    return unary(
        x, "exp", [](double v) { return std::exp(v); }, [](double v) { return std::exp(v); });
}

Value abs(Value x) {
    return unary(
        x, "abs", [](double v) { return std::fabs(v); },
        [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Value mean_over_group(std::span<const Value> group) {
    require_shape(!group.empty(), "mean_over_group: empty group");
    Tape& t = *group[0].tape;
    const DenseMatrix& first = t.val(group[0].id);
    DenseMatrix out(first.rows, first.cols);
    std::vector<int> ids;
    ids.reserve(group.size());
    for (const Value& v : group) {
        const DenseMatrix& m = t.val(v.id);
        require_shape(m.same_shape(first), "mean_over_group: shape mismatch");
        for (size_t i = 0; i < m.data.size(); ++i) out.data[i] += m.data[i];
        ids.push_back(v.id);
    }
    const double inv = 1.0 / static_cast<double>(group.size());
    for (double& v : out.data) v *= inv;
    return t.emplace(std::move(out),
                     [ids = std::move(ids), inv](Tape&, std::vector<DenseMatrix>& adj,
                                                 const DenseMatrix& up) {
                         for (int id : ids) {
                             DenseMatrix& g = Tape::adj_of(adj, id, up.rows, up.cols);
                             for (size_t i = 0; i < up.data.size(); ++i)
                                 g.data[i] += inv * up.data[i];
                         }
                     },
                     "mean_over_group");
}

Value sum_all(Value x) {
    Tape& t = *x.tape;
    const DenseMatrix& in = t.val(x.id);
    double s = 0.0;
    for (double v : in.data) s += v;
    const int xid = x.id;
    return t.emplace(DenseMatrix::scalar(s),
                     [xid](Tape& tp, std::vector<DenseMatrix>& adj, const DenseMatrix& up) {
                         const DenseMatrix& in = tp.val(xid);
                         DenseMatrix& gx = Tape::adj_of(adj, xid, in.rows, in.cols);
                         const double u = up.data[0];
                         for (double& v : gx.data) v += u;
                     },
                     "sum_all");
}

double check_gradients(std::span<DenseMatrix* const> params,
                       const std::function<double(std::vector<DenseMatrix>*)>& eval, double eps,
                       double abs_floor) {
    std::vector<DenseMatrix> grads;
    const double base = eval(&grads);
    if (!std::isfinite(base)) throw NumericError("check_gradients: non-finite loss");
    require_shape(grads.size() == params.size(), "check_gradients: gradient count mismatch");

    double worst = 0.0;
    for (size_t p = 0; p < params.size(); ++p) {
        DenseMatrix& theta = *params[p];
        for (size_t i = 0; i < theta.data.size(); ++i) {
            const double orig = theta.data[i];
            theta.data[i] = orig + eps;
            const double fp = eval(nullptr);
            theta.data[i] = orig - eps;
            const double fm = eval(nullptr);
            theta.data[i] = orig;
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw NumericError("check_gradients: non-finite loss during perturbation");
            const double fd = (fp - fm) / (2.0 * eps);
            const double g = grads[p].data[i];
            const double diff = std::fabs(g - fd);
            if (diff <= abs_floor) continue;
            const double denom = std::max(std::fabs(g), std::fabs(fd));
            worst = std::max(worst, diff / denom);
        }
    }
    return worst;
}

}  // namespace dgasn::ad
