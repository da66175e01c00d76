#include "dgasn/losses.hpp"

namespace dgasn {

namespace {

// -(y * log sigmoid(x) + (1-y) * log sigmoid(-x)) summed over all entries.
ad::Value bce_sum_from_logits(ad::Tape& tape, ad::Value logits, const DenseMatrix& y) {
    ad::Value yv = tape.leaf(y);
    DenseMatrix one_minus = y;
    for (double& v : one_minus.data) v = 1.0 - v;
    ad::Value ynv = tape.leaf(std::move(one_minus));
    ad::Value pos = ad::mul(yv, ad::log_sigmoid(logits));
    ad::Value neg = ad::mul(ynv, ad::log_sigmoid(ad::scale(logits, -1.0)));
    return ad::scale(ad::sum_all(ad::add(pos, neg)), -1.0);
}

DenseMatrix label_column(const std::vector<uint8_t>& labels) {
    DenseMatrix y(static_cast<int>(labels.size()), 1);
    for (size_t i = 0; i < labels.size(); ++i) y.data[i] = labels[i];
    return y;
}

}  // namespace

DenseMatrix multi_hot(const std::vector<std::vector<int>>& labels, int num_classes) {
    DenseMatrix y(static_cast<int>(labels.size()), num_classes);
    for (size_t i = 0; i < labels.size(); ++i)
        for (int c : labels[i]) y(static_cast<int>(i), c) = 1.0;
    return y;
}

ad::Value loss_node(ad::Tape& tape, ad::Value logits, const DenseMatrix& targets) {
    require_shape(logits.rows() == targets.rows && logits.cols() == targets.cols,
                  "loss_node: logit/target shape mismatch");
    return ad::scale(bce_sum_from_logits(tape, logits, targets), 1.0 / targets.rows);
}

ad::Value loss_edge(ad::Tape& tape, ad::Value logits, const std::vector<uint8_t>& labels) {
    require_shape(logits.rows() == static_cast<int>(labels.size()) && logits.cols() == 1,
                  "loss_edge: one logit per edge expected");
    return ad::scale(bce_sum_from_logits(tape, logits, label_column(labels)),
                     1.0 / static_cast<double>(labels.size()));
}

ad::Value loss_attention_layer(ad::Tape& tape, ad::Value fwd_logits, ad::Value bwd_logits,
                               const std::vector<uint8_t>& labels, double gamma) {
    const int m = static_cast<int>(labels.size());
    require_shape(fwd_logits.rows() == m && bwd_logits.rows() == m,
                  "loss_attention_layer: orientation count mismatch");
    DenseMatrix z = label_column(labels);
    DenseMatrix zneg(m, 1);  // gamma * (1 - z)
    for (int i = 0; i < m; ++i) zneg.data[i] = gamma * (1.0 - z.data[i]);
    ad::Value zv = tape.leaf(std::move(z));
    ad::Value znv = tape.leaf(std::move(zneg));

    ad::Value pos =
        ad::mul(zv, ad::add(ad::log_sigmoid(fwd_logits), ad::log_sigmoid(bwd_logits)));
    ad::Value neg = ad::mul(znv, ad::add(ad::log_sigmoid(ad::scale(fwd_logits, -1.0)),
                                         ad::log_sigmoid(ad::scale(bwd_logits, -1.0))));
    return ad::scale(ad::sum_all(ad::add(pos, neg)), -1.0 / (2.0 * m));
}

ad::Value loss_attention_total(ad::Tape& tape, const AttentionTrace& trace,
                               const std::vector<uint8_t>& labels, double gamma) {
    ad::Value total;
    for (size_t l = 0; l < trace.fwd.size(); ++l) {
        ad::Value term = loss_attention_layer(tape, trace.fwd[l], trace.bwd[l], labels, gamma);
        total = (l == 0) ? term : ad::add(total, term);
    }
    return total;
}

ad::Value loss_domain(ad::Tape& tape, ad::Value logits, const std::vector<uint8_t>& domain_labels) {
    return loss_edge(tape, logits, domain_labels);
}

}  // namespace dgasn
