#include "dgasn/trainer.hpp"

#include <cmath>
#include <fstream>

#include "dgasn/metrics.hpp"

namespace dgasn {

double lr_schedule(double p, double mu0) { return mu0 / std::pow(1.0 + 10.0 * p, 0.75); }

double lambda_schedule(double p, double lambda_max) {
    return (2.0 / (1.0 + std::exp(-10.0 * p)) - 1.0) * lambda_max;
}

ModelShape model_shape(const Graph& source, const TrainConfig& cfg) {
    ModelShape s;
    s.layers = cfg.layers;
    s.heads = cfg.heads;
    s.head_dim = cfg.head_dim;
    s.attr_dim = source.attr_dim;
    s.num_classes = source.label_dim;
    s.edge_embed_dim = edge_embed_dim(cfg.edge_operator, encoder_output_dim(s));
    return s;
}

TapeParams TapeParams::insert(ad::Tape& tape, ModelParams& params) {
    TapeParams tp;
    params.for_each([&](const std::string& name, DenseMatrix& m) {
        tp.ordered.emplace_back(name, tape.leaf(m));
    });
    size_t idx = 0;
    auto next = [&]() { return tp.ordered[idx++].second; };
    for (size_t l = 0; l < params.gat.size(); ++l) {
        std::vector<std::pair<ad::Value, ad::Value>> layer;
        for (size_t k = 0; k < params.gat[l].heads.size(); ++k) {
            ad::Value w = next(), a = next();
            layer.emplace_back(w, a);
        }
        tp.gat.push_back(std::move(layer));
    }
    auto take_mlp = [&](const MlpParams& m) {
        MlpValues v;
        for (size_t i = 0; i < m.layers.size(); ++i) {
            ad::Value w = next(), b = next();
            v.emplace_back(w, b);
        }
        return v;
    };
    tp.node_head = take_mlp(params.node_head);
    tp.edge_head = take_mlp(params.edge_head);
    tp.domain_head = take_mlp(params.domain_head);
    return tp;
}

Objective build_objective(ad::Tape& tape, const TapeParams& tp, const Graph& source,
                          const Graph& target, const TrainConfig& cfg, double lambda, bool grl) {
    Objective obj;
    EncodeResult enc_s = encode(tape, source, tp.gat, cfg.leaky_slope);
    obj.source_trace = enc_s.trace;

    std::vector<ad::Value> terms;
    auto track = [&](ad::Value v, double weight, double* slot) {
        *slot = v.scalar();
        if (weight != 0.0) terms.push_back(weight == 1.0 ? v : ad::scale(v, weight));
    };

    ad::Value e_src = edge_embed(tape, enc_s.h, source.und_edges, cfg.edge_operator);

    if (cfg.use_edge_loss) {
        ad::Value l_e = loss_edge(tape, mlp_logits(tape, e_src, tp.edge_head), source.edge_labels);
        track(l_e, 1.0, &obj.report.l_edge);
    }
    if (cfg.use_node_loss) {
        ad::Value node_logits = mlp_logits(tape, enc_s.h, tp.node_head);
        ad::Value l_n =
            loss_node(tape, node_logits, multi_hot(source.node_labels, source.label_dim));
        track(l_n, cfg.eta, &obj.report.l_node);
    }
    if (cfg.use_attn_loss) {
        for (size_t l = 0; l < enc_s.trace.fwd.size(); ++l) {
            ad::Value per_layer = loss_attention_layer(tape, enc_s.trace.fwd[l],
                                                       enc_s.trace.bwd[l], source.edge_labels,
                                                       cfg.gamma);
            obj.report.l_attn_per_layer.push_back(per_layer.scalar());
        }
        ad::Value l_a = loss_attention_total(tape, enc_s.trace, source.edge_labels, cfg.gamma);
        track(l_a, cfg.xi, &obj.report.l_attn);
    }
    if (cfg.use_domain_loss) {
        EncodeResult enc_t = encode(tape, target, tp.gat, cfg.leaky_slope);
        ad::Value e_tgt = edge_embed(tape, enc_t.h, target.und_edges, cfg.edge_operator);
        ad::Value e_all = ad::concat_rows(e_src, e_tgt);
        ad::Value d_in = grl ? ad::grad_reverse(e_all, lambda) : e_all;
        ad::Value d_logits = mlp_logits(tape, d_in, tp.domain_head);
        std::vector<uint8_t> domain_labels(source.num_edges(), 0);
        domain_labels.insert(domain_labels.end(), target.num_edges(), 1);
        ad::Value l_d = loss_domain(tape, d_logits, domain_labels);
        // The discriminator minimizes l_d unscaled; the encoder path sees
        // -lambda via the reversal.
        track(l_d, 1.0, &obj.report.l_domain);
    }

    if (terms.empty()) {
        obj.total = tape.leaf(DenseMatrix::scalar(0.0));
    } else {
        obj.total = terms[0];
        for (size_t i = 1; i < terms.size(); ++i) obj.total = ad::add(obj.total, terms[i]);
    }
    obj.report.l_total = obj.report.l_edge + cfg.eta * obj.report.l_node +
                         cfg.xi * obj.report.l_attn - lambda * obj.report.l_domain;
    return obj;
}

void adam_step(ModelParams& params, const std::vector<DenseMatrix>& grads, AdamState& state,
               double mu, double weight_decay, const TrainConfig& cfg) {
    std::vector<std::pair<std::string, DenseMatrix*>> tensors;
    params.for_each([&](const std::string& name, DenseMatrix& m) { tensors.emplace_back(name, &m); });
    require_shape(tensors.size() == grads.size(), "adam_step: gradient count mismatch");
    if (state.slots.empty()) {
        state.slots.resize(tensors.size());
        for (size_t i = 0; i < tensors.size(); ++i) {
            state.slots[i].m = DenseMatrix(tensors[i].second->rows, tensors[i].second->cols);
            state.slots[i].v = DenseMatrix(tensors[i].second->rows, tensors[i].second->cols);
        }
    }
    state.step++;
    const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < tensors.size(); ++i) {
        DenseMatrix& theta = *tensors[i].second;
        const DenseMatrix& g0 = grads[i];
        if (!g0.all_finite())
            throw NumericError("adam_step: non-finite gradient for " + tensors[i].first);
        AdamState::Slot& s = state.slots[i];
        for (size_t k = 0; k < theta.data.size(); ++k) {
            const double g = g0.data[k] + weight_decay * theta.data[k];
            s.m.data[k] = cfg.adam_beta1 * s.m.data[k] + (1.0 - cfg.adam_beta1) * g;
            s.v.data[k] = cfg.adam_beta2 * s.v.data[k] + (1.0 - cfg.adam_beta2) * g * g;
            const double mhat = s.m.data[k] / bc1;
            const double vhat = s.v.data[k] / bc2;
            theta.data[k] -= mu * mhat / (std::sqrt(vhat) + cfg.adam_eps);
        }
    }
}

namespace {

std::vector<DenseMatrix> extract_grads(ad::Tape& tape, const TapeParams& tp) {
    std::vector<DenseMatrix> grads;
    grads.reserve(tp.ordered.size());
    for (const auto& [name, v] : tp.ordered) grads.push_back(tape.grad(v.id));
    return grads;
}

}  // namespace

TrainResult train(const Graph& source, const Graph& target, const TrainConfig& cfg,
                  const std::string& trace_path) {
    if (!source.has_node_labels || !source.has_edge_labels)
        throw DataError("train: source network must be fully labeled");
    const Graph tgt = target.without_labels();

    TrainResult res;
    res.params = init_params(model_shape(source, cfg), cfg.seed);
    AdamState adam;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double p = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1) : 0.0;
        const double mu_p = lr_schedule(p, cfg.mu0);
        const double lambda_p = lambda_schedule(p, cfg.lambda_max);

        EpochTrace trace;
        trace.epoch = epoch;
        trace.p = p;
        trace.mu_p = mu_p;
        trace.lambda_p = lambda_p;
        try {
            ad::Tape tape;
            TapeParams tp = TapeParams::insert(tape, res.params);
            Objective obj = build_objective(tape, tp, source, tgt, cfg, lambda_p);
            trace.losses = obj.report;
            if (!std::isfinite(obj.total.scalar()))
                throw NumericError("train: non-finite objective");
            tape.backward(obj.total);
            adam_step(res.params, extract_grads(tape, tp), adam, mu_p, cfg.weight_decay, cfg);
        } catch (const NumericError&) {
            res.diverged = true;
            break;
        }

        const bool last = epoch + 1 == cfg.epochs;
        if (target.has_edge_labels && (last || (cfg.eval_every > 0 && epoch % cfg.eval_every == 0))) {
            const std::vector<double> scores = predict_target(res.params, tgt, cfg);
            const TargetMetrics m = evaluate_target(scores, target.edge_labels);
            trace.target_auc = m.auc;
            trace.target_ap = m.ap;
        }
        res.traces.push_back(trace);
    }

    if (!trace_path.empty()) write_trace(trace_path, res.traces);
    return res;
}

std::vector<double> predict_target(ModelParams& params, const Graph& target,
                                   const TrainConfig& cfg) {
    ad::Tape tape;
    TapeParams tp = TapeParams::insert(tape, params);
    EncodeResult enc = encode(tape, target, tp.gat, cfg.leaky_slope);
    ad::Value e = edge_embed(tape, enc.h, target.und_edges, cfg.edge_operator);
    ad::Value z = edge_classify(tape, e, tp.edge_head);
    return z.val().data;
}

std::vector<double> attention_sigma_stats(ModelParams& params, const Graph& graph,
                                          const TrainConfig& cfg) {
    ad::Tape tape;
    TapeParams tp = TapeParams::insert(tape, params);
    EncodeResult enc = encode(tape, graph, tp.gat, cfg.leaky_slope);
    std::vector<double> stats(graph.num_edges(), 0.0);
    const double layers = static_cast<double>(enc.trace.fwd.size());
    for (size_t l = 0; l < enc.trace.fwd.size(); ++l) {
        const DenseMatrix& f = enc.trace.fwd[l].val();
        const DenseMatrix& b = enc.trace.bwd[l].val();
        for (int e = 0; e < graph.num_edges(); ++e)
            stats[e] += 0.5 * (f.data[e] + b.data[e]) / layers;
    }
    for (double& s : stats) s = 1.0 / (1.0 + std::exp(-s));
    return stats;
}

void write_trace(const std::string& path, const std::vector<EpochTrace>& traces) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open trace file " + path);
    f.precision(17);
    for (const EpochTrace& t : traces) {
        f << "epoch=" << t.epoch << " p=" << t.p << " mu=" << t.mu_p << " lambda=" << t.lambda_p
          << " l_node=" << t.losses.l_node << " l_edge=" << t.losses.l_edge
          << " l_attn=" << t.losses.l_attn << " l_domain=" << t.losses.l_domain
          << " l_total=" << t.losses.l_total;
        if (t.target_auc) f << " target_auc=" << *t.target_auc << " target_ap=" << *t.target_ap;
        f << "\n";
    }
}

}  // namespace dgasn
