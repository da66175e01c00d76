#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dgasn/graph.hpp"
#include "dgasn/heads.hpp"
#include "dgasn/losses.hpp"
#include "dgasn/model.hpp"

namespace dgasn {

struct TrainConfig {
    int layers = 2;
    int heads = 2;
    int head_dim = 8;
    double eta = 1.0;
    double xi = 0.1;
    double gamma = 5.0;
    double lambda_max = 0.1;
    double mu0 = 1e-3;
    double weight_decay = 1e-3;
    int epochs = 200;
    uint64_t seed = 0;
    EdgeOperator edge_operator = EdgeOperator::concatenate;
    bool use_node_loss = true;
    bool use_edge_loss = true;
    bool use_attn_loss = true;
    bool use_domain_loss = true;
    double leaky_slope = 0.2;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int eval_every = 10;
};

// mu_p = mu0 / (1 + 10 p)^0.75
double lr_schedule(double p, double mu0 = 1e-3);
// (2 / (1 + exp(-10 p)) - 1) * lambda_max
double lambda_schedule(double p, double lambda_max = 0.1);

struct AdamState {
    struct Slot {
        DenseMatrix m;
        DenseMatrix v;
    };
    std::vector<Slot> slots;  // one per tensor, ModelParams::for_each order
    long step = 0;
};

// Classic Adam with bias correction; weight decay enters as coupled L2
// (wd * theta added to the gradient before the moment updates).
void adam_step(ModelParams& params, const std::vector<DenseMatrix>& grads, AdamState& state,
               double mu, double weight_decay, const TrainConfig& cfg);

struct EpochTrace {
    int epoch = 0;
    double p = 0.0;
    double mu_p = 0.0;
    double lambda_p = 0.0;
    LossReport losses;
    std::optional<double> target_auc;
    std::optional<double> target_ap;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochTrace> traces;
    bool diverged = false;
};

ModelShape model_shape(const Graph& source, const TrainConfig& cfg);

// Parameter leaves on a tape, grouped the way the forward pass consumes them.
struct TapeParams {
    std::vector<std::vector<std::pair<ad::Value, ad::Value>>> gat;
    MlpValues node_head, edge_head, domain_head;
    std::vector<std::pair<std::string, ad::Value>> ordered;

    static TapeParams insert(ad::Tape& tape, ModelParams& params);
};

struct Objective {
    ad::Value total;  // scalar run through the reversal on the domain path
    LossReport report;
    AttentionTrace source_trace;
};

// Assembles the full per-epoch objective over one tape. `target` must be
// unlabeled. When grl is false the domain path skips the gradient reversal
// (testing hook for the reversal contract).
Objective build_objective(ad::Tape& tape, const TapeParams& tp, const Graph& source,
                          const Graph& target, const TrainConfig& cfg, double lambda,
                          bool grl = true);

// Full-batch training. Target node/edge labels, when present, are stripped
// before any loss sees them and used only by the periodic evaluation.
TrainResult train(const Graph& source, const Graph& target, const TrainConfig& cfg,
                  const std::string& trace_path = "");

// P(homophilous) per stored target edge.
std::vector<double> predict_target(ModelParams& params, const Graph& target,
                                   const TrainConfig& cfg);

// Per-edge sigma(mean over layers of the head-mean attention logit).
std::vector<double> attention_sigma_stats(ModelParams& params, const Graph& graph,
                                          const TrainConfig& cfg);

void write_trace(const std::string& path, const std::vector<EpochTrace>& traces);

}  // namespace dgasn
