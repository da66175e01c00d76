// Command-line surface: train / eval / gradcheck / ablate / synth.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "dgasn/gradcheck.hpp"
#include "dgasn/metrics.hpp"
#include "dgasn/model_io.hpp"
#include "dgasn/presets.hpp"
#include "dgasn/trainer.hpp"

namespace fs = std::filesystem;
using namespace dgasn;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
    std::string source, target, preset, operator_name = "concatenate";
    std::string out = "out", trace;
    TrainConfig cfg;
};

void add_config_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--preset", o.preset, "Task preset (C->A, D->A, A->C, D->C, A->D, C->D)");
    cmd->add_option("--epochs", o.cfg.epochs, "Training epochs");
    cmd->add_option("--seed", o.cfg.seed, "Root RNG seed");
    cmd->add_option("--operator", o.operator_name,
                    "Edge embedding operator: concatenate|hadamard|average|l1|l2");
    cmd->add_option("--eta", o.cfg.eta, "Weight of the node classification loss");
    cmd->add_option("--xi", o.cfg.xi, "Weight of the supervised attention loss");
    cmd->add_option("--gamma", o.cfg.gamma, "Cost-sensitive factor on heterophilous edges");
    cmd->add_option("--weight-decay", o.cfg.weight_decay, "Coupled L2 weight decay");
    cmd->add_option("--layers", o.cfg.layers, "GAT layers");
    cmd->add_option("--heads", o.cfg.heads, "Attention heads per layer");
    cmd->add_option("--dim", o.cfg.head_dim, "Embedding dimensions per head");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--trace", o.trace, "Epoch trace file path");
}

// Preset first, explicit flags win.
void resolve_config(const CLI::App* cmd, CommonOpts& o) {
    if (!o.preset.empty()) {
        TrainConfig base;
        apply_preset(base, o.preset);
        auto keep = [&](const char* flag, auto member, auto preset_value) {
            if (cmd->count(flag) == 0) o.cfg.*member = preset_value;
        };
        keep("--layers", &TrainConfig::layers, base.layers);
        keep("--heads", &TrainConfig::heads, base.heads);
        keep("--dim", &TrainConfig::head_dim, base.head_dim);
        keep("--eta", &TrainConfig::eta, base.eta);
        keep("--xi", &TrainConfig::xi, base.xi);
        keep("--gamma", &TrainConfig::gamma, base.gamma);
        keep("--weight-decay", &TrainConfig::weight_decay, base.weight_decay);
    }
    o.cfg.edge_operator = parse_edge_operator(o.operator_name);
}

void write_metrics_file(const fs::path& path, const TargetMetrics& m) {
    std::ofstream f(path);
    f.precision(17);
    f << "auc\t" << m.auc << "\n";
    f << "ap\t" << m.ap << "\n";
}

int cmd_train(CommonOpts& o) {
    auto [source, sstats] = load_graph(o.source);
    auto [target, tstats] = load_graph(o.target);
    fs::create_directories(o.out);
    const std::string trace_path = o.trace.empty() ? (fs::path(o.out) / "trace.txt").string()
                                                   : o.trace;
    TrainResult res = train(source, target, o.cfg, trace_path);
    if (res.diverged) {
        std::cerr << "training diverged (non-finite loss); last finite trace written\n";
        return kExitNumeric;
    }
    save_params((fs::path(o.out) / "params.bin").string(), res.params);

    if (target.has_edge_labels) {
        const std::vector<double> scores = predict_target(res.params, target, o.cfg);
        const TargetMetrics m = evaluate_target(scores, target.edge_labels);
        write_metrics_file(fs::path(o.out) / "metrics.txt", m);
        std::cout << "target auc=" << m.auc << " ap=" << m.ap << "\n";
    }
    if (source.has_edge_labels && target.has_edge_labels) {
        export_attention_histograms((fs::path(o.out) / "attention_histograms.csv").string(),
                                    attention_sigma_stats(res.params, source, o.cfg),
                                    source.edge_labels,
                                    attention_sigma_stats(res.params, target, o.cfg),
                                    target.edge_labels);
    }
    std::cout << "trained " << o.cfg.epochs << " epochs; artifacts in " << o.out << "\n";
    return 0;
}

int cmd_eval(CommonOpts& o, const std::string& params_path) {
    auto [target, stats] = load_graph(o.target);
    if (!target.has_edge_labels) throw DataError("eval: target has no labels to evaluate against");
    ModelShape shape;
    shape.layers = o.cfg.layers;
    shape.heads = o.cfg.heads;
    shape.head_dim = o.cfg.head_dim;
    shape.attr_dim = target.attr_dim;
    shape.num_classes = target.label_dim;
    shape.edge_embed_dim = edge_embed_dim(o.cfg.edge_operator, encoder_output_dim(shape));
    ModelParams params = zero_params(shape);
    load_params(params_path, params);

    const std::vector<double> scores = predict_target(params, target, o.cfg);
    const TargetMetrics m = evaluate_target(scores, target.edge_labels);
    fs::create_directories(o.out);
    write_metrics_file(fs::path(o.out) / "metrics.txt", m);
    std::cout.precision(17);
    std::cout << "auc=" << m.auc << " ap=" << m.ap << "\n";
    return 0;
}

int cmd_gradcheck(uint64_t seed, int size) {
    if (size > 50) throw CLI::ValidationError("--size must be <= 50");
    SynthParams sp;
    sp.nodes = size;
    sp.attr_dim = 16;
    sp.intra_class_edge_prob = 0.4;
    sp.inter_class_edge_prob = 0.15;
    auto [source, target] = synth_pair(seed, sp);

    TrainConfig cfg;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.head_dim = 4;
    cfg.seed = seed;
    GradCheckReport rep = run_gradcheck(source, target, cfg);
    std::cout.precision(6);
    std::cout << "fd worst relative error (theta_y, theta_z, theta_d): " << rep.worst_fd_error
              << "\n"
              << "fd worst relative error (theta_h, domain term excluded): "
              << rep.worst_encoder_fd << "\n"
              << "grl identity worst abs error (theta_h): " << rep.worst_grl_identity << "\n"
              << "discriminator identity worst abs error (theta_d): " << rep.worst_disc_identity
              << "\n";
    if (!rep.passed()) {
        std::cerr << "gradient check FAILED\n";
        return kExitNumeric;
    }
    std::cout << "gradient check passed\n";
    return 0;
}

int cmd_ablate(CommonOpts& o, const std::string& variant) {
    auto [source, sstats] = load_graph(o.source);
    auto [target, tstats] = load_graph(o.target);
    if (!target.has_edge_labels) throw DataError("ablate: target needs labels for the metric table");

    std::vector<std::string> variants;
    if (variant == "all")
        variants = {"full", "no_node", "no_edge", "no_domain", "no_attn"};
    else
        variants = {variant};

    fs::create_directories(o.out);
    std::ofstream table(fs::path(o.out) / "ablation.tsv");
    table << "variant\tauc\tap\n";
    table.precision(17);
    std::cout << "variant\tauc\tap\n";
    for (const std::string& v : variants) {
        TrainConfig cfg = o.cfg;
        if (v == "no_node")
            cfg.eta = 0.0;
        else if (v == "no_edge")
            cfg.use_edge_loss = false;
        else if (v == "no_domain")
            cfg.lambda_max = 0.0;
        else if (v == "no_attn")
            cfg.xi = 0.0;
        else if (v != "full")
            throw CLI::ValidationError("unknown variant: " + v);
        TrainResult res = train(source, target, cfg);
        if (res.diverged) return kExitNumeric;
        const std::vector<double> scores = predict_target(res.params, target, cfg);
        const TargetMetrics m = evaluate_target(scores, target.edge_labels);
        table << v << "\t" << m.auc << "\t" << m.ap << "\n";
        std::cout << v << "\t" << m.auc << "\t" << m.ap << "\n";
    }
    return 0;
}

int cmd_synth(uint64_t seed, const SynthParams& sp, const std::string& out) {
    auto [source, target] = synth_pair(seed, sp);
    save_graph((fs::path(out) / "source").string(), source);
    save_graph((fs::path(out) / "target").string(), target);
    for (const auto& [name, g] : {std::pair<const char*, const Graph*>{"source", &source},
                                  {"target", &target}}) {
        const DatasetStats s = compute_stats(*g);
        std::cout << name << ": nodes=" << s.nodes << " edges=" << s.total_edges_raw
                  << " homophilous=" << s.homophilous << " heterophilous=" << s.heterophilous
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-network homophilous/heterophilous edge classification"};
    app.require_subcommand(1);

    CommonOpts train_o, eval_o, ablate_o;
    std::string eval_params, ablate_variant = "all";
    uint64_t gc_seed = 0, synth_seed = 0;
    int gc_size = 12;
    SynthParams sp;
    std::string synth_out = "out";

    CLI::App* c_train = app.add_subcommand("train", "Train on a source/target pair");
    c_train->add_option("--source", train_o.source, "Source dataset directory")->required();
    c_train->add_option("--target", train_o.target, "Target dataset directory")->required();
    add_config_flags(c_train, train_o);

    CLI::App* c_eval = app.add_subcommand("eval", "Evaluate saved parameters on a target");
    c_eval->add_option("--params", eval_params, "Parameter container path")->required();
    c_eval->add_option("--target", eval_o.target, "Target dataset directory")->required();
    add_config_flags(c_eval, eval_o);

    CLI::App* c_gc = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    c_gc->add_option("--seed", gc_seed, "Root RNG seed");
    c_gc->add_option("--size", gc_size, "Nodes per synthetic network (<= 50)");

    CLI::App* c_ablate = app.add_subcommand("ablate", "Loss-ablation metric table");
    c_ablate->add_option("--source", ablate_o.source, "Source dataset directory")->required();
    c_ablate->add_option("--target", ablate_o.target, "Target dataset directory")->required();
    c_ablate->add_option("--variant", ablate_variant,
                         "full|no_node|no_edge|no_domain|no_attn|all");
    add_config_flags(c_ablate, ablate_o);

    CLI::App* c_synth = app.add_subcommand("synth", "Generate a synthetic source/target pair");
    c_synth->add_option("--seed", synth_seed, "Root RNG seed");
    c_synth->add_option("--nodes", sp.nodes, "Nodes per network");
    c_synth->add_option("--classes", sp.classes, "Label classes");
    c_synth->add_option("--attr-dim", sp.attr_dim, "Attribute dimensions");
    c_synth->add_option("--p-intra", sp.intra_class_edge_prob, "Intra-class edge probability");
    c_synth->add_option("--p-inter", sp.inter_class_edge_prob, "Inter-class edge probability");
    c_synth->add_option("--flip-source", sp.source_flip_rate, "Source attribute flip rate");
    c_synth->add_option("--flip-target", sp.target_flip_rate, "Target attribute flip rate");
    c_synth->add_option("--out", synth_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (c_train->parsed()) {
            resolve_config(c_train, train_o);
            return cmd_train(train_o);
        }
        if (c_eval->parsed()) {
            resolve_config(c_eval, eval_o);
            return cmd_eval(eval_o, eval_params);
        }
        if (c_gc->parsed()) return cmd_gradcheck(gc_seed, gc_size);
        if (c_ablate->parsed()) {
            resolve_config(c_ablate, ablate_o);
            return cmd_ablate(ablate_o, ablate_variant);
        }
        if (c_synth->parsed()) return cmd_synth(synth_seed, sp, synth_out);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
