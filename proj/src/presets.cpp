#include "dgasn/presets.hpp"

#include <stdexcept>

namespace dgasn {

const std::vector<TaskPreset>& task_presets() {
    static const std::vector<TaskPreset> presets = {
        {"C->A", 8, 8, 64, 1.0, 1e-1, 1e-3},
        {"D->A", 3, 8, 64, 1e-2, 1e-1, 1e-3},
        {"A->C", 7, 8, 64, 1.0, 1e-3, 5e-4},
        {"D->C", 8, 8, 32, 1.0, 1e-4, 1e-3},
        {"A->D", 8, 8, 64, 1.0, 1e-2, 1e-3},
        {"C->D", 7, 8, 64, 1.0, 1e-1, 5e-4},
    };
    return presets;
}

void apply_preset(TrainConfig& cfg, const std::string& name) {
    for (const TaskPreset& p : task_presets()) {
        if (p.name != name) continue;
        cfg.layers = p.layers;
        cfg.heads = p.heads;
        cfg.head_dim = p.head_dim;
        cfg.eta = p.eta;
        cfg.xi = p.xi;
        cfg.weight_decay = p.weight_decay;
        cfg.gamma = 5.0;
        cfg.lambda_max = 0.1;
        cfg.mu0 = 1e-3;
        return;
    }
    throw std::invalid_argument("unknown task preset: " + name);
}

}  // namespace dgasn
