#pragma once

#include <string>
#include <vector>

#include "dgasn/trainer.hpp"

namespace dgasn {

// Per-task hyperparameter presets for the six benchmark transfer tasks
// between ACMv9 (A), Citationv1 (C) and DBLPv7 (D).
struct TaskPreset {
    std::string name;  // e.g. "C->A"
    int layers;
    int heads;
    int head_dim;
    double eta;
    double xi;
    double weight_decay;
};

const std::vector<TaskPreset>& task_presets();

// Applies the named preset onto a config (gamma=5, lambda_max=0.1, mu0=1e-3
// are shared across tasks). Throws std::invalid_argument on unknown names.
void apply_preset(TrainConfig& cfg, const std::string& name);

}  // namespace dgasn
