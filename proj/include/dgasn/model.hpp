#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dgasn/matrix.hpp"

namespace dgasn {

struct GatHeadParams {
    DenseMatrix weight;     // dim_in x dim_out
    DenseMatrix attention;  // 2*dim_out x 1
};

struct GatLayerParams {
    std::vector<GatHeadParams> heads;
};

struct MlpParams {
    // layers[i] = {weight dim_in x dim_out, bias 1 x dim_out}
    std::vector<std::pair<DenseMatrix, DenseMatrix>> layers;
};

// All learnable tensors: the shared GAT encoder plus the three MLP heads.
struct ModelParams {
    std::vector<GatLayerParams> gat;  // theta_h
    MlpParams node_head;              // theta_y
    MlpParams edge_head;              // theta_z
    MlpParams domain_head;            // theta_d

    // Visits every tensor with a stable name; order is fixed so optimizer
    // state and serialized containers line up.
    void for_each(const std::function<void(const std::string&, DenseMatrix&)>& fn);
    void for_each(const std::function<void(const std::string&, const DenseMatrix&)>& fn) const;
};

struct ModelShape {
    int layers = 2;
    int heads = 2;
    int head_dim = 8;
    int attr_dim = 0;
    int num_classes = 0;
    int edge_embed_dim = 0;  // depends on the edge operator
};

// Seeded uniform Glorot-style initialization; MLP biases start at zero.
ModelParams init_params(const ModelShape& shape, uint64_t seed);

// Zero initialization (all heads predict 0.5); used in tests.
ModelParams zero_params(const ModelShape& shape);

int encoder_output_dim(const ModelShape& shape);

}  // namespace dgasn
