#include "dgasn/model.hpp"

#include <cmath>
#include <random>

#include "dgasn/rng.hpp"

namespace dgasn {

namespace {

constexpr int kNodeHidden = 32;
constexpr int kEdgeHidden = 128;
constexpr int kDomainHidden1 = 128;
constexpr int kDomainHidden2 = 32;

ModelParams build_shapes(const ModelShape& s) {
    ModelParams p;
    int dim_in = s.attr_dim;
    for (int l = 0; l < s.layers; ++l) {
        GatLayerParams layer;
        for (int k = 0; k < s.heads; ++k) {
            GatHeadParams h;
            h.weight = DenseMatrix(dim_in, s.head_dim);
            h.attention = DenseMatrix(2 * s.head_dim, 1);
            layer.heads.push_back(std::move(h));
        }
        p.gat.push_back(std::move(layer));
        dim_in = s.heads * s.head_dim;
    }
    const int emb = dim_in;
    p.node_head.layers = {{DenseMatrix(emb, kNodeHidden), DenseMatrix(1, kNodeHidden)},
                          {DenseMatrix(kNodeHidden, s.num_classes), DenseMatrix(1, s.num_classes)}};
    p.edge_head.layers = {{DenseMatrix(s.edge_embed_dim, kEdgeHidden), DenseMatrix(1, kEdgeHidden)},
                          {DenseMatrix(kEdgeHidden, 1), DenseMatrix(1, 1)}};
    p.domain_head.layers = {
        {DenseMatrix(s.edge_embed_dim, kDomainHidden1), DenseMatrix(1, kDomainHidden1)},
        {DenseMatrix(kDomainHidden1, kDomainHidden2), DenseMatrix(1, kDomainHidden2)},
        {DenseMatrix(kDomainHidden2, 1), DenseMatrix(1, 1)}};
    return p;
}

void glorot_fill(DenseMatrix& m, std::mt19937_64& rng, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : m.data) v = u(rng);
}

}  // namespace

int encoder_output_dim(const ModelShape& shape) { return shape.heads * shape.head_dim; }

void ModelParams::for_each(const std::function<void(const std::string&, DenseMatrix&)>& fn) {
    for (size_t l = 0; l < gat.size(); ++l)
        for (size_t k = 0; k < gat[l].heads.size(); ++k) {
            const std::string base =
                "gat/layer" + std::to_string(l) + "/head" + std::to_string(k);
            fn(base + "/W", gat[l].heads[k].weight);
            fn(base + "/a", gat[l].heads[k].attention);
        }
    auto mlp = [&](const char* name, MlpParams& m) {
        for (size_t i = 0; i < m.layers.size(); ++i) {
            const std::string base = std::string(name) + "/layer" + std::to_string(i);
            fn(base + "/W", m.layers[i].first);
            fn(base + "/b", m.layers[i].second);
        }
    };
    mlp("node_head", node_head);
    mlp("edge_head", edge_head);
    mlp("domain_head", domain_head);
}

void ModelParams::for_each(
    const std::function<void(const std::string&, const DenseMatrix&)>& fn) const {
    const_cast<ModelParams*>(this)->for_each(
        [&](const std::string& name, DenseMatrix& m) { fn(name, m); });
}

ModelParams init_params(const ModelShape& shape, uint64_t seed) {
    ModelParams p = build_shapes(shape);
    p.for_each([&](const std::string& name, DenseMatrix& m) {
        if (name.ends_with("/b")) return;  // biases start at zero
        auto rng = make_rng(seed, "init/" + name);
        glorot_fill(m, rng, m.rows, m.cols);
    });
    return p;
}

ModelParams zero_params(const ModelShape& shape) { return build_shapes(shape); }

}  // namespace dgasn
