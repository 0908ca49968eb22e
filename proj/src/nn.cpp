#include "pisac/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace pisac {

int apply_activation(Tape& tape, int node, Activation act) {
    switch (act) {
        case Activation::Identity: return node;
        case Activation::Tanh: return tape.tanh_op(node);
        case Activation::Relu: return tape.relu_op(node);
        case Activation::Logistic: return tape.logistic_op(node);
    }
    throw std::invalid_argument("unknown activation");
}

Dense Dense::create(ParamStore& params, const std::string& prefix, int in, int out, Rng& rng) {
    Dense d;
    d.in = in;
    d.out = out;
    d.w = params.add(prefix + ".w", uniform_init(out, in, in, rng));
    d.b = params.add(prefix + ".b", uniform_init(1, out, in, rng));
    return d;
}

int Dense::forward(Tape& tape, int x) const {
    return tape.add_row(tape.matmul_nt(x, tape.param(w)), tape.param(b));
}

RelGnnLayer RelGnnLayer::create(ParamStore& params, const std::string& prefix, int in, int out,
                                bool homogeneous, Activation act, Rng& rng) {
    RelGnnLayer layer;
    layer.in = in;
    layer.out = out;
    layer.homogeneous = homogeneous;
    layer.act = act;
    if (homogeneous) {
        layer.w_rel.push_back(params.add(prefix + ".w_edge", uniform_init(out, in, in, rng)));
    } else {
        static const char* kRelName[kRelationCount] = {"communicates", "senses", "interference"};
        for (int r = 0; r < kRelationCount; ++r)
            layer.w_rel.push_back(
                params.add(prefix + ".w_" + kRelName[r], uniform_init(out, in, in, rng)));
    }
    layer.w_self = params.add(prefix + ".w_self", uniform_init(out, in, in, rng));
    return layer;
}

int RelGnnLayer::forward(Tape& tape, int h, const HeteroGraph& graph) const {
    int acc = tape.matmul_nt(h, tape.param(w_self));
    if (homogeneous) {
        // One shared edge weight: summing the per-relation gathers first is
        // the same linear map as a single gather over the merged edge set.
        int gathered = -1;
        for (int r = 0; r < kRelationCount; ++r) {
            const EdgeList& edges = graph.edges[static_cast<size_t>(r)];
            if (edges.empty()) continue;
            const int g = tape.gather_sum(h, &edges);
            gathered = gathered < 0 ? g : tape.add(gathered, g);
        }
        if (gathered >= 0)
            acc = tape.add(acc, tape.matmul_nt(gathered, tape.param(w_rel[0])));
    } else {
        for (int r = 0; r < kRelationCount; ++r) {
            const EdgeList& edges = graph.edges[static_cast<size_t>(r)];
            if (edges.empty()) continue;
            acc = tape.add(acc, tape.matmul_nt(tape.gather_sum(h, &edges),
                                               tape.param(w_rel[static_cast<size_t>(r)])));
        }
    }
    return apply_activation(tape, acc, act);
}

int mean_pool(Tape& tape, int h) { return tape.mean_rows(h); }

void Adam::add_group(std::vector<int> param_ids, double lr) {
    groups_.push_back({std::move(param_ids), lr});
}

void Adam::step(ParamStore& params) {
    steps_ += 1;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    for (const Group& group : groups_) {
        for (int id : group.ids) {
            auto& p = params[id];
            for (int i = 0; i < p.value.size(); ++i) {
                const size_t j = static_cast<size_t>(i);
                const double g = p.grad.data[j];
                p.adam_m.data[j] = beta1_ * p.adam_m.data[j] + (1.0 - beta1_) * g;
                p.adam_v.data[j] = beta2_ * p.adam_v.data[j] + (1.0 - beta2_) * g * g;
                const double mhat = p.adam_m.data[j] / bc1;
                const double vhat = p.adam_v.data[j] / bc2;
                p.value.data[j] -= group.lr * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }
}

}  // namespace pisac
