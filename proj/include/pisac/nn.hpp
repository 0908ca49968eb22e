#pragma once

#include <string>
#include <vector>

#include "pisac/graph.hpp"
#include "pisac/tape.hpp"

namespace pisac {

enum class Activation { Identity, Tanh, Relu, Logistic };

int apply_activation(Tape& tape, int node, Activation act);

/// Affine layer y = x W^T + b with W stored out x in.
struct Dense {
    int w = -1;
    int b = -1;
    int in = 0;
    int out = 0;

    static Dense create(ParamStore& params, const std::string& prefix, int in, int out, Rng& rng);
    int forward(Tape& tape, int x) const;
};

/// Relation-typed graph layer: for every node, sum W_r over neighbors per
/// relation plus W_0 times itself, then the activation. Sum aggregation, no
/// degree normalization, no bias. The homogeneous variant shares one W across
/// relations.
struct RelGnnLayer {
    std::vector<int> w_rel;  // kRelationCount entries, or 1 when homogeneous
    int w_self = -1;
    bool homogeneous = false;
    Activation act = Activation::Tanh;
    int in = 0;
    int out = 0;

    static RelGnnLayer create(ParamStore& params, const std::string& prefix, int in, int out,
                              bool homogeneous, Activation act, Rng& rng);
    int forward(Tape& tape, int h, const HeteroGraph& graph) const;
};

int mean_pool(Tape& tape, int h);

/// Adam with parameter groups (distinct learning rates over disjoint id
/// sets). Moment buffers live in the ParamStore.
class Adam {
  public:
    void add_group(std::vector<int> param_ids, double lr);
    void step(ParamStore& params);

  private:
    struct Group {
        std::vector<int> ids;
        double lr;
    };
    std::vector<Group> groups_;
    long steps_ = 0;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-8;
};

}  // namespace pisac
