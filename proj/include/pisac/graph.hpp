#pragma once

#include <array>
#include <utility>
#include <vector>

#include "pisac/geometry.hpp"
#include "pisac/matrix.hpp"

namespace pisac {

enum class NodeType { Antenna, User, Target };

enum class Relation : int { Communicates = 0, Senses = 1, Interference = 2 };
inline constexpr int kRelationCount = 3;

/// Typed undirected graph over antennas, users and targets; the RL state.
/// Node order is antennas, then users, then targets. Every edge is stored in
/// both directions. Features are rows of `features`: a 3-way one-hot type
/// prefix followed by the 3D position divided by `position_scale` (plus one
/// trailing context scalar when enabled).
struct HeteroGraph {
    int n_antenna = 0;
    int n_user = 0;
    int n_target = 0;
    Matrix features;  // node_count x feature_dim
    std::array<std::vector<std::pair<int, int>>, kRelationCount> edges;  // directed pairs

    int node_count() const { return n_antenna + n_user + n_target; }

    NodeType type_of(int v) const {
        if (v < n_antenna) return NodeType::Antenna;
        if (v < n_antenna + n_user) return NodeType::User;
        return NodeType::Target;
    }

    const std::vector<std::pair<int, int>>& relation_edges(Relation r) const {
        return edges[static_cast<size_t>(r)];
    }
};

/// Optional per-node context appended as a 7th feature: the user's latest
/// rate, the target's latest SNR, 0 for antennas.
struct GraphContext {
    std::vector<double> user_rates;
    std::vector<double> target_snrs;
};

/// Builds the state graph: communicates edges join every antenna-user pair,
/// senses edges every antenna-target pair, interference edges every
/// user-target pair.
HeteroGraph build_graph(const Scenario& scenario, const AntennaLayout& layout,
                        double position_scale, const GraphContext* context = nullptr);

}  // namespace pisac
