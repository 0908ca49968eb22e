#include "pisac/graph.hpp"

#include <stdexcept>

namespace pisac {
namespace {

void add_undirected(std::vector<std::pair<int, int>>& list, int a, int b) {
    list.emplace_back(a, b);
    list.emplace_back(b, a);
}

}  // namespace

HeteroGraph build_graph(const Scenario& scenario, const AntennaLayout& layout,
                        double position_scale, const GraphContext* context) {
    if (!(position_scale > 0.0)) throw std::invalid_argument("position scale must be positive");

    HeteroGraph g;
    g.n_antenna = layout.count();
    g.n_user = static_cast<int>(scenario.users.size());
    g.n_target = static_cast<int>(scenario.targets.size());

    const int dim = context ? 7 : 6;
    g.features = Matrix(g.node_count(), dim);

    auto set_node = [&](int row, NodeType type, const Vec3& pos, double ctx) {
        double* f = g.features.row(row);
        f[static_cast<int>(type)] = 1.0;
        f[3] = pos.x / position_scale;
        f[4] = pos.y / position_scale;
        f[5] = pos.z / position_scale;
        if (context) f[6] = ctx;
    };

    for (int i = 0; i < g.n_antenna; ++i)
        set_node(i, NodeType::Antenna, layout.positions[static_cast<size_t>(i)], 0.0);
    for (int k = 0; k < g.n_user; ++k)
        set_node(g.n_antenna + k, NodeType::User, scenario.users[static_cast<size_t>(k)],
                 context ? context->user_rates[static_cast<size_t>(k)] : 0.0);
    for (int l = 0; l < g.n_target; ++l)
        set_node(g.n_antenna + g.n_user + l, NodeType::Target,
                 scenario.targets[static_cast<size_t>(l)],
                 context ? context->target_snrs[static_cast<size_t>(l)] : 0.0);

    auto& comm = g.edges[static_cast<size_t>(Relation::Communicates)];
    auto& sens = g.edges[static_cast<size_t>(Relation::Senses)];
    auto& intf = g.edges[static_cast<size_t>(Relation::Interference)];
    for (int i = 0; i < g.n_antenna; ++i) {
        for (int k = 0; k < g.n_user; ++k) add_undirected(comm, i, g.n_antenna + k);
        for (int l = 0; l < g.n_target; ++l) add_undirected(sens, i, g.n_antenna + g.n_user + l);
    }
    for (int k = 0; k < g.n_user; ++k)
        for (int l = 0; l < g.n_target; ++l)
            add_undirected(intf, g.n_antenna + k, g.n_antenna + g.n_user + l);

    return g;
}

}  // namespace pisac
