#pragma once

#include <string>
#include <vector>

#include "bikeqn/model.hpp"

namespace bikeqn {

// Accessibility graph over station and road nodes. The two routing classes
// of a road share every outgoing edge, so reachability is decided on one
// node per road: node i in [0, N) is Station i+1, node N + r is roads[r].
struct PathGraph {
    int station_count = 0;
    std::vector<std::vector<int>> adj;

    int node_count() const { return static_cast<int>(adj.size()); }
};

// Edges: Station i -> Road i->j for every outgoing road, Road i->j -> Station j.
PathGraph build_path_graph(const BikeShareModel& model);

// True iff the graph is strongly connected.
bool is_irreducible(const PathGraph& graph);

}  // namespace bikeqn
