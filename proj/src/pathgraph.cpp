#include "bikeqn/pathgraph.hpp"

namespace bikeqn {

PathGraph build_path_graph(const BikeShareModel& model) {
    PathGraph g;
    g.station_count = model.station_count;
    g.adj.assign(model.station_count + model.road_count(), {});
    for (int r = 0; r < model.road_count(); ++r) {
        const RoadSpec& road = model.roads[r];
        g.adj[road.from].push_back(model.station_count + r);
        g.adj[model.station_count + r].push_back(road.to);
    }
    return g;
}

namespace {

void dfs(const std::vector<std::vector<int>>& adj, int start, std::vector<char>& seen) {
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
}

}  // namespace

bool is_irreducible(const PathGraph& graph) {
    const int n = graph.node_count();
    if (n == 0) return false;

    std::vector<char> seen(n, 0);
    dfs(graph.adj, 0, seen);
    for (char s : seen)
        if (!s) return false;

    std::vector<std::vector<int>> rev(n);
    for (int u = 0; u < n; ++u)
        for (int v : graph.adj[u]) rev[v].push_back(u);
    std::fill(seen.begin(), seen.end(), 0);
    dfs(rev, 0, seen);
    for (char s : seen)
        if (!s) return false;
    return true;
}

}  // namespace bikeqn
