#pragma once

#include <optional>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "parlab/support.hpp"

namespace parlab {

// Bipartite graph between two coordinates' alphabets; the vertex set is the
// full declared alphabets, so labels that never occur disconnect it.
struct BipartiteProjectionGraph {
    int coord_left = 0, coord_right = 0;
    int left_size = 0, right_size = 0;
    std::set<std::pair<int, int>> edges;
};

// Certificate that a projection graph is disconnected: every edge stays
// inside (left_part x right_part) or its complement, and one side is proper.
struct BipartitionWitness {
    int coord_left = 0, coord_right = 0;
    std::vector<int> left_part, right_part;
};

struct StructureReport {
    bool connected = false;
    bool coordinatewise_connected = false;
    bool pairwise_connected = false;
    bool full_projections = false;
    std::vector<uint8_t> per_coordinate_connected;
    std::optional<BipartitionWitness> pairwise_witness;
    std::optional<std::pair<std::vector<int>, std::vector<int>>> component_witness;  // two vertex sets of H(S)
};

inline BipartiteProjectionGraph pairwise_projection(const SupportSet& s, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= s.coords() || j >= s.coords())
        throw input_error("pairwise_projection: bad coordinates");
    BipartiteProjectionGraph g;
    g.coord_left = i;
    g.coord_right = j;
    g.left_size = s.alphabet_size(i);
    g.right_size = s.alphabet_size(j);
    for (const auto& t : s.tuples) g.edges.insert({t[i], t[j]});
    return g;
}

namespace detail {

// BFS from vertex 0 over left+right vertices; returns (component mask, #reached).
inline std::pair<std::vector<uint8_t>, int> bipartite_component(const BipartiteProjectionGraph& g) {
    int total = g.left_size + g.right_size;
    std::vector<std::vector<int>> adj(total);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(g.left_size + b);
        adj[g.left_size + b].push_back(a);
    }
    std::vector<uint8_t> seen(total, 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                bfs.push(w);
            }
    }
    return {seen, reached};
}

}  // namespace detail

// True iff every two-coordinate projection graph is connected. On failure
// returns the first disconnected pair with a certifying bipartition.
inline std::pair<bool, std::optional<BipartitionWitness>> is_pairwise_connected(const SupportSet& s) {
    for (int i = 0; i < s.coords(); ++i) {
        for (int j = i + 1; j < s.coords(); ++j) {
            auto g = pairwise_projection(s, i, j);
            auto [seen, reached] = detail::bipartite_component(g);
            if (reached == g.left_size + g.right_size) continue;
            BipartitionWitness w;
            w.coord_left = i;
            w.coord_right = j;
            for (int a = 0; a < g.left_size; ++a)
                if (seen[a]) w.left_part.push_back(a);
            for (int b = 0; b < g.right_size; ++b)
                if (seen[g.left_size + b]) w.right_part.push_back(b);
            return {false, w};
        }
    }
    return {true, std::nullopt};
}

// Connectivity of the graph on support tuples, adjacent iff they differ in
// exactly one coordinate.
inline bool is_connected(const SupportSet& s, std::pair<std::vector<int>, std::vector<int>>* witness = nullptr) {
    const auto& ts = s.tuples;
    int n = static_cast<int>(ts.size());
    auto differ_in_one = [&](const std::vector<int>& a, const std::vector<int>& b) {
        int d = 0;
        for (size_t c = 0; c < a.size(); ++c)
            if (a[c] != b[c] && ++d > 1) return false;
        return d == 1;
    };
    std::vector<uint8_t> seen(n, 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int w = 0; w < n; ++w)
            if (!seen[w] && differ_in_one(ts[v], ts[w])) {
                seen[w] = 1;
                ++reached;
                bfs.push(w);
            }
    }
    if (reached == n) return true;
    if (witness) {
        witness->first.clear();
        witness->second.clear();
        for (int v = 0; v < n; ++v) (seen[v] ? witness->first : witness->second).push_back(v);
    }
    return false;
}

// Per-coordinate connection graph: labels adjacent iff two support tuples
// agree everywhere else. The vertex set is the full alphabet.
inline bool is_connected_wrt_coordinate(const SupportSet& s, int j) {
    int sz = s.alphabet_size(j);
    std::vector<std::vector<int>> adj(sz);
    const auto& ts = s.tuples;
    for (size_t u = 0; u < ts.size(); ++u) {
        for (size_t v = u + 1; v < ts.size(); ++v) {
            if (ts[u][j] == ts[v][j]) continue;
            bool rest_equal = true;
            for (int c = 0; c < s.coords() && rest_equal; ++c)
                if (c != j && ts[u][c] != ts[v][c]) rest_equal = false;
            if (rest_equal) {
                adj[ts[u][j]].push_back(ts[v][j]);
                adj[ts[v][j]].push_back(ts[u][j]);
            }
        }
    }
    std::vector<uint8_t> seen(sz, 0);
    std::queue<int> bfs;
    bfs.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                bfs.push(w);
            }
    }
    return reached == sz;
}

inline std::pair<bool, std::vector<uint8_t>> is_coordinatewise_connected(const SupportSet& s) {
    std::vector<uint8_t> flags(s.coords());
    bool all = true;
    for (int j = 0; j < s.coords(); ++j) {
        flags[j] = is_connected_wrt_coordinate(s, j) ? 1 : 0;
        all = all && flags[j];
    }
    return {all, flags};
}

inline bool has_full_projections(const SupportSet& s) {
    for (int j = 0; j < s.coords(); ++j) {
        std::vector<uint8_t> hit(s.alphabet_size(j), 0);
        for (const auto& t : s.tuples) hit[t[j]] = 1;
        for (uint8_t h : hit)
            if (!h) return false;
    }
    return true;
}

inline StructureReport classify(const SupportSet& s) {
    StructureReport r;
    std::pair<std::vector<int>, std::vector<int>> comp;
    r.connected = is_connected(s, &comp);
    if (!r.connected) r.component_witness = comp;
    auto [cw, flags] = is_coordinatewise_connected(s);
    r.coordinatewise_connected = cw;
    r.per_coordinate_connected = flags;
    auto [pw, wit] = is_pairwise_connected(s);
    r.pairwise_connected = pw;
    r.pairwise_witness = wit;
    r.full_projections = has_full_projections(s);
    return r;
}

// Re-checks a bipartition witness against the support.
inline bool verify_bipartition_witness(const SupportSet& s, const BipartitionWitness& w) {
    std::vector<uint8_t> in_left(s.alphabet_size(w.coord_left), 0), in_right(s.alphabet_size(w.coord_right), 0);
    for (int a : w.left_part) in_left[a] = 1;
    for (int b : w.right_part) in_right[b] = 1;
    for (const auto& t : s.tuples) {
        if (in_left[t[w.coord_left]] != in_right[t[w.coord_right]]) return false;
    }
    return true;
}

}  // namespace parlab
