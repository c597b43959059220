#include "gkae/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gkae/error.hpp"

namespace gkae {

void GraphSnapshot::validate() const {
    const int n = node_count();
    if (weights.rows() != n || weights.cols() != n)
        throw DimensionMismatch("GraphSnapshot: weights must be N x N");
    for (int i = 0; i < n; ++i) {
        if (weights(i, i) != 0.0) throw Error("GraphSnapshot: nonzero diagonal weight");
        for (int j = 0; j < n; ++j) {
            if (weights(i, j) < 0.0) throw Error("GraphSnapshot: negative weight");
            if (weights(i, j) != weights(j, i)) throw NotSymmetric("GraphSnapshot: weights not symmetric");
        }
    }
    std::vector<char> has_edge(static_cast<std::size_t>(n) * n, 0);
    for (auto [l, m] : edges) {
        if (l < 0 || m < 0 || l >= n || m >= n || l == m) throw Error("GraphSnapshot: bad edge endpoint");
        has_edge[static_cast<std::size_t>(l) * n + m] = 1;
        has_edge[static_cast<std::size_t>(m) * n + l] = 1;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool positive = weights(i, j) > 0.0;
            if (positive != static_cast<bool>(has_edge[static_cast<std::size_t>(i) * n + j]))
                throw Error("GraphSnapshot: edge set inconsistent with weights");
        }
}

void GraphSequence::validate() const {
    if (snapshots.empty()) return;
    const int n = snapshots.front().node_count();
    for (const auto& s : snapshots) {
        if (s.node_count() != n) throw DimensionMismatch("GraphSequence: node count varies");
        s.validate();
    }
    auto same_edges = [&](const GraphSnapshot& a, const GraphSnapshot& b) {
        auto ea = a.edges, eb = b.edges;
        std::sort(ea.begin(), ea.end());
        std::sort(eb.begin(), eb.end());
        return ea == eb;
    };
    if (kind == SequenceKind::Type1) {
        for (std::size_t t = 1; t < snapshots.size(); ++t)
            if (!(snapshots[t].weights == snapshots[0].weights) || !same_edges(snapshots[t], snapshots[0]))
                throw Error("GraphSequence: Type-1 requires a fixed graph");
    } else if (kind == SequenceKind::Type2) {
        for (std::size_t t = 1; t < snapshots.size(); ++t)
            if (!same_edges(snapshots[t], snapshots[0]))
                throw Error("GraphSequence: Type-2 requires a fixed edge set");
    }
}

Matrix laplacian(const GraphSnapshot& g) {
    const int n = g.node_count();
    Matrix lap = scaled(g.weights, -1.0);
    for (int i = 0; i < n; ++i) {
        double degree = 0.0;
        for (int j = 0; j < n; ++j) degree += g.weights(i, j);
        lap(i, i) = degree;
    }
    return lap;
}

namespace {

double sq_distance(const Matrix& coords, int a, int b) {
    double s = 0.0;
    for (int d = 0; d < coords.cols(); ++d) {
        const double diff = coords(a, d) - coords(b, d);
        s += diff * diff;
    }
    return s;
}

GraphSnapshot from_edges(int n, std::vector<std::pair<int, int>> edges) {
    GraphSnapshot g;
    g.signals.assign(n, 0.0);
    g.weights = Matrix(n, n);
    for (auto [l, m] : edges) {
        g.weights(l, m) = 1.0;
        g.weights(m, l) = 1.0;
    }
    g.edges = std::move(edges);
    return g;
}

}  // namespace

GraphSnapshot build_knn_graph(const Matrix& coords, int k) {
    const int n = coords.rows();
    if (k >= n) throw KTooLarge("build_knn_graph: k must be < N");
    if (k < 1) throw Error("build_knn_graph: k must be positive");

    std::vector<std::pair<int, int>> edges;
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), 0);
        order.erase(order.begin() + i);
        // stable distance order; equal distances resolve to the lower index
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double da = sq_distance(coords, i, a), db = sq_distance(coords, i, b);
            if (da != db) return da < db;
            return a < b;
        });
        for (int rank = 0; rank < k; ++rank) {
            const int j = order[rank];
            edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return from_edges(n, std::move(edges));
}

GraphSnapshot build_radius_graph(const Matrix& coords, double r) {
    if (r <= 0.0) throw Error("build_radius_graph: radius must be positive");
    const int n = coords.rows();
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (sq_distance(coords, i, j) <= r * r) edges.emplace_back(i, j);
    return from_edges(n, std::move(edges));
}

bool is_connected(const GraphSnapshot& g) {
    const int n = g.node_count();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (g.weights(u, v) > 0.0 && !seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

Matrix signals_matrix(const GraphSequence& seq) {
    const int n = seq.node_count(), t_len = seq.length();
    Matrix x(n, t_len);
    for (int t = 0; t < t_len; ++t)
        for (int i = 0; i < n; ++i) x(i, t) = seq.snapshots[t].signals[i];
    return x;
}

}  // namespace gkae
