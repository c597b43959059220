#pragma once

#include <utility>
#include <vector>

#include "gkae/matrix.hpp"

namespace gkae {

// One time step of a graph signal: node values, symmetric nonnegative edge
// weights with a zero diagonal, and the edge set (pairs stored with l < m).
struct GraphSnapshot {
    std::vector<double> signals;
    Matrix weights;
    std::vector<std::pair<int, int>> edges;

    int node_count() const { return static_cast<int>(signals.size()); }

    // Throws Error when an invariant is violated (asymmetry, negative
    // weights, nonzero diagonal, or edges inconsistent with weights).
    void validate() const;
};

enum class SequenceKind {
    Type1,  // signals vary; edges and weights fixed
    Type2,  // signals and weights vary; edges fixed
    Type3,  // everything varies
};

struct GraphSequence {
    std::vector<GraphSnapshot> snapshots;
    SequenceKind kind = SequenceKind::Type1;
    double dt = 1.0;  // seconds per step

    int length() const { return static_cast<int>(snapshots.size()); }
    int node_count() const { return snapshots.empty() ? 0 : snapshots.front().node_count(); }

    void validate() const;
};

// L = D - W with D = diag of row sums of W. Rows of the result sum to zero.
Matrix laplacian(const GraphSnapshot& g);

// Symmetric k-nearest-neighbor graph on Euclidean coordinates (N x d):
// edge {l,m} exists iff m is among the k nearest of l or vice versa.
// Distance ties are broken by lower node index. Unit weights.
// Throws KTooLarge when k >= N.
GraphSnapshot build_knn_graph(const Matrix& coords, int k);

// Edge {l,m} iff Euclidean distance <= r. Unit weights.
GraphSnapshot build_radius_graph(const Matrix& coords, double r);

bool is_connected(const GraphSnapshot& g);

// Node signals of a sequence stacked as an N x T matrix (column per step).
Matrix signals_matrix(const GraphSequence& seq);

}  // namespace gkae
