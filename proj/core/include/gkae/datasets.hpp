#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gkae/graph.hpp"
#include "gkae/matrix.hpp"
#include "gkae/normalize.hpp"

namespace gkae {

// Mobile-node SNR simulation: random-waypoint mobility in a square area,
// radius-based connectivity, and per-node signals equal to the mean
// link SNR (dB) over the current neighbors.
struct UavConfig {
    int nodes = 20;
    double area_side = 1.5;
    double radius = 0.5;            // connectivity radius, same units as area
    double tx_power_dbm = 10.0;
    double pathloss_exponent = 2.0;
    double noise_floor_dbm = -90.0;
    double dt = 0.1;                // seconds per step
    double speed_min = 0.002;       // units per second
    double speed_max = 0.01;
    double min_distance = 0.01;     // guards the log at zero separation
    int steps = 500;
    std::uint64_t seed = 0;
};

struct DatasetBundle {
    GraphSequence sequence;
    std::vector<Matrix> coords;  // one matrix (static layout) or one per step
    int tau = 300;               // observable prefix length
    NormStats norm;
    bool normalized = false;
    std::string signal_unit = "dB";
};

// Per-link SNR in dB at the given separation.
double link_snr_db(double distance, const UavConfig& cfg);

// Deterministic in (cfg, cfg.seed). Isolated nodes carry their previous
// value (0 at the first step). Produces a Type-3 sequence.
DatasetBundle simulate_uav(const UavConfig& cfg);

enum class GraphRule { Knn, Radius, EdgeList };

struct CsvGraphSpec {
    GraphRule rule = GraphRule::Knn;
    int k = 4;
    double r = 0.5;
    std::string edge_list_path;  // rows "u,v[,w]" when rule == EdgeList
};

// signals CSV: rows = time, columns = nodes, optional single header row.
// coords CSV: rows = nodes, columns = spatial dims. Produces a Type-1
// sequence with a static graph from the rule. Throws ParseError with the
// offending row/column, ShapeMismatch when the files disagree on N.
DatasetBundle load_csv(const std::string& signals_path, const std::string& coords_path,
                       const CsvGraphSpec& graph);

// Computes global z-score statistics over columns t < tau, applies them to
// every column and stores them for inversion. A constant training signal
// clamps the deviation to 1 and raises the `clamped` flag.
void split_and_normalize(DatasetBundle& bundle, int tau);

// Versioned JSON container (format tag "gkae-bundle/1"); lossless round
// trip of all fields.
void save_bundle(const DatasetBundle& bundle, const std::string& path);
DatasetBundle load_bundle(const std::string& path);

}  // namespace gkae
