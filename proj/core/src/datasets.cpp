#include "gkae/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gkae/error.hpp"
#include "gkae/rng.hpp"
#include "json.hpp"

namespace gkae {

using nlohmann::json;

double link_snr_db(double distance, const UavConfig& cfg) {
    const double d = std::max(distance, cfg.min_distance);
    return cfg.tx_power_dbm - 10.0 * cfg.pathloss_exponent * std::log10(d) - cfg.noise_floor_dbm;
}

DatasetBundle simulate_uav(const UavConfig& cfg) {
    if (cfg.radius <= 0.0 || cfg.pathloss_exponent <= 0.0 || cfg.speed_min > cfg.speed_max)
        throw Error("simulate_uav: invalid configuration");

    Rng rng(cfg.seed);
    const int n = cfg.nodes;

    Matrix position(n, 2);
    Matrix waypoint(n, 2);
    std::vector<double> speed(n);
    for (int i = 0; i < n; ++i) {
        position(i, 0) = rng.uniform(0.0, cfg.area_side);
        position(i, 1) = rng.uniform(0.0, cfg.area_side);
    }
    for (int i = 0; i < n; ++i) {
        waypoint(i, 0) = rng.uniform(0.0, cfg.area_side);
        waypoint(i, 1) = rng.uniform(0.0, cfg.area_side);
        speed[i] = rng.uniform(cfg.speed_min, cfg.speed_max);
    }

    DatasetBundle bundle;
    bundle.sequence.kind = SequenceKind::Type3;
    bundle.sequence.dt = cfg.dt;
    bundle.sequence.snapshots.reserve(cfg.steps);
    bundle.coords.reserve(cfg.steps);

    // nodes isolated from the start report the just-out-of-range link level,
    // keeping their scale continuous with connected readings
    std::vector<double> previous_signal(n, link_snr_db(cfg.radius, cfg));
    for (int t = 0; t < cfg.steps; ++t) {
        GraphSnapshot snap = build_radius_graph(position, cfg.radius);
        for (int i = 0; i < n; ++i) {
            double total = 0.0;
            int neighbors = 0;
            for (int j = 0; j < n; ++j) {
                if (snap.weights(i, j) <= 0.0) continue;
                const double dx = position(i, 0) - position(j, 0);
                const double dy = position(i, 1) - position(j, 1);
                total += link_snr_db(std::sqrt(dx * dx + dy * dy), cfg);
                ++neighbors;
            }
            snap.signals[i] = neighbors > 0 ? total / neighbors : previous_signal[i];
        }
        previous_signal = snap.signals;
        bundle.coords.push_back(position);
        bundle.sequence.snapshots.push_back(std::move(snap));

        // random-waypoint step: walk toward the target, re-draw on arrival
        for (int i = 0; i < n; ++i) {
            const double dx = waypoint(i, 0) - position(i, 0);
            const double dy = waypoint(i, 1) - position(i, 1);
            const double dist = std::sqrt(dx * dx + dy * dy);
            const double travel = speed[i] * cfg.dt;
            if (dist <= travel) {
                position(i, 0) = waypoint(i, 0);
                position(i, 1) = waypoint(i, 1);
                waypoint(i, 0) = rng.uniform(0.0, cfg.area_side);
                waypoint(i, 1) = rng.uniform(0.0, cfg.area_side);
                speed[i] = rng.uniform(cfg.speed_min, cfg.speed_max);
            } else {
                position(i, 0) += travel * dx / dist;
                position(i, 1) += travel * dy / dist;
            }
            // boundary clamp; waypoints are interior so this is a guard
            position(i, 0) = std::clamp(position(i, 0), 0.0, cfg.area_side);
            position(i, 1) = std::clamp(position(i, 1), 0.0, cfg.area_side);
        }
    }
    return bundle;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && !s.empty();
}

// Numeric table with an optional single header row.
std::vector<std::vector<double>> read_csv_table(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string(what) + ": cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        std::vector<double> row(cells.size());
        bool ok = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!parse_double(cells[c], row[c])) {
                ok = false;
                bad_col = c;
                break;
            }
        }
        if (!ok) {
            if (first_data_line) {  // treat a non-numeric first row as the header
                first_data_line = false;
                continue;
            }
            throw ParseError(std::string(what) + ": row " + std::to_string(line_no) + " col " +
                             std::to_string(bad_col + 1) + ": '" + cells[bad_col] +
                             "' is not a number");
        }
        first_data_line = false;
        if (!rows.empty() && rows.front().size() != row.size())
            throw ParseError(std::string(what) + ": row " + std::to_string(line_no) +
                             " has a different column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(std::string(what) + ": no data rows in " + path);
    return rows;
}

}  // namespace

DatasetBundle load_csv(const std::string& signals_path, const std::string& coords_path,
                       const CsvGraphSpec& graph) {
    const auto signal_rows = read_csv_table(signals_path, "signals csv");
    const auto coord_rows = read_csv_table(coords_path, "coords csv");

    const int t_len = static_cast<int>(signal_rows.size());
    const int n = static_cast<int>(signal_rows.front().size());
    if (static_cast<int>(coord_rows.size()) != n)
        throw ShapeMismatch("load_csv: coords rows differ from signal columns");

    Matrix coords(n, static_cast<int>(coord_rows.front().size()));
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < coords.cols(); ++d) coords(i, d) = coord_rows[i][d];

    GraphSnapshot base;
    switch (graph.rule) {
        case GraphRule::Knn:
            base = build_knn_graph(coords, graph.k);
            break;
        case GraphRule::Radius:
            base = build_radius_graph(coords, graph.r);
            break;
        case GraphRule::EdgeList: {
            const auto edge_rows = read_csv_table(graph.edge_list_path, "edge list csv");
            base.signals.assign(n, 0.0);
            base.weights = Matrix(n, n);
            for (std::size_t r = 0; r < edge_rows.size(); ++r) {
                const auto& row = edge_rows[r];
                if (row.size() < 2)
                    throw ParseError("edge list csv: row " + std::to_string(r + 1) +
                                     " needs at least two columns");
                const int u = static_cast<int>(row[0]);
                const int v = static_cast<int>(row[1]);
                if (u < 0 || v < 0 || u >= n || v >= n || u == v)
                    throw ParseError("edge list csv: row " + std::to_string(r + 1) +
                                     ": bad endpoints");
                const double w = row.size() > 2 ? row[2] : 1.0;
                base.edges.emplace_back(std::min(u, v), std::max(u, v));
                base.weights(u, v) = w;
                base.weights(v, u) = w;
            }
            break;
        }
    }

    DatasetBundle bundle;
    bundle.sequence.kind = SequenceKind::Type1;
    bundle.sequence.dt = 1.0;
    bundle.sequence.snapshots.reserve(t_len);
    for (int t = 0; t < t_len; ++t) {
        GraphSnapshot snap = base;
        for (int i = 0; i < n; ++i) snap.signals[i] = signal_rows[t][i];
        bundle.sequence.snapshots.push_back(std::move(snap));
    }
    bundle.coords = {coords};
    bundle.signal_unit = "signal";
    return bundle;
}

void split_and_normalize(DatasetBundle& bundle, int tau) {
    const int t_len = bundle.sequence.length();
    const int n = bundle.sequence.node_count();
    if (tau < 1 || tau >= t_len)
        throw DimensionMismatch("split_and_normalize: tau must satisfy 1 <= tau < T");
    if (bundle.normalized) throw Error("split_and_normalize: bundle already normalized");

    double mean = 0.0;
    for (int t = 0; t < tau; ++t)
        for (int i = 0; i < n; ++i) mean += bundle.sequence.snapshots[t].signals[i];
    mean /= static_cast<double>(tau) * n;

    double variance = 0.0;
    for (int t = 0; t < tau; ++t)
        for (int i = 0; i < n; ++i) {
            const double d = bundle.sequence.snapshots[t].signals[i] - mean;
            variance += d * d;
        }
    variance /= static_cast<double>(tau) * n;

    NormStats stats;
    stats.mean = mean;
    stats.stddev = std::sqrt(variance);
    if (stats.stddev <= 0.0) {
        stats.stddev = 1.0;
        stats.clamped = true;
    }

    for (auto& snap : bundle.sequence.snapshots)
        for (double& x : snap.signals) x = normalize(x, stats);
    bundle.norm = stats;
    bundle.normalized = true;
    bundle.tau = tau;
}

namespace {

constexpr const char* kBundleFormat = "gkae-bundle/1";

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.values()}};
}

Matrix matrix_from_json(const json& j) {
    return Matrix(j.at("rows").get<int>(), j.at("cols").get<int>(),
                  j.at("data").get<std::vector<double>>());
}

}  // namespace

void save_bundle(const DatasetBundle& bundle, const std::string& path) {
    json j;
    j["format"] = kBundleFormat;
    j["kind"] = static_cast<int>(bundle.sequence.kind);
    j["dt"] = bundle.sequence.dt;
    j["tau"] = bundle.tau;
    j["normalized"] = bundle.normalized;
    j["unit"] = bundle.signal_unit;
    j["norm"] = {{"mean", bundle.norm.mean},
                 {"stddev", bundle.norm.stddev},
                 {"clamped", bundle.norm.clamped}};
    json snaps = json::array();
    for (const auto& s : bundle.sequence.snapshots)
        snaps.push_back(json{{"signals", s.signals}, {"weights", matrix_to_json(s.weights)}});
    j["snapshots"] = std::move(snaps);
    json coords = json::array();
    for (const auto& c : bundle.coords) coords.push_back(matrix_to_json(c));
    j["coords"] = std::move(coords);

    std::ofstream out(path);
    if (!out) throw IoError("save_bundle: cannot open " + path);
    out << j.dump();
    if (!out) throw IoError("save_bundle: write failed for " + path);
}

DatasetBundle load_bundle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_bundle: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError(std::string("load_bundle: invalid JSON: ") + e.what());
    }
    if (j.value("format", "") != kBundleFormat)
        throw FormatError("load_bundle: unsupported bundle format tag");

    DatasetBundle bundle;
    bundle.sequence.kind = static_cast<SequenceKind>(j.at("kind").get<int>());
    bundle.sequence.dt = j.at("dt").get<double>();
    bundle.tau = j.at("tau").get<int>();
    bundle.normalized = j.at("normalized").get<bool>();
    bundle.signal_unit = j.at("unit").get<std::string>();
    bundle.norm.mean = j.at("norm").at("mean").get<double>();
    bundle.norm.stddev = j.at("norm").at("stddev").get<double>();
    bundle.norm.clamped = j.at("norm").at("clamped").get<bool>();

    for (const json& s : j.at("snapshots")) {
        GraphSnapshot snap;
        snap.signals = s.at("signals").get<std::vector<double>>();
        snap.weights = matrix_from_json(s.at("weights"));
        const int n = snap.weights.rows();
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (snap.weights(a, b) > 0.0) snap.edges.emplace_back(a, b);
        bundle.sequence.snapshots.push_back(std::move(snap));
    }
    for (const json& c : j.at("coords")) bundle.coords.push_back(matrix_from_json(c));
    return bundle;
}

}  // namespace gkae
