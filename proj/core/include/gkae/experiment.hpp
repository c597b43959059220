#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gkae/baselines.hpp"
#include "gkae/datasets.hpp"
#include "gkae/gkae.hpp"
#include "gkae/lcrecon.hpp"

namespace gkae {

enum class Task { Simulate, Train, Predict, Reconstruct, Baseline, Eval };

Task task_from_string(const std::string& name);
std::string to_string(Task task);

struct DatasetSpec {
    std::string source = "uav";  // uav | csv | bundle
    int tau = 300;
    UavConfig uav;
    std::string csv_signals;
    std::string csv_coords;
    CsvGraphSpec csv_graph;
    std::string bundle_path;
};

struct LcExperimentConfig {
    int epochs = 200;
    double learning_rate = 1e-2;
    double beta1 = 1.0;
    double beta2 = 1e-2;
    double masking_rate = 0.5;
};

struct BaselineConfig {
    std::vector<std::string> methods{"tgs", "tgss", "nni", "gcn"};
    TgssConfig tgss;  // gamma and stopping shared with TGS
    GcnaeConfig gcn;
};

struct SweepConfig {
    std::vector<double> masking_rates;
    std::vector<int> koopman_dims;
    std::vector<int> node_counts;
};

struct ExperimentConfig {
    Task task = Task::Eval;
    DatasetSpec dataset;
    GkaeConfig model;
    TrainConfig train;
    LcExperimentConfig lc;
    BaselineConfig baseline;
    int horizon = 200;
    std::vector<int> trajectory_nodes{0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    SweepConfig sweep;
    std::string out_dir = "results";
    std::string model_path;  // optional pre-trained checkpoint
};

// Reads a JSON config (format tag "gkae-config/1"); missing keys keep their
// defaults. Throws FormatError / ParseError on malformed input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);

// Applies a dotted-path override such as "train.epochs=100" or
// "dataset.uav.nodes=10"; the value is parsed as JSON when possible and as
// a string otherwise.
void apply_override(ExperimentConfig& cfg, const std::string& key_equals_value);

struct RunMetrics {
    std::uint64_t seed = 0;
    // metric name -> value; names carry a _norm suffix for normalized units
    std::map<std::string, double> values;
};

struct MetricsReport {
    std::string task;
    std::string unit;
    std::vector<RunMetrics> runs;
    std::map<std::string, double> aggregates;  // mean over seeds per metric
    std::vector<std::string> artifacts;        // files written under out_dir
    double runtime_seconds = 0.0;
    std::string config_echo;                   // resolved config as JSON text

    // Serialization without the timing field; bit-identical across repeated
    // runs of the same (config, seed).
    std::string canonical_json() const;
    std::string full_json() const;
};

// Executes the configured task pipeline, writes report.json and the
// plot-ready CSVs into out_dir, and returns the report.
MetricsReport run_experiment(const ExperimentConfig& cfg);

std::string config_to_json_text(const ExperimentConfig& cfg);

}  // namespace gkae
