#include "gkae/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "gkae/error.hpp"
#include "gkae/metrics.hpp"
#include "gkae/rng.hpp"
#include "json.hpp"

namespace gkae {

using nlohmann::json;

namespace {

constexpr const char* kConfigFormat = "gkae-config/1";
constexpr const char* kReportFormat = "gkae-report/1";

// seed streams per purpose, so adding a consumer never shifts the others
constexpr std::uint64_t kMaskStream = 1;
constexpr std::uint64_t kGcnStream = 2;
constexpr std::uint64_t kLcStream = 3;

template <typename T>
void read_into(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

GraphRule rule_from_string(const std::string& s) {
    if (s == "knn") return GraphRule::Knn;
    if (s == "radius") return GraphRule::Radius;
    if (s == "edges") return GraphRule::EdgeList;
    throw FormatError("config: unknown graph rule '" + s + "'");
}

std::string to_string(GraphRule r) {
    switch (r) {
        case GraphRule::Knn: return "knn";
        case GraphRule::Radius: return "radius";
        case GraphRule::EdgeList: return "edges";
    }
    return "knn";
}

}  // namespace

Task task_from_string(const std::string& name) {
    if (name == "simulate") return Task::Simulate;
    if (name == "train") return Task::Train;
    if (name == "predict") return Task::Predict;
    if (name == "reconstruct") return Task::Reconstruct;
    if (name == "baseline") return Task::Baseline;
    if (name == "eval") return Task::Eval;
    throw FormatError("config: unknown task '" + name + "'");
}

std::string to_string(Task task) {
    switch (task) {
        case Task::Simulate: return "simulate";
        case Task::Train: return "train";
        case Task::Predict: return "predict";
        case Task::Reconstruct: return "reconstruct";
        case Task::Baseline: return "baseline";
        case Task::Eval: return "eval";
    }
    return "eval";
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["format"] = kConfigFormat;
    j["task"] = to_string(cfg.task);
    j["dataset"] = {{"source", cfg.dataset.source},
                    {"tau", cfg.dataset.tau},
                    {"uav",
                     {{"nodes", cfg.dataset.uav.nodes},
                      {"area_side", cfg.dataset.uav.area_side},
                      {"radius", cfg.dataset.uav.radius},
                      {"tx_power_dbm", cfg.dataset.uav.tx_power_dbm},
                      {"pathloss_exponent", cfg.dataset.uav.pathloss_exponent},
                      {"noise_floor_dbm", cfg.dataset.uav.noise_floor_dbm},
                      {"dt", cfg.dataset.uav.dt},
                      {"speed_min", cfg.dataset.uav.speed_min},
                      {"speed_max", cfg.dataset.uav.speed_max},
                      {"min_distance", cfg.dataset.uav.min_distance},
                      {"steps", cfg.dataset.uav.steps}}},
                    {"csv",
                     {{"signals", cfg.dataset.csv_signals},
                      {"coords", cfg.dataset.csv_coords},
                      {"rule", to_string(cfg.dataset.csv_graph.rule)},
                      {"k", cfg.dataset.csv_graph.k},
                      {"r", cfg.dataset.csv_graph.r},
                      {"edge_list", cfg.dataset.csv_graph.edge_list_path}}},
                    {"bundle", cfg.dataset.bundle_path}};
    j["model"] = {{"embed_dim", cfg.model.embed_dim},
                  {"koopman_dim", cfg.model.koopman_dim},
                  {"kae_hidden", cfg.model.kae_hidden},
                  {"kae_depth", cfg.model.kae_depth},
                  {"graph_decoder_hidden", cfg.model.graph_decoder_hidden},
                  {"leaky_slope", cfg.model.leaky_slope}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"linearity_length", cfg.train.linearity_length},
                  {"learning_rate", cfg.train.learning_rate}};
    j["lc"] = {{"epochs", cfg.lc.epochs},
               {"learning_rate", cfg.lc.learning_rate},
               {"beta1", cfg.lc.beta1},
               {"beta2", cfg.lc.beta2},
               {"masking_rate", cfg.lc.masking_rate}};
    j["baseline"] = {{"methods", cfg.baseline.methods},
                     {"gamma", cfg.baseline.tgss.gamma},
                     {"grad_tol", cfg.baseline.tgss.grad_tol},
                     {"max_outer", cfg.baseline.tgss.max_outer},
                     {"sobolev_epsilon", cfg.baseline.tgss.sobolev_epsilon},
                     {"sobolev_beta", cfg.baseline.tgss.sobolev_beta},
                     {"gcn_epochs", cfg.baseline.gcn.epochs}};
    j["predict"] = {{"horizon", cfg.horizon}, {"trajectory_nodes", cfg.trajectory_nodes}};
    j["seeds"] = cfg.seeds;
    j["sweep"] = {{"masking_rates", cfg.sweep.masking_rates},
                  {"koopman_dims", cfg.sweep.koopman_dims},
                  {"node_counts", cfg.sweep.node_counts}};
    j["out_dir"] = cfg.out_dir;
    j["model_path"] = cfg.model_path;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (j.contains("format") && j.at("format").get<std::string>() != kConfigFormat)
        throw FormatError("config: unsupported format tag");

    ExperimentConfig cfg;
    if (j.contains("task")) cfg.task = task_from_string(j.at("task").get<std::string>());
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        read_into(d, "source", cfg.dataset.source);
        read_into(d, "tau", cfg.dataset.tau);
        if (d.contains("uav")) {
            const json& u = d.at("uav");
            read_into(u, "nodes", cfg.dataset.uav.nodes);
            read_into(u, "area_side", cfg.dataset.uav.area_side);
            read_into(u, "radius", cfg.dataset.uav.radius);
            read_into(u, "tx_power_dbm", cfg.dataset.uav.tx_power_dbm);
            read_into(u, "pathloss_exponent", cfg.dataset.uav.pathloss_exponent);
            read_into(u, "noise_floor_dbm", cfg.dataset.uav.noise_floor_dbm);
            read_into(u, "dt", cfg.dataset.uav.dt);
            read_into(u, "speed_min", cfg.dataset.uav.speed_min);
            read_into(u, "speed_max", cfg.dataset.uav.speed_max);
            read_into(u, "min_distance", cfg.dataset.uav.min_distance);
            read_into(u, "steps", cfg.dataset.uav.steps);
        }
        if (d.contains("csv")) {
            const json& c = d.at("csv");
            read_into(c, "signals", cfg.dataset.csv_signals);
            read_into(c, "coords", cfg.dataset.csv_coords);
            if (c.contains("rule"))
                cfg.dataset.csv_graph.rule = rule_from_string(c.at("rule").get<std::string>());
            read_into(c, "k", cfg.dataset.csv_graph.k);
            read_into(c, "r", cfg.dataset.csv_graph.r);
            read_into(c, "edge_list", cfg.dataset.csv_graph.edge_list_path);
        }
        read_into(d, "bundle", cfg.dataset.bundle_path);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        read_into(m, "embed_dim", cfg.model.embed_dim);
        read_into(m, "koopman_dim", cfg.model.koopman_dim);
        read_into(m, "kae_hidden", cfg.model.kae_hidden);
        read_into(m, "kae_depth", cfg.model.kae_depth);
        read_into(m, "graph_decoder_hidden", cfg.model.graph_decoder_hidden);
        read_into(m, "leaky_slope", cfg.model.leaky_slope);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        read_into(t, "epochs", cfg.train.epochs);
        read_into(t, "linearity_length", cfg.train.linearity_length);
        read_into(t, "learning_rate", cfg.train.learning_rate);
    }
    if (j.contains("lc")) {
        const json& l = j.at("lc");
        read_into(l, "epochs", cfg.lc.epochs);
        read_into(l, "learning_rate", cfg.lc.learning_rate);
        read_into(l, "beta1", cfg.lc.beta1);
        read_into(l, "beta2", cfg.lc.beta2);
        read_into(l, "masking_rate", cfg.lc.masking_rate);
    }
    if (j.contains("baseline")) {
        const json& b = j.at("baseline");
        read_into(b, "methods", cfg.baseline.methods);
        read_into(b, "gamma", cfg.baseline.tgss.gamma);
        read_into(b, "grad_tol", cfg.baseline.tgss.grad_tol);
        read_into(b, "max_outer", cfg.baseline.tgss.max_outer);
        read_into(b, "sobolev_epsilon", cfg.baseline.tgss.sobolev_epsilon);
        read_into(b, "sobolev_beta", cfg.baseline.tgss.sobolev_beta);
        read_into(b, "gcn_epochs", cfg.baseline.gcn.epochs);
    }
    if (j.contains("predict")) {
        const json& p = j.at("predict");
        read_into(p, "horizon", cfg.horizon);
        read_into(p, "trajectory_nodes", cfg.trajectory_nodes);
    }
    read_into(j, "seeds", cfg.seeds);
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        read_into(s, "masking_rates", cfg.sweep.masking_rates);
        read_into(s, "koopman_dims", cfg.sweep.koopman_dims);
        read_into(s, "node_counts", cfg.sweep.node_counts);
    }
    read_into(j, "out_dir", cfg.out_dir);
    read_into(j, "model_path", cfg.model_path);
    if (cfg.seeds.empty()) throw FormatError("config: seeds must be non-empty");
    return cfg;
}

}  // namespace

std::string config_to_json_text(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2); }

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json_text(text);
}

void apply_override(ExperimentConfig& cfg, const std::string& key_equals_value) {
    const auto eq = key_equals_value.find('=');
    if (eq == std::string::npos || eq == 0)
        throw FormatError("override must look like key.path=value: " + key_equals_value);
    std::string key = key_equals_value.substr(0, eq);
    const std::string raw = key_equals_value.substr(eq + 1);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // plain strings come through unquoted

    json j = config_to_json(cfg);
    std::string pointer = "/" + key;
    for (auto& c : pointer)
        if (c == '.') c = '/';
    try {
        j[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
        throw FormatError("override failed for '" + key + "': " + e.what());
    }
    cfg = config_from_json(j);
}

namespace {

DatasetBundle resolve_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    DatasetBundle bundle;
    if (spec.source == "uav") {
        UavConfig uav = spec.uav;
        uav.seed = seed;
        bundle = simulate_uav(uav);
    } else if (spec.source == "csv") {
        bundle = load_csv(spec.csv_signals, spec.csv_coords, spec.csv_graph);
    } else if (spec.source == "bundle") {
        bundle = load_bundle(spec.bundle_path);
    } else {
        throw FormatError("dataset source must be uav, csv or bundle");
    }
    if (!bundle.normalized) split_and_normalize(bundle, spec.tau);
    return bundle;
}

struct CsvFile {
    std::ofstream out;
    explicit CsvFile(const std::filesystem::path& path) : out(path) {
        if (!out) throw IoError("cannot open " + path.string());
        out.precision(17);
    }
};

void check_metrics_finite(const MetricsReport& report) {
    for (const auto& run : report.runs)
        for (const auto& [name, value] : run.values)
            if (!std::isfinite(value) || value < 0.0)
                throw NumericError("report metric '" + name + "' is not finite and non-negative");
}

// Truth columns tau .. tau+h-1 as N x h.
Matrix truth_window(const DatasetBundle& bundle, int horizon) {
    const Matrix all = signals_matrix(bundle.sequence);
    Matrix out(all.rows(), horizon);
    for (int p = 0; p < horizon; ++p)
        for (int i = 0; i < all.rows(); ++i) out(i, p) = all(i, bundle.tau + p);
    return out;
}

GraphSequence prefix_sequence(const GraphSequence& seq, int tau) {
    GraphSequence prefix;
    prefix.kind = seq.kind;
    prefix.dt = seq.dt;
    prefix.snapshots.assign(seq.snapshots.begin(), seq.snapshots.begin() + tau);
    return prefix;
}

struct Runner {
    const ExperimentConfig& cfg;
    std::filesystem::path out_dir;
    MetricsReport report;
    CsvFile loss_csv;
    CsvFile sweep_csv;

    explicit Runner(const ExperimentConfig& c)
        : cfg(c),
          out_dir(c.out_dir),
          loss_csv((std::filesystem::create_directories(c.out_dir), out_dir / "loss.csv")),
          sweep_csv(out_dir / "sweep.csv") {
        loss_csv.out << "epoch,seed,loss\n";
        sweep_csv.out << "axis,value,seed,method,metric,result\n";
        report.task = to_string(c.task);
        report.config_echo = config_to_json_text(c);
        report.artifacts.push_back("loss.csv");
        report.artifacts.push_back("sweep.csv");
    }

    void record_loss(std::uint64_t seed, const std::vector<double>& history) {
        for (std::size_t e = 0; e < history.size(); ++e)
            loss_csv.out << e << ',' << seed << ',' << history[e] << '\n';
    }

    void sweep_row(const std::string& axis, double value, std::uint64_t seed,
                   const std::string& method, const std::string& metric, double result) {
        sweep_csv.out << axis << ',' << value << ',' << seed << ',' << method << ',' << metric
                      << ',' << result << '\n';
    }

    GkaeModel obtain_model(const DatasetBundle& bundle, std::uint64_t seed, RunMetrics& run,
                           bool record_history) {
        if (!cfg.model_path.empty()) return load_model(cfg.model_path);
        GkaeConfig mcfg = cfg.model;
        mcfg.output_dim = bundle.sequence.node_count();
        TrainConfig tcfg = cfg.train;
        tcfg.seed = seed;
        GkaeTraining trained = train_gkae(prefix_sequence(bundle.sequence, bundle.tau), mcfg, tcfg);
        trained.model.norm = bundle.norm;
        if (record_history) record_loss(seed, trained.loss_history);
        run.values["final_train_loss"] = trained.loss_history.back();
        return trained.model;
    }

    void predict_metrics(const DatasetBundle& bundle, const GkaeModel& model, RunMetrics& run,
                         bool emit_plots) {
        const int available = bundle.sequence.length() - bundle.tau;
        const int horizon = std::min(cfg.horizon, available);
        if (horizon < 1) throw DimensionMismatch("predict: no test window after tau");

        const Matrix truth_norm = truth_window(bundle, horizon);
        const Matrix pred_norm =
            predict_sequence(model, prefix_sequence(bundle.sequence, bundle.tau), horizon);
        const Matrix truth_raw = denormalize(truth_norm, bundle.norm);
        const Matrix pred_raw = denormalize(pred_norm, bundle.norm);

        run.values["rmse_pred"] = rmse_pred(truth_raw, pred_raw);
        run.values["mae_pred"] = mae_pred(truth_raw, pred_raw);
        run.values["rmse_pred_norm"] = rmse_pred(truth_norm, pred_norm);
        run.values["mae_pred_norm"] = mae_pred(truth_norm, pred_norm);

        if (emit_plots) {
            for (int node : cfg.trajectory_nodes) {
                if (node < 0 || node >= truth_raw.rows()) continue;
                CsvFile traj(out_dir / ("trajectory_node" + std::to_string(node) + ".csv"));
                traj.out << "t,truth,predicted\n";
                for (int p = 0; p < horizon; ++p)
                    traj.out << bundle.tau + p << ',' << truth_raw(node, p) << ','
                             << pred_raw(node, p) << '\n';
                report.artifacts.push_back("trajectory_node" + std::to_string(node) + ".csv");
            }
            CsvFile mse_time(out_dir / "mse_time.csv");
            mse_time.out << "t,mse\n";
            for (int p = 0; p < horizon; ++p) {
                double acc = 0.0;
                for (int i = 0; i < truth_norm.rows(); ++i) {
                    const double e = truth_norm(i, p) - pred_norm(i, p);
                    acc += e * e;
                }
                mse_time.out << bundle.tau + p << ',' << acc / truth_norm.rows() << '\n';
            }
            report.artifacts.push_back("mse_time.csv");
        }
    }

    SamplingMask run_mask(const DatasetBundle& bundle, double rate, std::uint64_t seed) const {
        return make_mask(bundle.sequence.node_count(), bundle.sequence.length(), bundle.tau, rate,
                         Rng::derive(seed, kMaskStream));
    }

    double lc_epsilon(const DatasetBundle& bundle, const GkaeModel& model,
                      const SamplingMask& mask, std::uint64_t seed, RunMetrics* run,
                      bool emit_files, const std::string& mse_file = "mse_time.csv") {
        LcConfig lc_cfg;
        lc_cfg.embed_dim = model.config.embed_dim;
        lc_cfg.output_dim = bundle.sequence.node_count();
        lc_cfg.beta1 = cfg.lc.beta1;
        lc_cfg.beta2 = cfg.lc.beta2;
        LcTrainConfig lc_train;
        lc_train.epochs = cfg.lc.epochs;
        lc_train.learning_rate = cfg.lc.learning_rate;
        lc_train.seed = Rng::derive(seed, kLcStream);

        LcTraining trained = train_lc(model, bundle.sequence, mask, lc_cfg, lc_train);
        const GraphSequence masked = apply_mask(bundle.sequence, mask);
        const Matrix estimate_norm = reconstruct(trained.model, masked);
        const Matrix truth_norm = signals_matrix(bundle.sequence);
        const double eps_norm = epsilon_recon(truth_norm, estimate_norm, mask);

        if (run != nullptr) {
            run->values["epsilon_recon_norm"] = eps_norm;
            run->values["epsilon_recon"] = epsilon_recon(denormalize(truth_norm, bundle.norm),
                                                         denormalize(estimate_norm, bundle.norm),
                                                         mask);
        }
        if (emit_files) {
            const std::string name = "reconstruction_seed" + std::to_string(seed) + ".csv";
            write_reconstruction_report((out_dir / name).string(),
                                        denormalize(truth_norm, bundle.norm),
                                        denormalize(estimate_norm, bundle.norm), mask);
            report.artifacts.push_back(name);

            CsvFile mse_time(out_dir / mse_file);
            mse_time.out << "t,mse\n";
            for (int t = mask.tau; t < mask.length(); ++t) {
                double acc = 0.0;
                int count = 0;
                for (int i = 0; i < truth_norm.rows(); ++i) {
                    if (mask.is_observed(i, t)) continue;
                    const double e = truth_norm(i, t) - estimate_norm(i, t);
                    acc += e * e;
                    ++count;
                }
                mse_time.out << t << ',' << (count > 0 ? acc / count : 0.0) << '\n';
            }
            report.artifacts.push_back(mse_file);
        }
        return eps_norm;
    }

    double baseline_epsilon(const std::string& method, const DatasetBundle& bundle,
                            const SamplingMask& mask, std::uint64_t seed, RunMetrics* run,
                            bool emit_files = false) {
        const Matrix truth_norm = signals_matrix(bundle.sequence);
        Matrix observed(truth_norm.rows(), truth_norm.cols());
        for (int t = 0; t < truth_norm.cols(); ++t)
            for (int i = 0; i < truth_norm.rows(); ++i)
                observed(i, t) = mask.is_observed(i, t) ? truth_norm(i, t) : 0.0;

        Matrix estimate;
        if (method == "tgs") {
            TgsConfig tgs = static_cast<const TgsConfig&>(cfg.baseline.tgss);
            estimate = tgs_reconstruct(bundle.sequence, observed, mask, tgs).estimate;
        } else if (method == "tgss") {
            estimate = tgss_reconstruct(bundle.sequence, observed, mask, cfg.baseline.tgss).estimate;
        } else if (method == "nni") {
            estimate = nni_reconstruct(bundle.sequence, observed, mask, &bundle.coords);
        } else if (method == "gcn") {
            GcnaeConfig gcn = cfg.baseline.gcn;
            gcn.seed = Rng::derive(seed, kGcnStream);
            estimate = gcnae_reconstruct(bundle.sequence, observed, mask, gcn).estimate;
        } else {
            throw FormatError("unknown baseline method '" + method + "'");
        }
        const double eps_norm = epsilon_recon(truth_norm, estimate, mask);
        if (run != nullptr) {
            run->values["epsilon_recon_" + method + "_norm"] = eps_norm;
            run->values["epsilon_recon_" + method] =
                epsilon_recon(denormalize(truth_norm, bundle.norm),
                              denormalize(estimate, bundle.norm), mask);
        }
        if (emit_files) {
            const std::string name =
                "reconstruction_" + method + "_seed" + std::to_string(seed) + ".csv";
            write_reconstruction_report((out_dir / name).string(),
                                        denormalize(truth_norm, bundle.norm),
                                        denormalize(estimate, bundle.norm), mask);
            report.artifacts.push_back(name);
        }
        return eps_norm;
    }

    void run_sweeps(const DatasetBundle& bundle, const GkaeModel& model, std::uint64_t seed) {
        for (double rate : cfg.sweep.masking_rates) {
            const SamplingMask mask = run_mask(bundle, rate, seed);
            sweep_row("masking_rate", rate, seed, "gkae_lc", "epsilon_recon_norm",
                      lc_epsilon(bundle, model, mask, seed, nullptr, false));
            for (const std::string& method : cfg.baseline.methods)
                sweep_row("masking_rate", rate, seed, method, "epsilon_recon_norm",
                          baseline_epsilon(method, bundle, mask, seed, nullptr));
        }
        for (int dim : cfg.sweep.koopman_dims) {
            GkaeConfig mcfg = cfg.model;
            mcfg.koopman_dim = dim;
            mcfg.output_dim = bundle.sequence.node_count();
            TrainConfig tcfg = cfg.train;
            tcfg.seed = seed;
            GkaeTraining trained =
                train_gkae(prefix_sequence(bundle.sequence, bundle.tau), mcfg, tcfg);
            sweep_row("koopman_dim", dim, seed, "gkae", "final_train_loss",
                      trained.loss_history.back());
        }
        for (int nodes : cfg.sweep.node_counts) {
            if (cfg.dataset.source != "uav") break;  // node sweeps regenerate the simulation
            DatasetSpec spec = cfg.dataset;
            spec.uav.nodes = nodes;
            DatasetBundle swept = resolve_dataset(spec, seed);
            RunMetrics tmp;
            GkaeModel swept_model = obtain_model(swept, seed, tmp, false);
            RunMetrics metrics;
            predict_metrics(swept, swept_model, metrics, false);
            sweep_row("nodes", nodes, seed, "gkae", "rmse_pred_norm",
                      metrics.values["rmse_pred_norm"]);
            sweep_row("nodes", nodes, seed, "gkae", "mae_pred_norm",
                      metrics.values["mae_pred_norm"]);
        }
    }

    void run_seed(std::uint64_t seed, bool first) {
        RunMetrics run;
        run.seed = seed;

        if (cfg.task == Task::Simulate) {
            DatasetSpec spec = cfg.dataset;
            UavConfig uav = spec.uav;
            uav.seed = seed;
            DatasetBundle bundle = simulate_uav(uav);
            const std::string name = "bundle_seed" + std::to_string(seed) + ".json";
            save_bundle(bundle, (out_dir / name).string());
            report.artifacts.push_back(name);
            run.values["steps"] = static_cast<double>(bundle.sequence.length());
            report.runs.push_back(std::move(run));
            return;
        }

        DatasetBundle bundle = resolve_dataset(cfg.dataset, seed);
        report.unit = bundle.signal_unit;

        switch (cfg.task) {
            case Task::Train: {
                GkaeModel model = obtain_model(bundle, seed, run, true);
                const std::string name = "model_seed" + std::to_string(seed) + ".json";
                save_model(model, (out_dir / name).string());
                report.artifacts.push_back(name);
                break;
            }
            case Task::Predict: {
                GkaeModel model = obtain_model(bundle, seed, run, true);
                predict_metrics(bundle, model, run, first);
                break;
            }
            case Task::Reconstruct: {
                GkaeModel model = obtain_model(bundle, seed, run, true);
                const SamplingMask mask = run_mask(bundle, cfg.lc.masking_rate, seed);
                lc_epsilon(bundle, model, mask, seed, &run, first);
                break;
            }
            case Task::Baseline: {
                const SamplingMask mask = run_mask(bundle, cfg.lc.masking_rate, seed);
                for (const std::string& method : cfg.baseline.methods)
                    baseline_epsilon(method, bundle, mask, seed, &run, first);
                break;
            }
            case Task::Eval: {
                GkaeModel model = obtain_model(bundle, seed, run, true);
                predict_metrics(bundle, model, run, first);

                const int available = bundle.sequence.length() - bundle.tau;
                const int horizon = std::min(cfg.horizon, available);
                const Matrix truth_norm = truth_window(bundle, horizon);
                run.values["rmse_pred_persistence_norm"] =
                    rmse_pred(truth_norm, persistence_predict(bundle.sequence, bundle.tau, horizon));
                GcnaeConfig gcn = cfg.baseline.gcn;
                gcn.seed = Rng::derive(seed, kGcnStream);
                run.values["rmse_pred_gcn_norm"] = rmse_pred(
                    truth_norm, gcnae_predict(bundle.sequence, bundle.tau, horizon, gcn));

                const SamplingMask mask = run_mask(bundle, cfg.lc.masking_rate, seed);
                lc_epsilon(bundle, model, mask, seed, &run, first, "mse_time_recon.csv");
                for (const std::string& method : cfg.baseline.methods)
                    baseline_epsilon(method, bundle, mask, seed, &run);
                run_sweeps(bundle, model, seed);
                break;
            }
            default:
                break;
        }
        report.runs.push_back(std::move(run));
    }
};

}  // namespace

MetricsReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();

    Runner runner(cfg);
    bool first = true;
    for (std::uint64_t seed : cfg.seeds) {
        runner.run_seed(seed, first);
        first = false;
    }

    MetricsReport& report = runner.report;
    std::map<std::string, std::pair<double, int>> sums;
    for (const auto& run : report.runs)
        for (const auto& [name, value] : run.values) {
            sums[name].first += value;
            sums[name].second += 1;
        }
    for (const auto& [name, sum] : sums) report.aggregates[name] = sum.first / sum.second;

    check_metrics_finite(report);
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream out(runner.out_dir / "report.json");
    if (!out) throw IoError("run_experiment: cannot write report.json");
    out << report.full_json();
    report.artifacts.push_back("report.json");
    return report;
}

namespace {

json report_to_json(const MetricsReport& report) {
    json j;
    j["format"] = kReportFormat;
    j["task"] = report.task;
    j["unit"] = report.unit;
    j["config"] = json::parse(report.config_echo);
    json runs = json::array();
    for (const auto& run : report.runs) {
        json r;
        r["seed"] = run.seed;
        r["metrics"] = run.values;
        runs.push_back(std::move(r));
    }
    j["runs"] = std::move(runs);
    j["aggregates"] = report.aggregates;
    j["artifacts"] = report.artifacts;
    return j;
}

}  // namespace

std::string MetricsReport::canonical_json() const { return report_to_json(*this).dump(2); }

std::string MetricsReport::full_json() const {
    json j = report_to_json(*this);
    j["timing"] = {{"runtime_seconds", runtime_seconds}};
    return j.dump(2);
}

}  // namespace gkae
