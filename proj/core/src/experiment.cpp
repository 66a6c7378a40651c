#include "dwmtj/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>

#include <json.hpp>

#include "dwmtj/error.hpp"

namespace dwmtj {

using nlohmann::json;

namespace {

// Stream tags for deriving independent RNG streams from the master seed.
constexpr std::uint64_t kTagCluster = 0xC1;
constexpr std::uint64_t kTagSplit = 0x5E;
constexpr std::uint64_t kTagDecoder = 0xDE;

WtaMode parse_wta(const std::string& s) {
    if (s == "hard") return WtaMode::Hard;
    if (s == "soft") return WtaMode::Soft;
    throw ConfigError("unknown wta_mode '" + s + "' (expected \"hard\" or \"soft\")");
}

FeedbackScope parse_scope(const std::string& s) {
    if (s == "winners_only") return FeedbackScope::WinnersOnly;
    if (s == "all_scaled") return FeedbackScope::AllScaled;
    throw ConfigError("unknown feedback_scope '" + s + "' (expected \"winners_only\" or \"all_scaled\")");
}

InitScheme parse_init(const std::string& s) {
    if (s == "uniform_random") return InitScheme::UniformRandom;
    if (s == "midpoint") return InitScheme::Midpoint;
    throw ConfigError("unknown init '" + s + "' (expected \"uniform_random\" or \"midpoint\")");
}

const char* wta_name(WtaMode m) { return m == WtaMode::Hard ? "hard" : "soft"; }
const char* scope_name(FeedbackScope s) {
    return s == FeedbackScope::WinnersOnly ? "winners_only" : "all_scaled";
}
const char* init_name(InitScheme i) {
    return i == InitScheme::UniformRandom ? "uniform_random" : "midpoint";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

// Rethrow module errors with the pipeline stage prepended, preserving the type.
template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    auto prefix = [stage](const char* what) { return std::string(stage) + ": " + what; };
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(prefix(e.what()));
    } catch (const FormatError& e) {
        throw FormatError(prefix(e.what()));
    } catch (const DataError& e) {
        throw DataError(prefix(e.what()));
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix(e.what()));
    }
}

} // namespace

void ExperimentConfig::validate() const {
    device.validate();
    clustering.validate();
    if (decoder.supervised_samples < 1) {
        throw ConfigError("decoder.supervised_samples must be >= 1");
    }
    if (decoder.epochs < 1) throw ConfigError("decoder.epochs must be >= 1");
    if (!(decoder.learning_rate > 0)) throw ConfigError("decoder.learning_rate must be positive");
    if (dataset.kind != "mnist" && dataset.kind != "csv") {
        throw ConfigError("dataset.kind must be \"mnist\" or \"csv\", got '" + dataset.kind + "'");
    }
    if (dataset.kind == "csv" && (dataset.train_count < 1 || dataset.test_count < 1)) {
        throw ConfigError("csv datasets need positive train_count and test_count");
    }
    for (long c : checkpoints) {
        if (c < 0) throw ConfigError("checkpoints must be non-negative");
    }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    try {
        ExperimentConfig cfg;
        cfg.task = j.at("task").get<std::string>();
        cfg.seed = get_or<std::uint64_t>(j, "seed", 1);
        cfg.output_dir = resolve(base, get_or<std::string>(j, "output_dir", "runs/" + cfg.task));

        const json& d = j.at("dataset");
        cfg.dataset.kind = d.at("kind").get<std::string>();
        if (cfg.dataset.kind == "mnist") {
            cfg.dataset.train_images = resolve(base, d.at("train_images").get<std::string>());
            cfg.dataset.train_labels = resolve(base, d.at("train_labels").get<std::string>());
            cfg.dataset.test_images = resolve(base, d.at("test_images").get<std::string>());
            cfg.dataset.test_labels = resolve(base, d.at("test_labels").get<std::string>());
            cfg.dataset.binarize_threshold = get_or<double>(d, "binarize_threshold", 0.5);
        } else {
            cfg.dataset.path = resolve(base, d.at("path").get<std::string>());
            cfg.dataset.schema.skip_header_rows = get_or<int>(d, "skip_header_rows", 1);
            cfg.dataset.schema.feature_columns =
                get_or<std::vector<int>>(d, "feature_columns", {});
            cfg.dataset.schema.label_column = get_or<int>(d, "label_column", -1);
            if (d.contains("label_map")) {
                for (auto& [k, v] : d.at("label_map").items()) {
                    cfg.dataset.schema.label_map[k] = v.get<int>();
                }
            }
            cfg.dataset.thermometer_bins = get_or<int>(d, "thermometer_bins", 8);
            cfg.dataset.train_count = d.at("train_count").get<int>();
            cfg.dataset.test_count = d.at("test_count").get<int>();
        }

        if (j.contains("device")) {
            const json& dev = j.at("device");
            DeviceParams& p = cfg.device;
            p.g_parallel = get_or<double>(dev, "g_parallel", p.g_parallel);
            p.g_antiparallel = get_or<double>(dev, "g_antiparallel", p.g_antiparallel);
            p.track_width_synapse = get_or<double>(dev, "track_width_synapse", p.track_width_synapse);
            p.track_width_neuron = get_or<double>(dev, "track_width_neuron", p.track_width_neuron);
            p.fire_threshold = get_or<double>(dev, "fire_threshold", p.fire_threshold);
            p.mobility_synapse = get_or<double>(dev, "mobility_synapse", p.mobility_synapse);
            p.mobility_neuron = get_or<double>(dev, "mobility_neuron", p.mobility_neuron);
            p.leak_rate = get_or<double>(dev, "leak_rate", p.leak_rate);
            p.dt = get_or<double>(dev, "dt", p.dt);
            p.v_dd = get_or<double>(dev, "v_dd", p.v_dd);
            p.steps_per_presentation =
                get_or<int>(dev, "steps_per_presentation", p.steps_per_presentation);
        }

        const json& c = j.at("clustering");
        cfg.clustering.n_clusters = c.at("n_clusters").get<int>();
        cfg.clustering.wta_mode = parse_wta(get_or<std::string>(c, "wta_mode", "hard"));
        // Spec default: winners-only updates under hard WTA, all-scaled under soft.
        cfg.clustering.feedback_scope =
            c.contains("feedback_scope")
                ? parse_scope(c.at("feedback_scope").get<std::string>())
                : (cfg.clustering.wta_mode == WtaMode::Hard ? FeedbackScope::WinnersOnly
                                                            : FeedbackScope::AllScaled);
        cfg.clustering.unsupervised_samples = c.at("unsupervised_samples").get<long>();
        cfg.clustering.init = parse_init(get_or<std::string>(c, "init", "uniform_random"));

        const json& dec = j.at("decoder");
        cfg.decoder.learning_rate = dec.at("learning_rate").get<double>();
        cfg.decoder.epochs = get_or<int>(dec, "epochs", 1);
        cfg.decoder.supervised_samples = dec.at("supervised_samples").get<long>();

        cfg.checkpoints = get_or<std::vector<long>>(j, "checkpoints", {});
        cfg.sweep_n_hl = get_or<std::vector<int>>(j, "sweep_n_hl", {});
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
    json j;
    j["task"] = cfg.task;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir.string();
    json d;
    d["kind"] = cfg.dataset.kind;
    if (cfg.dataset.kind == "mnist") {
        d["train_images"] = cfg.dataset.train_images.string();
        d["train_labels"] = cfg.dataset.train_labels.string();
        d["test_images"] = cfg.dataset.test_images.string();
        d["test_labels"] = cfg.dataset.test_labels.string();
        d["binarize_threshold"] = cfg.dataset.binarize_threshold;
    } else {
        d["path"] = cfg.dataset.path.string();
        d["skip_header_rows"] = cfg.dataset.schema.skip_header_rows;
        d["feature_columns"] = cfg.dataset.schema.feature_columns;
        d["label_column"] = cfg.dataset.schema.label_column;
        d["label_map"] = cfg.dataset.schema.label_map;
        d["thermometer_bins"] = cfg.dataset.thermometer_bins;
        d["train_count"] = cfg.dataset.train_count;
        d["test_count"] = cfg.dataset.test_count;
    }
    j["dataset"] = d;
    j["device"] = {{"g_parallel", cfg.device.g_parallel},
                   {"g_antiparallel", cfg.device.g_antiparallel},
                   {"track_width_synapse", cfg.device.track_width_synapse},
                   {"track_width_neuron", cfg.device.track_width_neuron},
                   {"fire_threshold", cfg.device.fire_threshold},
                   {"mobility_synapse", cfg.device.mobility_synapse},
                   {"mobility_neuron", cfg.device.mobility_neuron},
                   {"leak_rate", cfg.device.leak_rate},
                   {"dt", cfg.device.dt},
                   {"v_dd", cfg.device.v_dd},
                   {"steps_per_presentation", cfg.device.steps_per_presentation}};
    j["clustering"] = {{"n_clusters", cfg.clustering.n_clusters},
                       {"wta_mode", wta_name(cfg.clustering.wta_mode)},
                       {"feedback_scope", scope_name(cfg.clustering.feedback_scope)},
                       {"unsupervised_samples", cfg.clustering.unsupervised_samples},
                       {"init", init_name(cfg.clustering.init)}};
    j["decoder"] = {{"learning_rate", cfg.decoder.learning_rate},
                    {"epochs", cfg.decoder.epochs},
                    {"supervised_samples", cfg.decoder.supervised_samples}};
    j["checkpoints"] = cfg.checkpoints;
    j["sweep_n_hl"] = cfg.sweep_n_hl;
    return j.dump(2) + "\n";
}

TaskData load_task_data(const ExperimentConfig& cfg) {
    TaskData data;
    if (cfg.dataset.kind == "mnist") {
        const RawImageSet train = load_mnist(cfg.dataset.train_images, cfg.dataset.train_labels);
        const RawImageSet test = load_mnist(cfg.dataset.test_images, cfg.dataset.test_labels);
        data.train = binarize_images(train, cfg.dataset.binarize_threshold, cfg.task + "/train");
        data.test = binarize_images(test, cfg.dataset.binarize_threshold, cfg.task + "/test");
        data.rf_height = train.rows;
        data.rf_width = train.cols;
    } else {
        const FeatureTable table = load_csv_dataset(cfg.dataset.path, cfg.dataset.schema);
        // Split before fitting the encoder: normalization statistics must come
        // from the training rows only.
        auto [train_table, test_table] =
            split(table, cfg.dataset.train_count, cfg.dataset.test_count,
                  derive_seed(cfg.seed, kTagSplit));
        ThermometerEncoder encoder(cfg.dataset.thermometer_bins);
        encoder.fit(train_table);
        if (encoder.constant_features() > 0) {
            std::fprintf(stderr, "note: %d constant feature(s) in %s encode to all-Gnd channels\n",
                         encoder.constant_features(), cfg.dataset.path.string().c_str());
        }
        data.train = encoder.encode(train_table, cfg.task + "/train");
        data.test = encoder.encode(test_table, cfg.task + "/test");
        data.rf_height = table.n_cols;
        data.rf_width = cfg.dataset.thermometer_bins;
    }
    return data;
}

namespace {

std::vector<long> checkpoint_schedule(const ExperimentConfig& cfg) {
    const long total = cfg.clustering.unsupervised_samples;
    if (total == 0) return {0};
    std::vector<long> pts;
    for (long c : cfg.checkpoints) {
        if (c > 0 && c <= total) pts.push_back(c);
    }
    pts.push_back(total);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double decoder_accuracy_at(const ExperimentConfig& cfg, CrossbarLayer& layer, const TaskData& data) {
    // Encode each distinct training pattern once on the frozen encoder.
    std::vector<SpikeFeature> pool(data.train.size());
    for (int i = 0; i < data.train.size(); ++i) {
        reset_layer(layer);
        pool[i] = encode_spikes(layer, data.train.patterns[i], cfg.clustering.wta_mode);
    }
    reset_layer(layer);

    Rng stream_rng(derive_seed(cfg.seed, kTagDecoder));
    const std::vector<int> stream = epoch_shuffled_indices(
        data.train.size(), cfg.decoder.supervised_samples, stream_rng);

    std::vector<SpikeFeature> features;
    features.reserve(stream.size());
    std::vector<int> labels;
    labels.reserve(stream.size());
    for (int i : stream) {
        features.push_back(pool[i]);
        labels.push_back(data.train.labels[i]);
    }

    DecoderLayer dec = DecoderLayer::create(cfg.clustering.n_clusters, data.train.meta.n_classes,
                                            cfg.decoder.learning_rate);
    train_decoder(dec, features, labels, cfg.decoder.epochs);
    return evaluate(layer, dec, data.test, cfg.clustering.wta_mode);
}

} // namespace

RunResult run_pipeline(const ExperimentConfig& cfg, const TaskData& data,
                       const CheckpointHook& hook) {
    cfg.validate();
    if (!data.train.labeled() || !data.test.labeled()) {
        throw DataError("run_pipeline: training and test sets must be labeled");
    }

    ClusterConfig ccfg = cfg.clustering;
    ccfg.seed = derive_seed(cfg.seed, kTagCluster);

    CrossbarLayer layer = init_network(data.train.meta.n_inputs, ccfg, cfg.device);
    UnsupervisedTrainer trainer(layer, data.train, ccfg);

    RunResult result;
    for (long d : checkpoint_schedule(cfg)) {
        with_stage("cluster-train", [&] { trainer.advance_to(d); });
        if (hook) hook(d, layer);
        const double accuracy =
            with_stage("decoder", [&] { return decoder_accuracy_at(cfg, layer, data); });
        result.curve.push_back({d, accuracy});
    }
    result.training_log = trainer.take_log();
    return result;
}

void emit_receptive_fields(const CrossbarLayer& layer, int height, int width,
                           const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(height) * width);
    for (int k = 0; k < layer.n_neurons; ++k) {
        const std::vector<double> field = receptive_field(layer, k, height, width);
        for (std::size_t i = 0; i < field.size(); ++i) {
            bytes[i] = static_cast<unsigned char>(std::lround(field[i] * 255.0));
        }
        const std::filesystem::path file = dir / ("neuron_" + std::to_string(k) + ".pgm");
        std::ofstream out(file, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + file.string());
        out << "P5\n" << width << " " << height << "\n255\n";
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw ConfigError("short write to " + file.string());
    }
}

namespace {

void write_metrics_header(std::ofstream& out) {
    out << "task,seed,n_hl,wta_mode,d_presented,accuracy\n";
}

void write_metrics_row(std::ofstream& out, const ExperimentConfig& cfg, long d, double accuracy) {
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.6f", accuracy);
    out << cfg.task << ',' << cfg.seed << ',' << cfg.clustering.n_clusters << ','
        << wta_name(cfg.clustering.wta_mode) << ',' << d << ',' << acc << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

} // namespace

void run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir / "run.json", experiment_config_json(cfg));

    const TaskData data = with_stage("load-data", [&] { return load_task_data(cfg); });

    std::ofstream metrics(cfg.output_dir / "metrics.csv", std::ios::binary);
    if (!metrics) throw ConfigError("cannot write " + (cfg.output_dir / "metrics.csv").string());
    write_metrics_header(metrics);

    const std::filesystem::path rf_root = cfg.output_dir / "receptive_fields";
    const long final_d = cfg.clustering.unsupervised_samples;
    const RunResult result = run_pipeline(cfg, data, [&](long d, const CrossbarLayer& layer) {
        emit_receptive_fields(layer, data.rf_height, data.rf_width,
                              rf_root / ("d" + std::to_string(d)));
        if (d == final_d) {
            // The final state also lands at the flat receptive_fields/ path.
            emit_receptive_fields(layer, data.rf_height, data.rf_width, rf_root);
        }
    });

    for (const auto& point : result.curve) {
        write_metrics_row(metrics, cfg, point.d_presented, point.accuracy);
    }
    metrics.flush();

    std::ofstream log_out(cfg.output_dir / "training_log.csv", std::ios::binary);
    result.training_log.write_csv(log_out);

    write_text_file(cfg.output_dir / "DONE", "done\n");
}

void run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.sweep_n_hl.empty()) {
        throw ConfigError("run_sweep: sweep_n_hl is empty");
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir / "run.json", experiment_config_json(cfg));

    const TaskData data = with_stage("load-data", [&] { return load_task_data(cfg); });

    std::ofstream metrics(cfg.output_dir / "metrics.csv", std::ios::binary);
    if (!metrics) throw ConfigError("cannot write " + (cfg.output_dir / "metrics.csv").string());
    write_metrics_header(metrics);

    // Entries share no state and run as independent jobs; rows are written in
    // sweep order so the output is independent of completion order.
    std::vector<std::future<CheckpointMetric>> jobs;
    jobs.reserve(cfg.sweep_n_hl.size());
    for (int n_hl : cfg.sweep_n_hl) {
        jobs.push_back(std::async(std::launch::async, [&cfg, &data, n_hl] {
            ExperimentConfig entry = cfg;
            entry.clustering.n_clusters = n_hl;
            entry.checkpoints.clear(); // final accuracy only
            return run_pipeline(entry, data).curve.back();
        }));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const CheckpointMetric point = jobs[i].get();
        ExperimentConfig entry = cfg;
        entry.clustering.n_clusters = cfg.sweep_n_hl[i];
        write_metrics_row(metrics, entry, point.d_presented, point.accuracy);
    }
    metrics.flush();
    write_text_file(cfg.output_dir / "DONE", "done\n");
}

} // namespace dwmtj
