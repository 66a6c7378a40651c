#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dwmtj/clustering.hpp"
#include "dwmtj/data.hpp"
#include "dwmtj/decoder.hpp"

namespace dwmtj {

struct DecoderSettings {
    double learning_rate = 0.05;
    int epochs = 1;
    long supervised_samples = 0; // S: presentations drawn from the training split
};

// Where a run's patterns come from. kind is "mnist" (IDX file pair per split)
// or "csv" (one file, seeded train/test split, thermometer encoding).
struct DatasetSpec {
    std::string kind;

    // mnist
    std::filesystem::path train_images;
    std::filesystem::path train_labels;
    std::filesystem::path test_images;
    std::filesystem::path test_labels;
    double binarize_threshold = 0.5;

    // csv
    std::filesystem::path path;
    CsvSchema schema;
    int thermometer_bins = 8;
    int train_count = 0;
    int test_count = 0;
};

// Everything that determines a run. One JSON document; the CLI only selects
// the config path and may override seed and output directory.
struct ExperimentConfig {
    std::string task;
    DatasetSpec dataset;
    DeviceParams device;
    ClusterConfig clustering;
    DecoderSettings decoder;
    std::vector<long> checkpoints; // evaluation cadence over D; empty = final only
    std::vector<int> sweep_n_hl;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "runs/out";

    void validate() const;
};

// Relative dataset paths in the file resolve against the config's directory.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_json(const ExperimentConfig& cfg);

// Train/test patterns plus the receptive-field raster shape.
struct TaskData {
    Dataset train;
    Dataset test;
    int rf_height = 0;
    int rf_width = 0;
};

TaskData load_task_data(const ExperimentConfig& cfg);

struct CheckpointMetric {
    long d_presented = 0;
    double accuracy = 0.0;
};

struct RunResult {
    std::vector<CheckpointMetric> curve;
    TrainingLog training_log;
};

// cluster-train -> spike-encode -> decoder-train -> evaluate, pausing at each
// checkpoint to fit a fresh decoder and measure test accuracy. The optional
// hook sees the encoder at every checkpoint (receptive-field dumps).
using CheckpointHook = std::function<void(long d_presented, const CrossbarLayer&)>;
RunResult run_pipeline(const ExperimentConfig& cfg, const TaskData& data,
                       const CheckpointHook& hook = {});

// Full run with artifacts: metrics.csv, run.json, training_log.csv,
// receptive_fields/*.pgm, DONE sentinel.
void run_experiment(const ExperimentConfig& cfg);

// One run per sweep_n_hl entry (final checkpoint only); a single metrics.csv
// with one row per N_HL.
void run_sweep(const ExperimentConfig& cfg);

// 8-bit binary PGM (P5), weight 1.0 -> 255, one file per neuron column.
void emit_receptive_fields(const CrossbarLayer& layer, int height, int width,
                           const std::filesystem::path& dir);

} // namespace dwmtj
