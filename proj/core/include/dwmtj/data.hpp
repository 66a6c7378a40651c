#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dwmtj/crossbar.hpp"
#include "dwmtj/rng.hpp"

namespace dwmtj {

struct DatasetMeta {
    int n_inputs = 0;
    int n_classes = 0;
    std::string name;
};

// Encoded binary patterns plus optional labels. All patterns share one width;
// labels, when present, lie in [0, n_classes).
struct Dataset {
    std::vector<InputPattern> patterns;
    std::vector<int> labels; // empty for unlabeled data
    DatasetMeta meta;

    int size() const { return static_cast<int>(patterns.size()); }
    bool labeled() const { return !labels.empty(); }
};

// Raw grayscale images as stored in IDX files.
struct RawImageSet {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels; // count * rows * cols, row-major per image
    std::vector<std::uint8_t> labels;

    int count() const { return static_cast<int>(labels.size()); }
    std::span<const std::uint8_t> image(int i) const {
        const std::size_t n = static_cast<std::size_t>(rows) * cols;
        return {pixels.data() + static_cast<std::size_t>(i) * n, n};
    }
};

// MNIST IDX pair: big-endian magic 0x00000803 (images) / 0x00000801 (labels).
// Throws FormatError naming the byte offset on malformed input.
RawImageSet load_mnist(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path);

// pixel/255 > threshold -> Vdd else Gnd.
InputPattern binarize(std::span<const std::uint8_t> image, double threshold = 0.5);

Dataset binarize_images(const RawImageSet& images, double threshold, std::string name);

// Column selection and label handling for delimiter-separated files.
// feature_columns empty means every column except the label column;
// label_column -1 means the last column; an empty label_map parses labels as
// integers.
struct CsvSchema {
    int skip_header_rows = 1;
    std::vector<int> feature_columns;
    int label_column = -1;
    std::map<std::string, int> label_map;
};

// Real-valued feature matrix with integer labels, pre-encoding.
struct FeatureTable {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> values; // row-major
    std::vector<int> labels;
    int n_classes = 0;
    long dropped_rows = 0; // rows removed for missing values

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * n_cols + col];
    }
};

// Rows with missing cells ("" or "?") are dropped and counted; a non-numeric
// feature cell raises FormatError with its line number.
FeatureTable load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema);

// Monotone binary code: feature min-max normalized with statistics from the
// fitted table, channel c active iff the normalized value >= (c+1)/(bins+1).
// Fit on the training split only, then encode both splits.
class ThermometerEncoder {
public:
    explicit ThermometerEncoder(int bins);

    void fit(const FeatureTable& train);
    Dataset encode(const FeatureTable& table, std::string name) const;

    int bins() const { return bins_; }
    int constant_features() const { return constant_features_; }

private:
    int bins_;
    int constant_features_ = 0;
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

// Fit-and-encode on one table (no train/test distinction).
Dataset thermometer_encode(const FeatureTable& features, int bins);

// Seeded shuffle of [0, n) then a disjoint train/test partition.
std::pair<std::vector<int>, std::vector<int>> split_indices(int n, int train_count,
                                                            int test_count, std::uint64_t seed);

std::pair<FeatureTable, FeatureTable> split(const FeatureTable& table, int train_count,
                                            int test_count, std::uint64_t seed);
std::pair<Dataset, Dataset> split(const Dataset& dataset, int train_count, int test_count,
                                  std::uint64_t seed);

// Presentation order for streams longer than the dataset: concatenated
// reshuffled epochs, truncated to `count` entries.
std::vector<int> epoch_shuffled_indices(int n, long count, Rng& rng);

} // namespace dwmtj
