#include "dwmtj/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dwmtj/error.hpp"

namespace dwmtj {

namespace {

std::uint32_t read_be_u32(std::ifstream& in, const std::filesystem::path& path, long offset) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw FormatError(path.string() + ": truncated at offset " + std::to_string(offset) +
                          " (expected 4-byte big-endian field)");
    }
    return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
           (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
}

std::vector<std::uint8_t> read_bytes(std::ifstream& in, const std::filesystem::path& path,
                                     std::size_t count, long offset) {
    std::vector<std::uint8_t> out(count);
    if (!in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(count))) {
        throw FormatError(path.string() + ": truncated at offset " +
                          std::to_string(offset + in.gcount()) + " (expected " +
                          std::to_string(count) + " data bytes)");
    }
    return out;
}

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return in;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = cell.find_first_not_of(' ');
        fields.push_back(start == std::string::npos ? std::string{} : cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

} // namespace

RawImageSet load_mnist(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path) {
    auto img = open_binary(images_path);
    const std::uint32_t img_magic = read_be_u32(img, images_path, 0);
    if (img_magic != 0x00000803u) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", img_magic);
        throw FormatError(images_path.string() + ": bad magic " + buf +
                          " at offset 0 (expected 0x00000803)");
    }
    const std::uint32_t img_count = read_be_u32(img, images_path, 4);
    const std::uint32_t rows = read_be_u32(img, images_path, 8);
    const std::uint32_t cols = read_be_u32(img, images_path, 12);
    if (rows == 0 || cols == 0) {
        throw FormatError(images_path.string() + ": zero image dimensions in header");
    }

    auto lab = open_binary(labels_path);
    const std::uint32_t lab_magic = read_be_u32(lab, labels_path, 0);
    if (lab_magic != 0x00000801u) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "0x%08x", lab_magic);
        throw FormatError(labels_path.string() + ": bad magic " + buf +
                          " at offset 0 (expected 0x00000801)");
    }
    const std::uint32_t lab_count = read_be_u32(lab, labels_path, 4);
    if (img_count != lab_count) {
        throw FormatError(images_path.string() + ": image count " + std::to_string(img_count) +
                          " does not match label count " + std::to_string(lab_count));
    }

    RawImageSet set;
    set.rows = static_cast<int>(rows);
    set.cols = static_cast<int>(cols);
    set.pixels = read_bytes(img, images_path, std::size_t(img_count) * rows * cols, 16);
    set.labels = read_bytes(lab, labels_path, lab_count, 8);
    for (std::size_t i = 0; i < set.labels.size(); ++i) {
        if (set.labels[i] > 9) {
            throw FormatError(labels_path.string() + ": label " + std::to_string(set.labels[i]) +
                              " outside [0, 9] at offset " + std::to_string(8 + i));
        }
    }
    return set;
}

InputPattern binarize(std::span<const std::uint8_t> image, double threshold) {
    InputPattern pattern;
    pattern.voltages.reserve(image.size());
    for (std::uint8_t px : image) {
        pattern.voltages.push_back(px / 255.0 > threshold ? VoltageLevel::Vdd : VoltageLevel::Gnd);
    }
    return pattern;
}

Dataset binarize_images(const RawImageSet& images, double threshold, std::string name) {
    Dataset ds;
    ds.meta.n_inputs = images.rows * images.cols;
    ds.meta.n_classes = 10;
    ds.meta.name = std::move(name);
    ds.patterns.reserve(images.count());
    ds.labels.reserve(images.count());
    for (int i = 0; i < images.count(); ++i) {
        ds.patterns.push_back(binarize(images.image(i), threshold));
        ds.labels.push_back(images.labels[i]);
    }
    return ds;
}

FeatureTable load_csv_dataset(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());

    FeatureTable table;
    std::string line;
    long line_no = 0;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no <= schema.skip_header_rows) continue;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);

        const int label_col = schema.label_column < 0
                                  ? static_cast<int>(fields.size()) + schema.label_column
                                  : schema.label_column;
        if (label_col < 0 || label_col >= static_cast<int>(fields.size())) {
            throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                              " has no label column " + std::to_string(schema.label_column));
        }

        std::vector<int> feature_cols = schema.feature_columns;
        if (feature_cols.empty()) {
            for (int c = 0; c < static_cast<int>(fields.size()); ++c) {
                if (c != label_col) feature_cols.push_back(c);
            }
        }

        bool missing = is_missing(fields[label_col]);
        for (int c : feature_cols) {
            if (c >= static_cast<int>(fields.size())) {
                throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                                  " is missing column " + std::to_string(c));
            }
            missing = missing || is_missing(fields[c]);
        }
        if (missing) {
            ++table.dropped_rows;
            continue;
        }

        if (table.n_cols == 0) {
            table.n_cols = static_cast<int>(feature_cols.size());
        } else if (static_cast<int>(feature_cols.size()) != table.n_cols) {
            throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                              " has inconsistent column count");
        }

        for (int c : feature_cols) {
            const std::string& cell = fields[c];
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0') {
                throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                                  " non-numeric feature cell '" + cell + "'");
            }
            table.values.push_back(v);
        }

        int label;
        if (!schema.label_map.empty()) {
            auto it = schema.label_map.find(fields[label_col]);
            if (it == schema.label_map.end()) {
                throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                                  " unmapped label '" + fields[label_col] + "'");
            }
            label = it->second;
        } else {
            char* end = nullptr;
            const double v = std::strtod(fields[label_col].c_str(), &end);
            if (end == fields[label_col].c_str() || *end != '\0' ||
                v != static_cast<double>(static_cast<int>(v))) {
                throw FormatError(path.string() + ": row " + std::to_string(line_no) +
                                  " non-integer label '" + fields[label_col] + "'");
            }
            label = static_cast<int>(v);
        }
        if (label < 0) {
            throw DataError(path.string() + ": row " + std::to_string(line_no) +
                            " negative label " + std::to_string(label));
        }
        table.labels.push_back(label);
        max_label = std::max(max_label, label);
        ++table.n_rows;
    }
    if (table.n_rows == 0) {
        throw FormatError(path.string() + ": no data rows");
    }
    table.n_classes = max_label + 1;
    return table;
}

ThermometerEncoder::ThermometerEncoder(int bins) : bins_(bins) {
    if (bins < 2) throw ConfigError("thermometer encoding requires bins >= 2");
}

void ThermometerEncoder::fit(const FeatureTable& train) {
    mins_.assign(train.n_cols, 0.0);
    maxs_.assign(train.n_cols, 0.0);
    constant_features_ = 0;
    for (int c = 0; c < train.n_cols; ++c) {
        double lo = train.at(0, c), hi = train.at(0, c);
        for (int r = 1; r < train.n_rows; ++r) {
            lo = std::min(lo, train.at(r, c));
            hi = std::max(hi, train.at(r, c));
        }
        mins_[c] = lo;
        maxs_[c] = hi;
        if (!(hi > lo)) ++constant_features_;
    }
}

Dataset ThermometerEncoder::encode(const FeatureTable& table, std::string name) const {
    if (static_cast<int>(mins_.size()) != table.n_cols) {
        throw ConfigError("thermometer encoder fitted on " + std::to_string(mins_.size()) +
                          " features, applied to " + std::to_string(table.n_cols));
    }
    Dataset ds;
    ds.meta.n_inputs = table.n_cols * bins_;
    ds.meta.n_classes = table.n_classes;
    ds.meta.name = std::move(name);
    ds.labels = table.labels;
    ds.patterns.reserve(table.n_rows);
    for (int r = 0; r < table.n_rows; ++r) {
        InputPattern pattern;
        pattern.voltages.reserve(ds.meta.n_inputs);
        for (int c = 0; c < table.n_cols; ++c) {
            const double span = maxs_[c] - mins_[c];
            // Constant feature: all channels stay at Gnd.
            const double norm = span > 0
                                    ? std::clamp((table.at(r, c) - mins_[c]) / span, 0.0, 1.0)
                                    : -1.0;
            for (int b = 0; b < bins_; ++b) {
                const double threshold = static_cast<double>(b + 1) / (bins_ + 1);
                pattern.voltages.push_back(norm >= threshold ? VoltageLevel::Vdd
                                                             : VoltageLevel::Gnd);
            }
        }
        ds.patterns.push_back(std::move(pattern));
    }
    return ds;
}

Dataset thermometer_encode(const FeatureTable& features, int bins) {
    ThermometerEncoder enc(bins);
    enc.fit(features);
    return enc.encode(features, "thermometer");
}

std::pair<std::vector<int>, std::vector<int>> split_indices(int n, int train_count,
                                                            int test_count, std::uint64_t seed) {
    if (train_count < 0 || test_count < 0 || train_count + test_count > n) {
        throw ConfigError("split of " + std::to_string(train_count) + "+" +
                          std::to_string(test_count) + " exceeds dataset size " + std::to_string(n));
    }
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<int> train(order.begin(), order.begin() + train_count);
    std::vector<int> test(order.begin() + train_count, order.begin() + train_count + test_count);
    return {std::move(train), std::move(test)};
}

namespace {

FeatureTable take_rows(const FeatureTable& table, const std::vector<int>& rows) {
    FeatureTable out;
    out.n_cols = table.n_cols;
    out.n_classes = table.n_classes;
    out.n_rows = static_cast<int>(rows.size());
    out.values.reserve(rows.size() * static_cast<std::size_t>(table.n_cols));
    out.labels.reserve(rows.size());
    for (int r : rows) {
        for (int c = 0; c < table.n_cols; ++c) out.values.push_back(table.at(r, c));
        out.labels.push_back(table.labels[r]);
    }
    return out;
}

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
    Dataset out;
    out.meta = ds.meta;
    out.patterns.reserve(rows.size());
    for (int r : rows) out.patterns.push_back(ds.patterns[r]);
    if (ds.labeled()) {
        out.labels.reserve(rows.size());
        for (int r : rows) out.labels.push_back(ds.labels[r]);
    }
    return out;
}

} // namespace

std::pair<FeatureTable, FeatureTable> split(const FeatureTable& table, int train_count,
                                            int test_count, std::uint64_t seed) {
    auto [tr, te] = split_indices(table.n_rows, train_count, test_count, seed);
    return {take_rows(table, tr), take_rows(table, te)};
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, int train_count, int test_count,
                                  std::uint64_t seed) {
    auto [tr, te] = split_indices(dataset.size(), train_count, test_count, seed);
    return {take_rows(dataset, tr), take_rows(dataset, te)};
}

std::vector<int> epoch_shuffled_indices(int n, long count, Rng& rng) {
    std::vector<int> stream;
    stream.reserve(count);
    std::vector<int> epoch(n);
    for (int i = 0; i < n; ++i) epoch[i] = i;
    while (static_cast<long>(stream.size()) < count) {
        rng.shuffle(epoch);
        for (int i : epoch) {
            if (static_cast<long>(stream.size()) == count) break;
            stream.push_back(i);
        }
    }
    return stream;
}

} // namespace dwmtj
