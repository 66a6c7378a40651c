#pragma once

#include <stdexcept>
#include <string>

namespace dwmtj {

// Bad run configuration: shape mismatches, invalid parameters, missing files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (IDX magic/truncation, CSV cells). Message names the
// offending offset or row.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally valid data that violates a dataset contract (label out of
// range, empty test set).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A value that is impossible under the module invariants reached an API;
// signals corrupted state rather than bad user input.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace dwmtj
