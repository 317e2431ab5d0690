#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "imblab/timestamp.hpp"

namespace imblab {

/// Column-major matrix of named features. kMissing (NaN) marks absent
/// entries; row_timestamps is optional (empty for plain tabular data).
struct FeatureMatrix {
    std::vector<std::string> column_names;
    std::vector<std::vector<double>> columns;
    std::vector<EpochSeconds> row_timestamps;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t cols() const { return columns.size(); }

    /// Checks unique non-empty names and equal column lengths.
    void validate() const;

    /// Position of the named column, or -1.
    int column_index(const std::string& name) const;

    /// Copies the given rows (used to slice train/test folds).
    FeatureMatrix select_rows(const std::vector<std::size_t>& row_indices) const;
};

} // namespace imblab
