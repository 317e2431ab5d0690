#include "imblab/feature_matrix.hpp"

#include <unordered_set>

#include "imblab/error.hpp"

namespace imblab {

void FeatureMatrix::validate() const {
    require(column_names.size() == columns.size(), "feature matrix: ", column_names.size(),
            " names for ", columns.size(), " columns");
    std::unordered_set<std::string> seen;
    for (const std::string& name : column_names) {
        require(!name.empty(), "feature matrix: empty column name");
        require(seen.insert(name).second, "feature matrix: duplicate column '", name, "'");
    }
    for (std::size_t c = 0; c < columns.size(); ++c)
        require(columns[c].size() == rows(), "feature matrix: column '", column_names[c],
                "' has ", columns[c].size(), " rows, expected ", rows());
    if (!row_timestamps.empty())
        require(row_timestamps.size() == rows(), "feature matrix: ", row_timestamps.size(),
                " timestamps for ", rows(), " rows");
}

int FeatureMatrix::column_index(const std::string& name) const {
    for (std::size_t c = 0; c < column_names.size(); ++c)
        if (column_names[c] == name) return static_cast<int>(c);
    return -1;
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& row_indices) const {
    FeatureMatrix out;
    out.column_names = column_names;
    out.columns.resize(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out.columns[c].reserve(row_indices.size());
        for (std::size_t r : row_indices) out.columns[c].push_back(columns[c][r]);
    }
    if (!row_timestamps.empty()) {
        out.row_timestamps.reserve(row_indices.size());
        for (std::size_t r : row_indices) out.row_timestamps.push_back(row_timestamps[r]);
    }
    return out;
}

} // namespace imblab
