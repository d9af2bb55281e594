#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "topogcn/features.hpp"
#include "topogcn/matrix.hpp"

namespace topogcn {

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

/// Header plus rows of already formatted cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream &out) const;
    /// Throws DataError when the file cannot be written.
    void save(const std::filesystem::path &path) const;
    /// Throws DataError on I/O failure or a ragged row.
    static CsvTable load(const std::filesystem::path &path);
};

/// `node_id` column followed by one column per feature.
CsvTable feature_csv(const FeatureTable &table, const std::vector<std::string> &node_ids);
/// Inverse of feature_csv. Node ids come back through `node_ids`.
FeatureTable feature_table_from_csv(const CsvTable &csv, std::vector<std::string> &node_ids);

/// Same layout for an arbitrary node x column matrix.
CsvTable matrix_csv(const DenseMatrix &m, const std::vector<std::string> &node_ids,
                    const std::vector<std::string> &column_names);

} // namespace topogcn
