#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace qsdr {

// Observed sample kept free of non-finite entries: rows with any such value
// are dropped at ingestion and counted.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd Y;
    std::vector<std::string> column_names;  // feature columns
    std::string response_name;
    std::string source;  // file path or "synthetic"
    int rows_dropped = 0;
};

// RFC-4180-style CSV with a header row, '.' decimal separator. The response
// is selected by name or zero-based index string; the remaining (or listed)
// numeric columns form X.
Dataset load_dataset_csv(const std::string& path, const std::string& response_column,
                         const std::vector<std::string>& feature_columns = {});

void save_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace qsdr
