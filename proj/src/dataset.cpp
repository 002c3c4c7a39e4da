#include "qsdr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qsdr/errors.hpp"

namespace qsdr {

namespace {

// RFC-4180-style field split with double-quote escaping
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& text, double& out) {
    std::string t = trimmed(text);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end != nullptr && *end == '\0';
}

}  // namespace

Dataset load_dataset_csv(const std::string& path, const std::string& response_column,
                         const std::vector<std::string>& feature_columns) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);

    std::string line;
    if (!std::getline(in, line)) throw NoNumericData("empty file: " + path);
    std::vector<std::string> header = split_csv_line(line);
    for (auto& h : header) h = trimmed(h);

    auto column_index = [&](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        if (it != header.end()) return static_cast<int>(it - header.begin());
        // fall back to a zero-based index string
        if (!name.empty() && std::all_of(name.begin(), name.end(),
                                         [](unsigned char c) { return std::isdigit(c); })) {
            int idx = std::stoi(name);
            if (idx >= 0 && idx < static_cast<int>(header.size())) return idx;
        }
        throw MissingColumn(name);
    };

    const int y_col = column_index(response_column);
    std::vector<int> x_cols;
    if (feature_columns.empty()) {
        for (int c = 0; c < static_cast<int>(header.size()); ++c) {
            if (c != y_col) x_cols.push_back(c);
        }
    } else {
        for (const auto& name : feature_columns) x_cols.push_back(column_index(name));
    }
    if (x_cols.empty()) throw NoNumericData("no feature columns in " + path);

    std::vector<std::vector<double>> rows;
    int dropped = 0;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        std::vector<double> row(x_cols.size() + 1);
        bool ok = static_cast<int>(fields.size()) > y_col;
        if (ok) ok = parse_double(fields[y_col], row[0]);
        for (std::size_t c = 0; ok && c < x_cols.size(); ++c) {
            ok = x_cols[c] < static_cast<int>(fields.size()) &&
                 parse_double(fields[x_cols[c]], row[c + 1]);
        }
        if (ok) {
            for (double v : row) {
                if (!std::isfinite(v)) ok = false;
            }
        }
        if (ok) {
            rows.push_back(std::move(row));
        } else {
            ++dropped;
        }
    }
    if (rows.empty()) {
        if (dropped > 0) throw EmptyAfterFiltering("every row of " + path + " was dropped");
        throw NoNumericData("no data rows in " + path);
    }

    Dataset data;
    data.source = path;
    data.response_name = header[y_col];
    for (int c : x_cols) data.column_names.push_back(header[c]);
    data.rows_dropped = dropped;
    data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(x_cols.size()));
    data.Y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        data.Y[static_cast<Eigen::Index>(r)] = rows[r][0];
        for (std::size_t c = 0; c < x_cols.size(); ++c) {
            data.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c + 1];
        }
    }
    return data;
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << (data.response_name.empty() ? "y" : data.response_name);
    for (std::size_t c = 0; c < static_cast<std::size_t>(data.X.cols()); ++c) {
        out << ',';
        out << (c < data.column_names.size() ? data.column_names[c]
                                             : "x" + std::to_string(c + 1));
    }
    out << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
        std::snprintf(buf, sizeof(buf), "%.17g", data.Y[r]);
        out << buf;
        for (Eigen::Index c = 0; c < data.X.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.X(r, c));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace qsdr
