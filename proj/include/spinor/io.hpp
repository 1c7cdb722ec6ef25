// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spinor/topology.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spinor {

/// Node and edge time series on a fixed graph; row t of each matrix is time step t.
struct TimeSeriesDataset {
    OrientedGraph graph;
    Eigen::MatrixXd node_series;  // T x V
    Eigen::MatrixXd edge_series;  // T x E
    std::vector<std::string> node_labels;
    std::vector<std::string> edge_labels;

    Index num_steps() const noexcept { return node_series.rows(); }
    /// (V+E) x T spinor batch, node block first.
    Eigen::MatrixXd spinors() const;
    static TimeSeriesDataset from_spinors(OrientedGraph graph, const Eigen::MatrixXd& S);
};

/// Edge-list format: first line is V, then one "tail head" pair per line
/// (0-indexed, whitespace separated). Edge index is line order. Blank lines
/// and lines starting with '#' are ignored.
OrientedGraph parse_edge_list(std::istream& in);
OrientedGraph load_edge_list(const std::filesystem::path& path);
void save_edge_list(const std::filesystem::path& path, const OrientedGraph& g);

struct CsvMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> header;  // empty when the file had none
};

/// Comma-separated numeric table; a non-numeric first row is taken as a header.
CsvMatrix parse_csv_matrix(std::istream& in);
CsvMatrix load_csv_matrix(const std::filesystem::path& path);
/// Writes with 17 significant digits.
void save_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& M,
                     const std::vector<std::string>& header = {});

TimeSeriesDataset load_time_series(const OrientedGraph& graph, const std::filesystem::path& node_csv,
                                   const std::filesystem::path& edge_csv);
void save_time_series(const TimeSeriesDataset& data, const std::filesystem::path& node_csv,
                      const std::filesystem::path& edge_csv);

using Cell = std::variant<std::string, std::int64_t, double>;

struct ResultTable {
    nlohmann::json metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// `%.17g`, so that parsing the text returns the identical double.
std::string format_double(double x);

/// Writes `<base>.json` (metadata plus column names) and `<base>.csv`.
void save_results(const std::filesystem::path& base, const ResultTable& table);
/// Reads the pair written by save_results. Numeric cells come back as double
/// or int64, everything else as string.
ResultTable load_results(const std::filesystem::path& base);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace spinor
