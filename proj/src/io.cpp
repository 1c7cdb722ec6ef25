// Copyright 2026 The Spinor Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spinor/io.hpp"

#include "spinor/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace spinor {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && errno != ERANGE;
}

bool parse_integer(const std::string& text, long long& out) {
    if (text.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtoll(text.c_str(), &end, 10);
    return end == text.c_str() + text.size() && errno != ERANGE;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.exceptions(std::ios::badbit | std::ios::failbit);
    return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
    return std::filesystem::path(base.string() + suffix);
}

const char* cell_type(const Cell& c) {
    switch (c.index()) {
        case 0: return "string";
        case 1: return "integer";
        default: return "number";
    }
}

}  // namespace

Eigen::MatrixXd TimeSeriesDataset::spinors() const {
    Eigen::MatrixXd S(node_series.cols() + edge_series.cols(), node_series.rows());
    S.topRows(node_series.cols()) = node_series.transpose();
    S.bottomRows(edge_series.cols()) = edge_series.transpose();
    return S;
}

TimeSeriesDataset TimeSeriesDataset::from_spinors(OrientedGraph graph, const Eigen::MatrixXd& S) {
    const Index nv = graph.num_nodes();
    const Index ne = graph.num_edges();
    if (S.rows() != nv + ne) throw DimensionMismatch("from_spinors: row count does not match V+E");
    TimeSeriesDataset data{std::move(graph), S.topRows(nv).transpose(), S.bottomRows(ne).transpose(), {}, {}};
    return data;
}

OrientedGraph parse_edge_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::optional<Index> num_nodes;
    std::vector<Edge> edges;
    std::set<std::pair<Index, Index>> seen;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::istringstream ss(t);
        std::vector<std::string> tokens;
        for (std::string tok; ss >> tok;) tokens.push_back(tok);

        if (!num_nodes) {
            long long v = 0;
            if (tokens.size() != 1 || !parse_integer(tokens[0], v) || v < 1) {
                throw ParseError(line_no, "expected a positive node count");
            }
            num_nodes = static_cast<Index>(v);
            continue;
        }
        long long tail = 0;
        long long head = 0;
        if (tokens.size() != 2 || !parse_integer(tokens[0], tail) || !parse_integer(tokens[1], head)) {
            throw ParseError(line_no, "expected 'tail head'");
        }
        if (tail < 0 || tail >= *num_nodes || head < 0 || head >= *num_nodes) {
            throw ParseError(line_no, "node index out of range [0, " + std::to_string(*num_nodes) + ")");
        }
        if (tail == head) throw ParseError(line_no, "self-loop " + std::to_string(tail) + " " + std::to_string(head));
        const auto lo = static_cast<Index>(std::min(tail, head));
        const auto hi = static_cast<Index>(std::max(tail, head));
        if (!seen.insert({lo, hi}).second) {
            throw ParseError(line_no, "duplicate edge " + std::to_string(tail) + " " + std::to_string(head));
        }
        edges.push_back(Edge{static_cast<Index>(tail), static_cast<Index>(head)});
    }
    if (!num_nodes) throw ParseError(line_no == 0 ? 1 : line_no, "missing node count");
    return OrientedGraph(*num_nodes, std::move(edges));
}

OrientedGraph load_edge_list(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_edge_list(in);
}

void save_edge_list(const std::filesystem::path& path, const OrientedGraph& g) {
    auto out = open_out(path);
    out << g.num_nodes() << '\n';
    for (const Edge& e : g.edges()) out << e.tail << ' ' << e.head << '\n';
}

CsvMatrix parse_csv_matrix(std::istream& in) {
    CsvMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t j = 0; j < cells.size(); ++j) numeric = numeric && parse_number(cells[j], values[j]);

        if (first) {
            first = false;
            width = cells.size();
            if (!numeric) {
                out.header = cells;
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError(line_no, "ragged row: " + std::to_string(cells.size()) + " cells, expected " +
                                          std::to_string(width));
        }
        if (!numeric) {
            for (std::size_t j = 0; j < cells.size(); ++j) {
                double tmp = 0.0;
                if (!parse_number(cells[j], tmp)) {
                    throw ParseError(line_no, "non-numeric cell '" + cells[j] + "' in column " + std::to_string(j));
                }
            }
        }
        rows.push_back(std::move(values));
    }
    out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return out;
}

CsvMatrix load_csv_matrix(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return parse_csv_matrix(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path.string() + ": " + e.detail());
    }
}

void save_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& M,
                     const std::vector<std::string>& header) {
    auto out = open_out(path);
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    if (!header.empty()) out << '\n';
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << format_double(M(i, j));
        out << '\n';
    }
}

TimeSeriesDataset load_time_series(const OrientedGraph& graph, const std::filesystem::path& node_csv,
                                   const std::filesystem::path& edge_csv) {
    CsvMatrix nodes = load_csv_matrix(node_csv);
    CsvMatrix edges = load_csv_matrix(edge_csv);
    if (nodes.values.cols() != graph.num_nodes()) {
        throw DimensionMismatch(node_csv.string() + ": " + std::to_string(nodes.values.cols()) +
                                " node columns, graph has " + std::to_string(graph.num_nodes()) + " nodes");
    }
    if (edges.values.cols() != graph.num_edges()) {
        throw DimensionMismatch(edge_csv.string() + ": " + std::to_string(edges.values.cols()) +
                                " edge columns, graph has " + std::to_string(graph.num_edges()) + " edges");
    }
    if (nodes.values.rows() != edges.values.rows()) {
        throw DimensionMismatch("node and edge series have different lengths (" +
                                std::to_string(nodes.values.rows()) + " vs " + std::to_string(edges.values.rows()) +
                                ")");
    }
    return TimeSeriesDataset{graph, std::move(nodes.values), std::move(edges.values), std::move(nodes.header),
                             std::move(edges.header)};
}

void save_time_series(const TimeSeriesDataset& data, const std::filesystem::path& node_csv,
                      const std::filesystem::path& edge_csv) {
    save_csv_matrix(node_csv, data.node_series, data.node_labels);
    save_csv_matrix(edge_csv, data.edge_series, data.edge_labels);
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void save_results(const std::filesystem::path& base, const ResultTable& table) {
    nlohmann::json meta = table.metadata;
    meta["columns"] = table.columns;
    std::vector<std::string> types;
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        types.emplace_back(table.rows.empty() ? "number" : cell_type(table.rows.front()[j]));
    }
    meta["column_types"] = types;
    write_json(with_suffix(base, ".json"), meta);

    auto out = open_out(with_suffix(base, ".csv"));
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) throw InvalidArgument("save_results: row width mismatch");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::string>) {
                        if (v.find_first_of(",\n") != std::string::npos) {
                            throw InvalidArgument("save_results: string cell contains a separator");
                        }
                        out << v;
                    } else if constexpr (std::is_same_v<T, double>) {
                        out << format_double(v);
                    } else {
                        out << v;
                    }
                },
                row[j]);
        }
        out << '\n';
    }
}

ResultTable load_results(const std::filesystem::path& base) {
    ResultTable table;
    table.metadata = read_json(with_suffix(base, ".json"));
    table.columns = table.metadata.at("columns").get<std::vector<std::string>>();
    const auto types = table.metadata.at("column_types").get<std::vector<std::string>>();
    table.metadata.erase("columns");
    table.metadata.erase("column_types");

    auto in = open_in(with_suffix(base, ".csv"));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != table.columns.size()) throw ParseError(line_no, "ragged results row");
        std::vector<Cell> row;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (types[j] == "integer") {
                long long v = 0;
                if (!parse_integer(cells[j], v)) throw ParseError(line_no, "expected an integer in " + table.columns[j]);
                row.emplace_back(static_cast<std::int64_t>(v));
            } else if (types[j] == "number") {
                double v = 0.0;
                if (!parse_number(cells[j], v)) throw ParseError(line_no, "expected a number in " + table.columns[j]);
                row.emplace_back(v);
            } else {
                row.emplace_back(cells[j]);
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("parse_error", path.string() + ": " + e.what());
    }
}

}  // namespace spinor
