#include "topogcn/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "topogcn/dataset.hpp"

namespace topogcn {

std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

void write_row(std::ostream &out, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << cells[i];
    }
    out << '\n';
}

} // namespace

void CsvTable::write(std::ostream &out) const {
    write_row(out, header);
    for (const auto &r : rows) {
        write_row(out, r);
    }
}

void CsvTable::save(const std::filesystem::path &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    write(out);
    if (!out) {
        throw DataError("write failed for " + path.string());
    }
}

CsvTable CsvTable::load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
        } else if (cells.size() != t.header.size()) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(t.header.size()) + " cells");
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty()) {
        throw DataError(path.string() + ": empty CSV");
    }
    return t;
}

CsvTable feature_csv(const FeatureTable &table, const std::vector<std::string> &node_ids) {
    CsvTable csv;
    csv.header.push_back("node_id");
    for (const auto &c : table.columns()) {
        csv.header.push_back(c.name);
    }
    csv.rows.resize(table.n_nodes());
    for (std::size_t u = 0; u < table.n_nodes(); ++u) {
        auto &row = csv.rows[u];
        row.reserve(csv.header.size());
        row.push_back(node_ids.at(u));
        for (const auto &c : table.columns()) {
            row.push_back(format_number(c.values[u]));
        }
    }
    return csv;
}

FeatureTable feature_table_from_csv(const CsvTable &csv, std::vector<std::string> &node_ids) {
    if (csv.header.empty() || csv.header.front() != "node_id") {
        throw DataError("feature CSV must start with a node_id column");
    }
    FeatureTable table(csv.rows.size());
    node_ids.clear();
    for (const auto &row : csv.rows) {
        node_ids.push_back(row.front());
    }
    for (std::size_t k = 1; k < csv.header.size(); ++k) {
        Column values(csv.rows.size());
        for (std::size_t u = 0; u < csv.rows.size(); ++u) {
            const auto &cell = csv.rows[u][k];
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), values[u]);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw DataError("feature CSV: bad number `" + cell + "` in column " + csv.header[k]);
            }
        }
        table.add(csv.header[k], std::move(values));
    }
    return table;
}

CsvTable matrix_csv(const DenseMatrix &m, const std::vector<std::string> &node_ids,
                    const std::vector<std::string> &column_names) {
    CsvTable csv;
    csv.header.push_back("node_id");
    csv.header.insert(csv.header.end(), column_names.begin(), column_names.end());
    if (column_names.size() != m.cols()) {
        throw ShapeError("matrix_csv: " + std::to_string(column_names.size()) + " names for " +
                         std::to_string(m.cols()) + " columns");
    }
    csv.rows.resize(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto &row = csv.rows[r];
        row.push_back(node_ids.at(r));
        for (double v : m.row(r)) {
            row.push_back(format_number(v));
        }
    }
    return csv;
}

} // namespace topogcn
