#include "him/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace him {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trimmed(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    std::size_t last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trimmed(text);
    if (t.empty()) {
        return false;
    }
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

DataMatrix read_csv(const std::string& path, const std::string& response_column) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("read_csv: cannot open " + path);
    }
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool saw_first = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) {
            continue;
        }
        const std::vector<std::string> cells = split_line(line);
        if (!saw_first) {
            saw_first = true;
            width = cells.size();
            bool all_numeric = true;
            double ignored;
            for (const std::string& cell : cells) {
                if (!parse_double(cell, ignored)) {
                    all_numeric = false;
                    break;
                }
            }
            if (!all_numeric) {
                for (const std::string& cell : cells) {
                    header.push_back(trimmed(cell));
                }
                continue;
            }
        }
        if (cells.size() != width) {
            throw ParseError("read_csv: line " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(width),
                             line_no);
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            double value;
            if (!parse_double(cells[c], value)) {
                throw ParseError("read_csv: non-numeric cell at line " +
                                     std::to_string(line_no) + ", column " + std::to_string(c),
                                 line_no, static_cast<std::ptrdiff_t>(c));
            }
            if (!std::isfinite(value)) {
                throw ParseError("read_csv: non-finite cell at line " +
                                     std::to_string(line_no) + ", column " + std::to_string(c),
                                 line_no, static_cast<std::ptrdiff_t>(c));
            }
            row[c] = value;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("read_csv: no data rows in " + path, line_no);
    }
    if (width < 2) {
        throw ConfigError("read_csv: need a response column and at least one predictor");
    }

    // Resolve the response column: by name against the header, else by index.
    std::size_t response = width;
    if (!header.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == response_column) {
                response = c;
                break;
            }
        }
    }
    if (response == width) {
        std::size_t idx = 0;
        const char* begin = response_column.data();
        const char* end = begin + response_column.size();
        auto [ptr, ec] = std::from_chars(begin, end, idx);
        if (ec == std::errc() && ptr == end && idx < width) {
            response = idx;
        }
    }
    if (response == width) {
        throw ConfigError("read_csv: response column '" + response_column + "' not found");
    }

    const std::size_t n = rows.size();
    const std::size_t p = width - 1;
    std::vector<double> x(n * p);
    std::vector<double> y(n);
    std::vector<std::string> names;
    for (std::size_t c = 0, out = 0; c < width; ++c) {
        if (c == response) continue;
        if (!header.empty()) {
            names.push_back(header[c]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            x[out * n + i] = rows[i][c];
        }
        ++out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rows[i][response];
    }
    return DataMatrix(n, p, std::move(x), std::move(y), std::move(names));
}

void write_csv(const std::string& path, const DataMatrix& data,
               const std::string& response_name) {
    std::string out = response_name;
    const auto& names = data.column_names();
    for (std::size_t j = 0; j < data.n_cols(); ++j) {
        out += ',';
        out += names.empty() ? "x" + std::to_string(j) : names[j];
    }
    out += '\n';
    char buffer[64];
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", data.y()[i]);
        out += buffer;
        for (std::size_t j = 0; j < data.n_cols(); ++j) {
            std::snprintf(buffer, sizeof(buffer), ",%.17g", data.x(i, j));
            out += buffer;
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigError("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw ConfigError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace him
