#include "ssmean/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "ssmean/error.hpp"
#include "ssmean/report.hpp"

namespace ssmean {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

bool parse_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Reads every data row; numeric failures are gathered into one ParseError.
RawTable read_table(std::istream& in) {
    RawTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
            line.erase(0, 3);
        }
        if (!trim(line).empty()) {
            t.header = split_line(line);
            have_header = true;
            break;
        }
    }
    if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");

    std::ostringstream problems;
    std::size_t bad = 0;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row_number;
        const std::vector<std::string> cells = split_line(line);
        std::vector<double> values(t.header.size(), 0.0);
        for (std::size_t c = 0; c < t.header.size(); ++c) {
            if (c >= cells.size() || !parse_double(cells[c], values[c])) {
                if (bad++ < 20) {
                    problems << (bad > 1 ? "; " : "") << "row " << row_number << ", column "
                             << t.header[c];
                }
            }
        }
        if (cells.size() > t.header.size()) {
            if (bad++ < 20) problems << (bad > 1 ? "; " : "") << "row " << row_number << ", extra cells";
        }
        t.rows.push_back(std::move(values));
    }
    if (bad > 0) {
        if (bad > 20) problems << "; and " << (bad - 20) << " more";
        throw Error(ErrorCode::ParseError, problems.str());
    }
    return t;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - header.begin());
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

LabeledTable parse_labeled_csv(std::istream& in, const std::string& response) {
    const RawTable raw = read_table(in);
    const std::size_t yc = column_index(raw.header, response);
    if (raw.rows.empty()) throw Error(ErrorCode::EmptyFile, "labeled file has no data rows");

    LabeledTable t;
    t.response = response;
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
        if (c == yc) continue;
        t.covariates.push_back(raw.header[c]);
        cols.push_back(c);
    }
    t.x = Matrix(raw.rows.size(), cols.size());
    t.y.reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        t.y.push_back(raw.rows[r][yc]);
        for (std::size_t j = 0; j < cols.size(); ++j) t.x(r, j) = raw.rows[r][cols[j]];
    }
    return t;
}

LabeledTable load_labeled_csv(const std::filesystem::path& path, const std::string& response) {
    std::ifstream in = open(path);
    return parse_labeled_csv(in, response);
}

Matrix parse_unlabeled_csv(std::istream& in, const std::vector<std::string>& expected) {
    const RawTable raw = read_table(in);
    const std::set<std::string> have(raw.header.begin(), raw.header.end());
    const std::set<std::string> want(expected.begin(), expected.end());
    if (have != want || have.size() != raw.header.size()) {
        std::vector<std::string> diff;
        std::set_symmetric_difference(have.begin(), have.end(), want.begin(), want.end(),
                                      std::back_inserter(diff));
        std::string msg = "unlabeled columns differ from labeled covariates:";
        for (const auto& d : diff) msg += " " + d;
        if (diff.empty()) msg += " duplicate column names";
        throw Error(ErrorCode::ColumnMismatch, msg);
    }
    std::vector<std::size_t> cols;
    for (const auto& name : expected) cols.push_back(column_index(raw.header, name));
    Matrix x(raw.rows.size(), expected.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        for (std::size_t j = 0; j < cols.size(); ++j) x(r, j) = raw.rows[r][cols[j]];
    }
    return x;
}

Matrix load_unlabeled_csv(const std::filesystem::path& path, const std::vector<std::string>& expected) {
    std::ifstream in = open(path);
    return parse_unlabeled_csv(in, expected);
}

void write_labeled_csv(std::ostream& out, const LabeledTable& table) {
    out << table.response;
    for (const auto& name : table.covariates) out << ',' << name;
    out << '\n';
    for (std::size_t r = 0; r < table.y.size(); ++r) {
        out << format_full(table.y[r]);
        for (double v : table.x.row(r)) out << ',' << format_full(v);
        out << '\n';
    }
}

void write_unlabeled_csv(std::ostream& out, const Matrix& x, const std::vector<std::string>& names) {
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_full(row[j]);
        out << '\n';
    }
}

Vector parse_number_list(const std::string& text) {
    Vector out;
    std::size_t index = 0;
    for (const std::string& cell : split_line(text)) {
        ++index;
        double v = 0.0;
        if (!parse_double(cell, v)) {
            throw Error(ErrorCode::ParseError, "entry " + std::to_string(index) + " ('" + cell +
                                                   "') is not a finite number");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace ssmean
