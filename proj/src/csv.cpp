#include "sgb/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sgb {

CsvError::CsvError(std::size_t line_no, const std::string& message)
    : std::runtime_error("csv error at line " + std::to_string(line_no) + ": " +
                         message),
      line(line_no) {}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

query::Table read_csv(std::istream& in) {
    query::Table table;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw CsvError(1, "missing header row");
    ++line_no;
    for (const auto& field : split_fields(line)) {
        const std::string name = trim(field);
        if (name.empty()) throw CsvError(line_no, "empty column name");
        table.columns.push_back(name);
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;  // tolerate a trailing blank line
        const auto fields = split_fields(line);
        if (fields.size() != table.columns.size())
            throw CsvError(line_no, "expected " +
                                        std::to_string(table.columns.size()) +
                                        " fields, found " +
                                        std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& field : fields) {
            const std::string text = trim(field);
            if (text.empty()) throw CsvError(line_no, "empty numeric field");
            char* end = nullptr;
            const double v = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size())
                throw CsvError(line_no, "not a number: '" + text + "'");
            if (!std::isfinite(v))
                throw CsvError(line_no, "non-finite value: '" + text + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

query::Table read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError(0, "cannot open " + path);
    return read_csv(in);
}

}  // namespace sgb
