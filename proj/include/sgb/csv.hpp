#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sgb/queryfront.hpp"

namespace sgb {

/// CSV ingestion failure; line is 1-based (0 when the file cannot be opened).
struct CsvError : std::runtime_error {
    CsvError(std::size_t line, const std::string& message);
    std::size_t line;
};

/// Reads a comma-delimited, header-first CSV with '.' decimal points. Every
/// cell must be a finite number. Throws CsvError with the offending line.
query::Table read_csv(std::istream& in);
query::Table read_csv_file(const std::string& path);

}  // namespace sgb
