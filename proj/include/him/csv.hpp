#pragma once

#include <string>

#include "him/types.hpp"

namespace him {

// Reads a rectangular numeric CSV into a DataMatrix. A header row is
// detected by a non-numeric first line. The response column is picked by
// header name, or by zero-based index when the text parses as an integer
// (always by index for headerless files); the remaining columns become x in
// file order. Ragged rows, empty or non-numeric cells, and non-finite values
// raise ParseError with the offending line (1-based) and column.
DataMatrix read_csv(const std::string& path, const std::string& response_column);

// Writes x and y back out with full double fidelity (round-trips exactly).
// The response column is written first, as "y" when no names are present.
void write_csv(const std::string& path, const DataMatrix& data,
               const std::string& response_name = "y");

// Writes content to path atomically (temp file in the same directory, then
// rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace him
