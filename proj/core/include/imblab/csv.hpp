#pragma once

#include <string>
#include <vector>

#include "imblab/time_series.hpp"

namespace imblab {

/// Reads a time-series CSV: header `timestamp,<name>[,<name>...]`, column 1
/// ISO-8601 UTC at uniform spacing, remaining columns numeric MW (empty cell
/// = missing). Returns one series per value column, in header order.
///
/// Errors (all imblab::Error, naming the offending row/column): non-uniform
/// or duplicate timestamps, unparsable numbers, fewer than 2 rows.
std::vector<TimeSeries> parse_csv(const std::string& path);

/// Subset of parse_csv: only the columns named in `schema`, in that order.
std::vector<TimeSeries> parse_csv(const std::string& path, const std::vector<std::string>& schema);

/// Writes series sharing one grid (same start/step/length) as a CSV that
/// parse_csv round-trips exactly, including missing markers (empty cells).
/// Values use shortest round-trip formatting.
void write_csv(const std::string& path, const std::vector<TimeSeries>& columns);

/// Reads a plain sample file: one number per line, blank lines and lines
/// starting with '#' skipped; an optional single non-numeric header line is
/// tolerated. Used for user-supplied forecast-error samples.
std::vector<double> read_samples(const std::string& path);

/// Shortest representation that parses back to exactly the same double.
std::string format_double(double v);

} // namespace imblab
