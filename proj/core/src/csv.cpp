#include "imblab/csv.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "imblab/error.hpp"

namespace imblab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    if (cell.empty()) return kMissing;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        fail("row ", row, ", column '", column, "': unparsable number '", cell, "'");
    return value;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc{}, "value formatting failed");
    return std::string(buf, ptr);
}

std::vector<TimeSeries> parse_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open CSV file '", path, "'");

    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "'", path, "': empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_fields(line);
    require(header.size() >= 2, "'", path, "': header must be timestamp,<name>[,...]");
    require(header[0] == "timestamp", "'", path, "': first column must be 'timestamp', got '",
            header[0], "'");
    std::unordered_set<std::string> seen;
    for (std::size_t c = 1; c < header.size(); ++c) {
        require(!header[c].empty(), "'", path, "': empty column name at position ", c);
        require(seen.insert(header[c]).second, "'", path, "': duplicate column '", header[c], "'");
    }

    const std::size_t n_cols = header.size() - 1;
    std::vector<std::vector<double>> columns(n_cols);
    std::vector<EpochSeconds> stamps;
    std::vector<std::size_t> file_rows;
    std::size_t row = 1; // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        require(fields.size() == header.size(), "'", path, "': row ", row, " has ",
                fields.size(), " fields, expected ", header.size());
        stamps.push_back(parse_timestamp_utc(fields[0]));
        file_rows.push_back(row);
        for (std::size_t c = 0; c < n_cols; ++c)
            columns[c].push_back(parse_cell(fields[c + 1], row, header[c + 1]));
    }
    require(stamps.size() >= 2, "'", path, "': need at least 2 rows to infer the step, got ",
            stamps.size());

    const std::int64_t step = stamps[1] - stamps[0];
    for (std::size_t i = 1; i < stamps.size(); ++i) {
        const std::int64_t d = stamps[i] - stamps[i - 1];
        if (d == 0)
            fail("'", path, "': duplicate timestamp ", format_timestamp_utc(stamps[i]),
                 " at row ", file_rows[i]);
        if (d != step || d < 0)
            fail("'", path, "': non-uniform timestamp spacing at row ", file_rows[i],
                 ": expected ", step, " s, got ", d, " s");
    }
    require(step > 0, "'", path, "': timestamps must increase");

    std::vector<TimeSeries> out;
    out.reserve(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c)
        out.emplace_back(stamps[0], step, std::move(columns[c]), header[c + 1]);
    return out;
}

std::vector<TimeSeries> parse_csv(const std::string& path, const std::vector<std::string>& schema) {
    std::vector<TimeSeries> all = parse_csv(path);
    std::vector<TimeSeries> out;
    out.reserve(schema.size());
    for (const std::string& name : schema) {
        bool found = false;
        for (const TimeSeries& s : all) {
            if (s.label() == name) {
                out.push_back(s);
                found = true;
                break;
            }
        }
        require(found, "'", path, "': no column named '", name, "'");
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<TimeSeries>& columns) {
    require(!columns.empty(), "write_csv: no columns");
    const TimeSeries& first = columns.front();
    for (const TimeSeries& s : columns) {
        require(s.start() == first.start() && s.step() == first.step() && s.size() == first.size(),
                "write_csv: column '", s.label(), "' is not on the same grid as '", first.label(),
                "'");
    }
    std::ofstream out(path);
    require(out.good(), "cannot open '", path, "' for writing");
    out << "timestamp";
    for (const TimeSeries& s : columns) out << ',' << s.label();
    out << '\n';
    for (std::size_t i = 0; i < first.size(); ++i) {
        out << format_timestamp_utc(first.timestamp(i));
        for (const TimeSeries& s : columns) {
            out << ',';
            if (!is_missing(s[i])) out << format_double(s[i]);
        }
        out << '\n';
    }
    require(out.good(), "write failed for '", path, "'");
}

std::vector<double> read_samples(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open sample file '", path, "'");
    std::vector<double> samples;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            if (row == 1) continue; // header line
            fail("'", path, "': row ", row, ": unparsable sample '", line, "'");
        }
        require(std::isfinite(value), "'", path, "': row ", row, ": non-finite sample");
        samples.push_back(value);
    }
    require(!samples.empty(), "'", path, "': no samples found");
    return samples;
}

} // namespace imblab
