#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddikg::csv {

using Row = std::vector<std::string>;

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Returns std::nullopt at end of input. Blank lines are skipped.
    std::optional<Row> next();

    // Line on which the most recently returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
    std::size_t record_line_ = 0;
};

struct Table {
    Row header;
    std::vector<Row> rows;
    std::vector<std::size_t> lines;  // source line of each row

    std::optional<std::size_t> column(std::string_view name) const;
};

// Reads a file whose first record is a header. Every row must have header.size() fields.
Table read_table(const std::filesystem::path& path);
Table read_table(std::istream& in);

// Verifies that `table.header` starts with exactly `expected` (extra columns are not allowed).
void require_header(const Table& table, const std::vector<std::string>& expected, const std::string& what);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

} // namespace ddikg::csv
