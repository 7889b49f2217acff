#include "ddikg/csv.hpp"

#include "ddikg/error.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace ddikg::csv {

std::optional<Row> Reader::next() {
    std::string line;
    while (true) {
        if (!std::getline(in_, line)) return std::nullopt;
        ++line_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) break;
    }
    record_line_ = line_;

    Row row;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (quoted) {
                // quoted field spans a newline
                std::string more;
                if (!std::getline(in_, more)) throw ParseError("unterminated quoted field", record_line_);
                ++line_;
                if (!more.empty() && more.back() == '\r') more.pop_back();
                field.push_back('\n');
                line = std::move(more);
                i = 0;
                continue;
            }
            row.push_back(std::move(field));
            break;
        }
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
        ++i;
    }
    return row;
}

std::optional<std::size_t> Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    return std::nullopt;
}

Table read_table(std::istream& in) {
    Reader reader(in);
    Table table;
    auto header = reader.next();
    if (!header) return table;
    table.header = std::move(*header);
    while (auto row = reader.next()) {
        if (row->size() != table.header.size())
            throw ParseError("expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(row->size()),
                             reader.line());
        table.rows.push_back(std::move(*row));
        table.lines.push_back(reader.line());
    }
    return table;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return read_table(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void require_header(const Table& table, const std::vector<std::string>& expected, const std::string& what) {
    if (table.header != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw ParseError(what + ": header must be `" + want + "`", 1);
    }
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

} // namespace ddikg::csv
