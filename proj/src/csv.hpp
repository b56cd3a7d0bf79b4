#pragma once

// Minimal comma-separated reader shared by the loaders. No quoting: none of the
// formats carry commas inside fields.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hlppl/error.hpp"

namespace hlppl::csv {

std::vector<std::string> split(std::string_view line);
std::string trim(std::string_view s);

class Table {
public:
    /// Reads the header line. Throws Error(parse) on an empty stream.
    Table(std::istream& in, std::string source);

    /// Next non-blank data row; false at end of input.
    bool next();
    std::size_t line() const noexcept { return line_; }
    const std::string& source() const noexcept { return source_; }

    bool has(const std::string& column) const { return index_.count(column) != 0; }
    void require(std::initializer_list<const char*> columns) const;

    const std::string& text(const std::string& column) const;
    std::optional<std::string> optional_text(const std::string& column) const;
    double number(const std::string& column) const;
    std::optional<double> optional_number(const std::string& column) const;
    long long integer(const std::string& column) const;

    [[noreturn]] void error(const std::string& what) const;

private:
    std::istream& in_;
    std::string source_;
    std::size_t line_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> fields_;
};

double parse_double(std::string_view text, bool& ok);

}  // namespace hlppl::csv
