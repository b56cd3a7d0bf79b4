#include "csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace hlppl::csv {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view text, bool& ok) {
    // strtod rather than from_chars: libstdc++ 11 lacks floating from_chars everywhere.
    const std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    ok = !s.empty() && end == s.c_str() + s.size() && std::isfinite(v);
    return v;
}

Table::Table(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {
    std::string header;
    while (std::getline(in_, header)) {
        ++line_;
        if (!trim(header).empty()) break;
    }
    if (trim(header).empty()) fail(ErrorKind::parse, source_ + ": missing header row");
    const auto names = split(header);
    for (std::size_t i = 0; i < names.size(); ++i) index_[names[i]] = i;
}

bool Table::next() {
    std::string row;
    while (std::getline(in_, row)) {
        ++line_;
        if (trim(row).empty()) continue;
        fields_ = split(row);
        if (fields_.size() != index_.size()) {
            error("expected " + std::to_string(index_.size()) + " fields, found " +
                  std::to_string(fields_.size()));
        }
        return true;
    }
    return false;
}

void Table::require(std::initializer_list<const char*> columns) const {
    for (const char* c : columns) {
        if (!has(c)) fail(ErrorKind::parse, source_ + ": missing required column '" + c + "'");
    }
}

void Table::error(const std::string& what) const {
    fail(ErrorKind::parse, source_ + ":" + std::to_string(line_) + ": " + what);
}

const std::string& Table::text(const std::string& column) const {
    const auto it = index_.find(column);
    if (it == index_.end()) error("missing column '" + column + "'");
    return fields_[it->second];
}

std::optional<std::string> Table::optional_text(const std::string& column) const {
    const auto it = index_.find(column);
    if (it == index_.end() || fields_[it->second].empty()) return std::nullopt;
    return fields_[it->second];
}

double Table::number(const std::string& column) const {
    const auto& t = text(column);
    bool ok = false;
    const double v = parse_double(t, ok);
    if (!ok) error("column '" + column + "': not a number: '" + t + "'");
    return v;
}

std::optional<double> Table::optional_number(const std::string& column) const {
    const auto t = optional_text(column);
    if (!t) return std::nullopt;
    return number(column);
}

long long Table::integer(const std::string& column) const {
    const auto& t = text(column);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        error("column '" + column + "': not an integer: '" + t + "'");
    }
    return v;
}

}  // namespace hlppl::csv
