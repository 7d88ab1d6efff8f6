#include "core/table_io.hpp"

#include <charconv>
#include <cstdlib>

#include "core/errors.hpp"

namespace railenv::tableio {

std::string fmt(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw_numeric("number formatting failed");
    return std::string(buf, ptr);
}

double parse_double(const std::string& field, const std::string& context) {
    if (field.empty()) throw_input("empty numeric field in " + context);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size()) throw_input("bad number '" + field + "' in " + context);
    return v;
}

long parse_long(const std::string& field, const std::string& context) {
    if (field.empty()) throw_input("empty integer field in " + context);
    const char* begin = field.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end != begin + field.size()) throw_input("bad integer '" + field + "' in " + context);
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) line.push_back(',');
        line += fields[i];
    }
    return line;
}

CsvReader::CsvReader(const std::string& path, const std::string& expected_header)
    : in_(path), path_(path) {
    if (!in_) throw_input("cannot open " + path);
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                while (!key.empty() && key.front() == ' ') key.erase(key.begin());
                comments_.emplace_back(key, line.substr(eq + 1));
            }
            continue;
        }
        header_ = split_csv(line);
        break;
    }
    if (header_.empty()) throw_input(path + ": missing header row");
    if (!expected_header.empty() && join_csv(header_) != expected_header)
        throw_input(path + ": unexpected header '" + join_csv(header_) + "', want '" +
                    expected_header + "'");
}

std::optional<std::vector<std::string>> CsvReader::next_row() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (fields.size() != header_.size())
            throw_input(path_ + ":" + std::to_string(line_number_) + ": expected " +
                        std::to_string(header_.size()) + " fields, got " +
                        std::to_string(fields.size()));
        return fields;
    }
    return std::nullopt;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw_input("cannot open " + path + " for writing");
}

void CsvWriter::comment(const std::string& key, const std::string& value) {
    out_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::header(const std::string& header_line) {
    out_ << header_line << "\n";
    header_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    out_ << join_csv(fields) << "\n";
}

std::string first_line(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_input("cannot open " + path);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace railenv::tableio
