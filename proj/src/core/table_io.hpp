#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace railenv::tableio {

/// Shortest decimal representation that parses back to the same double.
std::string fmt(double v);

/// Strict double parse; empty string is an error.
double parse_double(const std::string& field, const std::string& context);
long parse_long(const std::string& field, const std::string& context);

std::vector<std::string> split_csv(const std::string& line);
std::string join_csv(const std::vector<std::string>& fields);

/// CSV file with optional leading `# key=value` comment lines and a header row.
class CsvReader {
  public:
    CsvReader(const std::string& path, const std::string& expected_header);

    /// nullopt at end of file. Field count is validated against the header.
    std::optional<std::vector<std::string>> next_row();

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::pair<std::string, std::string>>& comments() const { return comments_; }
    size_t line_number() const { return line_number_; }

  private:
    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::vector<std::pair<std::string, std::string>> comments_;
    size_t line_number_ = 0;
};

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& key, const std::string& value);
    void header(const std::string& header_line);
    void row(const std::vector<std::string>& fields);

  private:
    std::ofstream out_;
    std::string path_;
    bool header_written_ = false;
};

/// Read first line of a file (for format sniffing).
std::string first_line(const std::string& path);

}  // namespace railenv::tableio
