#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ipd::csv {

// RFC 4180: fields containing a comma, quote, CR or LF are quoted, quotes doubled.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Reads one record (possibly spanning lines inside quotes). Returns false at EOF.
bool read_row(std::istream& in, std::vector<std::string>& fields);

// A file read as header + rows, with lookup by column name.
class Table {
 public:
  static Table read(const std::string& path);
  static Table parse(std::istream& in, const std::string& source = "<stream>");

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  bool has(const std::string& column) const { return index_.count(column) != 0; }
  const std::string& at(std::size_t row, const std::string& column) const;
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ipd::csv
