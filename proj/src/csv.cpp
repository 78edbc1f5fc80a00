#include "ipd/csv.hpp"

#include <fstream>

#include "ipd/errors.hpp"

namespace ipd::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

bool read_row(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw SchemaMismatch("unterminated quoted CSV field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

Table Table::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse(in, path);
}

Table Table::parse(std::istream& in, const std::string& source) {
  Table t;
  t.source_ = source;
  if (!read_row(in, t.header_)) throw SchemaMismatch(source + ": empty CSV");
  if (!t.header_.empty() && t.header_[0].rfind("\xEF\xBB\xBF", 0) == 0) t.header_[0].erase(0, 3);
  for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_[t.header_[i]] = i;
  std::vector<std::string> fields;
  while (read_row(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != t.header_.size()) {
      throw SchemaMismatch(source + ": row " + std::to_string(t.rows_.size() + 1) + " has " +
                           std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(t.header_.size()));
    }
    t.rows_.push_back(fields);
  }
  return t;
}

const std::string& Table::at(std::size_t row, const std::string& column) const {
  auto it = index_.find(column);
  if (it == index_.end()) throw SchemaMismatch(source_ + ": missing column '" + column + "'");
  return rows_.at(row)[it->second];
}

}  // namespace ipd::csv
