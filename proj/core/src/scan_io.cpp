#include "hirota/scan_io.hpp"

#include <cstdio>

namespace hirota {

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

OutputFormat parse_output_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw ValidationError("unknown output format '" + s + "' (expected csv or json)");
}

void DataTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size()) {
    throw ValidationError("DataTable: row width does not match the column schema");
  }
  rows.push_back(std::move(cells));
}

void DataTable::write_csv(std::ostream& os) const {
  // data only after the schema line; run configuration lives in the JSON form
  os << "# schema=" << schema << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
  }
}

void DataTable::write_json(std::ostream& os) const {
  os << "{\n  \"schema_version\": \"" << json_escape(schema) << "\",\n  \"config\": {";
  for (std::size_t i = 0; i < config.size(); ++i) {
    os << (i ? ", " : "") << "\"" << json_escape(config[i].first) << "\": \""
       << json_escape(config[i].second) << "\"";
  }
  os << "},\n  \"rows\": [\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << "    {";
    for (std::size_t i = 0; i < columns.size(); ++i) {
      os << (i ? ", " : "") << "\"" << json_escape(columns[i]) << "\": \""
         << json_escape(rows[r][i]) << "\"";
    }
    os << "}" << (r + 1 < rows.size() ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
}

void DataTable::write(std::ostream& os, OutputFormat fmt) const {
  if (fmt == OutputFormat::Csv)
    write_csv(os);
  else
    write_json(os);
}

std::string cell(double x) { return format_g17(x); }
std::string cell(int x) { return std::to_string(x); }
std::string cell(bool x) { return x ? "1" : "0"; }
std::string cell(cx z) {
  return format_g17(z.real()) + (z.imag() < 0 ? "-" : "+") + format_g17(std::abs(z.imag())) + "j";
}

}  // namespace hirota
