#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "hirota/types.hpp"

namespace hirota {

// Fixed 17-significant-digit decimal formatting; identical configs must
// produce byte-identical files.
std::string format_g17(double x);
std::string json_escape(const std::string& s);

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& s);

// Flat table with a frozen column order, serializable as CSV (with a schema
// comment line and a header row) or as {config, schema_version, rows} JSON.
struct DataTable {
  std::string schema;                                     // e.g. "hirota.wedge-scan.v1"
  std::vector<std::pair<std::string, std::string>> config;  // emitted in order
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;             // cells pre-formatted

  void add_row(std::vector<std::string> cells);
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
  void write(std::ostream& os, OutputFormat fmt) const;
};

// Cell helpers.
std::string cell(double x);
std::string cell(int x);
std::string cell(bool x);
std::string cell(cx z);  // "re+imj" textual form used in CSV cells

}  // namespace hirota
