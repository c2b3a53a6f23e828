#pragma once

// Tabular output: CSV with '#key=value' metadata lines and a JSON mirror.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qgt::sweep {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct Column {
  std::string name;
  bool flag = false;  // written as 0/1 in CSV, true/false in JSON
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;

  /// Throws std::invalid_argument if a row has the wrong width.
  void add_row(std::vector<double> row);
  std::size_t column(const std::string& name) const;
};

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

void write_csv(std::ostream& out, const Metadata& meta, const Table& table);
/// {"metadata": {...}, "rows": [{...}, ...]}; non-finite values become null.
void write_json(std::ostream& out, const Metadata& meta, const Table& table);

/// File variants; I/O failures throw std::runtime_error naming the path.
void save_csv(const std::string& path, const Metadata& meta, const Table& table);
void save_json(const std::string& path, const Metadata& meta, const Table& table);

}  // namespace qgt::sweep
