#include "qgt/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace qgt::sweep {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("row has " + std::to_string(row.size()) + " values for " +
                                std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].name == name) return i;
  throw std::out_of_range("no column " + name);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Metadata& meta, const Table& table) {
  for (const auto& [k, v] : meta) out << '#' << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i].name;
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      if (table.columns[i].flag)
        out << (row[i] != 0.0 ? '1' : '0');
      else
        out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const Metadata& meta, const Table& table) {
  nlohmann::ordered_json doc;
  doc["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta) doc["metadata"][k] = v;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto& name = table.columns[i].name;
      if (table.columns[i].flag)
        obj[name] = row[i] != 0.0;
      else if (std::isfinite(row[i]))
        obj[name] = row[i];
      else
        obj[name] = nullptr;
    }
    doc["rows"].push_back(std::move(obj));
  }
  out << doc.dump(1) << '\n';
}

namespace {

template <class Writer>
void save(const std::string& path, Writer&& w) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  w(f);
  f.flush();
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace

void save_csv(const std::string& path, const Metadata& meta, const Table& table) {
  save(path, [&](std::ostream& o) { write_csv(o, meta, table); });
}

void save_json(const std::string& path, const Metadata& meta, const Table& table) {
  save(path, [&](std::ostream& o) { write_json(o, meta, table); });
}

}  // namespace qgt::sweep
