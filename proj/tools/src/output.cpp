#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "streamdist_tools/experiments.hpp"
#include "streamdist_tools/version.hpp"

namespace streamdist::tools {

namespace {

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return format_double(std::get<double>(c));
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return json_string(*s);
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_double(*d) : "null";
  return cell_text(c);
}

}  // namespace

const char* version_string() { return STREAMDIST_TOOLS_VERSION; }

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: row width does not match header");
  rows.push_back(std::move(row));
}

std::string params_echo(const RunConfig& cfg) {
  std::ostringstream out;
  out << "subject=" << cfg.subject << ";trials=" << cfg.trials;
  for (const auto& [k, v] : cfg.params) out << ';' << k << '=' << v;
  return out.str();
}

void write_csv(std::ostream& out, const RunConfig& cfg, const Table& table) {
  out << "version,seed,params";
  for (const auto& c : table.columns) out << ',' << csv_escape(c);
  out << '\n';
  const std::string prefix =
      csv_escape(version_string()) + ',' + std::to_string(cfg.seed) + ',' + csv_escape(params_echo(cfg));
  for (const auto& row : table.rows) {
    out << prefix;
    for (const auto& c : row) out << ',' << csv_escape(cell_text(c));
    out << '\n';
  }
}

void write_json(std::ostream& out, const RunConfig& cfg, const Table& table) {
  out << "{\"version\":" << json_string(version_string()) << ",\"command\":" << json_string(cfg.command)
      << ",\"seed\":" << cfg.seed << ",\"params\":" << json_string(params_echo(cfg)) << ",\"rows\":[";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n" : "\n") << '{';
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out << ',';
      out << json_string(table.columns[c]) << ':' << json_cell(table.rows[r][c]);
    }
    out << '}';
  }
  out << "\n]}\n";
}

}  // namespace streamdist::tools
