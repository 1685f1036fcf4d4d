#include <froth/io.hpp>

#include <cstdio>
#include <fstream>

#include <froth/errors.hpp>

namespace froth {

std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const nlohmann::json& config) { return fnv1a_hex(config.dump()); }

CsvWriter::CsvWriter(std::vector<std::string> columns, std::string hash)
    : ncol_(columns.size()) {
  if (!hash.empty()) out_ += "# config_hash " + hash + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ += ',';
    out_ += columns[i];
  }
  out_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncol_) throw ValueError("csv row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ += ',';
    out_ += format17(values[i]);
  }
  out_ += '\n';
}

void CsvWriter::save(const std::string& path) const { write_text(path, out_); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  f << text;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace froth
