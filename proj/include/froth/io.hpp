#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace froth {

// 17 significant digits, scientific notation. Round-trips every double.
std::string format17(double v);

// FNV-1a 64-bit of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

// Hash of the canonical (sorted-key, compact) dump of a config document.
std::string config_hash(const nlohmann::json& config);

class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> columns, std::string hash = {});
  void row(const std::vector<double>& values);
  std::string str() const { return out_; }
  void save(const std::string& path) const;

 private:
  std::size_t ncol_;
  std::string out_;
};

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace froth
