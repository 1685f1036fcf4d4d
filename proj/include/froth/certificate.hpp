#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace froth {

struct Certificate {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> params;
  bool pass = false;

  double param(const std::string& key) const;
};

nlohmann::json to_json(const Certificate& c);

}  // namespace froth
