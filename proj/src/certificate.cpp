#include <froth/certificate.hpp>

#include <froth/errors.hpp>

namespace froth {

double Certificate::param(const std::string& key) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  throw ParameterError("certificate " + name + " has no parameter " + key);
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  return {{"name", c.name}, {"lhs", c.lhs},       {"rhs", c.rhs},
          {"slack", c.slack}, {"params", params}, {"pass", c.pass}};
}

}  // namespace froth
