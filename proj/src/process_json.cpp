#include "psr/process_json.hpp"

#include <array>
#include <fstream>
#include <string_view>

#include "psr/errors.hpp"

namespace psr {

namespace {

constexpr std::array<std::string_view, 6> kKeys = {"family", "mu", "sigma", "c", "eta",
                                                   "jump_rate"};

double number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw DomainError(std::string("model field '") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

ProcessSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("model must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto k : kKeys) known = known || key == k;
    if (!known) throw DomainError("unknown model field '" + key + "'");
  }
  if (!j.contains("family") || !j.at("family").is_string())
    throw DomainError("model field 'family' missing");
  const auto fam = j.at("family").get<std::string>();
  ProcessSpec s;
  if (fam == "bm") {
    s.family = Family::BrownianDrift;
  } else if (fam == "cl") {
    s.family = Family::CramerLundbergExp;
  } else {
    throw DomainError("model family must be \"bm\" or \"cl\"");
  }
  s.mu = number(j, "mu", 0.0);
  s.sigma = number(j, "sigma", 1.0);
  s.c = number(j, "c", 1.0);
  s.eta = number(j, "eta", 0.0);
  s.jump_mean_inv = number(j, "jump_rate", 1.0);
  s.validate();
  return s;
}

nlohmann::json spec_to_json(const ProcessSpec& spec) {
  if (spec.family == Family::BrownianDrift)
    return {{"family", "bm"}, {"mu", spec.mu}, {"sigma", spec.sigma}};
  return {{"family", "cl"}, {"c", spec.c}, {"eta", spec.eta}, {"jump_rate", spec.jump_mean_inv}};
}

ProcessSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("model file '" + path + "': " + e.what());
  }
  return spec_from_json(j);
}

}  // namespace psr
