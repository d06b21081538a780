#pragma once

#include <string>
#include <vector>

namespace mc::demos {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// name ∈ {toymap, graphtransform, gronwall}; anything else throws ConfigError.
std::vector<Check> run(const std::string& name);

std::vector<Check> toymap();
std::vector<Check> graphtransform();
std::vector<Check> gronwall();

}  // namespace mc::demos
