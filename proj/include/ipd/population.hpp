#pragma once

#include <map>
#include <string>
#include <vector>

namespace ipd {

// Integer counts per strategy over a fixed strategy universe. Strategies with
// a zero count stay in the map so consecutive phases share one universe.
struct Population {
  std::map<std::string, int> counts;

  int total() const;
  int count(const std::string& id) const;
  // Strategies with a nonzero count.
  std::vector<std::string> present() const;

  bool operator==(const Population&) const = default;
};

// One agent instance: strategy plus copy index (1-based).
struct AgentSlot {
  std::string strategy;
  int copy = 1;

  std::string id() const { return strategy + "#" + std::to_string(copy); }
};

// Instances ordered by strategy id, then copy index.
std::vector<AgentSlot> expand(const Population& population);

}  // namespace ipd
