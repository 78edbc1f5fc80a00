#include "ipd/population.hpp"

namespace ipd {

int Population::total() const {
  int sum = 0;
  for (const auto& [id, n] : counts) sum += n;
  return sum;
}

int Population::count(const std::string& id) const {
  auto it = counts.find(id);
  return it == counts.end() ? 0 : it->second;
}

std::vector<std::string> Population::present() const {
  std::vector<std::string> out;
  for (const auto& [id, n] : counts) {
    if (n > 0) out.push_back(id);
  }
  return out;
}

std::vector<AgentSlot> expand(const Population& population) {
  std::vector<AgentSlot> slots;
  for (const auto& [id, n] : population.counts) {
    for (int copy = 1; copy <= n; ++copy) slots.push_back({id, copy});
  }
  return slots;
}

}  // namespace ipd
