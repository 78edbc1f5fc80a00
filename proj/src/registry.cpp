#include "ipd/registry.hpp"

#include "ipd/classic.hpp"
#include "ipd/errors.hpp"

namespace ipd {

StrategyRegistry StrategyRegistry::with_classics() {
  StrategyRegistry registry;
  for (Classic c : kAllClassics) {
    registry.add({std::string(name(c)), std::string(abbreviation(c)), false,
                  [c](const AgentContext& ctx) { return make_classic(c, ctx.seed, ctx.matrix); }});
  }
  return registry;
}

void StrategyRegistry::add(StrategyInfo info) {
  if (info.id.empty()) throw ConfigError("strategy id must not be empty");
  if (info.abbreviation.empty()) info.abbreviation = info.id;
  for (const auto& [id, existing] : entries_) {
    if (id != info.id && (existing.abbreviation == info.abbreviation ||
                          existing.abbreviation == info.id || id == info.abbreviation)) {
      throw ConfigError("strategy name '" + info.id + "' / '" + info.abbreviation +
                        "' collides with '" + id + "'");
    }
  }
  std::string key = info.id;
  entries_.insert_or_assign(std::move(key), std::move(info));
}

bool StrategyRegistry::contains(const std::string& id) const { return entries_.count(id) != 0; }

const StrategyInfo& StrategyRegistry::info(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw ConfigError("unknown strategy '" + id + "'");
  return it->second;
}

std::string StrategyRegistry::resolve(const std::string& name) const {
  if (entries_.count(name)) return name;
  for (const auto& [id, entry] : entries_) {
    if (entry.abbreviation == name) return id;
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

std::unique_ptr<Agent> StrategyRegistry::create(const std::string& id, const AgentContext& ctx) const {
  return info(id).factory(ctx);
}

std::vector<std::string> StrategyRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, entry] : entries_) out.push_back(id);
  return out;
}

}  // namespace ipd
