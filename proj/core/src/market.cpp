#include "trailnet/market.hpp"

#include "trailnet/error.hpp"

namespace trailnet {

Market::Market(ContractNetwork net, std::vector<ChoiceFunction> cfs,
               std::vector<std::optional<ChoiceSpec>> specs)
    : net_(std::move(net)), cfs_(std::move(cfs)), specs_(std::move(specs)) {
  if (cfs_.size() != net_.agent_count())
    throw InputError("expected " + std::to_string(net_.agent_count()) +
                     " choice functions, got " + std::to_string(cfs_.size()));
  if (specs_.empty()) specs_.resize(cfs_.size());
  if (specs_.size() != cfs_.size()) throw InputError("spec list does not match agents");
  for (AgentIndex f = 0; f < cfs_.size(); ++f) {
    const auto& cf = cfs_[f];
    if (cf.agent() != f || cf.upstream() != net_.upstream(f) ||
        cf.downstream() != net_.downstream(f))
      throw InputError("choice function for agent '" + net_.agents()[f] +
                       "' does not match the network");
  }
}

Market Market::from_specs(ContractNetwork net, std::vector<ChoiceSpec> specs) {
  if (specs.size() != net.agent_count())
    throw InputError("expected one choice function per agent");
  std::vector<ChoiceFunction> cfs;
  std::vector<std::optional<ChoiceSpec>> kept;
  for (AgentIndex f = 0; f < specs.size(); ++f) {
    cfs.push_back(build_choice(net, f, specs[f]));
    kept.emplace_back(std::move(specs[f]));
  }
  return Market(std::move(net), std::move(cfs), std::move(kept));
}

Market::Rejections Market::rejections(ContractSet y, ContractSet z) const {
  Rejections out;
  for (const auto& cf : cfs_) {
    const ContractSet up = y & cf.upstream();
    const ContractSet down = z & cf.downstream();
    if (up.empty() && down.empty()) continue;
    const ContractSet chosen = cf.choose(up | down);
    out.upstream |= up - chosen;
    out.downstream |= down - chosen;
  }
  return out;
}

}  // namespace trailnet
