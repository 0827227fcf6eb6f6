#include "wfprov/model/errors.hpp"

namespace wfprov {

namespace {

std::string describe_cycle(const std::vector<std::string>& cycle) {
  std::string out = "dependency cycle: [";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += ", ";
    out += cycle[i];
  }
  return out + "]";
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error(describe_cycle(cycle)), cycle_(std::move(cycle)) {}

}  // namespace wfprov
