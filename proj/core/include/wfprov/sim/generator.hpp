#pragma once

#include "wfprov/sim/config.hpp"
#include "wfprov/sim/ground_truth.hpp"

namespace wfprov::sim {

/// Pod name for a task: lower-cased, `_` -> `-`, plus a 13-hex-digit suffix.
std::string pod_name(const TaskId& task, std::uint64_t suffix);

/// Simulates one workflow run. Deterministic for a given config (seed
/// included). Throws ValidationError for an invalid spec or a failure plan
/// naming unknown tasks or nodes.
GroundTruth generate(const SimConfig& config);

}  // namespace wfprov::sim
