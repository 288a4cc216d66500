#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vlprobe/backends/backend.hpp"
#include "vlprobe/synthesis/composite.hpp"
#include "vlprobe/synthesis/inpaint_plan.hpp"
#include "vlprobe/synthesis/layout.hpp"
#include "vlprobe/synthesis/probe.hpp"

namespace vlprobe {

struct SynthesisOptions {
  ProbeOptions probe;
  std::uint64_t root_seed = 0;
  int max_attempts = 8;
};

/// One finished candidate set with everything needed to audit it.
struct SynthesizedCase {
  AttributeProbe probe;
  std::vector<CanvasLayout> layouts;
  std::vector<std::string> captions;
  InpaintPlan plan;
  CandidateImages candidates;
};

/// Runs probe → layouts → composites → inpaint plan → execution for one case.
/// Infeasible probes are retried with a fresh attempt seed up to
/// `max_attempts` times before InfeasibleError propagates.
SynthesizedCase synthesize_case(SubsetKind subset, std::uint64_t case_index, const SynthesisOptions& opts,
                                const SpriteLibrary& sprites, Backend& backend);

/// Consistency violations of a synthesized case (empty when consistent).
std::vector<std::string> check_case(const SynthesizedCase& c, const SpriteLibrary& sprites);

}  // namespace vlprobe
