#include "vlprobe/synthesis/pipeline.hpp"

#include "vlprobe/core/error.hpp"
#include "vlprobe/semantics/captions.hpp"
#include "vlprobe/synthesis/consistency.hpp"

namespace vlprobe {

namespace {

std::vector<std::string> captions_for(const AttributeProbe& probe) {
  std::vector<std::string> out;
  for (int k = 0; k < subset_cardinality(probe.subset); ++k) {
    out.push_back(render_caption(probe.subset, label_at(probe.subset, k), probe.categories));
  }
  return out;
}

}  // namespace

SynthesizedCase synthesize_case(SubsetKind subset, std::uint64_t case_index, const SynthesisOptions& opts,
                                const SpriteLibrary& sprites, Backend& backend) {
  if (opts.max_attempts < 1) throw PreconditionError("max_attempts must be at least 1");
  std::string last;
  for (int attempt = 0; attempt < opts.max_attempts; ++attempt) {
    try {
      SynthesizedCase c;
      c.probe = make_probe(subset, case_index, opts.root_seed, static_cast<std::uint64_t>(attempt), sprites, opts.probe);
      c.layouts = plan_candidate_layouts(c.probe, sprites);
      std::vector<Composite> composites;
      for (const auto& l : c.layouts) composites.push_back(composite(l, sprites));
      c.plan = build_inpaint_plan(c.layouts, composites, c.probe, sprites);
      c.captions = captions_for(c.probe);
      c.candidates = execute_inpaint_plan(c.plan, backend);
      return c;
    } catch (const InfeasibleError& e) {
      last = e.what();
    }
  }
  throw InfeasibleError(std::string(to_string(subset)) + " case " + std::to_string(case_index) + " infeasible after " +
                        std::to_string(opts.max_attempts) + " attempts: " + last);
}

std::vector<std::string> check_case(const SynthesizedCase& c, const SpriteLibrary& sprites) {
  auto issues = check_fixed_placements(c.probe.subset, c.layouts);
  for (auto& s : check_label_enumeration(c.probe.subset, c.layouts, sprites)) issues.push_back(std::move(s));
  for (auto& s : check_tile_consistency(c.candidates.images, c.candidates.tile_boxes, c.candidates.object_masks)) {
    issues.push_back(std::move(s));
  }
  return issues;
}

}  // namespace vlprobe
