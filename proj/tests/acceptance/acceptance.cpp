// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "vlprobe/backends/procedural.hpp"
#include "vlprobe/core/error.hpp"
#include "vlprobe/core/seed.hpp"
#include "vlprobe/dataset/dataset.hpp"
#include "vlprobe/eval/metrics.hpp"
#include "vlprobe/eval/scorer.hpp"
#include "vlprobe/hardneg/gradcheck.hpp"
#include "vlprobe/hardneg/loss.hpp"
#include "vlprobe/semantics/classify.hpp"
#include "vlprobe/semantics/vocabulary.hpp"
#include "vlprobe/synthesis/layout.hpp"
#include "vlprobe/synthesis/pipeline.hpp"
#include "vlprobe/synthesis/probe.hpp"
#include "vlprobe/synthesis/sprites.hpp"

using namespace vlprobe;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void verdict(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SpriteLibrary make_sprites(Backend& backend, std::uint64_t seed) {
  const auto& v = coco_categories();
  const std::vector<std::string> cats(v.begin(), v.end());
  return build_sprite_library(backend, cats, {3, 256, derive_seed(seed, {{"sprites", 0}})});
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("vlprobe_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Chance-level targets of the random scorer, in percent.
double table1_random(SubsetKind s) {
  switch (s) {
    case SubsetKind::AbsoluteSize:
    case SubsetKind::RelativeSize:
      return 33.3;
    case SubsetKind::AbsolutePosition:
    case SubsetKind::Count:
      return 11.1;
    case SubsetKind::RelativePosition:
      return 25.0;
    case SubsetKind::Existence:
      return 50.0;
  }
  return 0.0;
}

/// Synthesizes `per_subset` cases of every subset in memory.
std::vector<TestCase> synthesize_cases(int per_subset, int canvas, std::uint64_t seed, const SpriteLibrary& sprites,
                                       Backend& backend, int& infeasible) {
  SynthesisOptions o;
  o.probe.canvas_width = o.probe.canvas_height = canvas;
  o.root_seed = seed;
  std::vector<TestCase> cases;
  for (const auto s : kAllSubsets) {
    for (int i = 0; i < per_subset; ++i) {
      try {
        const auto c = synthesize_case(s, static_cast<std::uint64_t>(i), o, sprites, backend);
        cases.push_back(assemble_test_case(c.probe, c.candidates, c.captions));
      } catch (const InfeasibleError&) {
        ++infeasible;
      }
    }
  }
  return cases;
}

void chance_and_oracle(const SpriteLibrary& sprites, Backend& backend) {
  const auto t0 = Clock::now();
  int infeasible = 0;
  const auto cases = synthesize_cases(5000, 64, 20240601, sprites, backend, infeasible);
  const double synth_s = seconds_since(t0);

  RandomScorer random(7);
  const auto r = evaluate(cases, random);
  bool ok = infeasible == 0;
  std::ostringstream detail;
  for (const auto& [s, res] : r.subsets) {
    const double target = table1_random(s);
    const double i2t = 100 * res.i2t.accuracy, t2i = 100 * res.t2i.accuracy, cls = 100 * res.cls.accuracy;
    ok = ok && res.cases >= 5000 && std::abs(i2t - target) <= 1.5 && std::abs(t2i - target) <= 1.5 &&
         std::abs(cls - 1.25) <= 0.5;
    detail << to_string(s) << " n=" << res.cases << " i2t=" << fmt("%.2f", i2t) << " t2i=" << fmt("%.2f", t2i)
           << " cls=" << fmt("%.2f", cls) << " (target " << target << "/1.25); ";
  }
  // The either-category rule is reported for reference only.
  const auto either = evaluate(cases, random, {true, ClsRule::EitherCategory, 1});
  detail << "either-category cls:";
  for (const auto& [s, res] : either.subsets) detail << " " << to_string(s) << "=" << fmt("%.2f", 100 * res.cls.accuracy);
  detail << "; infeasible=" << infeasible << " synth " << fmt("%.0f", synth_s) << "s total " << fmt("%.0f", seconds_since(t0))
         << "s";
  verdict("chance-level", ok, detail.str());

  OracleScorer oracle;
  bool oracle_ok = true;
  std::ostringstream od;
  for (const auto rule : {ClsRule::PerObject, ClsRule::EitherCategory}) {
    const auto o = evaluate(cases, oracle, {true, rule, 1});
    for (const auto& [s, res] : o.subsets) {
      oracle_ok = oracle_ok && res.i2t.accuracy == 1.0 && res.t2i.accuracy == 1.0 && res.cls.accuracy == 1.0;
      if (rule == ClsRule::PerObject) {
        od << to_string(s) << " " << fmt("%.1f", 100 * res.i2t.accuracy) << "/" << fmt("%.1f", 100 * res.t2i.accuracy)
           << "/" << fmt("%.1f", 100 * res.cls.accuracy) << "; ";
      }
    }
  }
  od << "both cls rules, " << cases.size() << " cases";
  verdict("oracle-ceiling", oracle_ok, od.str());
}

void consistency(const SpriteLibrary& sprites, Backend& backend) {
  const auto t0 = Clock::now();
  const auto root = scratch("consistency");
  SynthesisOptions o;
  o.probe.canvas_width = o.probe.canvas_height = 256;
  o.root_seed = 31337;
  std::vector<TestCase> cases;
  std::size_t in_memory = 0;
  int infeasible = 0;
  for (const auto s : kAllSubsets) {
    for (int i = 0; i < 100; ++i) {
      try {
        const auto c = synthesize_case(s, static_cast<std::uint64_t>(i), o, sprites, backend);
        in_memory += check_case(c, sprites).size();
        auto tc = assemble_test_case(c.probe, c.candidates, c.captions);
        write_case_files(root, tc, c.candidates, plan_trace(c.plan));
        cases.push_back(std::move(tc));
      } catch (const InfeasibleError&) {
        ++infeasible;
      }
    }
  }
  write_manifest(root, cases);
  const auto report = validate_dataset(root);
  const bool ok = cases.size() == 600 && infeasible == 0 && in_memory == 0 && report.ok() && report.cases == 600;
  std::ostringstream d;
  d << report.cases << " cases at 256px, " << in_memory << " placement/enumeration violations, "
    << report.violations.size() << " dataset violations, infeasible=" << infeasible << ", "
    << fmt("%.0f", seconds_since(t0)) << "s";
  if (!report.ok()) d << "; first: " << report.violations[0].case_id << " " << report.violations[0].message;
  verdict("consistency", ok, d.str());
  fs::remove_all(root);
}

void semantics_round_trip(const SpriteLibrary& sprites) {
  std::size_t probes = 0, mismatches = 0, infeasible = 0;
  for (const auto s : kAllSubsets) {
    for (std::uint64_t i = 0; i < 200; ++i) {
      for (const int canvas : {256, 1024}) {
        AttributeProbe p;
        try {
          p = make_probe(s, i, 4242, 0, sprites, {canvas, canvas});
        } catch (const InfeasibleError&) {
          ++infeasible;
          continue;
        }
        std::vector<CanvasLayout> layouts;
        try {
          layouts = plan_candidate_layouts(p, sprites);
        } catch (const InfeasibleError&) {
          ++infeasible;
          continue;
        }
        ++probes;
        bool good = layouts.size() == static_cast<std::size_t>(subset_cardinality(s));
        for (std::size_t k = 0; good && k < layouts.size(); ++k) {
          try {
            good = measure_layout(layouts[k], s, sprites) == label_at(s, static_cast<int>(k));
          } catch (const ValidationError&) {
            good = false;
          }
        }
        if (!good) ++mismatches;
      }
    }
  }
  std::size_t gap_inputs = 0, gap_classified = 0;
  for (int i = 1; i < 20000; ++i) {
    const double t = i / 20000.0;
    for (const double p : {0.2 + 0.2 * t, 0.6 + 0.2 * t}) {
      ++gap_inputs;
      if (classify_absolute_size(p).has_value()) ++gap_classified;
    }
    for (const double r : {0.5 + 0.4 * t, 1.1 + 0.9 * t}) {
      ++gap_inputs;
      if (classify_relative_size(r, 1.0).has_value()) ++gap_classified;
      if (classify_relative_size(3.0 * r, 3.0).has_value()) ++gap_classified;
    }
  }
  std::ostringstream d;
  d << probes << " feasible probes, " << mismatches << " enumeration mismatches (" << infeasible
    << " infeasible); " << gap_inputs << " gap-band inputs, " << gap_classified << " classified";
  verdict("semantics-round-trip", mismatches == 0 && probes > 0 && gap_classified == 0, d.str());
}

void loss_correctness() {
  GradcheckOptions o;
  const auto g = run_gradcheck(o);

  double uniform_err = 0.0;
  for (const auto [nt, nhn] : std::vector<std::pair<int, int>>{{1, 0}, {6, 3}, {32, 12}, {256, 96}}) {
    EmbeddingBatch b;
    b.n_trivial = nt;
    b.images = Matrix::Constant(nt + nhn, 16, 0.25);
    b.texts = Matrix::Constant(nt + nhn, 16, -0.5);
    for (int k = 0; k < nhn; ++k) b.hn_groups.push_back(k / 3);
    for (const double tau : {1.0, kDefaultTau}) {
      uniform_err = std::max(uniform_err, std::abs(loss_hn_i2t(b, tau) / nt - std::log(nt + nhn)));
      uniform_err = std::max(uniform_err, std::abs(loss_hn_t2i(b, tau) / nt - std::log(nt + nhn)));
    }
  }

  int monotone_violations = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto full = random_batch(8, 12, 16, derive_seed(77, {{"monotone", s}}));
    double prev_i = -1.0, prev_t = -1.0, prev_total = -1.0;
    for (int k = 0; k <= 12; ++k) {
      EmbeddingBatch b;
      b.n_trivial = 8;
      b.images = full.images.topRows(8 + k);
      b.texts = full.texts.topRows(8 + k);
      b.hn_groups.assign(full.hn_groups.begin(), full.hn_groups.begin() + k);
      const double tau = 1.0 + static_cast<double>(s % 50);
      const double li = loss_hn_i2t(b, tau), lt = loss_hn_t2i(b, tau), tot = loss_total(b, tau, 0.2);
      if (li < prev_i || lt < prev_t || tot < prev_total) ++monotone_violations;
      prev_i = li;
      prev_t = lt;
      prev_total = tot;
    }
  }

  int lambda0_mismatches = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto b = random_batch(8, 6, 16, derive_seed(78, {{"lambda0", s}}));
    const double tau = std::exp(static_cast<double>(s % 5));
    if (loss_total(b, tau, 0.0) != loss_clip(b, tau)) ++lambda0_mismatches;
    if (grad_loss(b, tau, 0.0).loss != loss_clip(b, tau)) ++lambda0_mismatches;
  }

  std::ostringstream d;
  d << "gradcheck " << g.batches << " batches, " << g.failed_batches << " failed, max rel err "
    << fmt("%.2e", g.max_rel_error) << " (elementwise " << fmt("%.2e", g.max_elementwise_rel_error)
    << "); uniform max err " << fmt("%.1e", uniform_err) << "; monotonicity violations " << monotone_violations
    << "; lambda=0 mismatches " << lambda0_mismatches;
  verdict("loss-correctness",
          g.passed() && g.batches == 100 && g.max_rel_error <= 1e-5 && uniform_err <= 1e-12 &&
              monotone_violations == 0 && lambda0_mismatches == 0,
          d.str());
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

void determinism() {
  const auto t0 = Clock::now();
  const auto root = scratch("determinism");
  std::vector<std::map<std::string, std::string>> runs;
  int bad_exit = 0;
  for (const char* name : {"a", "b"}) {
    const auto out = root / name;
    const std::string cmd = std::string(VLPROBE_BINARY) +
                            " synth --subset all --cases 4 --seed 42 --canvas 256 --backend procedural --out '" +
                            out.string() + "' > /dev/null";
    if (std::system(cmd.c_str()) != 0) ++bad_exit;
    runs.push_back(tree(out));
  }
  const bool same = runs[0] == runs[1];
  const bool manifest = runs[0].count("manifest.json") == 1 && runs[0]["manifest.json"] == runs[1]["manifest.json"];
  std::ostringstream d;
  d << "two synth runs (24 cases, seed 42): " << runs[0].size() << " files each, "
    << (same ? "byte-identical" : "different") << ", manifests " << (manifest ? "identical" : "differ")
    << ", nonzero exits " << bad_exit << ", " << fmt("%.0f", seconds_since(t0)) << "s";
  verdict("determinism", same && manifest && bad_exit == 0 && runs[0].size() > 24, d.str());
  fs::remove_all(root);
}

}  // namespace

int main() {
  ProceduralBackend backend;
  const auto sprites = make_sprites(backend, 1);
  chance_and_oracle(sprites, backend);
  consistency(sprites, backend);
  semantics_round_trip(sprites);
  loss_correctness();
  determinism();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
