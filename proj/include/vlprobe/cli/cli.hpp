#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vlprobe/backends/backend.hpp"
#include "vlprobe/eval/metrics.hpp"
#include "vlprobe/hardneg/loss.hpp"
#include "vlprobe/semantics/labels.hpp"

namespace vlprobe {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitBackend = 3 };

/// Environment variable that overrides the configured backend endpoint.
inline constexpr const char* kBackendEnv = "VLPROBE_BACKEND";

struct RunConfig {
  std::string command;
  std::vector<SubsetKind> subsets{kAllSubsets.begin(), kAllSubsets.end()};
  int cases = 10;
  std::optional<std::uint64_t> seed;
  std::string backend = "procedural";
  std::filesystem::path out;
  std::filesystem::path data;
  std::string scorer = "random";
  ClsRule cls_rule = ClsRule::PerObject;
  int canvas = 1024;
  int sprite_variants = 3;
  int jobs = 1;
  // gradcheck
  double lambda = 0.2;
  int batches = 100;
  HnScope scope = HnScope::WholeBatch;
  bool flip_sign = false;
  // hard-negative batch sampling
  int n_trivial = 2048;
  int n_hn = 768;
  std::size_t trivial_pool = 0;
};

/// "procedural" or an http:// endpoint. Throws ConfigError otherwise.
std::unique_ptr<Backend> make_backend(const std::string& spec);

int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_gradcheck(const RunConfig& cfg, std::ostream& out);
int cmd_hnbatch(const RunConfig& cfg, std::ostream& out);
/// Serves the procedural backend over the wire protocol until killed.
int cmd_serve(const std::string& host, int port, std::ostream& out);

/// Parses arguments (flags over environment over --config file), runs the
/// command and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vlprobe
