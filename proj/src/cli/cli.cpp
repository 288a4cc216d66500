#include "vlprobe/cli/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "vlprobe/backends/http_backend.hpp"
#include "vlprobe/backends/procedural.hpp"
#include "vlprobe/backends/protocol_server.hpp"
#include "vlprobe/core/error.hpp"
#include "vlprobe/core/png_io.hpp"
#include "vlprobe/core/serialize.hpp"
#include "vlprobe/dataset/dataset.hpp"
#include "vlprobe/hardneg/batch.hpp"
#include "vlprobe/hardneg/gradcheck.hpp"
#include "vlprobe/semantics/vocabulary.hpp"
#include "vlprobe/synthesis/pipeline.hpp"
#include "vlprobe/synthesis/sprites.hpp"

namespace vlprobe {

std::unique_ptr<Backend> make_backend(const std::string& spec) {
  if (spec == "procedural") return std::make_unique<ProceduralBackend>();
  if (spec.rfind("http://", 0) == 0) return std::make_unique<HttpBackend>(spec);
  throw ConfigError("backend must be 'procedural' or an http:// endpoint, got '" + spec + "'");
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

template <class F>
void parallel_for(std::size_t n, int jobs, F&& body) {
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (auto i = next++; i < n; i = next++) body(i);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int j = 0; j < workers; ++j) pool.emplace_back(worker);
}

struct CaseJob {
  SubsetKind subset;
  std::uint64_t index;
};

struct CaseResult {
  std::optional<TestCase> tc;
  std::string infeasible;
  std::exception_ptr error;
};

}  // namespace

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.seed) throw ConfigError("synth requires --seed");
  if (cfg.out.empty()) throw ConfigError("synth requires --out");
  if (cfg.cases < 0) throw ConfigError("--cases must be non-negative");
  if (cfg.canvas < 32) throw ConfigError("--canvas must be at least 32");
  auto backend = make_backend(cfg.backend);
  const auto& vocab = coco_categories();
  const std::vector<std::string> categories(vocab.begin(), vocab.end());
  const auto sprites = build_sprite_library(
      *backend, categories, {cfg.sprite_variants, 256, derive_seed(*cfg.seed, {{"sprites", 0}})});

  SynthesisOptions opts;
  opts.root_seed = *cfg.seed;
  opts.probe.canvas_width = cfg.canvas;
  opts.probe.canvas_height = cfg.canvas;

  std::vector<CaseJob> jobs;
  for (const auto s : cfg.subsets) {
    for (int i = 0; i < cfg.cases; ++i) jobs.push_back({s, static_cast<std::uint64_t>(i)});
  }
  std::vector<CaseResult> results(jobs.size());
  parallel_for(jobs.size(), cfg.jobs, [&](std::size_t i) {
    try {
      const auto c = synthesize_case(jobs[i].subset, jobs[i].index, opts, sprites, *backend);
      auto tc = assemble_test_case(c.probe, c.candidates, c.captions);
      const nlohmann::json plan = {{"format_version", kDatasetFormatVersion},
                                   {"probe", probe_to_json(c.probe)},
                                   {"layouts", c.layouts},
                                   {"trace", plan_trace(c.plan)}};
      write_case_files(cfg.out, tc, c.candidates, plan);
      results[i].tc = std::move(tc);
    } catch (const InfeasibleError& e) {
      results[i].infeasible = e.what();
    } catch (...) {
      results[i].error = std::current_exception();
    }
  });
  std::vector<TestCase> cases;
  int infeasible = 0;
  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    if (r.tc) {
      cases.push_back(std::move(*r.tc));
    } else {
      ++infeasible;
      out << "infeasible: " << r.infeasible << "\n";
    }
  }
  write_manifest(cfg.out, cases);
  const auto report = validate_dataset(cfg.out);
  for (const auto& v : report.violations) out << "violation: " << v.case_id << ": " << v.message << "\n";
  out << "synthesized " << cases.size() << " cases into " << cfg.out.string() << " (" << infeasible << " infeasible, "
      << report.violations.size() << " violations)\n";
  return report.ok() && infeasible == 0 ? kExitOk : kExitValidation;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.empty()) throw ConfigError("validate requires --data");
  if (!std::filesystem::exists(cfg.data / "manifest.json")) throw ConfigError("no manifest.json in " + cfg.data.string());
  const auto report = validate_dataset(cfg.data);
  for (const auto& v : report.violations) out << "violation: " << (v.case_id.empty() ? "-" : v.case_id) << ": " << v.message << "\n";
  out << report.cases << " cases, " << report.violations.size() << " violations\n";
  if (!cfg.out.empty()) write_text(cfg.out, report_to_json(report).dump(1) + "\n");
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.empty()) throw ConfigError("eval requires --data");
  if (!std::filesystem::exists(cfg.data / "manifest.json")) throw ConfigError("no manifest.json in " + cfg.data.string());
  const auto report = validate_dataset(cfg.data);
  if (!report.ok()) {
    for (const auto& v : report.violations) out << "violation: " << (v.case_id.empty() ? "-" : v.case_id) << ": " << v.message << "\n";
    out << "dataset does not validate; not evaluating\n";
    return kExitValidation;
  }
  auto ds = read_manifest(cfg.data);
  std::vector<TestCase> cases;
  for (auto& tc : ds.cases) {
    if (std::find(cfg.subsets.begin(), cfg.subsets.end(), tc.subset) != cfg.subsets.end()) cases.push_back(std::move(tc));
  }

  std::unique_ptr<Backend> backend;
  std::unique_ptr<Scorer> scorer;
  if (cfg.scorer == "random") {
    scorer = std::make_unique<RandomScorer>(cfg.seed.value_or(0));
  } else if (cfg.scorer == "oracle") {
    scorer = std::make_unique<OracleScorer>();
  } else if (cfg.scorer == "embedding") {
    backend = make_backend(cfg.backend);
    scorer = std::make_unique<EmbeddingScorer>(*backend, cfg.data);
  } else if (cfg.scorer.rfind("table:", 0) == 0) {
    scorer = std::make_unique<TableScorer>(TableScorer::load(cfg.scorer.substr(6)));
  } else {
    throw ConfigError("unknown scorer '" + cfg.scorer + "' (random, oracle, embedding, table:<path>)");
  }
  auto r = evaluate(cases, *scorer, {.with_cls = true, .cls_rule = cfg.cls_rule, .jobs = cfg.jobs});
  r.dataset_sha256 = ds.manifest_sha256;
  const auto table = summary_table(r);
  out << table;
  if (!cfg.out.empty()) {
    write_text(cfg.out, report_to_json(r).dump(1) + "\n");
    auto txt = cfg.out;
    txt.replace_extension(".txt");
    write_text(txt, table);
  }
  return kExitOk;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out) {
  GradcheckOptions o;
  o.batches = cfg.batches;
  o.lambda = cfg.lambda;
  o.scope = cfg.scope;
  o.seed = cfg.seed.value_or(0);
  o.flip_sign = cfg.flip_sign;
  if (o.lambda < 0.0) throw ConfigError("--lambda must be non-negative");
  const auto r = run_gradcheck(o);
  out << "gradcheck " << (r.passed() ? "PASS" : "FAIL") << ": " << r.batches << " batches, " << r.failed_batches
      << " failed, max relative error " << r.max_rel_error << " (tolerance " << o.tolerance
      << "), max elementwise " << r.max_elementwise_rel_error << "\n";
  if (!cfg.out.empty()) write_text(cfg.out, gradcheck_to_json(r, o).dump(1) + "\n");
  return r.passed() ? kExitOk : kExitValidation;
}

int cmd_hnbatch(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.empty()) throw ConfigError("hnbatch requires --data");
  if (!cfg.seed) throw ConfigError("hnbatch requires --seed");
  const auto ds = read_manifest(cfg.data);
  const auto pool = cfg.trivial_pool == 0 ? static_cast<std::size_t>(cfg.n_trivial) : cfg.trivial_pool;
  const auto spec = build_hn_batch(ds.cases, pool, cfg.n_trivial, cfg.n_hn, *cfg.seed);
  const auto text = batch_spec_to_json(spec).dump(1) + "\n";
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_text(cfg.out, text);
    out << spec.trivial.size() << " trivial pairs, " << spec.hard_negatives.size() << " hard negatives\n";
  }
  return kExitOk;
}

int cmd_serve(const std::string& host, int port, std::ostream& out) {
  ProceduralBackend backend;
  httplib::Server server;
  mount_protocol(server, backend);
  if (!server.bind_to_port(host, port)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  out << "serving procedural backend on http://" << host << ":" << port << std::endl;
  server.listen_after_bind();
  return kExitOk;
}

namespace {

std::vector<SubsetKind> parse_subsets(const std::string& text) {
  if (text == "all") return {kAllSubsets.begin(), kAllSubsets.end()};
  std::vector<SubsetKind> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const auto name = text.substr(start, end - start);
    const auto s = parse_subset(name);
    if (!s) throw ConfigError("unknown subset '" + name + "'");
    out.push_back(*s);
    start = end + 1;
  }
  return out;
}

ClsRule parse_cls_rule(const std::string& s) {
  if (s == "per_object") return ClsRule::PerObject;
  if (s == "either_category") return ClsRule::EitherCategory;
  throw ConfigError("--cls-rule must be per_object or either_category");
}

HnScope parse_scope(const std::string& s) {
  if (s == "whole_batch") return HnScope::WholeBatch;
  if (s == "own_group") return HnScope::OwnGroup;
  throw ConfigError("--scope must be whole_batch or own_group");
}

// Raw option values as strings so config-file entries and flags share one parser.
struct RawOptions {
  std::string subset = "all", seed, backend, out, data, scorer = "random", cls_rule = "per_object", scope = "whole_batch";
  std::string config, host = "127.0.0.1";
  int cases = 10, canvas = 1024, variants = 3, jobs = 1, batches = 100, n_t = 2048, n_hn = 768, port = 8080;
  std::size_t trivial_pool = 0;
  double lambda = 0.2;
  bool flip_sign = false;
};

void apply_config_file(const std::filesystem::path& path, CLI::App& cmd, RawOptions& raw) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const std::map<std::string, std::function<void(const nlohmann::json&)>> setters = {
      {"subset", [&](const nlohmann::json& v) { raw.subset = v.get<std::string>(); }},
      {"cases", [&](const nlohmann::json& v) { raw.cases = v.get<int>(); }},
      {"seed", [&](const nlohmann::json& v) { raw.seed = v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::uint64_t>()); }},
      {"backend", [&](const nlohmann::json& v) { raw.backend = v.get<std::string>(); }},
      {"out", [&](const nlohmann::json& v) { raw.out = v.get<std::string>(); }},
      {"data", [&](const nlohmann::json& v) { raw.data = v.get<std::string>(); }},
      {"scorer", [&](const nlohmann::json& v) { raw.scorer = v.get<std::string>(); }},
      {"cls-rule", [&](const nlohmann::json& v) { raw.cls_rule = v.get<std::string>(); }},
      {"canvas", [&](const nlohmann::json& v) { raw.canvas = v.get<int>(); }},
      {"variants", [&](const nlohmann::json& v) { raw.variants = v.get<int>(); }},
      {"jobs", [&](const nlohmann::json& v) { raw.jobs = v.get<int>(); }},
      {"lambda", [&](const nlohmann::json& v) { raw.lambda = v.get<double>(); }},
      {"batches", [&](const nlohmann::json& v) { raw.batches = v.get<int>(); }},
      {"scope", [&](const nlohmann::json& v) { raw.scope = v.get<std::string>(); }},
      {"n-t", [&](const nlohmann::json& v) { raw.n_t = v.get<int>(); }},
      {"n-hn", [&](const nlohmann::json& v) { raw.n_hn = v.get<int>(); }},
      {"trivial-pool", [&](const nlohmann::json& v) { raw.trivial_pool = v.get<std::size_t>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    const auto* opt = cmd.get_option_no_throw("--" + key);
    if (opt != nullptr && opt->count() > 0) continue;
    try {
      it->second(value);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key '" + key + "' has the wrong type");
    }
  }
}

RunConfig to_config(const std::string& command, const RawOptions& raw, bool backend_flag) {
  RunConfig cfg;
  cfg.command = command;
  cfg.subsets = parse_subsets(raw.subset);
  cfg.cases = raw.cases;
  if (!raw.seed.empty()) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(raw.seed, &used);
      if (used != raw.seed.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--seed must be a non-negative integer");
    }
  }
  cfg.backend = raw.backend.empty() ? "procedural" : raw.backend;
  if (!backend_flag) {
    if (const char* env = std::getenv(kBackendEnv); env != nullptr && *env != '\0') cfg.backend = env;
  }
  cfg.out = raw.out;
  cfg.data = raw.data;
  cfg.scorer = raw.scorer;
  cfg.cls_rule = parse_cls_rule(raw.cls_rule);
  cfg.canvas = raw.canvas;
  cfg.sprite_variants = raw.variants;
  cfg.jobs = raw.jobs;
  cfg.lambda = raw.lambda;
  cfg.batches = raw.batches;
  cfg.scope = parse_scope(raw.scope);
  cfg.flip_sign = raw.flip_sign;
  cfg.n_trivial = raw.n_t;
  cfg.n_hn = raw.n_hn;
  cfg.trivial_pool = raw.trivial_pool;
  if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"vlprobe: synthesize, validate and evaluate attribute-probing image-text benchmarks"};
  app.require_subcommand(1);
  RawOptions raw;

  const auto common = [&](CLI::App* c) {
    c->add_option("--config", raw.config, "JSON file with option defaults; flags take precedence");
    c->add_option("--jobs", raw.jobs, "parallel test-case workers");
  };
  const auto with_backend = [&](CLI::App* c) {
    c->add_option("--backend", raw.backend, std::string("'procedural' or an http:// endpoint (env ") + kBackendEnv + ")");
  };

  auto* synth = app.add_subcommand("synth", "synthesize a benchmark dataset");
  common(synth);
  with_backend(synth);
  synth->add_option("--subset", raw.subset, "subset name, comma list or 'all'");
  synth->add_option("--cases", raw.cases, "test cases per subset");
  synth->add_option("--seed", raw.seed, "root seed (required)");
  synth->add_option("--out", raw.out, "output dataset directory");
  synth->add_option("--canvas", raw.canvas, "canvas side in pixels");
  synth->add_option("--variants", raw.variants, "sprite variants per category");

  auto* validate = app.add_subcommand("validate", "check a dataset directory");
  common(validate);
  validate->add_option("--data", raw.data, "dataset directory");
  validate->add_option("--out", raw.out, "write the report as JSON");

  auto* eval = app.add_subcommand("eval", "score a dataset and report i2t, t2i and cls accuracy");
  common(eval);
  with_backend(eval);
  eval->add_option("--data", raw.data, "dataset directory");
  eval->add_option("--subset", raw.subset, "subset filter");
  eval->add_option("--scorer", raw.scorer, "random, oracle, embedding or table:<path>");
  eval->add_option("--seed", raw.seed, "seed of the random scorer");
  eval->add_option("--cls-rule", raw.cls_rule, "per_object or either_category");
  eval->add_option("--out", raw.out, "write the JSON report here and the summary next to it");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the loss gradients");
  common(gradcheck);
  gradcheck->add_option("--batches", raw.batches, "random batches");
  gradcheck->add_option("--lambda", raw.lambda, "hard-negative loss weight");
  gradcheck->add_option("--scope", raw.scope, "whole_batch or own_group");
  gradcheck->add_option("--seed", raw.seed, "batch seed");
  gradcheck->add_flag("--flip-sign", raw.flip_sign, "negate the analytic gradient (must fail)");
  gradcheck->add_option("--out", raw.out, "write the report as JSON");

  auto* hnbatch = app.add_subcommand("hnbatch", "sample a hard-negative batch spec from a dataset");
  common(hnbatch);
  hnbatch->add_option("--data", raw.data, "dataset directory");
  hnbatch->add_option("--n-t", raw.n_t, "trivial pairs");
  hnbatch->add_option("--n-hn", raw.n_hn, "hard negatives");
  hnbatch->add_option("--trivial-pool", raw.trivial_pool, "size of the trivial pair pool (default n-t)");
  hnbatch->add_option("--seed", raw.seed, "sampling seed (required)");
  hnbatch->add_option("--out", raw.out, "write the spec here instead of stdout");

  auto* serve = app.add_subcommand("serve", "serve the procedural backend over HTTP");
  serve->add_option("--host", raw.host, "listen address");
  serve->add_option("--port", raw.port, "listen port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    if (cmd == serve) return cmd_serve(raw.host, raw.port, out);
    if (!raw.config.empty()) apply_config_file(raw.config, *cmd, raw);
    const auto* backend_opt = cmd->get_option_no_throw("--backend");
    const auto cfg = to_config(cmd->get_name(), raw, backend_opt != nullptr && backend_opt->count() > 0);
    if (cmd == synth) return cmd_synth(cfg, out);
    if (cmd == validate) return cmd_validate(cfg, out);
    if (cmd == eval) return cmd_eval(cfg, out);
    if (cmd == gradcheck) return cmd_gradcheck(cfg, out);
    return cmd_hnbatch(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace vlprobe
