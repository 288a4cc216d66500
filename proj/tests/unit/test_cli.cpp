#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fixtures.hpp"
#include "vlprobe/cli/cli.hpp"
#include "vlprobe/dataset/dataset.hpp"

using namespace vlprobe;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "vlprobe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
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

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("usage errors exit with the config code") {
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  fixtures::TempDir dir("noseed");
  CHECK(run({"synth", "--out", dir.path.string(), "--backend", "procedural"}).code == kExitConfig);
  CHECK(run({"synth", "--seed", "1", "--subset", "colour", "--out", dir.path.string(), "--backend", "procedural"}).code ==
        kExitConfig);
  CHECK(run({"gradcheck", "--batches", "x"}).code == kExitConfig);
}

TEST_CASE("synth, validate and eval on every subset") {
  fixtures::TempDir dir("synth_all");
  const auto data = (dir.path / "data").string();
  const auto r = run({"synth", "--subset", "all", "--cases", "2", "--seed", "5", "--canvas", "64", "--out", data,
                      "--backend", "procedural", "--variants", "1", "--jobs", "2"});
  REQUIRE(r.code == kExitOk);
  const auto ds = read_manifest(data);
  CHECK(ds.cases.size() == 12);
  CHECK(fs::exists(fs::path(data) / ds.cases[0].id / "plan.json"));

  CHECK(run({"validate", "--data", data}).code == kExitOk);

  const auto report = (dir.path / "oracle.json").string();
  const auto e = run({"eval", "--data", data, "--scorer", "oracle", "--out", report});
  REQUIRE(e.code == kExitOk);
  std::ifstream in(report);
  const auto j = nlohmann::json::parse(in);
  for (const auto& [name, s] : j["subsets"].items()) {
    CHECK(s["i2t"]["accuracy"] == 1.0);
    CHECK(s["t2i"]["accuracy"] == 1.0);
    CHECK(s["cls"]["accuracy"] == 1.0);
  }
  CHECK(fs::exists(dir.path / "oracle.txt"));

  CHECK(run({"eval", "--data", data, "--scorer", "table:" + (dir.path / "none.json").string()}).code == kExitConfig);
  CHECK(run({"eval", "--data", (dir.path / "missing").string(), "--scorer", "oracle"}).code == kExitConfig);

  const auto spec = (dir.path / "spec.json").string();
  CHECK(run({"hnbatch", "--data", data, "--n-t", "4", "--n-hn", "9", "--trivial-pool", "100", "--seed", "3", "--out",
             spec})
            .code == kExitOk);
  CHECK(run({"hnbatch", "--data", data, "--n-t", "4", "--n-hn", "500", "--trivial-pool", "100", "--seed", "3"}).code ==
        kExitValidation);
}

TEST_CASE("a damaged dataset fails validation") {
  fixtures::TempDir dir("damaged");
  const auto data = (dir.path / "data").string();
  REQUIRE(run({"synth", "--subset", "existence", "--cases", "1", "--seed", "2", "--canvas", "64", "--out", data,
               "--backend", "procedural", "--variants", "1"})
              .code == kExitOk);
  const auto ds = read_manifest(data);
  fs::remove(fs::path(data) / ds.cases[0].images[0]);
  CHECK(run({"validate", "--data", data}).code == kExitValidation);
  CHECK(run({"eval", "--data", data, "--scorer", "oracle"}).code == kExitValidation);
}

TEST_CASE("synth is deterministic") {
  fixtures::TempDir dir("determinism");
  const auto a = (dir.path / "a").string();
  const auto b = (dir.path / "b").string();
  for (const auto& out : {a, b}) {
    REQUIRE(run({"synth", "--subset", "count,relative_position", "--cases", "2", "--seed", "9", "--canvas", "64",
                 "--out", out, "--backend", "procedural", "--variants", "1", "--jobs", out == a ? "1" : "3"})
                .code == kExitOk);
  }
  const auto ta = tree(a);
  CHECK(ta.size() > 10);
  CHECK(ta == tree(b));
  REQUIRE(run({"synth", "--subset", "count,relative_position", "--cases", "2", "--seed", "9", "--canvas", "64", "--out",
               a, "--backend", "procedural", "--variants", "1"})
              .code == kExitOk);
  CHECK(tree(a) == ta);
}

TEST_CASE("flags override the config file and the environment") {
  fixtures::TempDir dir("config");
  const auto cfg = (dir.path / "cfg.json").string();
  const auto data = (dir.path / "data").string();
  write_text(cfg, R"({"subset": "existence", "cases": 3, "seed": 4, "canvas": 64, "variants": 1, "backend": "procedural"})");
  REQUIRE(run({"synth", "--config", cfg, "--cases", "1", "--out", data}).code == kExitOk);
  CHECK(read_manifest(data).cases.size() == 1);

  write_text(cfg, R"({"cases": 1, "bogus": 1})");
  CHECK(run({"synth", "--config", cfg, "--seed", "1", "--out", data}).code == kExitConfig);

  ::setenv(kBackendEnv, "carrier-pigeon", 1);
  const auto data2 = (dir.path / "data2").string();
  CHECK(run({"synth", "--subset", "existence", "--cases", "1", "--seed", "1", "--canvas", "64", "--variants", "1",
             "--out", data2})
            .code == kExitConfig);
  CHECK(run({"synth", "--subset", "existence", "--cases", "1", "--seed", "1", "--canvas", "64", "--variants", "1",
             "--out", data2, "--backend", "procedural"})
            .code == kExitOk);
  ::unsetenv(kBackendEnv);
}

TEST_CASE("an unreachable backend exits with the backend code") {
  fixtures::TempDir dir("unreachable");
  const auto r = run({"synth", "--subset", "existence", "--cases", "1", "--seed", "1", "--canvas", "64", "--variants",
                      "1", "--out", (dir.path / "d").string(), "--backend", "http://127.0.0.1:9"});
  CHECK(r.code == kExitBackend);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("gradcheck exit codes") {
  CHECK(run({"gradcheck", "--batches", "5"}).code == kExitOk);
  CHECK(run({"gradcheck", "--batches", "5", "--flip-sign"}).code == kExitValidation);
}

TEST_CASE("the installed binary runs") {
  const std::string cmd = std::string(VLPROBE_BINARY) + " gradcheck --batches 2 > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
}
