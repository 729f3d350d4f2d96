#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mbpi/cli.hpp"

using namespace mbpi;
namespace fs = std::filesystem;

namespace {

const char* kModel = R"(
[offspring]
family = stable
nu = 0.5
c = 1

[immigration]
family = stable
delta = 0.75
d = 0.25
)";

struct Workdir {
  fs::path root;
  explicit Workdir(const std::string& name) : root(fs::temp_directory_path() / ("mbpi_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }

  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(root / file) << text;
    return (root / file).string();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& config, const fs::path& out_dir, bool strict = false) {
  std::ostringstream out, err;
  RunOptions opts;
  opts.out_dir = out_dir.string();
  opts.strict = strict;
  const int code = run_experiment(config, opts, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("rates run prints the verdict line") {
  Workdir w("rates");
  const auto cfg = w.write("rates.ini", std::string("[task]\nname = rates\n") + kModel +
                                            "\n[rates]\nt_min = 100\nt_max = 1e6\nper_decade = 4\n");
  const auto r = run(cfg, w.root / "out");
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("theorem1 slope -0.501 (predicted -0.500) PASS") != std::string::npos);
  CHECK(fs::exists(w.root / "out" / "summary.txt"));
  CHECK(slurp(w.root / "out" / "manifest.txt").find("tool = " + tool_version()) != std::string::npos);
}

TEST_CASE("missing nu is a config error") {
  Workdir w("missing");
  const auto cfg = w.write("bad.ini", "[task]\nname = validate\n[offspring]\nfamily = stable\nc = 1\n"
                                      "[immigration]\nfamily = stable\ndelta = 0.75\nd = 0.25\n");
  const auto r = run(cfg, w.root / "out");
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("nu") != std::string::npos);
}

TEST_CASE("malformed file reports the line") {
  Workdir w("malformed");
  const auto cfg = w.write("bad.ini", "[task]\nname = validate\n[offspring\n");
  const auto r = run(cfg, w.root / "out");
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("line") != std::string::npos);
  CHECK(run((w.root / "absent.ini").string(), w.root / "out").code == kExitConfig);
}

TEST_CASE("precondition failures") {
  Workdir w("pre");
  const auto zero = w.write("zero.ini", "[task]\nname = validate\n[offspring]\nfamily = stable\nnu = 0.5\nc = 1\n"
                                        "[immigration]\nfamily = stable\ndelta = 0.5\nd = 0.25\n");
  CHECK(run(zero, w.root / "out").code == kExitPrecondition);
  const auto mismatch = w.write("cl.ini", "[task]\nname = rates\n[offspring]\nfamily = stable\nnu = 0.75\nc = 1\n"
                                          "[immigration]\nfamily = stable\ndelta = 0.5\nd = 0.5\n");
  CHECK(run(mismatch, w.root / "out").code == kExitPrecondition);
}

TEST_CASE("unknown keys warn, and fail under strict") {
  Workdir w("strict");
  const auto cfg = w.write("v.ini", std::string("[task]\nname = validate\nbogus = 1\n") + kModel);
  const auto loose = run(cfg, w.root / "a");
  CHECK(loose.code == kExitPass);
  CHECK(loose.err.find("bogus") != std::string::npos);
  CHECK(run(cfg, w.root / "b", true).code == kExitConfig);
}

TEST_CASE("numeric failure exit code") {
  Workdir w("numeric");
  const auto cfg = w.write("k.ini", std::string("[task]\nname = kernel\n") + kModel +
                                        "\n[inversion]\nj_out = 64\nradius = 0.99\nsamples = 256\n");
  CHECK(run(cfg, w.root / "out").code == kExitNumeric);
}

TEST_CASE("the resolved config in the manifest reproduces the tables") {
  Workdir w("manifest");
  const auto cfg = w.write("k.ini", std::string("[task]\nname = kernel\n") + kModel +
                                        "\n[kernel]\nt_grid = 1,5\n\n[inversion]\nj_out = 64\nsamples = 256\n");
  REQUIRE(run(cfg, w.root / "first").code == kExitPass);
  const auto manifest = slurp(w.root / "first" / "manifest.txt");
  const auto at = manifest.find("# resolved config\n");
  REQUIRE(at != std::string::npos);
  const auto again = w.write("resolved.ini", manifest.substr(at));
  REQUIRE(run(again, w.root / "second", true).code == kExitPass);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(w.root / "first")) {
    if (entry.path().extension() != ".csv") continue;
    CHECK(slurp(entry.path()) == slurp(w.root / "second" / entry.path().filename()));
    ++compared;
  }
  CHECK(compared >= 2);
}

TEST_CASE("simulation tables are reproducible for a fixed seed") {
  Workdir w("sim");
  const auto cfg = w.write("s.ini", std::string("[task]\nname = simulate\n") + kModel +
                                        "\n[sim]\nt = 2\nreplicates = 500\nseed = 17\n");
  REQUIRE(run(cfg, w.root / "a").code == kExitPass);
  REQUIRE(run(cfg, w.root / "b").code == kExitPass);
  const auto a = slurp(w.root / "a" / "simulate_sim_pmf.csv");
  CHECK(a.size() > 20);
  CHECK(a == slurp(w.root / "b" / "simulate_sim_pmf.csv"));
}

TEST_CASE("family listing") {
  const auto text = list_families();
  CHECK(text.find("[f_nu] [L_nu]") != std::string::npos);
  CHECK(text.find("d/c = |gamma|") != std::string::npos);
  CHECK(text == list_families());
}
