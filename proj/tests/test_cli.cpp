#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "zetarule/cli.hpp"

using namespace zetarule;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "zetarule");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("zetarule-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str(const std::string& name = "") const { return (name.empty() ? path : path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

long count_lines(const std::string& s) { return static_cast<long>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("usage errors exit with 2 and help with 0") {
  CHECK(run_cli({"--help"}).code == cli::kPass);
  CHECK(run_cli({}).code == cli::kError);
  CHECK(run_cli({"frobnicate"}).code == cli::kError);
  CHECK(run_cli({"verify"}).code == cli::kError);
  CHECK(run_cli({"verify", "nonsense"}).code == cli::kError);
  CHECK(run_cli({"--precision", "32", "selftest"}).code == cli::kError);
  CHECK(run_cli({"--format", "xml", "verify", "integral"}).code == cli::kError);
}

TEST_CASE("invalid parameters are errors, not failed criteria") {
  TempDir dir;
  const Result r = run_cli({"--cache-dir", dir.str(), "--a", "1", "verify", "sumrule"});
  CHECK(r.code == cli::kError);
  CHECK(r.err.find("a = 1") != std::string::npos);
  CHECK(run_cli({"--cache-dir", dir.str(), "--x", "1.5", "verify", "integral"}).code == cli::kError);
  CHECK(run_cli({"--cache-dir", dir.str(), "--a", "2", "--x", "0.25", "--zeros", "5", "verify", "sumrule"}).code ==
        cli::kError);
}

TEST_CASE("verify integral in the three formats") {
  const Result text = run_cli({"--a", "0.5", "--x", "0.5", "verify", "integral"});
  CHECK(text.code == cli::kPass);
  CHECK(text.out.find("result") != std::string::npos);
  CHECK(text.out.find("PASS") != std::string::npos);

  const Result json = run_cli({"--a", "0.5", "--x", "0.5", "--format", "json", "verify", "integral"});
  REQUIRE(json.code == cli::kPass);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j["kind"] == "integral");
  CHECK(j["a"] == "0.5");
  CHECK(j["passed"] == true);
  CHECK(j["wall_time_ms"] == 0);
  CHECK(j.contains("extras"));

  const Result csv = run_cli({"--a", "0.5", "--x", "0.5", "--format", "csv", "verify", "integral"});
  CHECK(csv.code == cli::kPass);
  CHECK(count_lines(csv.out) == 2);
  CHECK(csv.out.rfind("a,x,lhs,rhs_const,rhs_n_series,rhs_k_series,residual,tail_bound,zeros_used,wall_time_ms,status",
                      0) == 0);
}

TEST_CASE("verify sumrule is reproducible and uses the cache") {
  TempDir dir;
  const std::vector<std::string> args{"--cache-dir", dir.str(), "--zeros", "20", "--format", "json",
                                      "verify",      "sumrule"};
  const Result first = run_cli(args);
  CHECK(first.code == cli::kPass);
  CHECK(fs::exists(dir.path / "zeros_n20_p192.txt"));
  const Result second = run_cli(args);
  CHECK(second.out == first.out);
  const auto j = nlohmann::json::parse(first.out);
  CHECK(j["zeros_used"] == 20);
  CHECK(j["notes"].size() >= 2);

  const Result timed = run_cli({"--cache-dir", dir.str(), "--zeros", "20", "--timing", "verify", "sumrule"});
  CHECK(timed.code == cli::kPass);
}

TEST_CASE("zeros subcommand exports, imports and reports bad tables") {
  TempDir dir;
  const Result r = run_cli({"--cache-dir", dir.str(), "zeros", "--count", "8", "--export", dir.str("z.txt")});
  CHECK(r.code == cli::kPass);
  CHECK(r.out.find("computed and cached") != std::string::npos);
  CHECK(r.out.find("tau_1 = 14.1347251417346937904572519835624702707") != std::string::npos);
  CHECK(r.out.find("count check: ok") != std::string::npos);

  const Result again = run_cli({"--cache-dir", dir.str(), "zeros", "--count", "8"});
  CHECK(again.out.find("cache hit") != std::string::npos);

  const Result imported = run_cli({"zeros", "--import", dir.str("z.txt")});
  CHECK(imported.code == cli::kPass);
  CHECK(imported.out.find("zeros: 8 at 192 bits") != std::string::npos);

  std::string text = slurp(dir.path / "z.txt");
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::swap(lines[2], lines[3]);
  {
    std::ofstream f(dir.path / "bad.txt");
    for (const auto& l : lines) f << l << "\n";
  }
  const Result bad = run_cli({"zeros", "--import", dir.str("bad.txt")});
  CHECK(bad.code == cli::kError);
  CHECK(bad.err.find("line 4") != std::string::npos);

  // Verification can run from an imported table as well.
  const Result from_file = run_cli({"--zeros-file", dir.str("z.txt"), "--zeros", "8", "verify", "sumrule"});
  CHECK(from_file.code != cli::kError);
  CHECK(run_cli({"--zeros-file", dir.str("z.txt"), "--zeros", "9", "verify", "sumrule"}).code == cli::kError);
}

TEST_CASE("configuration precedence: flags, then file, then environment") {
  TempDir dir;
  const fs::path cfg = dir.path / "run.ini";
  {
    std::ofstream f(cfg);
    f << "precision=128\n"
      << "cache-dir=" << dir.str("from_config") << "\n";
  }
  CHECK(run_cli({"--config", cfg.string(), "zeros", "--count", "3"}).out.find("at 128 bits") != std::string::npos);
  CHECK(fs::exists(dir.path / "from_config" / "zeros_n3_p128.txt"));

  const Result flag = run_cli({"--config", cfg.string(), "--precision", "160", "zeros", "--count", "3"});
  CHECK(flag.out.find("at 160 bits") != std::string::npos);

  const fs::path bare = dir.path / "bare.ini";
  {
    std::ofstream f(bare);
    f << "precision=128\n";
  }
  ::setenv("ZETARULE_CACHE_DIR", dir.str("from_env").c_str(), 1);
  (void)run_cli({"--config", cfg.string(), "zeros", "--count", "4"});
  CHECK(fs::exists(dir.path / "from_config" / "zeros_n4_p128.txt"));
  (void)run_cli({"--config", bare.string(), "zeros", "--count", "3"});
  CHECK(fs::exists(dir.path / "from_env" / "zeros_n3_p128.txt"));
  (void)run_cli({"--config", cfg.string(), "--cache-dir", dir.str("from_flag"), "zeros", "--count", "3"});
  CHECK(fs::exists(dir.path / "from_flag" / "zeros_n3_p128.txt"));
  ::unsetenv("ZETARULE_CACHE_DIR");

  CHECK(run_cli({"--config", dir.str("missing.ini"), "zeros", "--count", "3"}).code == cli::kError);
}

TEST_CASE("default cache directory follows XDG") {
  const char* old = std::getenv("XDG_CACHE_HOME");
  const std::string saved = old ? old : "";
  ::setenv("XDG_CACHE_HOME", "/tmp/xdg-test", 1);
  CHECK(cli::default_cache_dir() == fs::path("/tmp/xdg-test/zetarule"));
  if (old) {
    ::setenv("XDG_CACHE_HOME", saved.c_str(), 1);
  } else {
    ::unsetenv("XDG_CACHE_HOME");
  }
}

TEST_CASE("scan emits one row per grid point and a plot script") {
  TempDir dir;
  const Result r = run_cli({"--cache-dir", dir.str(), "--a-list", "0.5,0.9,3", "--x-list", "0.25,0.5,0.75", "--zeros",
                            "20", "--format", "csv", "scan", "--out", dir.str("scan.csv"), "--plot-script",
                            dir.str("scan.gp")});
  CHECK(r.code == cli::kPass);
  const std::string csv = slurp(dir.path / "scan.csv");
  CHECK(count_lines(csv) == 10);
  CHECK(csv.find("error") == std::string::npos);
  const std::string gp = slurp(dir.path / "scan.gp");
  CHECK(gp.find("plot") != std::string::npos);
  CHECK(gp.find(dir.str("scan.csv")) != std::string::npos);
  CHECK(std::count(gp.begin(), gp.end(), '\n') >= 9 + 7);

  // A resonant grid point is an error row, the rest still run.
  const Result mixed = run_cli({"--cache-dir", dir.str(), "--a-list", "0.5,2", "--x", "0.25", "--zeros", "10",
                                "--format", "json", "scan"});
  CHECK(mixed.code == cli::kCriterionFailed);
  const auto j = nlohmann::json::parse(mixed.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["status"] == "pass");
  CHECK(j[1]["status"].get<std::string>().rfind("error", 0) == 0);
}

TEST_CASE("decimal output is the shortest round-trip form") {
  const NumericContext ctx(192);
  CHECK(cli::format_real(ctx.real("0.3"), 192) == "0.3");
  CHECK(cli::format_real(ctx.real("2"), 192) == "2");
  CHECK(cli::format_real(ctx.real("-0.125"), 192) == "-0.125");
  const Real third = ctx.real(1L) / ctx.real(3L);
  CHECK(Real(cli::format_real(third, 192), 192) == Real(third, 192));
}

TEST_CASE("selftest passes and catches an injected fault") {
  std::ostringstream log;
  const auto ok = cli::run_selftest(NumericContext(192), log);
  for (const auto& c : ok) CHECK_MESSAGE(c.ok, c.name << ": " << c.detail);
  CHECK(ok.size() == 8);

  cli::SelftestHooks broken;
  broken.zeta_deriv_neg_even = [](const ZetaEngine& e, int n) { return -e.zeta_deriv_neg_even(n); };
  std::ostringstream log2;
  const auto bad = cli::run_selftest(NumericContext(192), log2, broken);
  REQUIRE_FALSE(bad.empty());
  CHECK_FALSE(bad.back().ok);
  CHECK(bad.back().name.find("closed form") != std::string::npos);
  CHECK(log2.str().find("FAIL") != std::string::npos);
}

TEST_CASE("selftest passes at doubled precision") {
  std::ostringstream log;
  const auto r = cli::run_selftest(NumericContext(192).doubled(), log);
  for (const auto& c : r) CHECK_MESSAGE(c.ok, c.name << ": " << c.detail);
  CHECK(r.size() == 8);
}

TEST_CASE("installed binary maps outcomes to exit codes") {
  const std::string bin = ZETARULE_CLI_PATH;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " --a 1 verify sumrule > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  const int good = std::system((bin + " --a 0.9 --x 0.75 verify integral > /dev/null").c_str());
  CHECK(WEXITSTATUS(good) == 0);
}
