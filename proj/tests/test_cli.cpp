#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int status = 0;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Result cli(const std::string& args) {
  Result r;
  const std::string cmd = std::string("\"") + IPD_CLI + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(IPD_CONFIGS) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("dry run prints the per-phase match count") {
  auto r = cli("run " + config("basic_10.json") + " --dry-run");
  CHECK(r.status == 0);
  CHECK(contains(r.out, "276"));
  auto c = cli("run " + config("classic_25.json") + " --dry-run");
  CHECK(c.status == 0);
  CHECK(contains(c.out, "276"));
}

TEST_CASE("run, analyse and report a mock tournament") {
  const auto dir = ipd::test::scratch("cli_run");
  auto r = cli("run " + config("mock_demo.json") + " --out " + dir.string());
  REQUIRE(r.status == 0);
  CHECK(fs::exists(dir / "rounds.csv"));
  CHECK(fs::exists(dir / "rationales.csv"));

  auto fp = cli("analyze fingerprints " + dir.string() + " --strategy TitForTat");
  CHECK(fp.status == 0);
  CHECK(contains(fp.out, "TitForTat,1.000,1.000,0.000,0.000"));

  CHECK(contains(cli("analyze instability " + dir.string()).out, "mean,"));
  CHECK(contains(cli("analyze scores " + dir.string()).out, "rank"));
  CHECK(contains(cli("analyze cooperation " + dir.string() + " --strategy GrimTrigger").out, "GrimTrigger,"));
  auto h = cli("analyze head2head " + dir.string() + " --a TitForTat --b MockLLM");
  CHECK(h.status == 0);
  CHECK(contains(h.out, "TitForTat,MockLLM,"));

  auto rep = cli("report " + dir.string());
  CHECK(rep.status == 0);
  for (const char* f : {"fingerprints.csv", "fingerprints.svg", "populations.svg", "instability.csv",
                        "scores.csv", "cooperation.csv", "head2head.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "report" / f), f);
  }
}

TEST_CASE("stop and resume match an uninterrupted run") {
  const auto full = ipd::test::scratch("cli_full");
  const auto part = ipd::test::scratch("cli_part");
  REQUIRE(cli("run " + config("mock_demo.json") + " --out " + full.string()).status == 0);
  REQUIRE(cli("run " + config("mock_demo.json") + " --out " + part.string() + " --stop-after 1").status == 0);
  CHECK(slurp(full / "rounds.csv") != slurp(part / "rounds.csv"));
  REQUIRE(cli("run " + config("mock_demo.json") + " --out " + part.string() + " --resume").status == 0);
  for (const char* f : {"manifest.json", "rounds.csv", "populations.csv", "rationales.csv", "fitness.csv"}) {
    CHECK_MESSAGE(slurp(full / f) == slurp(part / f), f);
  }
}

TEST_CASE("sample, label and measure agreement") {
  const auto dir = ipd::test::scratch("cli_code");
  REQUIRE(cli("run " + config("mock_demo.json") + " --out " + dir.string()).status == 0);
  const auto sample = (dir / "sample.csv").string();
  auto s = cli("code sample " + dir.string() + " --fraction 0.1 --seed 5 --out " + sample);
  REQUIRE(s.status == 0);
  CHECK(contains(s.out, " of "));
  auto l = cli("code label " + sample + " --coder-a " + config("coder_mock_a.json") + " --coder-b " +
               config("coder_mock_b.json"));
  REQUIRE(l.status == 0);
  auto k = cli("code kappa " + sample);
  CHECK(k.status == 0);
  CHECK(contains(k.out, "horizon,"));
  CHECK(contains(k.out, "opponent,"));
  auto x = cli("code crosstab " + sample + " --dimension opponent");
  CHECK(x.status == 0);
  CHECK(contains(x.out, "Mock 25%,MockLLM,opponent,"));
}

TEST_CASE("errors exit nonzero with a diagnostic") {
  const auto dir = ipd::test::scratch("cli_err");
  std::ofstream(dir / "bad.json") << R"({"roster": {"Zorg": 2}})";
  auto bad = cli("run " + (dir / "bad.json").string());
  CHECK(bad.status != 0);
  CHECK(contains(bad.out, "Zorg"));

  std::ofstream(dir / "garbled.json") << "{ not json";
  CHECK(cli("run " + (dir / "garbled.json").string()).status != 0);

  CHECK(cli("run " + (dir / "missing.json").string()).status != 0);
  CHECK(cli("analyze scores " + (dir / "nothing").string()).status != 0);
  CHECK(cli("bogus-command").status != 0);

  // A real provider without its key fails before any match is played.
  auto nokey = cli("run " + config("basic_10.json") + " --out " + (dir / "out").string());
  CHECK(nokey.status != 0);
  CHECK(contains(nokey.out, "API_KEY"));
}
