#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autogowers/automaton.hpp"
#include "autogowers/fixtures.hpp"

namespace fs = std::filesystem;
using namespace autogowers;

namespace {

struct RunResult {
  int code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  fs::path tmp = fs::temp_directory_path() / "autogowers_cli_out.txt";
  std::string cmd = std::string(CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("norm command emits dp and naive values that agree") {
  fs::path dir = fs::temp_directory_path() / "ag_norm";
  fs::remove_all(dir);
  auto r = run_cli("norm --automaton " + fixture("thue_morse.aut") + " --d 2 --L 3..6 --out " +
                   dir.string());
  REQUIRE(r.code == 0);
  std::string csv = slurp(dir / "norms.csv");
  CHECK(csv.find("method,d,L,N,Ntilde,value,agree,seconds") == 0);
  // every naive row carries agreement flag 1
  std::istringstream lines(csv);
  std::string line;
  int naive_rows = 0, dp_rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("naive,", 0) == 0) {
      ++naive_rows;
      auto cols = line;
      CHECK(cols.find(",1,") != std::string::npos);
    }
    if (line.rfind("dp,", 0) == 0) ++dp_rows;
  }
  CHECK(dp_rows == 4);
  CHECK(naive_rows == 4);
}

TEST_CASE("norm output is deterministic") {
  fs::path d1 = fs::temp_directory_path() / "ag_det1";
  fs::path d2 = fs::temp_directory_path() / "ag_det2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::string args = "norm --automaton " + fixture("rudin_shapiro.aut") + " --d 2 --L 3..5 --out ";
  auto r1 = run_cli(args + d1.string());
  auto r2 = run_cli(args + d2.string());
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  // seconds columns may differ; compare everything before them per line
  std::istringstream a(slurp(d1 / "norms.csv")), b(slurp(d2 / "norms.csv"));
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb)) {
    CHECK(la.substr(0, la.rfind(',')) == lb.substr(0, lb.rfind(',')));
  }
}

TEST_CASE("exit codes follow the contract") {
  SECTION("missing file: parse error 2") {
    CHECK(run_cli("norm --automaton /nonexistent.aut").code == 2);
  }
  SECTION("malformed automaton: parse error 2") {
    fs::path bad = fs::temp_directory_path() / "bad.aut";
    std::ofstream(bad) << "base 2\nstates a\ninitial a\ntransition a 0 a\n";  // missing edge
    CHECK(run_cli("norm --automaton " + bad.string()).code == 2);
  }
  SECTION("precondition violation: 3") {
    fs::path noout = fs::temp_directory_path() / "noout.aut";
    std::ofstream(noout) << "base 2\nstates a\ninitial a\ntransition a 0 a\ntransition a 1 a\n";
    CHECK(run_cli("norm --automaton " + noout.string()).code == 3);
    CHECK(run_cli("gea --automaton " + fixture("transient_tm.aut")).code == 3);
  }
  SECTION("budget refusal: 4") {
    auto r = run_cli("norm --automaton " + fixture("thue_morse.aut") +
                     " --d 3 --L 10..10 --method naive --budget 1024");
    CHECK(r.code == 4);
  }
}

TEST_CASE("decompose emits a manifest and re-parsable components") {
  fs::path dir = fs::temp_directory_path() / "ag_dec";
  fs::remove_all(dir);
  auto r = run_cli("decompose --automaton " + fixture("example_1_5.aut") +
                   " --d \"\" --verify 4096 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(r.out.find("verified_additivity_up_to") != std::string::npos);
  // round trip: emitted automata re-parse and satisfy additivity pointwise
  std::ifstream su(dir / "a_uni.aut"), ss(dir / "a_str.aut");
  REQUIRE(su.good());
  REQUIRE(ss.good());
  Automaton uni = automaton_from_text(su), str = automaton_from_text(ss);
  Automaton orig = fixtures::example_1_5();
  for (std::uint64_t n = 0; n < (1 << 12); ++n) {
    Value sum = str.eval(BigInt(n)) + uni.eval(BigInt(n));
    CHECK(sum.q == orig.eval(BigInt(n)).q);
  }
  CHECK(fs::exists(dir / "per.aut"));
  CHECK(fs::exists(dir / "fs.aut"));
  CHECK(fs::exists(dir / "bs.aut"));
  CHECK(fs::exists(dir / "combiner.tbl"));
}

TEST_CASE("gea command emits certificate and verifies efficiency") {
  fs::path dir = fs::temp_directory_path() / "ag_gea";
  fs::remove_all(dir);
  auto r = run_cli("gea --automaton " + fixture("example_1_5.aut") + " --verify-efficiency --out " +
                   dir.string());
  REQUIRE(r.code == 0);
  std::string cert = slurp(dir / "certificate.json");
  CHECK(cert.find("\"T1\": true") != std::string::npos);
  CHECK(cert.find("\"T2\": true") != std::string::npos);
  CHECK(cert.find("\"T3\": true") != std::string::npos);
  CHECK(cert.find("\"dprime\": 1") != std::string::npos);
  // emitted GEA re-parses to the same sequence
  std::ifstream in(dir / "efficient.gea");
  REQUIRE(in.good());
  GEA g = gea_from_text(in);
  Automaton orig = fixtures::example_1_5();
  for (std::uint64_t n = 0; n < (1 << 12); ++n) CHECK(g.eval(BigInt(n)) == orig.eval(BigInt(n)));
}

TEST_CASE("cubes command reports the theorem and chain verdicts") {
  fs::path dir = fs::temp_directory_path() / "ag_cubes";
  fs::remove_all(dir);
  auto r = run_cli("cubes --gea " + fixture("z2.gea") + " --d 2 --out " + dir.string());
  REQUIRE(r.code == 0);
  std::string rep = slurp(dir / "cubes_report.json");
  CHECK(rep.find("\"theorem_cubes_equal\": true") != std::string::npos);
  CHECK(rep.find("\"terminal_order\": 2") != std::string::npos);
  CHECK(fs::exists(dir / "q2_v0.txt"));
  // 8 cubes, one per line, in cycle notation
  std::string cubes = slurp(dir / "q2_v0.txt");
  int lines = 0;
  for (char c : cubes) lines += c == '\n';
  CHECK(lines == 8);
}

TEST_CASE("norm at d = 1 gives the running-mean values") {
  fs::path alt = fs::temp_directory_path() / "alternating.aut";
  std::ofstream(alt) << "base 2\nstates e o\ninitial e\n"
                        "transition e 0 e\ntransition e 1 o\n"
                        "transition o 0 e\ntransition o 1 o\n"
                        "output e int:1\noutput o int:-1\n";
  fs::path dir = fs::temp_directory_path() / "ag_d1";
  fs::remove_all(dir);
  auto r = run_cli("norm --automaton " + alt.string() + " --d 1 --L 3..3 --out " + dir.string());
  REQUIRE(r.code == 0);
  std::string csv = slurp(dir / "norms.csv");
  // (-1)^n averages to 0 on [8]
  CHECK(csv.find("dp,1,3,8,17,0.000000000000") != std::string::npos);
}

TEST_CASE("thread count does not change naive values") {
  fs::path d1 = fs::temp_directory_path() / "ag_thr1";
  fs::path d4 = fs::temp_directory_path() / "ag_thr4";
  fs::remove_all(d1);
  fs::remove_all(d4);
  std::string base = "norm --automaton " + fixture("thue_morse.aut") + " --d 2 --L 5..6 ";
  REQUIRE(run_cli(base + "--threads 1 --out " + d1.string()).code == 0);
  REQUIRE(run_cli(base + "--threads 4 --out " + d4.string()).code == 0);
  std::istringstream a(slurp(d1 / "norms.csv")), b(slurp(d4 / "norms.csv"));
  std::string la, lb;
  while (std::getline(a, la) && std::getline(b, lb))
    CHECK(la.substr(0, la.rfind(',')) == lb.substr(0, lb.rfind(',')));
}

TEST_CASE("apcount command") {
  fs::path dir = fs::temp_directory_path() / "ag_ap";
  fs::remove_all(dir);
  auto r = run_cli("apcount --automaton " + fixture("thue_morse01.aut") +
                   " --member int:1 --N 1024 --l 3 --eps 0.05,0.1 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "apcount.csv"));
  CHECK(fs::exists(dir / "eps_sweep.csv"));
  std::string counts = slurp(dir / "apcount.csv");
  CHECK(counts.rfind("m,count", 0) == 0);
  // m = 1 row: Thue-Morse support has no 3-term progression of difference 1
  CHECK(counts.find("\n1,0\n") != std::string::npos);
}
