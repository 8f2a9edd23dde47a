// autogowers: decompose k-automatic sequences into structured + uniform
// parts, compute Gowers uniformity norms (naive and transfer-matrix), and
// inspect the group-extension / cube-group certificates behind them.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "autogowers/cube.hpp"
#include "autogowers/decompose.hpp"
#include "autogowers/efficient.hpp"
#include "autogowers/factors.hpp"
#include "autogowers/fixtures.hpp"
#include "autogowers/gowers.hpp"
#include "autogowers/transfer.hpp"

using json = nlohmann::ordered_json;
using namespace autogowers;
namespace fs = std::filesystem;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitBudget = 4;

struct CliError {
  int code;
  std::string message;
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw CliError{kExitParse, "empty integer list"};
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw CliError{kExitParse, "empty list"};
  return out;
}

std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    int v = std::stoi(s);
    return {v, v};
  }
  int lo = std::stoi(s.substr(0, dots)), hi = std::stoi(s.substr(dots + 2));
  if (lo > hi) throw CliError{kExitParse, "empty range " + s};
  return {lo, hi};
}

Automaton load_automaton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitParse, "cannot open " + path};
  try {
    return automaton_from_text(in);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, e.what()};
  }
}

GEA load_gea(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitParse, "cannot open " + path};
  try {
    return gea_from_text(in);
  } catch (const std::exception& e) {
    throw CliError{kExitParse, e.what()};
  }
}

std::uint64_t budget_from_env(std::uint64_t flag_value) {
  if (const char* s = std::getenv("AUTOGOWERS_BUDGET")) return std::strtoull(s, nullptr, 10);
  return flag_value;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream o(fs::path(dir) / name);
  if (!o) throw CliError{kExitPrecondition, "cannot write " + name + " under " + dir};
  return o;
}

Automaton periodic_automaton(int base, std::uint64_t m, const std::vector<Value>& table) {
  Automaton a = Automaton::make(base, static_cast<int>(m), 0);
  a.outputs.resize(m);
  for (std::uint64_t r = 0; r < m; ++r) {
    for (int j = 0; j < base; ++j) a.delta[r][j] = static_cast<int>((r * base + j) % m);
    a.outputs[r] = table[r];
    a.names[r] = "r" + std::to_string(r);
  }
  return a;
}

int cmd_norm(const std::string& automaton_path, const std::string& d_list,
             const std::string& l_range, bool force, std::uint64_t budget, int threads,
             const std::string& method, const std::string& out_dir) {
  if (method != "dp" && method != "naive" && method != "both")
    throw CliError{kExitParse, "--method must be dp, naive or both"};
  Automaton a = load_automaton(automaton_path);
  if (!a.has_outputs()) throw CliError{kExitPrecondition, "norm needs an automaton with outputs"};
  auto ds = parse_int_list(d_list);
  auto [l_lo, l_hi] = parse_range(l_range);
  std::ostringstream csv;
  csv << "method,d,L,N,Ntilde,value,agree,seconds\n";
  csv.setf(std::ios::fixed);
  for (int d : ds) {
    if (d < 1) throw CliError{kExitPrecondition, "d must be >= 1"};
    CountingDp dp(a, d);
    for (int l = 1; l <= l_hi; ++l) {
      dp.step();
      if (l < l_lo) continue;
      auto t0 = std::chrono::steady_clock::now();
      NormResult r = dp.norm();
      double dp_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      char buf[256];
      if (method != "naive") {
        std::snprintf(buf, sizeof buf, "dp,%d,%d,%llu,%llu,%.12f,,%.3f\n", d, l,
                      static_cast<unsigned long long>(r.n),
                      static_cast<unsigned long long>(r.ntilde), r.value, dp_sec);
        csv << buf;
      }
      double ops = std::pow(static_cast<double>(r.n), d + 1);
      bool within = force || ops <= static_cast<double>(budget);
      if (method == "naive" && !within)
        throw std::runtime_error("budget exceeded: N^(d+1) > " + std::to_string(budget));
      if (method != "dp" && within) {
        std::vector<Complex> f;
        f.reserve(r.n);
        for (std::uint64_t n = 0; n < r.n; ++n) f.push_back(a.eval(BigInt(n)).to_complex());
        t0 = std::chrono::steady_clock::now();
        NormResult nv = gowers_norm_interval_naive(f, d, budget, force, threads);
        double nv_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::snprintf(buf, sizeof buf, "naive,%d,%d,%llu,%llu,%.12f,%d,%.3f\n", d, l,
                      static_cast<unsigned long long>(nv.n),
                      static_cast<unsigned long long>(nv.ntilde), nv.value,
                      std::abs(nv.value - r.value) <= 1e-9 ? 1 : 0, nv_sec);
        csv << buf;
      }
    }
  }
  if (out_dir.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_dir, "norms.csv") << csv.str();
    std::cout << "wrote " << (fs::path(out_dir) / "norms.csv").string() << "\n";
  }
  return 0;
}

int cmd_decompose(const std::string& automaton_path, const std::string& d_list,
                  const std::string& l_range, std::uint64_t verify_n, int pmax,
                  const std::string& out_dir) {
  Automaton a = load_automaton(automaton_path);
  if (!a.has_outputs()) throw CliError{kExitPrecondition, "decompose needs outputs"};
  std::vector<int> ds = d_list.empty() ? std::vector<int>{} : parse_int_list(d_list);
  auto [l_lo, l_hi] = l_range.empty() ? std::pair<int, int>{8, 16} : parse_range(l_range);
  Decomposition dec = decompose_general(a, ds, l_lo, l_hi);

  json manifest;
  manifest["base"] = dec.base;
  manifest["period_M"] = dec.str.period;
  manifest["component_dprimes"] = dec.dprimes;
  manifest["word_y"] = dec.word_y.str();
  manifest["word_z"] = dec.word_z.str();
  manifest["z_density"] = dec.z_density;
  manifest["files"] = {{"per", "per.aut"},     {"fs", "fs.aut"},
                       {"bs", "bs.aut"},       {"combiner", "combiner.tbl"},
                       {"a_str", "a_str.aut"}, {"a_uni", "a_uni.aut"}};
  json fits = json::array();
  for (size_t i = 0; i < dec.fits.size(); ++i) {
    json f;
    f["d"] = ds[i];
    f["c"] = dec.fits[i].exact_zero ? std::numeric_limits<double>::infinity() : dec.fits[i].c;
    f["r2"] = dec.fits[i].r2;
    f["exact_zero"] = dec.fits[i].exact_zero;
    fits.push_back(f);
  }
  manifest["decay_fits"] = fits;
  if (pmax > 0) {
    OrthogonalityReport orep = orthogonality_test(a, pmax, 1 << 14);
    manifest["periodic_correlation"] = {{"pmax", pmax},
                                        {"corr_small", orep.corr_small},
                                        {"corr_large", orep.corr_large},
                                        {"orthogonal", orep.orthogonal},
                                        {"structured_support_density", orep.support_density_large}};
  }

  std::string dir = out_dir.empty() ? "." : out_dir;
  open_out(dir, "per.aut") << to_text(periodic_automaton(dec.base, dec.str.period,
                                                         dec.str.periodic_table));
  open_out(dir, "fs.aut") << to_text(dec.str.fs);
  open_out(dir, "bs.aut") << to_text(dec.str.bs);
  open_out(dir, "a_str.aut") << to_text(dec.a_str);
  open_out(dir, "a_uni.aut") << to_text(dec.a_uni);
  {
    auto tbl = open_out(dir, "combiner.tbl");
    for (std::uint64_t r = 0; r < dec.str.period; ++r)
      for (size_t f = 0; f < dec.str.combiner[r].size(); ++f)
        for (size_t b = 0; b < dec.str.combiner[r][f].size(); ++b)
          tbl << "F " << r << " " << f << " " << b << " " << dec.str.combiner[r][f][b].str()
              << "\n";
  }
  if (verify_n > 0) {
    for (std::uint64_t n = 0; n < verify_n; ++n) {
      Value lhs = dec.a_str.eval(BigInt(n)) + dec.a_uni.eval(BigInt(n));
      Value rhs = dec.original.eval(BigInt(n));
      if (!(lhs.to_rational() == rhs.to_rational()))
        throw CliError{kExitPrecondition, "additivity violated at n=" + std::to_string(n)};
    }
    manifest["verified_additivity_up_to"] = verify_n;
  }
  open_out(dir, "manifest.json") << manifest.dump(2) << "\n";
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

int cmd_gea(const std::string& automaton_path, bool verify, const std::string& out_dir) {
  Automaton a = load_automaton(automaton_path);
  Automaton prepared = make_idempotent(trim(a));
  prepared = trim(prepared);
  if (!is_strongly_connected(prepared))
    throw CliError{kExitPrecondition, "automaton is not strongly connected after trim"};
  std::pair<GEA, EfficiencyCertificate> built = [&] {
    try {
      return build_efficient_gea(prepared);
    } catch (const std::invalid_argument& e) {
      throw CliError{kExitPrecondition, e.what()};
    }
  }();
  auto& [gea, cert] = built;
  json report;
  report["dprime"] = cert.dprime;
  report["g0_order"] = cert.g0_elements.size();
  report["g0"] = gea.group.element(cert.g0).cycles();
  report["sync_word"] = cert.sync_word.str();
  report["group_order"] = gea.group.size();
  report["states"] = gea.num_states();
  if (verify) {
    EfficiencyReport rep = verify_efficiency(gea, cert);
    report["T1"] = rep.t1;
    report["T2"] = rep.t2;
    report["T3"] = rep.t3;
    report["t1_stabilization"] = rep.t1_stabilization;
    report["t3_stabilization"] = rep.t3_stabilization;
  }
  std::string dir = out_dir.empty() ? "." : out_dir;
  open_out(dir, "efficient.gea") << to_text(gea);
  open_out(dir, "certificate.json") << report.dump(2) << "\n";
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_cubes(const std::string& gea_path, int d, const std::string& out_dir) {
  if (d > 3) throw CliError{kExitPrecondition, "cube computations capped at d <= 3"};
  GEA t = load_gea(gea_path);
  EfficiencyCertificate cert = [&] {
    try {
      return make_certificate(t);
    } catch (const std::exception& e) {
      throw CliError{kExitPrecondition, e.what()};
    }
  }();
  CubeSetResult q = cube_group(t, d);
  json report;
  report["d"] = d;
  report["stabilization_length"] = q.stabilization;
  report["cube_count"] = q.set.count();
  CubeTheoremReport thm = verify_cube_theorem(t, d, cert.dprime, cert.g0_elements, cert.g0);
  report["theorem_cubes_equal"] = thm.equal;
  report["g0_cubes_included"] = thm.g0_inclusion;
  // characteristic chain verdicts
  json chain_report = json::array();
  CharacteristicChain chain = characteristic_chain(t);
  const GEA* cur = &t;
  for (auto& step : chain.steps) {
    json s;
    s["states"] = step.gea.num_states();
    s["group_order"] = step.gea.group.size();
    s["characteristic_d" + std::to_string(d)] = verify_characteristic(*cur, step.gea, step.pi, d);
    chain_report.push_back(s);
    cur = &step.gea;
  }
  report["chain"] = chain_report;
  report["terminal_order"] = chain.terminal.group.size();
  report["dprime"] = cert.dprime;

  std::string dir = out_dir.empty() ? "." : out_dir;
  {
    auto cubes = open_out(dir, "q" + std::to_string(d) + "_v0.txt");
    for (std::uint64_t x = 0; x < q.set.size_space(); ++x)
      if (q.set.bits[x]) {
        auto cube = q.set.decode(x);
        for (size_t o = 0; o < cube.size(); ++o)
          cubes << (o ? " " : "") << t.group.element(cube[o]).cycles();
        cubes << "\n";
      }
  }
  open_out(dir, "cubes_report.json") << report.dump(2) << "\n";
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_apcount(const std::string& set_path, const std::string& automaton_path,
                const std::string& member, std::uint64_t n, int l, const std::string& eps_list,
                const std::string& out_dir) {
  std::vector<char> a(n, 0);
  if (!set_path.empty()) {
    std::ifstream in(set_path);
    if (!in) throw CliError{kExitParse, "cannot open " + set_path};
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::uint64_t v = std::strtoull(line.c_str(), nullptr, 10);
      if (v < n) a[v] = 1;
    }
  } else if (!automaton_path.empty()) {
    Automaton aut = load_automaton(automaton_path);
    Value m = Value::parse(member);
    for (std::uint64_t i = 0; i < n; ++i) a[i] = aut.eval(BigInt(i)) == m;
  } else {
    throw CliError{kExitParse, "apcount needs --set or --automaton with --member"};
  }
  std::ostringstream counts;
  counts << "m,count\n";
  for (std::uint64_t m = 0; m < n; ++m) counts << m << "," << ap_count(a, l, m) << "\n";
  std::ostringstream sweep;
  sweep << "eps,good_m,fraction\n";
  std::vector<std::pair<double, double>> pts;
  for (double eps : parse_double_list(eps_list)) {
    ManyApReport rep = many_ap_check(a, l, eps);
    sweep << eps << "," << rep.good_m << "," << rep.fraction << "\n";
    if (rep.fraction > 0) pts.push_back({std::log(eps), std::log(rep.fraction)});
  }
  std::string dir = out_dir.empty() ? "." : out_dir;
  open_out(dir, "apcount.csv") << counts.str();
  open_out(dir, "eps_sweep.csv") << sweep.str();
  double exponent = 0;
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double m2 = static_cast<double>(pts.size());
    exponent = (m2 * sxy - sx * sy) / (m2 * sxx - sx * sx);
  }
  std::cout << "{ \"fitted_exponent\": " << exponent << " }\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured/uniform decomposition and Gowers norms of automatic sequences"};
  app.require_subcommand(1);

  std::string automaton_path, gea_path, set_path, member, d_list = "2", l_range = "4..10";
  std::string eps_list = "0.05", out_dir, method = "both";
  std::uint64_t n_flag = 4096, verify_n = 0, budget = kDefaultBudget;
  int pmax = 0, threads = 1, d_single = 2, l_ap = 3;
  bool force = false, verify_eff = false;

  auto* norm = app.add_subcommand("norm", "Gowers norms by transfer DP and naive summation");
  norm->add_option("--automaton", automaton_path)->required();
  norm->add_option("--d", d_list, "comma-separated orders");
  norm->add_option("--L", l_range, "digit-length range a..b");
  norm->add_flag("--force", force, "ignore the operation budget");
  norm->add_option("--budget", budget, "naive op-count budget");
  norm->add_option("--threads", threads);
  norm->add_option("--method", method, "dp, naive or both");
  norm->add_option("--out", out_dir);

  auto* dec = app.add_subcommand("decompose", "structured + uniform decomposition");
  dec->add_option("--automaton", automaton_path)->required();
  dec->add_option("--d", d_list, "orders for decay fits (empty = none)");
  dec->add_option("--L", l_range, "fit range a..b");
  dec->add_option("--verify", verify_n, "re-check additivity for n < N");
  dec->add_option("--pmax", pmax, "report periodic correlations up to this period");
  dec->add_option("--out", out_dir);

  auto* gea = app.add_subcommand("gea", "efficient group-extension automaton + certificate");
  gea->add_option("--automaton", automaton_path)->required();
  gea->add_flag("--verify-efficiency", verify_eff, "run the exact (T1)-(T3) decision");
  gea->add_option("--out", out_dir);

  auto* cubes = app.add_subcommand("cubes", "cube groups, theorem checks, characteristic chain");
  cubes->add_option("--gea", gea_path)->required();
  cubes->add_option("--d", d_single);
  cubes->add_option("--out", out_dir);

  auto* ap = app.add_subcommand("apcount", "arithmetic progression counts in automatic sets");
  ap->add_option("--set", set_path, "newline-separated integers");
  ap->add_option("--automaton", automaton_path, "membership automaton");
  ap->add_option("--member", member, "output value marking membership, e.g. int:1");
  ap->add_option("--N", n_flag);
  ap->add_option("--l", l_ap, "progression length");
  ap->add_option("--eps", eps_list, "comma-separated epsilon grid");
  ap->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);
  budget = budget_from_env(budget);

  try {
    if (norm->parsed())
      return cmd_norm(automaton_path, d_list, l_range, force, budget, threads, method, out_dir);
    if (dec->parsed())
      return cmd_decompose(automaton_path, d_list, l_range, verify_n, pmax, out_dir);
    if (gea->parsed()) return cmd_gea(automaton_path, verify_eff, out_dir);
    if (cubes->parsed()) return cmd_cubes(gea_path, d_single, out_dir);
    if (ap->parsed())
      return cmd_apcount(set_path, automaton_path, member, n_flag, l_ap, eps_list, out_dir);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::cerr << "error: " << msg << "\n";
    if (msg.find("budget exceeded") != std::string::npos) return kExitBudget;
    if (msg.find("parse error") != std::string::npos) return kExitParse;
    return kExitPrecondition;
  }
  return 0;
}
