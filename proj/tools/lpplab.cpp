// lpplab: command-line front end for the LPP laboratory.
//
// Exit codes: 0 success, 1 verdict failure under --assert, 2 configuration
// error, 3 resource or unsupported-operation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lpp/busemann.hpp"
#include "lpp/coarsegrain.hpp"
#include "lpp/criterion.hpp"
#include "lpp/distributions.hpp"
#include "lpp/errors.hpp"
#include "lpp/format.hpp"
#include "lpp/lattice.hpp"
#include "lpp/legendre.hpp"

namespace {

using Json = nlohmann::ordered_json;
using lpp::format_double;

constexpr int kExitVerdict = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json num_array(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

// Resolved options of one run, in declaration order. Re-running the
// recorded argv reproduces the artifact.
struct RunRecord {
  std::vector<std::string> command;
  std::vector<std::pair<std::string, std::string>> options;
  int threads = 0;

  void add(const std::string& key, const std::string& value) {
    options.emplace_back(key, value);
  }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, std::uint64_t value) {
    add(key, std::to_string(value));
  }

  std::vector<std::string> argv() const {
    std::vector<std::string> out{"lpplab"};
    out.insert(out.end(), command.begin(), command.end());
    for (const auto& [k, v] : options) {
      out.push_back("--" + k);
      out.push_back(v);
    }
    return out;
  }

  Json to_json() const {
    Json j;
    std::string cmd;
    for (const auto& c : command) cmd += (cmd.empty() ? "" : " ") + c;
    j["command"] = cmd;
    Json opts = Json::object();
    for (const auto& [k, v] : options) opts[k] = v;
    j["options"] = opts;
    j["threads"] = threads;
    j["argv"] = argv();
    return j;
  }
};

struct Output {
  std::string path;
  std::string format;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw lpp::ConfigError("cannot open '" + path + "' for writing");
  f << text;
}

// CSV goes to `out` with the run record in `<out>.meta.json`; on stdout the
// record is omitted.
void emit_csv(const Output& out, const std::string& csv, const RunRecord& rec) {
  write_text(out.path, csv);
  if (!out.path.empty() && out.path != "-")
    write_text(out.path + ".meta.json", rec.to_json().dump(2) + "\n");
}

void emit_json(const Output& out, Json body, const RunRecord& rec) {
  body["config"] = rec.to_json();
  write_text(out.path, body.dump(2) + "\n");
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::vector<std::string>& header) {
  std::ifstream f(path);
  if (!f) throw lpp::ConfigError("cannot read '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      header = cells;
      first = false;
    } else {
      rows.push_back(cells);
    }
  }
  return rows;
}

std::vector<double> csv_column(const std::string& path, const std::string& name,
                               bool required = true) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, header);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) col = i;
  if (col == header.size()) {
    if (!required) return {};
    throw lpp::ConfigError("'" + path + "' has no column '" + name + "'");
  }
  std::vector<double> out;
  for (const auto& r : rows) {
    if (col >= r.size()) throw lpp::ConfigError("short row in '" + path + "'");
    out.push_back(lpp::parse_double(r[col]));
  }
  return out;
}

lpp::ShapeSlice read_slice(const std::string& path, double m) {
  lpp::ShapeSlice slice;
  slice.s_grid = csv_column(path, "s");
  slice.gamma = csv_column(path, "gamma");
  slice.std_error = csv_column(path, "stderr", false);
  slice.m = m;
  slice.source = slice.std_error.empty() ? lpp::SliceSource::analytic
                                         : lpp::SliceSource::monte_carlo;
  return slice;
}

std::string slice_csv(const lpp::ShapeSlice& slice) {
  std::string csv = slice.std_error.empty() ? "s,gamma\n" : "s,gamma,stderr\n";
  for (std::size_t i = 0; i < slice.s_grid.size(); ++i) {
    csv += format_double(slice.s_grid[i]) + "," + format_double(slice.gamma[i]);
    if (!slice.std_error.empty()) csv += "," + format_double(slice.std_error[i]);
    csv += "\n";
  }
  return csv;
}

// Points with s > 1 carry no extra information by symmetry.
lpp::ShapeSlice unit_interval(lpp::ShapeSlice slice) {
  lpp::ShapeSlice out = slice;
  out.s_grid.clear();
  out.gamma.clear();
  out.std_error.clear();
  for (std::size_t i = 0; i < slice.s_grid.size(); ++i) {
    if (slice.s_grid[i] > 1) continue;
    out.s_grid.push_back(slice.s_grid[i]);
    out.gamma.push_back(slice.gamma[i]);
    if (!slice.std_error.empty()) out.std_error.push_back(slice.std_error[i]);
  }
  if (out.s_grid.empty()) throw lpp::ConfigError("slice has no points with s <= 1");
  return out;
}

// Flat `key = value` config file turned into `--key=value` tokens.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw lpp::ConfigError("cannot read config '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(f, line)) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw lpp::ConfigError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Config tokens go right after the subcommand words so that explicit flags,
// which come later, win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw lpp::ConfigError("--config needs a path");
      config = read_config(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = read_config(args[i].substr(9));
    } else {
      rest.push_back(args[i]);
    }
  }
  std::size_t words = 0;
  while (words < rest.size() && !rest[words].empty() && rest[words][0] != '-')
    ++words;
  std::vector<std::string> out(rest.begin(), rest.begin() + words);
  out.insert(out.end(), config.begin(), config.end());
  out.insert(out.end(), rest.begin() + words, rest.end());
  return out;
}

void check_format(const Output& out, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (out.format == f) return;
  throw lpp::ConfigError("unsupported --format '" + out.format + "' here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for i.i.d. last-passage percolation"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::function<int()> action;
  RunRecord rec;
  Output out;
  bool assert_verdict = false;
  int threads = 0;

  std::map<const CLI::App*, std::string> default_format;
  auto add_output = [&](CLI::App* sub, const std::string& format) {
    default_format[sub] = format;
    sub->add_option("--out", out.path, "Output file (stdout when omitted)");
    sub->add_option("--format", out.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_assert = [&](CLI::App* sub, const std::string& what) {
    sub->add_flag("--assert", assert_verdict, "Exit 1 unless " + what);
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "Replica threads (0: OpenMP default)")
        ->check(CLI::NonNegativeNumber);
  };
  const std::string law_help =
      "Weight law, e.g. bernoulli:p=0.7, exp:rate=1, uniform:lo=0,hi=1, "
      "twopoint:a=2,b=5,p=0.7, geometric:p=0.5 (support 0,1,2,...), "
      "lognormal:mu=0,sigma=1, chisq:k=0.5";

  // shape -------------------------------------------------------------------
  std::string shape_law = "exp:rate=1";
  int shape_N = 2000, shape_replicas = 20, shape_grid = 33;
  std::uint64_t shape_seed = 1;
  bool shape_serial = false;
  auto* shape = app.add_subcommand("shape", "Monte Carlo G([Nx],[N(1-x)])/N profile");
  shape->add_option("--law", shape_law, law_help);
  shape->add_option("--N", shape_N, "Antidiagonal size");
  shape->add_option("--replicas", shape_replicas, "Independent replicas");
  shape->add_option("--grid", shape_grid, "Interior x points i/(grid+1)");
  shape->add_option("--seed", shape_seed, "Master seed");
  shape->add_flag("--serial", shape_serial, "Use the serial reference kernel");
  add_threads(shape);
  add_output(shape, "csv");
  add_assert(shape, "every estimate is <= g_Exp + 3 stderr");
  shape->callback([&] {
    action = [&]() -> int {
      check_format(out, {"csv", "json"});
      const lpp::WeightLaw law = lpp::parse_law(shape_law);
      if (shape_grid < 1) throw lpp::ConfigError("--grid must be >= 1");
      rec.command = {"shape"};
      rec.add("law", law.spec());
      rec.add("N", shape_N);
      rec.add("replicas", shape_replicas);
      rec.add("grid", shape_grid);
      rec.add("seed", shape_seed);
      rec.add("format", out.format);
      rec.threads = threads;
      lpp::ShapeOptions opts;
      opts.N = shape_N;
      opts.replicas = shape_replicas;
      opts.seed = shape_seed;
      opts.threads = threads;
      opts.x_grid = lpp::interior_grid(shape_grid);
      const lpp::ShapeEstimate est = shape_serial ? lpp::shape_profile_serial(law, opts)
                                                  : lpp::shape_profile(law, opts);
      const lpp::ExpShapeParams params = lpp::exp_shape_params(law);
      bool dominated = true;
      std::string csv = "x,g_hat,stderr,g_exp,N,replicas,law,seed\n";
      Json rows = Json::array();
      for (std::size_t i = 0; i < est.x_grid.size(); ++i) {
        const double x = est.x_grid[i];
        const double ge = lpp::g_exp(params, x, 1 - x);
        if (!(est.mean_over_N[i] <= ge + 3 * est.std_error[i])) dominated = false;
        csv += format_double(x) + "," + format_double(est.mean_over_N[i]) + "," +
               format_double(est.std_error[i]) + "," + format_double(ge) + "," +
               std::to_string(est.N) + "," + std::to_string(est.replicas) + "," +
               "\"" + law.spec() + "\"," + std::to_string(shape_seed) + "\n";
        rows.push_back({{"x", x},
                        {"g_hat", num(est.mean_over_N[i])},
                        {"stderr", num(est.std_error[i])},
                        {"g_exp", ge}});
      }
      if (out.format == "csv") {
        emit_csv(out, csv, rec);
      } else {
        emit_json(out, {{"law", law.spec()}, {"N", est.N}, {"replicas", est.replicas},
                        {"seed", shape_seed}, {"rows", rows},
                        {"dominated_by_g_exp", dominated}},
                  rec);
      }
      return assert_verdict && !dominated ? kExitVerdict : 0;
    };
  });

  // criterion ----------------------------------------------------------------
  std::string crit_law = "bernoulli:p=0.7";
  int crit_grid = 1000;
  auto* criterion = app.add_subcommand(
      "criterion", "Check log(4) s/(1+s) < I(g_Exp(1,s)/(1+s)) on (0,1)");
  criterion->add_option("--law", crit_law, law_help);
  criterion->add_option("--grid", crit_grid, "Interior grid resolution (>= 100)");
  add_output(criterion, "json");
  add_assert(criterion, "the criterion holds");
  criterion->callback([&] {
    if (action) return;  // a nested subcommand already chose the action
    action = [&]() -> int {
      check_format(out, {"json", "csv"});
      const lpp::WeightLaw law = lpp::parse_law(crit_law);
      rec.command = {"criterion"};
      rec.add("law", law.spec());
      rec.add("grid", crit_grid);
      rec.add("format", out.format);
      const lpp::CriterionReport rep = lpp::check_criterion(law, crit_grid);
      if (out.format == "csv") {
        std::string csv = "s,lhs,rhs,phi\n";
        for (std::size_t i = 0; i < rep.s_grid.size(); ++i)
          csv += format_double(rep.s_grid[i]) + "," + format_double(rep.lhs[i]) +
                 "," + format_double(rep.rhs[i]) + "," + format_double(rep.phi[i]) +
                 "\n";
        emit_csv(out, csv, rec);
      } else {
        emit_json(out,
                  {{"law", rep.law},
                   {"holds", rep.holds},
                   {"verdict", rep.verdict()},
                   {"worst_s", rep.worst_s},
                   {"worst_phi", num(rep.worst_phi)},
                   {"refined_points", rep.refined_points},
                   {"failing_s", num_array(rep.failing_s)},
                   {"s_grid", num_array(rep.s_grid)},
                   {"lhs", num_array(rep.lhs)},
                   {"rhs", num_array(rep.rhs)},
                   {"phi", num_array(rep.phi)}},
                  rec);
      }
      return assert_verdict && !rep.holds ? kExitVerdict : 0;
    };
  });

  // phi / pstar, both top-level and under criterion ----------------------------
  double phi_p = 0.5, phi_smax = 0.0;
  int phi_grid = 1000;
  auto phi_action = [&] {
    action = [&]() -> int {
      check_format(out, {"csv", "json"});
      rec.command = {"phi"};
      rec.add("p", phi_p);
      rec.add("grid", phi_grid);
      if (phi_smax > 0) rec.add("smax", phi_smax);
      rec.add("format", out.format);
      const lpp::BernoulliAnalysis an = lpp::bernoulli_analysis(phi_p, phi_grid, phi_smax);
      bool negative = true;
      std::string csv = "s,phi\n";
      for (std::size_t i = 0; i < an.s_grid.size(); ++i) {
        if (!(an.phi[i] < 0)) negative = false;
        csv += format_double(an.s_grid[i]) + "," + format_double(an.phi[i]) + "\n";
      }
      if (out.format == "csv") {
        emit_csv(out, csv, rec);
      } else {
        emit_json(out, {{"p", phi_p}, {"s_star", num(an.s_star)},
                        {"negative_throughout", negative},
                        {"s", num_array(an.s_grid)}, {"phi", num_array(an.phi)}},
                  rec);
      }
      return assert_verdict && !negative ? kExitVerdict : 0;
    };
  };
  auto add_phi = [&](CLI::App* parent) {
    auto* phi = parent->add_subcommand("phi", "Bernoulli phi(s) grid (CSV s,phi)");
    phi->add_option("--p", phi_p, "Bernoulli parameter")->required();
    phi->add_option("--grid", phi_grid, "Number of interior points");
    phi->add_option("--smax", phi_smax, "Right end of the s range (default s*(p), or 1)");
    add_output(phi, "csv");
    add_assert(phi, "phi < 0 at every grid point");
    phi->callback(phi_action);
  };
  auto pstar_action = [&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      rec.command = {"pstar"};
      const lpp::PStar ps = lpp::p_star();
      Json body = {{"p_star", ps.p}, {"residual", ps.residual},
                   {"monotone_bracket", ps.monotone}};
      if (out.path.empty()) {
        std::cout << "p* = " << format_double(ps.p)
                  << "  residual = " << format_double(ps.residual) << "\n";
      } else {
        emit_json(out, body, rec);
      }
      return assert_verdict && !(ps.residual <= 1e-8) ? kExitVerdict : 0;
    };
  };
  auto add_pstar = [&](CLI::App* parent) {
    auto* ps = parent->add_subcommand("pstar", "Bernoulli threshold p*");
    add_output(ps, "json");
    add_assert(ps, "the residual is <= 1e-8");
    ps->callback(pstar_action);
  };
  add_phi(&app);
  add_pstar(&app);
  add_phi(criterion);
  add_pstar(criterion);

  // busemann -------------------------------------------------------------------
  std::string bus_law = "exp:rate=1";
  lpp::BusemannOptions bus;
  int bus_kmax = 0, bus_path = 0;
  std::vector<int> bus_sweep;
  auto* busemann = app.add_subcommand("busemann", "Finite-horizon Busemann statistics");
  busemann->add_option("--law", bus_law, law_help);
  busemann->add_option("--s", bus.s, "Direction slope");
  busemann->add_option("--n", bus.n, "Horizon");
  busemann->add_option("--replicas", bus.replicas, "Independent fields");
  busemann->add_option("--seed", bus.seed, "Master seed");
  busemann->add_option("--kmax", bus_kmax, "Down/right increments v_k, k <= kmax");
  busemann->add_option("--path-length", bus_path,
                       "Variance bound along v_0..v_N (0: skip)");
  busemann->add_option("--sweep", bus_sweep,
                       "Repeat the adjacent statistics at these horizons, e.g. 250,500,1000,2000")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  busemann->add_flag("--serial", bus.serial, "Use the serial reference kernel");
  add_threads(busemann);
  add_output(busemann, "json");
  add_assert(busemann, "the adjacent covariance is <= 3 stderr");
  busemann->callback([&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      const lpp::WeightLaw law = lpp::parse_law(bus_law);
      bus.threads = threads;
      rec.command = {"busemann"};
      rec.add("law", law.spec());
      rec.add("s", bus.s);
      rec.add("n", bus.n);
      rec.add("replicas", bus.replicas);
      rec.add("seed", bus.seed);
      rec.add("kmax", bus_kmax);
      rec.add("path-length", bus_path);
      if (!bus_sweep.empty()) {
        std::string list;
        for (int h : bus_sweep) list += (list.empty() ? "" : ",") + std::to_string(h);
        rec.add("sweep", list);
      }
      rec.threads = threads;
      const lpp::AdjacentSummary adj = lpp::adjacent_summary(law, bus);
      auto pair_json = [](const lpp::IncrementCovReport& r) {
        Json j = {{"k", r.k}, {"pair", r.pair}, {"cov", num(r.cov)},
                  {"stderr", num(r.std_error)}};
        j["nonpositive"] = r.nonpositive ? Json(*r.nonpositive) : Json(nullptr);
        return j;
      };
      auto mean_json = [](const lpp::MeanCheck& m) {
        return Json{{"estimate", num(m.estimate)}, {"stderr", num(m.std_error)},
                    {"reference", num(m.reference)}};
      };
      Json body = {{"schema", "busemann-v1"}, {"law", law.spec()}, {"s", bus.s},
                   {"n", bus.n}, {"replicas", bus.replicas}, {"seed", bus.seed}};
      Json pairs = Json::array({pair_json(adj.cov)});
      if (bus_kmax > 0) {
        const lpp::DownRightCov dr = lpp::downright_cov(law, bus, bus_kmax);
        for (std::size_t i = 1; i < dr.with_e2.size(); ++i)
          pairs.push_back(pair_json(dr.with_e2[i]));
        for (const auto& r : dr.with_e1) pairs.push_back(pair_json(r));
      }
      body["pairs"] = pairs;
      body["means"] = {{"B(0,e1)", mean_json(adj.e1)}, {"B(0,e2)", mean_json(adj.e2)}};
      if (bus_path > 0) {
        const lpp::VarianceBound vb = lpp::variance_bound_check(law, bus, bus_path);
        body["variance_bound"] = {{"path_length", bus_path},
                                  {"lhs", num(vb.lhs)}, {"lhs_stderr", num(vb.lhs_error)},
                                  {"rhs", num(vb.rhs)}, {"rhs_stderr", num(vb.rhs_error)},
                                  {"ratio", num(vb.ratio)},
                                  {"ratio_stderr", num(vb.ratio_error)},
                                  {"holds", vb.verdict}};
      }
      if (!bus_sweep.empty()) {
        Json sweep = Json::array();
        for (int h : bus_sweep) {
          lpp::BusemannOptions at = bus;
          at.n = h;
          const lpp::AdjacentSummary a = lpp::adjacent_summary(law, at);
          sweep.push_back({{"n", h}, {"cov", num(a.cov.cov)}, {"stderr", num(a.cov.std_error)},
                           {"B(0,e1)", mean_json(a.e1)}, {"B(0,e2)", mean_json(a.e2)}});
        }
        body["sweep"] = sweep;
      }
      emit_json(out, body, rec);
      const bool ok = adj.cov.cov <= 3 * adj.cov.std_error;
      return assert_verdict && !ok ? kExitVerdict : 0;
    };
  });

  // coarse ---------------------------------------------------------------------
  lpp::CoarseGridSpec cg;
  std::string cg_s = "1", cg_r = "1";
  cg.N = 12;
  cg.M = 4;
  cg.L = 2;
  int cg_trials = 1000;
  std::uint64_t cg_seed = 7;
  std::string cg_law = "exp:rate=1";
  auto* coarse = app.add_subcommand("coarse", "Coarse-grained path classes");
  coarse->require_subcommand(1);
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--N", cg.N, "Endpoint (N, N s)");
    sub->add_option("--s", cg_s, "Slope, rational (e.g. 1/2)");
    sub->add_option("--r", cg_r, "Line slope r in (0, 1], rational");
    sub->add_option("--M", cg.M, "Line spacing");
    sub->add_option("--L", cg.L, "Coarse point spacing");
    sub->add_option("--bN", cg.b_N, "Weight bound b_N");
    add_output(sub, "json");
  };
  auto spec_record = [&](const std::string& name) {
    cg.s = lpp::parse_rational(cg_s);
    cg.r = lpp::parse_rational(cg_r);
    lpp::validate(cg);
    rec.command = {"coarse", name};
    rec.add("N", cg.N);
    rec.add("s", lpp::format_rational(cg.s));
    rec.add("r", lpp::format_rational(cg.r));
    rec.add("M", cg.M);
    rec.add("L", cg.L);
    rec.add("bN", cg.b_N);
  };
  auto* enumerate = coarse->add_subcommand("enumerate", "Exact |PATH'_N| and bounds");
  add_spec(enumerate);
  add_assert(enumerate, "the exact count is below the counting bound");
  enumerate->callback([&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      spec_record("enumerate");
      const std::uint64_t count = lpp::enumerate_paths(cg);
      const lpp::CountBound bound = lpp::count_bound_log(cg);
      const bool below = std::log(static_cast<double>(count)) <= bound.log_bound;
      emit_json(out,
                {{"exact_count", count},
                 {"bound_log", bound.log_bound},
                 {"segment_bound_log", bound.segment_log},
                 {"bound_exponent", bound.exponent},
                 {"asymptotic_log", bound.asymptotic},
                 {"crossings", lpp::crossings(cg.N, cg.s, cg.r, cg.M)},
                 {"crossings_geometric", lpp::crossings_geometric(cg.N, cg.s, cg.r, cg.M)},
                 {"count_below_bound", below}},
                rec);
      return assert_verdict && !below ? kExitVerdict : 0;
    };
  });
  auto* verify = coarse->add_subcommand("verify-modify",
                                        "Randomized checks of the path modification");
  add_spec(verify);
  verify->add_option("--trials", cg_trials, "Random up/right paths");
  verify->add_option("--seed", cg_seed, "Master seed");
  verify->add_option("--law", cg_law, "Weight law before clamping to [-bN, bN]");
  add_assert(verify, "every trial passes");
  verify->callback([&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      spec_record("verify-modify");
      rec.add("trials", cg_trials);
      rec.add("seed", cg_seed);
      const lpp::WeightLaw law = lpp::parse_law(cg_law);
      rec.add("law", law.spec());
      const lpp::ModifyTrials t = lpp::verify_modify(cg, law, cg_trials, cg_seed);
      emit_json(out,
                {{"trials", t.trials},
                 {"trials_passed",
                  std::min({t.admissible, t.length_ok, t.weight_ok})},
                 {"admissible", t.admissible},
                 {"length_bound_ok", t.length_ok},
                 {"weight_bound_ok", t.weight_ok},
                 {"modified", t.modified},
                 {"crossings", lpp::crossings(cg.N, cg.s, cg.r, cg.M)},
                 {"bound_log", lpp::count_bound_log(cg).log_bound}},
                rec);
      return assert_verdict && !t.passed() ? kExitVerdict : 0;
    };
  });

  // legendre -------------------------------------------------------------------
  std::string leg_law = "exp:rate=1", leg_slice, leg_slice2, leg_dual, leg_shape;
  double leg_lo = 0.05, leg_hi = 5.0, leg_smin = 1e-4, leg_smax = 1e4, leg_tol = 1e-4;
  int leg_grid = 2000;
  auto* legendre = app.add_subcommand("legendre", "Legendre transforms of gamma(s) = g(1,s)");
  legendre->require_subcommand(1);
  auto* dual = legendre->add_subcommand("dual", "f(a) = sup_s (gamma(s) - s a), CSV a,f");
  dual->add_option("--law", leg_law, "Law giving m and sigma");
  dual->add_option("--slice", leg_slice, "Slice CSV (s,gamma[,stderr]); default analytic g_Exp");
  dual->add_option("--a-lo", leg_lo, "Smallest a - m");
  dual->add_option("--a-hi", leg_hi, "Largest a - m");
  dual->add_option("--grid", leg_grid, "Points in each grid");
  dual->add_option("--s-min", leg_smin, "Analytic slice: smallest s");
  dual->add_option("--s-max", leg_smax, "Analytic slice: largest s");
  add_output(dual, "csv");
  auto* slice = legendre->add_subcommand("slice", "gamma(s) = inf_a (s a + f(a)), CSV s,gamma");
  slice->add_option("--law", leg_law, "Law giving m");
  slice->add_option("--dual", leg_dual, "Dual CSV (a,f)")->required();
  slice->add_option("--s-min", leg_smin, "Smallest s");
  slice->add_option("--s-max", leg_smax, "Largest s");
  slice->add_option("--grid", leg_grid, "Points in the s grid");
  add_output(slice, "csv");
  auto* negcov = legendre->add_subcommand("negcov", "f(a) <= m + sigma^2/(a - m) per point");
  negcov->add_option("--law", leg_law, "Law giving m and sigma");
  negcov->add_option("--dual", leg_dual, "Dual CSV (a,f)")->required();
  negcov->add_option("--tol", leg_tol, "Equality tolerance");
  add_output(negcov, "json");
  add_assert(negcov, "the negative-covariance inequality holds");
  auto* compare = legendre->add_subcommand("compare", "Quadrant dominance of two slices on (0,1)");
  compare->add_option("--law", leg_law, "Law giving m");
  compare->add_option("--slice1", leg_slice, "Slice CSV")->required();
  compare->add_option("--slice2", leg_slice2, "Slice CSV; default analytic g_Exp of --law");
  add_output(compare, "json");
  add_assert(compare, "slice1 <= slice2 within 3 stderr");
  auto* profile = legendre->add_subcommand("profile", "Slice CSV from a shape CSV");
  profile->add_option("--law", leg_law, "Law giving m");
  profile->add_option("--shape", leg_shape, "CSV written by `lpplab shape`")->required();
  add_output(profile, "csv");

  auto leg_common = [&](const std::string& name) {
    const lpp::WeightLaw law = lpp::parse_law(leg_law);
    rec.command = {"legendre", name};
    rec.add("law", law.spec());
    return law;
  };
  dual->callback([&] {
    action = [&]() -> int {
      check_format(out, {"csv"});
      const lpp::WeightLaw law = leg_common("dual");
      const lpp::MomentSummary mom = lpp::moments(law);
      lpp::ShapeSlice sl;
      if (leg_slice.empty()) {
        rec.add("s-min", leg_smin);
        rec.add("s-max", leg_smax);
        sl = lpp::exp_slice(lpp::exp_shape_params(law),
                            lpp::log_grid(leg_smin, leg_smax, leg_grid));
      } else {
        rec.add("slice", leg_slice);
        sl = read_slice(leg_slice, mom.mean);
      }
      rec.add("a-lo", leg_lo);
      rec.add("a-hi", leg_hi);
      rec.add("grid", leg_grid);
      std::vector<double> a = lpp::log_grid(leg_lo, leg_hi, leg_grid);
      for (double& x : a) x += mom.mean;
      const lpp::DualFunction f = lpp::dual_from_slice(sl, a);
      std::string csv = "a,f\n";
      for (std::size_t i = 0; i < a.size(); ++i)
        csv += format_double(a[i]) + "," + format_double(f.f_values[i]) + "\n";
      emit_csv(out, csv, rec);
      return 0;
    };
  });
  slice->callback([&] {
    action = [&]() -> int {
      check_format(out, {"csv"});
      const lpp::WeightLaw law = leg_common("slice");
      rec.add("dual", leg_dual);
      rec.add("s-min", leg_smin);
      rec.add("s-max", leg_smax);
      rec.add("grid", leg_grid);
      lpp::DualFunction f;
      f.a_grid = csv_column(leg_dual, "a");
      f.f_values = csv_column(leg_dual, "f");
      f.m = lpp::moments(law).mean;
      const lpp::ShapeSlice sl =
          lpp::slice_from_dual(f, lpp::log_grid(leg_smin, leg_smax, leg_grid));
      emit_csv(out, slice_csv(sl), rec);
      return 0;
    };
  });
  negcov->callback([&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      const lpp::WeightLaw law = leg_common("negcov");
      rec.add("dual", leg_dual);
      rec.add("tol", leg_tol);
      const lpp::MomentSummary mom = lpp::moments(law);
      lpp::DualFunction f;
      f.a_grid = csv_column(leg_dual, "a");
      f.f_values = csv_column(leg_dual, "f");
      f.m = mom.mean;
      const lpp::NegCovVerdict v = lpp::neg_cov_condition(f, mom.mean, mom.sd, leg_tol);
      Json rel = Json::array();
      for (lpp::Relation r : v.points)
        rel.push_back(r == lpp::Relation::below ? "below"
                      : r == lpp::Relation::equal ? "equal" : "above");
      emit_json(out, {{"holds", v.holds}, {"reversed_holds", v.reversed_holds},
                      {"boundary", v.boundary}, {"max_excess", num(v.max_excess)},
                      {"points", rel}},
                rec);
      return assert_verdict && !v.holds ? kExitVerdict : 0;
    };
  });
  compare->callback([&] {
    action = [&]() -> int {
      check_format(out, {"json"});
      const lpp::WeightLaw law = leg_common("compare");
      rec.add("slice1", leg_slice);
      if (!leg_slice2.empty()) rec.add("slice2", leg_slice2);
      const double m = lpp::moments(law).mean;
      const lpp::ShapeSlice s1 = unit_interval(read_slice(leg_slice, m));
      const lpp::ShapeSlice s2 =
          leg_slice2.empty() ? lpp::exp_slice(lpp::exp_shape_params(law), s1.s_grid)
                             : unit_interval(read_slice(leg_slice2, m));
      const lpp::ShapeComparison c = lpp::compare_shapes(s1, s2);
      emit_json(out, {{"dominates", c.dominates}, {"dominated_by", c.dominated_by},
                      {"max_violation", num(c.max_violation)}, {"argmax_s", c.argmax_s}},
                rec);
      return assert_verdict && !c.dominates ? kExitVerdict : 0;
    };
  });
  profile->callback([&] {
    action = [&]() -> int {
      check_format(out, {"csv"});
      const lpp::WeightLaw law = leg_common("profile");
      rec.add("shape", leg_shape);
      lpp::ShapeEstimate est;
      est.x_grid = csv_column(leg_shape, "x");
      est.mean_over_N = csv_column(leg_shape, "g_hat");
      est.std_error = csv_column(leg_shape, "stderr");
      emit_csv(out, slice_csv(lpp::slice_from_profile(est, lpp::moments(law).mean)), rec);
      return 0;
    };
  });

  // dist -----------------------------------------------------------------------
  std::string dist_law = "exp:rate=1", dist_other;
  double dist_x = 0.0;
  std::size_t dist_count = 10;
  std::uint64_t dist_seed = 1;
  auto* dist = app.add_subcommand("dist", "Weight-law catalogue");
  dist->require_subcommand(1);
  auto dist_sub = [&](const std::string& name, const std::string& help) {
    auto* sub = dist->add_subcommand(name, help);
    sub->add_option("--law", dist_law, law_help);
    add_output(sub, "json");
    return sub;
  };
  auto dist_common = [&](const std::string& name) {
    check_format(out, {"json"});
    const lpp::WeightLaw law = lpp::parse_law(dist_law);
    rec.command = {"dist", name};
    rec.add("law", law.spec());
    return law;
  };
  dist_sub("moments", "Mean, variance, sd")->callback([&] {
    action = [&]() -> int {
      const lpp::WeightLaw law = dist_common("moments");
      const lpp::MomentSummary m = lpp::moments(law);
      emit_json(out, {{"mean", m.mean}, {"variance", m.variance}, {"sd", m.sd}}, rec);
      return 0;
    };
  });
  auto* rate_cmd = dist_sub("rate", "Cramer rate function I(a)");
  rate_cmd->add_option("--a", dist_x, "Point a")->required();
  rate_cmd->callback([&] {
    action = [&]() -> int {
      const lpp::WeightLaw law = dist_common("rate");
      rec.add("a", dist_x);
      const lpp::RateEvaluation r = lpp::rate(law, dist_x);
      emit_json(out, {{"a", dist_x}, {"rate", num(r.value)},
                      {"domain", {num(r.finite_domain.lo), num(r.finite_domain.hi)}}},
                rec);
      return 0;
    };
  });
  auto* mgf_cmd = dist_sub("mgf", "log M(t)");
  mgf_cmd->add_option("--t", dist_x, "Point t")->required();
  mgf_cmd->callback([&] {
    action = [&]() -> int {
      const lpp::WeightLaw law = dist_common("mgf");
      rec.add("t", dist_x);
      emit_json(out, {{"t", dist_x}, {"log_mgf", num(lpp::log_mgf(law, dist_x))}}, rec);
      return 0;
    };
  });
  auto* sample_cmd = dist_sub("sample", "Draws from the stream derive_seed(seed, \"dist\", 0)");
  sample_cmd->add_option("--count", dist_count, "Number of draws");
  sample_cmd->add_option("--seed", dist_seed, "Master seed");
  sample_cmd->callback([&] {
    action = [&]() -> int {
      const lpp::WeightLaw law = dist_common("sample");
      rec.add("count", static_cast<std::uint64_t>(dist_count));
      rec.add("seed", dist_seed);
      lpp::Engine engine = lpp::make_stream(dist_seed, "dist", 0);
      emit_json(out, {{"values", num_array(lpp::sample(law, engine, dist_count))}}, rec);
      return 0;
    };
  });
  auto* icx_cmd = dist_sub("icx", "E_F (X - t)^+ - E_G (X - t)^+ sign probe");
  icx_cmd->add_option("--other", dist_other, "Second law G")->required();
  icx_cmd->callback([&] {
    action = [&]() -> int {
      const lpp::WeightLaw law = dist_common("icx");
      const lpp::WeightLaw other = lpp::parse_law(dist_other);
      rec.add("other", other.spec());
      const lpp::IcxProbe p = lpp::icx_probe(law, other);
      emit_json(out, {{"sign_change", p.sign_change},
                      {"t_positive", p.t_positive}, {"max_gap", p.max_gap},
                      {"t_negative", p.t_negative}, {"min_gap", p.min_gap}},
                rec);
      return 0;
    };
  });

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    const CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
    if (out.format.empty()) out.format = default_format[leaf];
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const lpp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    return action ? action() : kExitConfig;
  } catch (const lpp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lpp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const lpp::UnsupportedOperation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const lpp::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
