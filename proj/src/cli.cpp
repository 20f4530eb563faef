#include "pvi/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pvi/applications.hpp"
#include "pvi/oracle.hpp"
#include "pvi/recurrences.hpp"

namespace pvi {

using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kCommands{"moments", "compute", "verify", "app"};
const std::vector<std::string> kModels{"generalized", "cue-gap", "cue-charpoly", "ising-low", "ising-high"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

Real parse_token(std::string tok) {
  bool neg = false;
  if (!tok.empty() && (tok[0] == '-' || tok[0] == '+')) {
    neg = tok[0] == '-';
    tok.erase(0, 1);
  }
  Real v;
  if (tok == "pi")
    v = pi_real();
  else if (tok == "inf")
    v = std::numeric_limits<Real>::infinity();
  else
    v = real_from_string(tok);
  return neg ? Real(-v) : v;
}

// Products and quotients of decimals and pi, evaluated left to right.
PrecisionContext make_ctx(const RunConfig& cfg) {
  PrecisionContext ctx;
  ctx.bits = cfg.bits;
  ctx.tol = cfg.tol;
  return ctx;
}

ModelKind build_model(const RunConfig& cfg) {
  if (cfg.model == "generalized") {
    Complex t = cfg.phi.empty() ? Complex(parse_real(cfg.t_re), parse_real(cfg.t_im)) : expi(parse_real(cfg.phi));
    return ModelKind::generalized(WeightParams::from_omegas(parse_complex(cfg.mu), parse_complex(cfg.omega1),
                                                            parse_complex(cfg.omega2), parse_complex(cfg.xi), t));
  }
  if (cfg.model == "cue-gap") return ModelKind::cue_gap(parse_real(cfg.phi.empty() ? "0" : cfg.phi), parse_complex(cfg.xi));
  if (cfg.model == "cue-charpoly") return ModelKind::cue_charpoly(parse_complex(cfg.u), parse_complex(cfg.mu));
  if (cfg.model == "ising-low") return ModelKind::ising_low(parse_real(cfg.k));
  return ModelKind::ising_high(parse_real(cfg.k));
}

WeightParams build_params(const RunConfig& cfg) {
  ModelKind m = build_model(cfg);
  m.validate();
  return equivalent_params(m);
}

std::string cplx(const Complex& z, int bits) { return format_complex(z, digits_for_bits(bits)); }

json cplx_json(const Complex& z, int bits) {
  int d = digits_for_bits(bits);
  return json{{"re", format_real(z.re, d)}, {"im", format_real(z.im, d)}};
}

std::string sci(const Real& x) {
  if (x.is_zero()) return "0";
  return x.str(6, std::ios::scientific);
}

json config_json(const RunConfig& cfg) {
  return json{{"command", cfg.command}, {"model", cfg.model}, {"mu", cfg.mu},   {"omega1", cfg.omega1},
              {"omega2", cfg.omega2},   {"xi", cfg.xi},       {"t_re", cfg.t_re}, {"t_im", cfg.t_im},
              {"phi", cfg.phi},         {"k", cfg.k},         {"u", cfg.u},       {"nmax", cfg.n_max},
              {"routes", cfg.routes},   {"bits", cfg.bits},   {"tol", cfg.tol},   {"seed", cfg.seed},
              {"samples", cfg.samples}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

void RunConfig::validate() const {
  if (!contains(kCommands, command)) throw std::invalid_argument("unknown command: " + command);
  if (!contains(kModels, model)) throw std::invalid_argument("unknown model: " + model);
  if (bits < 64) throw std::invalid_argument("bits must be at least 64");
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  if (n_max < 0) throw std::invalid_argument("nmax must be nonnegative");
  if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  if (command == "compute") {
    if (routes.empty()) throw std::invalid_argument("at least one route is required");
    for (const auto& r : routes)
      if (r != "oracle" && !parse_route(r)) throw std::invalid_argument("unknown route: " + r);
  }
  if (command == "app" && model == "generalized") throw std::invalid_argument("app needs a physical model");
}

// ---------------------------------------------------------------- moments

std::string cmd_moments(const RunConfig& cfg, int& exit_code) {
  WorkingPrecision wp(cfg.bits);
  PrecisionContext ctx = make_ctx(cfg);
  ModelKind m = build_model(cfg);
  m.validate();
  exit_code = kExitOk;
  std::ostringstream csv;
  json rows = json::array();
  csv << "n,w_n,error\n";
  for (int n = -cfg.n_max; n <= cfg.n_max; ++n) {
    std::string err;
    Complex w;
    try {
      w = model_moments(m, n, ctx);
    } catch (const Error& e) {
      err = error_name(e.code());
      exit_code = kExitDomain;
    }
    csv << n << "," << (err.empty() ? cplx(w, cfg.bits) : "") << "," << err << "\n";
    json row{{"n", n}, {"w_n", err.empty() ? cplx_json(w, cfg.bits) : json(nullptr)}};
    row["error"] = err.empty() ? json(nullptr) : json(err);
    rows.push_back(row);
  }
  if (cfg.format == "csv") return csv.str();
  return dump(json{{"command", "moments"}, {"model", m.name()}, {"config", config_json(cfg)}, {"rows", rows}});
}

// ---------------------------------------------------------------- compute

namespace {

struct ComputeRun {
  std::string name;
  bool ok = false;
  std::string error;
  bool reflections = true;
  CoefficientTable table;
  std::vector<Real> err_r, err_rbar, err_T;
  std::vector<int> spliced;
};

Real row_deviation(const ComputeRun& a, const ComputeRun& ref, int n) {
  Real d = rel_diff(a.table.T[n], ref.table.T[n]);
  if (a.reflections && ref.reflections) {
    d = std::max<Real>(d, rel_diff(a.table.r[n], ref.table.r[n]));
    d = std::max<Real>(d, rel_diff(a.table.rbar[n], ref.table.rbar[n]));
  }
  return d;
}

}  // namespace

std::string cmd_compute(const RunConfig& cfg, int& exit_code) {
  WorkingPrecision wp(cfg.bits);
  PrecisionContext ctx = make_ctx(cfg);
  WeightParams p = build_params(cfg);
  int n_max = std::max(cfg.n_max, 1);
  std::vector<ComputeRun> runs;
  for (const auto& name : cfg.routes) {
    ComputeRun run;
    run.name = name;
    try {
      if (name == "oracle") {
        run.table = build_table_oracle(p, n_max, ctx);
      } else {
        RouteResult rr = run_route(*parse_route(name), p, n_max, ctx);
        run.table = rr.table;
        run.reflections = rr.has_reflections;
        if (rr.has_reflections) {
          run.err_r = rr.err_r;
          run.err_rbar = rr.err_rbar;
        }
        run.err_T = rr.err_T;
        run.spliced = rr.spliced;
      }
      run.ok = true;
    } catch (const Error& e) {
      run.error = error_name(e.code());
    }
    runs.push_back(std::move(run));
  }
  const ComputeRun* ref = nullptr;
  for (const auto& r : runs) {
    if (r.ok) {
      ref = &r;
      break;
    }
  }
  Real max_dev(0);
  exit_code = kExitOk;
  std::ostringstream csv;
  csv << "N,route,r_N,rbar_N,T_N,err_r,err_rbar,err_T,deviation,error\n";
  json rows = json::array();
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& run : runs) {
      json row{{"N", n}, {"route", run.name}};
      if (!run.ok) {
        csv << n << "," << run.name << ",,,,,,,," << run.error << "\n";
        row["error"] = run.error;
        rows.push_back(row);
        continue;
      }
      Real dev = ref ? row_deviation(run, *ref, n) : Real(0);
      max_dev = std::max<Real>(max_dev, dev);
      auto est = [&](const std::vector<Real>& v) { return v.empty() ? std::string() : sci(v[n]); };
      std::string r = run.reflections ? cplx(run.table.r[n], cfg.bits) : "";
      std::string rb = run.reflections ? cplx(run.table.rbar[n], cfg.bits) : "";
      csv << n << "," << run.name << "," << r << "," << rb << "," << cplx(run.table.T[n], cfg.bits) << ","
          << est(run.err_r) << "," << est(run.err_rbar) << "," << est(run.err_T) << "," << sci(dev) << ",\n";
      row["r_N"] = run.reflections ? cplx_json(run.table.r[n], cfg.bits) : json(nullptr);
      row["rbar_N"] = run.reflections ? cplx_json(run.table.rbar[n], cfg.bits) : json(nullptr);
      row["T_N"] = cplx_json(run.table.T[n], cfg.bits);
      row["err_r"] = run.err_r.empty() ? json(nullptr) : json(est(run.err_r));
      row["err_rbar"] = run.err_rbar.empty() ? json(nullptr) : json(est(run.err_rbar));
      row["err_T"] = run.err_T.empty() ? json(nullptr) : json(est(run.err_T));
      row["deviation"] = sci(dev);
      row["source"] = run.table.source.empty() ? run.name : run.table.source[n];
      rows.push_back(row);
    }
  }
  bool failed = std::any_of(runs.begin(), runs.end(), [](const ComputeRun& r) { return !r.ok; });
  if (failed)
    exit_code = kExitDomain;
  else if (max_dev > Real(cfg.tol))
    exit_code = kExitAgreement;
  if (cfg.format == "csv") return csv.str();
  json routes = json::array();
  for (const auto& run : runs) {
    json r{{"name", run.name}, {"ok", run.ok}};
    r["error"] = run.ok ? json(nullptr) : json(run.error);
    r["spliced"] = run.spliced;
    routes.push_back(r);
  }
  json out{{"command", "compute"}, {"config", config_json(cfg)}};
  out["reference"] = ref ? json(ref->name) : json(nullptr);
  out["max_deviation"] = sci(max_dev);
  out["routes"] = routes;
  out["rows"] = rows;
  return dump(out);
}

// ---------------------------------------------------------------- verify

std::string cmd_verify(const RunConfig& cfg, int& exit_code) {
  WorkingPrecision wp(cfg.bits);
  PrecisionContext ctx = make_ctx(cfg);
  WeightParams p = build_params(cfg);
  auto samples = identity_sample_points(cfg.samples, cfg.seed);
  IdentityReport rep = verify_identity_suite(p, std::max(cfg.n_max, 1), samples, ctx);
  Real limit = Real(cfg.tol) * 1000;
  exit_code = kExitOk;
  std::ostringstream csv;
  csv << "identity,max_residual,count,degenerate\n";
  json rows = json::array();
  for (const auto& c : rep.checks) {
    if (!c.degenerate && c.max_residual > limit) exit_code = kExitAgreement;
    csv << c.label << "," << sci(c.max_residual) << "," << c.count << "," << (c.degenerate ? 1 : 0) << "\n";
    rows.push_back(json{{"identity", c.label},
                        {"max_residual", sci(c.max_residual)},
                        {"count", c.count},
                        {"degenerate", c.degenerate}});
  }
  if (cfg.format == "csv") return csv.str();
  return dump(json{{"command", "verify"},
                   {"config", config_json(cfg)},
                   {"max_residual", sci(rep.max_residual())},
                   {"checks", rows}});
}

// ---------------------------------------------------------------- app

std::string cmd_app(const RunConfig& cfg, int& exit_code) {
  WorkingPrecision wp(cfg.bits);
  PrecisionContext ctx = make_ctx(cfg);
  ApplicationResult res;
  if (cfg.model == "cue-gap") {
    res = cue_gap(parse_real(cfg.phi.empty() ? "0" : cfg.phi), parse_complex(cfg.xi), cfg.n_max, ctx);
  } else if (cfg.model == "cue-charpoly") {
    res = cue_charpoly(parse_complex(cfg.u), parse_complex(cfg.mu), cfg.n_max, ctx);
  } else {
    bool low = cfg.model == "ising-low";
    res = ising_diagonal(parse_real(cfg.k), low ? IsingRegime::LowT : IsingRegime::HighT, cfg.n_max, ctx);
  }
  exit_code = res.max_deviation > Real(cfg.tol) * 1000 ? kExitAgreement : kExitOk;
  std::ostringstream csv;
  csv << "N," << res.quantity << ",source";
  for (const auto& r : res.routes) csv << "," << r.name;
  csv << ",deviation\n";
  json rows = json::array();
  for (int n = 0; n <= res.n_max; ++n) {
    Real dev(0);
    csv << n << "," << cplx(res.value[n], cfg.bits) << "," << res.primary;
    json per = json::object();
    for (const auto& r : res.routes) {
      if (!r.ok) {
        csv << "," << r.error;
        per[r.name] = nullptr;
        continue;
      }
      dev = std::max<Real>(dev, rel_diff(r.value[n], res.value[n]));
      csv << "," << cplx(r.value[n], cfg.bits);
      per[r.name] = cplx_json(r.value[n], cfg.bits);
    }
    csv << "," << sci(dev) << "\n";
    rows.push_back(json{{"N", n}, {res.quantity, cplx_json(res.value[n], cfg.bits)}, {"routes", per},
                        {"deviation", sci(dev)}});
  }
  if (cfg.format == "csv") return csv.str();
  json routes = json::array();
  for (const auto& r : res.routes) {
    json j{{"name", r.name}, {"ok", r.ok}};
    j["error"] = r.ok ? json(nullptr) : json(r.error);
    j["tail"] = sci(r.tail);
    routes.push_back(j);
  }
  json out{{"command", "app"}, {"model", cfg.model}, {"config", config_json(cfg)}, {"quantity", res.quantity},
           {"primary", res.primary}, {"max_deviation", sci(res.max_deviation)}};
  out["routes"] = routes;
  out["notes"] = res.notes;
  out["rows"] = rows;
  return dump(out);
}

Real parse_real(const std::string& s) {
  if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty numeric value");
  Real acc;
  char op = 0;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] != '*' && s[i] != '/') continue;
    Real v = parse_token(s.substr(start, i - start));
    if (op == 0)
      acc = v;
    else if (op == '*')
      acc *= v;
    else
      acc /= v;
    if (i < s.size()) op = s[i];
    start = i + 1;
  }
  return acc;
}

Complex parse_complex(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return Complex(parse_real(s));
  return Complex(parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1)));
}

// ---------------------------------------------------------------- driver

CommandOutput run_command(const RunConfig& cfg) {
  cfg.validate();
  CommandOutput out;
  try {
    if (cfg.command == "moments")
      out.text = cmd_moments(cfg, out.exit_code);
    else if (cfg.command == "compute")
      out.text = cmd_compute(cfg, out.exit_code);
    else if (cfg.command == "verify")
      out.text = cmd_verify(cfg, out.exit_code);
    else
      out.text = cmd_app(cfg, out.exit_code);
  } catch (const Error& e) {
    out.text = std::string("error: ") + e.what() + "\n";
    out.exit_code = kExitDomain;
  }
  return out;
}

int default_bits() {
  const char* env = std::getenv("PVI_DEFAULT_BITS");
  if (!env) return 256;
  try {
    int b = std::stoi(env);
    if (b >= 64) return b;
  } catch (const std::exception&) {
  }
  return 256;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Reflection coefficients, tau functions and applications of generalized Jacobi weights"};
  app.require_subcommand(1);
  RunConfig cfg;
  cfg.bits = default_bits();
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "generalized, cue-gap, cue-charpoly, ising-low or ising-high");
    sub->add_option("--mu", cfg.mu, "exponent mu (re or re,im)");
    sub->add_option("--omega1", cfg.omega1, "omega_1");
    sub->add_option("--omega2", cfg.omega2, "omega_2");
    sub->add_option("--xi", cfg.xi, "jump parameter xi");
    sub->add_option("--t-re", cfg.t_re, "real part of t");
    sub->add_option("--t-im", cfg.t_im, "imaginary part of t");
    sub->add_option("--phi", cfg.phi, "arc angle (cue-gap); sets t = e^{i phi} for the generalized weight");
    sub->add_option("--k", cfg.k, "Ising modulus k (inf allowed for ising-low)");
    sub->add_option("--u", cfg.u, "CUE characteristic polynomial argument u");
    sub->add_option("--nmax", cfg.n_max, "largest N");
    sub->add_option("--routes", cfg.routes, "comma separated routes (oracle, TwoTwoA, ...)")->delimiter(',');
    sub->add_option("--bits", cfg.bits, "working precision in bits (default PVI_DEFAULT_BITS or 256)");
    sub->add_option("--tol", cfg.tol, "agreement tolerance");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--out", cfg.out, "output file (written atomically); stdout when omitted");
    sub->add_option("--seed", cfg.seed, "seed for identity sample points");
    sub->add_option("--samples", cfg.samples, "number of identity sample points");
  };
  const std::map<std::string, std::string> blurbs{
      {"moments", "closed-form moments w_n for |n| <= nmax"},
      {"compute", "r_N, rbar_N and T_N by the selected routes, with their deviation from the reference"},
      {"verify", "residuals of the identity suite on the sample points"},
      {"app", "CUE and Ising applications with all available routes"}};
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, blurbs.at(name));
    add_common(sub);
    sub->callback([&cfg, name] { cfg.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  CommandOutput out;
  try {
    out = run_command(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (out.exit_code == kExitDomain && out.text.rfind("error: ", 0) == 0) {
    std::cerr << out.text;
    return out.exit_code;
  }
  try {
    if (cfg.out.empty())
      std::cout << out.text;
    else
      write_atomic(cfg.out, out.text);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return out.exit_code;
}

}  // namespace pvi
