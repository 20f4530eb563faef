#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <map>

#include "pvi/applications.hpp"
#include "pvi/cli.hpp"
#include "pvi/oracle.hpp"
#include "pvi/recurrences.hpp"

namespace py = pybind11;
using namespace pvi;

namespace {

PrecisionContext make_ctx(int bits, double tol) {
  PrecisionContext c;
  c.bits = bits;
  c.tol = tol;
  c.validate();
  return c;
}

// Strings go through the CLI parser at the current precision; numbers are taken as exact doubles.
Complex to_complex(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return parse_complex(h.cast<std::string>());
  auto z = h.cast<std::complex<double>>();
  return Complex(z.real(), z.imag());
}

Real to_real(const py::handle& h) {
  if (py::isinstance<py::str>(h)) return parse_real(h.cast<std::string>());
  return Real(h.cast<double>());
}

std::complex<double> out(const Complex& z) { return {to_double(z.re), to_double(z.im)}; }

std::vector<std::complex<double>> out(const std::vector<Complex>& v) {
  std::vector<std::complex<double>> r;
  r.reserve(v.size());
  for (const auto& z : v) r.push_back(out(z));
  return r;
}

WeightParams params(const py::handle& mu, const py::handle& omega1, const py::handle& omega2, const py::handle& xi,
                    const py::handle& phi) {
  return WeightParams::from_omegas(to_complex(mu), to_complex(omega1), to_complex(omega2), to_complex(xi),
                                   expi(to_real(phi)));
}

py::dict app_dict(const ApplicationResult& res) {
  py::dict d;
  d["quantity"] = res.quantity;
  d["primary"] = res.primary;
  d["value"] = out(res.value);
  d["max_deviation"] = to_double(res.max_deviation);
  py::dict routes;
  for (const auto& r : res.routes) {
    if (r.ok)
      routes[py::str(r.name)] = out(r.value);
    else
      routes[py::str(r.name)] = py::none();
  }
  d["routes"] = routes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pvi, m) {
  m.doc() = "Bindings for the pvi library";

  static py::exception<Error> exc(m, "PviError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      exc((std::string(error_name(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("routes", [] {
    std::vector<std::string> names;
    for (RouteId r : all_routes()) names.emplace_back(route_name(r));
    return names;
  });

  m.def(
      "gauss_2f1",
      [](py::object a, py::object b, py::object c, py::object z, int bits, double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        return out(gauss_2f1(to_complex(a), to_complex(b), to_complex(c), to_complex(z), ctx));
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("z"), py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "moments",
      [](py::object mu, py::object omega1, py::object omega2, py::object xi, py::object phi, int n_max, int bits,
         double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        WeightParams p = params(mu, omega1, omega2, xi, phi);
        std::map<int, std::complex<double>> w;
        for (int n = -n_max; n <= n_max; ++n) w[n] = out(toeplitz_moment(p, n, ctx));
        return w;
      },
      py::arg("mu"), py::arg("omega1"), py::arg("omega2"), py::arg("xi"), py::arg("phi"), py::arg("n_max"),
      py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "reflection_table",
      [](py::object mu, py::object omega1, py::object omega2, py::object xi, py::object phi, int n_max,
         const std::string& route, int bits, double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        WeightParams p = params(mu, omega1, omega2, xi, phi);
        py::dict d;
        if (route == "oracle") {
          CoefficientTable t = build_table_oracle(p, n_max, ctx);
          d["r"] = out(t.r);
          d["rbar"] = out(t.rbar);
          d["T"] = out(t.T);
          return d;
        }
        auto id = parse_route(route);
        if (!id) throw py::value_error("unknown route: " + route);
        RouteResult rr = run_route(*id, p, n_max, ctx);
        if (rr.has_reflections) {
          d["r"] = out(rr.table.r);
          d["rbar"] = out(rr.table.rbar);
        }
        d["T"] = out(rr.table.T);
        d["spliced"] = rr.spliced;
        return d;
      },
      py::arg("mu"), py::arg("omega1"), py::arg("omega2"), py::arg("xi"), py::arg("phi"), py::arg("n_max"),
      py::arg("route") = "oracle", py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "identity_residuals",
      [](py::object mu, py::object omega1, py::object omega2, py::object xi, py::object phi, int n_max, int samples,
         int bits, double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        IdentityReport rep =
            verify_identity_suite(params(mu, omega1, omega2, xi, phi), n_max, identity_sample_points(samples, 1), ctx);
        std::map<std::string, double> res;
        for (const auto& c : rep.checks) res[c.label] = to_double(c.max_residual);
        return res;
      },
      py::arg("mu"), py::arg("omega1"), py::arg("omega2"), py::arg("xi"), py::arg("phi"), py::arg("n_max"),
      py::arg("samples") = 2, py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "cue_gap",
      [](py::object phi, py::object xi, int n_max, int bits, double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        return app_dict(cue_gap(to_real(phi), to_complex(xi), n_max, ctx));
      },
      py::arg("phi"), py::arg("xi"), py::arg("n_max"), py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "cue_charpoly",
      [](py::object u, py::object mu, int n_max, int bits, double tol) {
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        return app_dict(cue_charpoly(to_complex(u), to_complex(mu), n_max, ctx));
      },
      py::arg("u"), py::arg("mu"), py::arg("n_max"), py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "ising",
      [](py::object k, const std::string& regime, int n_max, int bits, double tol) {
        if (regime != "low" && regime != "high") throw py::value_error("regime must be 'low' or 'high'");
        PrecisionContext ctx = make_ctx(bits, tol);
        WorkingPrecision wp(bits);
        return app_dict(
            ising_diagonal(to_real(k), regime == "low" ? IsingRegime::LowT : IsingRegime::HighT, n_max, ctx));
      },
      py::arg("k"), py::arg("regime") = "low", py::arg("n_max") = 10, py::arg("bits") = 128, py::arg("tol") = 1e-25);

  m.def(
      "run",
      [](const std::string& command, const py::kwargs& kw) {
        RunConfig c;
        c.command = command;
        c.bits = default_bits();
        std::map<std::string, std::string*> strs{{"model", &c.model}, {"mu", &c.mu},         {"omega1", &c.omega1},
                                                 {"omega2", &c.omega2}, {"xi", &c.xi},       {"t_re", &c.t_re},
                                                 {"t_im", &c.t_im},     {"phi", &c.phi},     {"k", &c.k},
                                                 {"u", &c.u},           {"format", &c.format}};
        for (auto item : kw) {
          auto key = item.first.cast<std::string>();
          if (auto it = strs.find(key); it != strs.end())
            *it->second = py::str(item.second).cast<std::string>();
          else if (key == "n_max")
            c.n_max = item.second.cast<int>();
          else if (key == "bits")
            c.bits = item.second.cast<int>();
          else if (key == "tol")
            c.tol = item.second.cast<double>();
          else if (key == "routes")
            c.routes = item.second.cast<std::vector<std::string>>();
          else if (key == "seed")
            c.seed = item.second.cast<unsigned>();
          else if (key == "samples")
            c.samples = item.second.cast<int>();
          else
            throw py::type_error("unknown option: " + key);
        }
        try {
          CommandOutput o = run_command(c);
          return py::make_tuple(o.text, o.exit_code);
        } catch (const std::invalid_argument& e) {
          throw py::value_error(e.what());
        }
      },
      py::arg("command"),
      "Runs a CLI subcommand in process and returns (text, exit_code). Options mirror the CLI flags.");
}
