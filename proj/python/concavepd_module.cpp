// Python bindings over the JSON-string interfaces: generate, solve, verify,
// plus direct access to the concave-cost oracle for quick experiments.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "concavepd/runner.hpp"

namespace py = pybind11;
using namespace concavepd;

namespace {

template <class Num>
std::string generate_str(const std::string& kind, int m, int n, int K, std::uint64_t seed,
                         const std::string& cost_mix) {
  GeneratorSpec spec;
  spec.kind = kind;
  spec.m = m;
  spec.n = n;
  spec.K = K;
  spec.seed = seed;
  spec.cost_mix = cost_mix;
  return run_generate<Num>(spec).dump();
}

template <class Num>
py::dict solve_str(const std::string& alg, const std::string& instance, bool with_trace) {
  auto summary = run_solve<Num>(alg, json::parse(instance), with_trace);
  py::dict out;
  out["kind"] = summary.kind;
  out["alg"] = summary.algorithm;
  out["primal"] = summary.primal;
  out["dual"] = summary.dual;
  out["ratio"] = summary.ratio;
  out["time_ms"] = summary.time_ms;
  out["certificate_pass"] = summary.certificate_pass;
  out["solution"] = summary.solution.dump();
  return out;
}

template <class Num>
py::dict verify_str(const std::string& instance, const std::string& solution) {
  json report = run_verify<Num>(json::parse(instance), json::parse(solution));
  py::dict out;
  out["pass"] = report.at("pass").get<bool>();
  out["ratio"] = report.at("ratio").get<double>();
  out["bound"] = report.at("bound").get<double>();
  out["violations"] = report.at("violations").get<std::vector<std::string>>();
  return out;
}

}  // namespace

PYBIND11_MODULE(_concavepd, m) {
  m.doc() = "primal-dual solvers for concave-cost facility location, lot-sizing and joint replenishment";

  m.def(
      "generate",
      [](const std::string& kind, int mm, int n, int K, std::uint64_t seed, const std::string& cost_mix,
         const std::string& backend) {
        if (backend == "float") return generate_str<double>(kind, mm, n, K, seed, cost_mix);
        return generate_str<Rational>(kind, mm, n, K, seed, cost_mix);
      },
      py::arg("kind"), py::arg("m") = 4, py::arg("n") = 4, py::arg("K") = 2, py::arg("seed") = 1,
      py::arg("cost_mix") = "mixed", py::arg("backend") = "rational",
      "Generate a random instance; returns the instance JSON string.");

  m.def(
      "solve",
      [](const std::string& alg, const std::string& instance, bool with_trace, const std::string& backend) {
        if (backend == "float") return solve_str<double>(alg, instance, with_trace);
        return solve_str<Rational>(alg, instance, with_trace);
      },
      py::arg("alg"), py::arg("instance"), py::arg("with_trace") = false, py::arg("backend") = "rational",
      "Run a solver on an instance JSON string; returns a summary dict with the solution JSON.");

  m.def(
      "verify",
      [](const std::string& instance, const std::string& solution, const std::string& backend) {
        if (backend == "float") return verify_str<double>(instance, solution);
        return verify_str<Rational>(instance, solution);
      },
      py::arg("instance"), py::arg("solution"), py::arg("backend") = "rational",
      "Check a solution certificate; returns {pass, ratio, bound, violations}.");

  m.def(
      "cost_eval",
      [](const std::string& cost, double x) {
        auto fn = concave_from_json<double>(json::parse(cost));
        return fn.eval(x);
      },
      py::arg("cost"), py::arg("x"), "Evaluate a concave cost function given as JSON.");

  m.def(
      "cost_tangent",
      [](const std::string& cost, double p) {
        auto fn = concave_from_json<double>(json::parse(cost));
        auto tan = fn.tangent_at(p);
        return py::make_tuple(tan.f, tan.s);
      },
      py::arg("cost"), py::arg("p"), "Support line (intercept, slope) of a concave cost at touch point p.");

  m.attr("algorithms") = std::vector<std::string>{"flpd",  "concave-flpd",  "lspd",
                                                  "concave-lspd", "jrppd", "concave-jrppd"};
}
