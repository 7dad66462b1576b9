#pragma once

#include <chrono>
#include <limits>
#include <stdexcept>
#include <string>

#include "concavepd/certify.hpp"
#include "concavepd/generator.hpp"
#include "concavepd/io.hpp"
#include "concavepd/oracles.hpp"

namespace concavepd {

// Shared dispatch used by the command line tool and the python module.

inline std::string algorithm_kind(const std::string& alg) {
  if (alg == "flpd" || alg == "concave-flpd") return "facility_location";
  if (alg == "lspd" || alg == "concave-lspd") return "lot_sizing";
  if (alg == "jrppd" || alg == "concave-jrppd") return "jrp";
  throw std::invalid_argument("unknown algorithm: " + alg);
}

struct SolveSummary {
  std::string kind;
  std::string algorithm;
  double primal = 0;
  double dual = 0;
  double ratio = 0;
  double time_ms = 0;
  bool certificate_pass = true;
  json solution;
};

template <class Num>
SolveSummary run_solve(const std::string& alg, const json& instance, bool with_trace = false,
                       bool certify = true) {
  SolveSummary out;
  out.algorithm = alg;
  out.kind = algorithm_kind(alg);
  if (instance_type(instance) != out.kind)
    throw std::invalid_argument("instance type " + instance_type(instance) + " does not match " + alg);
  auto t0 = std::chrono::steady_clock::now();
  if (out.kind == "facility_location") {
    auto inst = facility_from_json<Num>(instance);
    auto sol = alg == "flpd" ? solve_classical_flpd(inst) : solve_concave_flpd(inst);
    out.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.primal = num_traits<Num>::to_double(sol.primal_cost);
    out.dual = num_traits<Num>::to_double(sol.dual_value);
    if (certify) out.certificate_pass = check_certificate(inst, sol).pass;
    out.solution = to_json(sol, with_trace);
  } else if (out.kind == "lot_sizing") {
    auto inst = lot_sizing_from_json<Num>(instance);
    auto sol = alg == "lspd" ? solve_classical_lspd(inst) : solve_concave_lspd(inst);
    out.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.primal = num_traits<Num>::to_double(sol.primal_cost);
    out.dual = num_traits<Num>::to_double(sol.dual_value);
    if (certify) out.certificate_pass = check_certificate(inst, sol).pass;
    out.solution = to_json(sol, with_trace);
  } else {
    auto inst = jrp_from_json<Num>(instance);
    auto sol = alg == "jrppd" ? solve_generalized_jrppd(inst) : solve_concave_jrppd(inst);
    out.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    out.primal = num_traits<Num>::to_double(sol.primal_cost);
    out.dual = num_traits<Num>::to_double(sol.dual_value);
    if (certify) out.certificate_pass = check_certificate(inst, sol).pass;
    out.solution = to_json(sol, with_trace);
  }
  out.ratio = out.dual > 0 ? out.primal / out.dual : (out.primal > 0 ? std::numeric_limits<double>::infinity() : 1.0);
  return out;
}

template <class Num>
json run_verify(const json& instance, const json& solution) {
  std::string kind = instance_type(instance);
  json report;
  auto fill = [&](const auto& cert) {
    report["pass"] = cert.pass;
    report["bound"] = num_traits<Num>::to_double(cert.bound);
    double dual = num_traits<Num>::to_double(cert.dual);
    double primal = num_traits<Num>::to_double(cert.primal);
    report["ratio"] = dual > 0 ? primal / dual : (primal > 0 ? std::numeric_limits<double>::infinity() : 1.0);
    report["violations"] = cert.violations;
  };
  if (kind == "facility_location")
    fill(check_certificate(facility_from_json<Num>(instance), facility_solution_from_json<Num>(solution)));
  else if (kind == "lot_sizing")
    fill(check_certificate(lot_sizing_from_json<Num>(instance), lot_sizing_solution_from_json<Num>(solution)));
  else if (kind == "jrp")
    fill(check_certificate(jrp_from_json<Num>(instance), jrp_solution_from_json<Num>(solution)));
  else
    throw std::invalid_argument("unknown instance type: " + kind);
  return report;
}

template <class Num>
json run_generate(const GeneratorSpec& spec) {
  if (spec.kind == "facility_location") return to_json(generate_facility<Num>(spec));
  if (spec.kind == "lot_sizing") return to_json(generate_lot_sizing<Num>(spec));
  if (spec.kind == "jrp") return to_json(generate_jrp<Num>(spec));
  throw std::invalid_argument("unknown instance kind: " + spec.kind);
}

}  // namespace concavepd
