#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "concavepd/facility.hpp"
#include "concavepd/jrp.hpp"
#include "concavepd/lot_sizing.hpp"

namespace concavepd {

using nlohmann::json;

template <class Num>
json num_to_json(const Num& v);

template <>
inline json num_to_json<double>(const double& v) {
  return v;
}

template <>
inline json num_to_json<Rational>(const Rational& v) {
  if (v.is_integer()) return static_cast<long long>(v.num());
  return v.str();
}

template <class Num>
Num num_from_json(const json& j);

template <>
inline double num_from_json<double>(const json& j) {
  if (j.is_string()) {
    Rational r = Rational::parse(j.get<std::string>());
    return r.to_double();
  }
  return j.get<double>();
}

template <>
inline Rational num_from_json<Rational>(const json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw std::invalid_argument("rational backend needs integer or \"a/b\" literals");
}

template <class Num>
json to_json(const ConcaveFunction<Num>& fn) {
  json j;
  switch (fn.kind()) {
    case ConcaveFunction<Num>::Kind::FixedCharge:
      j["kind"] = "fixed_charge";
      j["F"] = num_to_json<Num>(fn.fixed_part());
      break;
    case ConcaveFunction<Num>::Kind::AffineFixed:
      j["kind"] = "affine_fixed";
      j["F"] = num_to_json<Num>(fn.fixed_part());
      j["c"] = num_to_json<Num>(fn.unit_part());
      break;
    case ConcaveFunction<Num>::Kind::Power:
      j["kind"] = "power";
      j["a"] = fn.power_exponent();
      j["scale"] = fn.power_scale();
      break;
    case ConcaveFunction<Num>::Kind::PiecewiseLinearMin: {
      j["kind"] = "pwl_min";
      json pieces = json::array();
      for (const auto& [f, s] : fn.pieces()) pieces.push_back({num_to_json<Num>(f), num_to_json<Num>(s)});
      j["pieces"] = pieces;
      break;
    }
  }
  return j;
}

template <class Num>
ConcaveFunction<Num> concave_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed_charge") return ConcaveFunction<Num>::fixed_charge(num_from_json<Num>(j.at("F")));
  if (kind == "affine_fixed")
    return ConcaveFunction<Num>::affine_fixed(num_from_json<Num>(j.at("F")), num_from_json<Num>(j.at("c")));
  if (kind == "power") {
    if constexpr (std::is_same_v<Num, double>)
      return ConcaveFunction<Num>::power(j.at("a").get<double>(), j.at("scale").get<double>());
    else
      throw std::invalid_argument("power costs require the float backend");
  }
  if (kind == "pwl_min") {
    std::vector<std::pair<Num, Num>> pieces;
    for (const auto& p : j.at("pieces"))
      pieces.push_back({num_from_json<Num>(p.at(0)), num_from_json<Num>(p.at(1))});
    return ConcaveFunction<Num>::piecewise_linear_min(std::move(pieces));
  }
  throw std::invalid_argument("unknown cost kind: " + kind);
}

template <class Num>
json to_json(const FacilityInstance<Num>& inst) {
  json j;
  j["type"] = "facility_location";
  j["m"] = inst.customers();
  j["n"] = inst.facilities();
  json d = json::array(), c = json::array(), costs = json::array();
  for (const auto& v : inst.demand) d.push_back(num_to_json<Num>(v));
  for (const auto& row : inst.connect) {
    json r = json::array();
    for (const auto& v : row) r.push_back(num_to_json<Num>(v));
    c.push_back(r);
  }
  for (const auto& fn : inst.cost) costs.push_back(to_json(fn));
  j["d"] = d;
  j["c"] = c;
  j["costs"] = costs;
  return j;
}

template <class Num>
FacilityInstance<Num> facility_from_json(const json& j) {
  FacilityInstance<Num> inst;
  for (const auto& v : j.at("d")) inst.demand.push_back(num_from_json<Num>(v));
  for (const auto& row : j.at("c")) {
    std::vector<Num> r;
    for (const auto& v : row) r.push_back(num_from_json<Num>(v));
    inst.connect.push_back(std::move(r));
  }
  for (const auto& fn : j.at("costs")) inst.cost.push_back(concave_from_json<Num>(fn));
  inst.validate();
  return inst;
}

template <class Num>
json to_json(const LotSizingInstance<Num>& inst) {
  json j;
  j["type"] = "lot_sizing";
  j["n"] = inst.periods();
  json d = json::array(), h = json::array(), costs = json::array();
  for (const auto& v : inst.demand) d.push_back(num_to_json<Num>(v));
  for (const auto& v : inst.holding) h.push_back(num_to_json<Num>(v));
  for (const auto& fn : inst.cost) costs.push_back(to_json(fn));
  j["d"] = d;
  j["h"] = h;
  j["costs"] = costs;
  return j;
}

template <class Num>
LotSizingInstance<Num> lot_sizing_from_json(const json& j) {
  LotSizingInstance<Num> inst;
  for (const auto& v : j.at("d")) inst.demand.push_back(num_from_json<Num>(v));
  for (const auto& v : j.at("h")) inst.holding.push_back(num_from_json<Num>(v));
  for (const auto& fn : j.at("costs")) inst.cost.push_back(concave_from_json<Num>(fn));
  inst.validate();
  return inst;
}

template <class Num>
json to_json(const JrpInstance<Num>& inst) {
  json j;
  j["type"] = "jrp";
  j["n"] = inst.periods();
  j["K"] = inst.items();
  j["f0"] = num_to_json<Num>(inst.joint_fixed);
  json costs = json::array(), d = json::array(), h = json::array();
  for (const auto& fn : inst.item_cost) costs.push_back(to_json(fn));
  for (const auto& row : inst.demand) {
    json r = json::array();
    for (const auto& v : row) r.push_back(num_to_json<Num>(v));
    d.push_back(r);
  }
  for (const auto& row : inst.holding) {
    json r = json::array();
    for (const auto& v : row) r.push_back(num_to_json<Num>(v));
    h.push_back(r);
  }
  j["costs"] = costs;
  j["d"] = d;
  j["h"] = h;
  return j;
}

template <class Num>
JrpInstance<Num> jrp_from_json(const json& j) {
  JrpInstance<Num> inst;
  inst.joint_fixed = num_from_json<Num>(j.at("f0"));
  for (const auto& fn : j.at("costs")) inst.item_cost.push_back(concave_from_json<Num>(fn));
  for (const auto& row : j.at("d")) {
    std::vector<Num> r;
    for (const auto& v : row) r.push_back(num_from_json<Num>(v));
    inst.demand.push_back(std::move(r));
  }
  for (const auto& row : j.at("h")) {
    std::vector<Num> r;
    for (const auto& v : row) r.push_back(num_from_json<Num>(v));
    inst.holding.push_back(std::move(r));
  }
  inst.validate();
  return inst;
}

inline std::string instance_type(const json& j) { return j.at("type").get<std::string>(); }

template <class Num>
json trace_to_json(const TraceLog<Num>& trace) {
  json arr = json::array();
  for (const auto& ev : trace) {
    json e;
    e["time"] = num_to_json<Num>(ev.time);
    e["kind"] = trace_kind_name(ev.kind);
    if (ev.facility >= 0) e["facility"] = ev.facility;
    if (ev.customer >= 0) e["customer"] = ev.customer;
    if (ev.item >= 0) e["item"] = ev.item;
    e["wave"] = num_to_json<Num>(ev.wave);
    e["line"] = {num_to_json<Num>(ev.intercept), num_to_json<Num>(ev.slope)};
    e["touch"] = num_to_json<Num>(ev.touch);
    arr.push_back(e);
  }
  return arr;
}

template <class Num>
json to_json(const FacilitySolution<Num>& sol, bool with_trace = false) {
  json j;
  json assignment = json::array(), open = json::array(), v = json::array(), budgets = json::array();
  for (const auto& a : sol.assigned) {
    json e;
    e["facility"] = a.facility;
    e["line"] = {num_to_json<Num>(a.line.f), num_to_json<Num>(a.line.s)};
    assignment.push_back(e);
  }
  for (const auto& [jf, line] : sol.open)
    open.push_back({jf, num_to_json<Num>(line.f), num_to_json<Num>(line.s)});
  for (const auto& x : sol.duals) v.push_back(num_to_json<Num>(x));
  for (const auto& x : sol.budgets) budgets.push_back(num_to_json<Num>(x));
  j["assignment"] = assignment;
  j["open"] = open;
  j["v"] = v;
  j["budgets"] = budgets;
  j["primal_cost"] = num_to_json<Num>(sol.primal_cost);
  j["dual_value"] = num_to_json<Num>(sol.dual_value);
  if (with_trace) j["trace"] = trace_to_json(sol.trace);
  return j;
}

template <class Num>
json to_json(const LotSizingSolution<Num>& sol, bool with_trace = false) {
  json j;
  json serve = json::array(), orders = json::array(), v = json::array();
  for (int s : sol.serve) serve.push_back(s);
  for (const auto& o : sol.orders) {
    json e;
    e["period"] = o.period;
    e["line"] = {num_to_json<Num>(o.line.f), num_to_json<Num>(o.line.s)};
    e["wave"] = num_to_json<Num>(o.wave);
    e["load"] = num_to_json<Num>(o.load);
    orders.push_back(e);
  }
  for (const auto& x : sol.duals) v.push_back(num_to_json<Num>(x));
  j["serve"] = serve;
  j["orders"] = orders;
  j["v"] = v;
  j["primal_cost"] = num_to_json<Num>(sol.primal_cost);
  j["dual_value"] = num_to_json<Num>(sol.dual_value);
  j["final_wave"] = num_to_json<Num>(sol.final_wave);
  if (with_trace) j["trace"] = trace_to_json(sol.trace);
  return j;
}

template <class Num>
Tangent<Num> tangent_from_json(const json& j) {
  return Tangent<Num>{num_from_json<Num>(j.at(0)), num_from_json<Num>(j.at(1)), num_traits<Num>::zero()};
}

template <class Num>
FacilitySolution<Num> facility_solution_from_json(const json& j) {
  FacilitySolution<Num> sol;
  for (const auto& a : j.at("assignment")) {
    typename FacilitySolution<Num>::Assignment as;
    as.facility = a.at("facility").get<int>();
    as.line = tangent_from_json<Num>(a.at("line"));
    sol.assigned.push_back(as);
  }
  for (const auto& o : j.at("open"))
    sol.open.push_back({o.at(0).get<int>(),
                        Tangent<Num>{num_from_json<Num>(o.at(1)), num_from_json<Num>(o.at(2)),
                                     num_traits<Num>::zero()}});
  for (const auto& x : j.at("v")) sol.duals.push_back(num_from_json<Num>(x));
  for (const auto& x : j.at("budgets")) sol.budgets.push_back(num_from_json<Num>(x));
  sol.primal_cost = num_from_json<Num>(j.at("primal_cost"));
  sol.dual_value = num_from_json<Num>(j.at("dual_value"));
  return sol;
}

template <class Num>
LotSizingSolution<Num> lot_sizing_solution_from_json(const json& j) {
  LotSizingSolution<Num> sol;
  for (const auto& s : j.at("serve")) sol.serve.push_back(s.get<int>());
  for (const auto& o : j.at("orders")) {
    typename LotSizingSolution<Num>::Order ord;
    ord.period = o.at("period").get<int>();
    ord.line = tangent_from_json<Num>(o.at("line"));
    ord.wave = num_from_json<Num>(o.at("wave"));
    ord.load = num_from_json<Num>(o.at("load"));
    sol.orders.push_back(ord);
  }
  for (const auto& x : j.at("v")) sol.duals.push_back(num_from_json<Num>(x));
  sol.primal_cost = num_from_json<Num>(j.at("primal_cost"));
  sol.dual_value = num_from_json<Num>(j.at("dual_value"));
  sol.final_wave = num_from_json<Num>(j.at("final_wave"));
  return sol;
}

template <class Num>
JrpSolution<Num> jrp_solution_from_json(const json& j) {
  JrpSolution<Num> sol;
  for (const auto& row : j.at("serve")) {
    std::vector<int> r;
    for (const auto& s : row) r.push_back(s.get<int>());
    sol.serve.push_back(std::move(r));
  }
  for (const auto& row : j.at("v")) {
    std::vector<Num> r;
    for (const auto& x : row) r.push_back(num_from_json<Num>(x));
    sol.duals.push_back(std::move(r));
  }
  for (const auto& s : j.at("joint_orders")) sol.joint_open.push_back(s.get<int>());
  for (const auto& o : j.at("individual_orders")) {
    typename JrpSolution<Num>::ItemOrder ord;
    ord.period = o.at("period").get<int>();
    ord.item = o.at("item").get<int>();
    ord.load = num_from_json<Num>(o.at("load"));
    ord.line = tangent_from_json<Num>(o.at("line"));
    sol.item_orders.push_back(ord);
  }
  for (const auto& r : j.at("tight_items")) {
    typename JrpSolution<Num>::TightItemOrder rec;
    rec.period = r.at("period").get<int>();
    rec.item = r.at("item").get<int>();
    rec.line = tangent_from_json<Num>(r.at("line"));
    rec.wave = num_from_json<Num>(r.at("wave"));
    sol.tight_items.push_back(rec);
  }
  sol.primal_cost = num_from_json<Num>(j.at("primal_cost"));
  sol.dual_value = num_from_json<Num>(j.at("dual_value"));
  sol.final_wave = num_from_json<Num>(j.at("final_wave"));
  return sol;
}

template <class Num>
json to_json(const JrpSolution<Num>& sol, bool with_trace = false) {
  json j;
  json serve = json::array(), v = json::array(), joint = json::array(), items = json::array();
  for (const auto& row : sol.serve) {
    json r = json::array();
    for (int s : row) r.push_back(s);
    serve.push_back(r);
  }
  for (const auto& row : sol.duals) {
    json r = json::array();
    for (const auto& x : row) r.push_back(num_to_json<Num>(x));
    v.push_back(r);
  }
  for (int s : sol.joint_open) joint.push_back(s);
  for (const auto& o : sol.item_orders) {
    json e;
    e["period"] = o.period;
    e["item"] = o.item;
    e["load"] = num_to_json<Num>(o.load);
    e["line"] = {num_to_json<Num>(o.line.f), num_to_json<Num>(o.line.s)};
    items.push_back(e);
  }
  json tight = json::array();
  for (const auto& rec : sol.tight_items) {
    json e;
    e["period"] = rec.period;
    e["item"] = rec.item;
    e["line"] = {num_to_json<Num>(rec.line.f), num_to_json<Num>(rec.line.s)};
    e["wave"] = num_to_json<Num>(rec.wave);
    tight.push_back(e);
  }
  j["serve"] = serve;
  j["v"] = v;
  j["joint_orders"] = joint;
  j["individual_orders"] = items;
  j["tight_items"] = tight;
  j["primal_cost"] = num_to_json<Num>(sol.primal_cost);
  j["dual_value"] = num_to_json<Num>(sol.dual_value);
  j["final_wave"] = num_to_json<Num>(sol.final_wave);
  if (with_trace) j["trace"] = trace_to_json(sol.trace);
  return j;
}

}  // namespace concavepd
