#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <stdexcept>
#include <vector>

#include "concavepd/concave.hpp"
#include "concavepd/tangent_engine.hpp"
#include "concavepd/trace.hpp"

namespace concavepd {

// Facility location instance: m customers with positive demands, n facilities
// with concave opening costs, metric per-unit connection costs.
template <class Num>
struct FacilityInstance {
  std::vector<Num> demand;                  // size m
  std::vector<std::vector<Num>> connect;    // m x n
  std::vector<ConcaveFunction<Num>> cost;   // size n

  int customers() const { return static_cast<int>(demand.size()); }
  int facilities() const { return static_cast<int>(cost.size()); }

  bool classical() const {
    for (const auto& fn : cost)
      if (fn.kind() != ConcaveFunction<Num>::Kind::FixedCharge) return false;
    return true;
  }

  void validate() const {
    if (demand.empty() || cost.empty()) throw std::invalid_argument("empty facility instance");
    if (connect.size() != demand.size()) throw std::invalid_argument("connection matrix row count");
    for (const auto& row : connect)
      if (row.size() != cost.size()) throw std::invalid_argument("connection matrix column count");
    for (const auto& d : demand)
      if (!(d > num_traits<Num>::zero())) throw std::invalid_argument("demands must be positive");
    for (const auto& row : connect)
      for (const auto& c : row)
        if (c < num_traits<Num>::zero()) throw std::invalid_argument("connection costs must be >= 0");
  }
};

// c_ij <= c_ik + c_lk + c_lj for all customers i,l and facilities j,k.
template <class Num>
bool is_metric(const FacilityInstance<Num>& inst) {
  const int m = inst.customers(), n = inst.facilities();
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (!num_traits<Num>::le(inst.connect[i][j],
                                   inst.connect[i][k] + inst.connect[l][k] + inst.connect[l][j]))
            return false;
  return true;
}

// Piecewise-linear costs expand into one fixed-charge facility per piece:
// facility (j,p) opens for the piece intercept and connects at c_ij + slope.
// `origin[q]` records which facility and support line expanded facility q
// came from.
template <class Num>
struct PwlExpansion {
  FacilityInstance<Num> instance;
  std::vector<std::pair<int, Tangent<Num>>> origin;
};

template <class Num>
PwlExpansion<Num> expand_pwl_instance(const FacilityInstance<Num>& inst) {
  inst.validate();
  PwlExpansion<Num> out;
  out.instance.demand = inst.demand;
  const int m = inst.customers(), n = inst.facilities();
  out.instance.connect.assign(m, {});
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<Num, Num>> pieces;
    switch (inst.cost[j].kind()) {
      case ConcaveFunction<Num>::Kind::FixedCharge:
        pieces = {{inst.cost[j].fixed_part(), num_traits<Num>::zero()}};
        break;
      case ConcaveFunction<Num>::Kind::AffineFixed:
        pieces = {{inst.cost[j].fixed_part(), inst.cost[j].unit_part()}};
        break;
      case ConcaveFunction<Num>::Kind::PiecewiseLinearMin:
        pieces = inst.cost[j].pieces();
        break;
      default:
        throw std::invalid_argument("expansion requires piecewise-linear costs");
    }
    for (const auto& [f, s] : pieces) {
      out.instance.cost.push_back(ConcaveFunction<Num>::fixed_charge(f));
      for (int i = 0; i < m; ++i) out.instance.connect[i].push_back(inst.connect[i][j] + s);
      out.origin.push_back({j, Tangent<Num>{f, s, num_traits<Num>::zero()}});
    }
  }
  return out;
}

// Primal assignment plus dual certificate of a facility-location run. `duals`
// is the feasible dual vector (budgets scaled by 1/1.61, the dual-fitting
// guarantee of the underlying classical algorithm); `budgets` keeps the raw
// values frozen at connection time.
template <class Num>
struct FacilitySolution {
  struct Assignment {
    int facility = -1;
    Tangent<Num> line{};
  };
  std::vector<Assignment> assigned;           // per customer
  std::vector<std::pair<int, Tangent<Num>>> open;  // opened (facility, tangent), in order
  std::vector<Num> duals;
  std::vector<Num> budgets;
  Num primal_cost{};
  Num dual_value{};
  TraceLog<Num> trace;
};

namespace detail {

template <class Num>
Num approx_ratio_bound() {
  // Approximation factor of the classical primal-dual algorithm; scaling the
  // frozen budgets by its inverse yields a feasible dual.
  return num_traits<Num>::from_int(161) / num_traits<Num>::from_int(100);
}

// Earliest tau >= now with base + sum_{arrivals <= tau} (tau - arrival)*weight
// crossing `target`, where arrivals before `now` count from `now` on. Returns
// nullopt when the target is never reached. With target == 0 the answer is the
// first arrival (or `now` if something already contributes).
template <class Num>
std::optional<Num> crossing_time(Num base, std::vector<std::pair<Num, Num>> arrivals,  // (time, weight)
                                 const Num& now, const Num& target, bool contributor_present) {
  Num zero = num_traits<Num>::zero();
  for (auto& [t, w] : arrivals)
    if (t < now) {
      base += (now - t) * w;
      t = now;
    }
  std::sort(arrivals.begin(), arrivals.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // base > 0 implies a standing contributor, so `contributor_present` covers
  // every already-tight state (f = 0 with nobody in reach falls through to the
  // sweep, which reports the first arrival).
  if (base >= target && contributor_present) return now;
  Num t_cur = now, acc = base, slope = zero;
  std::size_t next = 0;
  while (true) {
    Num t_next{};
    bool has_next = next < arrivals.size();
    if (has_next) t_next = arrivals[next].first;
    if (slope > zero) {
      Num t_hit = t_cur + (target - acc) / slope;
      if (!has_next || t_hit <= t_next) return t_hit;
    }
    if (!has_next) return std::nullopt;
    acc += slope * (t_next - t_cur);
    t_cur = t_next;
    while (next < arrivals.size() && arrivals[next].first == t_next) {
      slope += arrivals[next].second;
      ++next;
    }
    if (acc >= target) return t_cur;  // zero-cost or exact arrival hit
  }
}

}  // namespace detail

// Classical primal-dual facility location (fixed charges only). Budgets of
// unconnected customers grow with time; a facility opens when the offered
// contributions cover its charge, and connected customers keep offering the
// connection-cost savings to closed facilities.
template <class Num>
class ClassicalFlpdSolver {
 public:
  explicit ClassicalFlpdSolver(const FacilityInstance<Num>& inst) : inst_(inst) {
    inst.validate();
    if (!inst.classical()) throw std::invalid_argument("classical solver needs fixed-charge costs");
    const int m = inst_.customers();
    connected_.assign(m, false);
    value_.assign(m, num_traits<Num>::zero());
    budget_.assign(m, num_traits<Num>::zero());
    facility_.assign(m, -1);
    open_.assign(inst_.facilities(), false);
    unconnected_ = m;
  }

  void run() {
    while (unconnected_ > 0) step();
  }

  // One event: a facility opening or a single customer connecting.
  void step() {
    const int m = inst_.customers(), n = inst_.facilities();
    Num zero = num_traits<Num>::zero();

    std::optional<Num> best_t;
    int best_facility = -1;
    bool best_is_open_event = true;
    int best_customer = -1;

    for (int j = 0; j < n; ++j) {
      if (open_[j]) continue;
      Num base = zero;
      bool present = false;
      std::vector<std::pair<Num, Num>> arrivals;
      for (int i = 0; i < m; ++i) {
        if (connected_[i]) {
          Num w = value_[i] - inst_.connect[i][j] * inst_.demand[i];
          if (w >= zero) present = true;
          if (w > zero) base += w;
        } else {
          arrivals.push_back({inst_.connect[i][j], inst_.demand[i]});
          if (inst_.connect[i][j] <= now_) present = true;
        }
      }
      auto t = detail::crossing_time<Num>(base, std::move(arrivals), now_, inst_.cost[j].fixed_part(), present);
      if (t && (!best_t || *t < *best_t)) {
        best_t = t;
        best_facility = j;
        best_is_open_event = true;
        best_customer = -1;
      }
    }
    for (int j = 0; j < n; ++j) {
      if (!open_[j]) continue;
      for (int i = 0; i < m; ++i) {
        if (connected_[i]) continue;
        Num t = std::max(inst_.connect[i][j], now_);
        if (!best_t || t < *best_t) {
          best_t = t;
          best_facility = j;
          best_is_open_event = false;
          best_customer = i;
        }
      }
    }
    if (!best_t) throw std::logic_error("no further event with customers still unconnected");

    now_ = *best_t;
    if (best_is_open_event)
      open_facility(best_facility);
    else
      connect(best_customer, best_facility, /*first=*/true);
  }

  FacilitySolution<Num> result() const {
    FacilitySolution<Num> sol;
    const int m = inst_.customers();
    sol.assigned.resize(m);
    Num primal = num_traits<Num>::zero();
    for (int i = 0; i < m; ++i) {
      sol.assigned[i].facility = facility_[i];
      sol.assigned[i].line = Tangent<Num>{inst_.cost[facility_[i]].fixed_part(), num_traits<Num>::zero(),
                                          num_traits<Num>::zero()};
      primal += inst_.connect[i][facility_[i]] * inst_.demand[i];
    }
    for (int j = 0; j < inst_.facilities(); ++j)
      if (open_[j]) {
        primal += inst_.cost[j].fixed_part();
        sol.open.push_back({j, Tangent<Num>{inst_.cost[j].fixed_part(), num_traits<Num>::zero(),
                                            num_traits<Num>::zero()}});
      }
    sol.primal_cost = primal;
    sol.budgets = budget_;
    Num gamma = detail::approx_ratio_bound<Num>();
    sol.duals.resize(m);
    Num dual = num_traits<Num>::zero();
    for (int i = 0; i < m; ++i) {
      sol.duals[i] = budget_[i] / gamma;
      dual += sol.duals[i];
    }
    sol.dual_value = dual;
    sol.trace = trace_;
    return sol;
  }

  bool finished() const { return unconnected_ == 0; }
  const Num& time() const { return now_; }

 private:
  void open_facility(int j) {
    const int m = inst_.customers();
    open_[j] = true;
    TraceEvent<Num> ev;
    ev.time = now_;
    ev.kind = TraceKind::TangentTight;
    ev.facility = j;
    ev.intercept = inst_.cost[j].fixed_part();
    ev.slope = num_traits<Num>::zero();
    trace_.push_back(ev);
    for (int i = 0; i < m; ++i) {
      Num threshold = inst_.connect[i][j] * inst_.demand[i];
      Num v = connected_[i] ? value_[i] : now_ * inst_.demand[i];
      if (v >= threshold) connect(i, j, /*first=*/!connected_[i]);
    }
  }

  void connect(int i, int j, bool first) {
    if (first) budget_[i] = now_ * inst_.demand[i];
    connected_[i] = true;
    if (facility_[i] == -1) --unconnected_;
    facility_[i] = j;
    value_[i] = inst_.connect[i][j] * inst_.demand[i];
    TraceEvent<Num> ev;
    ev.time = now_;
    ev.kind = TraceKind::CustomerConnects;
    ev.facility = j;
    ev.customer = i;
    trace_.push_back(ev);
  }

  const FacilityInstance<Num>& inst_;
  Num now_ = num_traits<Num>::zero();
  std::vector<bool> connected_;
  std::vector<Num> value_;   // current budget (reset to connection cost on connect)
  std::vector<Num> budget_;  // frozen at first connection
  std::vector<int> facility_;
  std::vector<bool> open_;
  int unconnected_ = 0;
  TraceLog<Num> trace_;
};

template <class Num>
FacilitySolution<Num> solve_classical_flpd(const FacilityInstance<Num>& inst) {
  ClassicalFlpdSolver<Num> solver(inst);
  solver.run();
  return solver.result();
}

// Implicit execution of the classical algorithm over the infinite tangent
// expansion of concave facility costs. Three event families, per facility:
//   1. a closed tangent becomes tight (first-tight-tangent computation over
//      the facility's current contributors),
//   2. an unconnected customer reaches an open tangent,
//   3. an unconnected customer starts contributing to a facility.
template <class Num>
class ConcaveFlpdSolver {
 public:
  struct EventInfo {
    Num time{};
    int kind = 0;  // 1, 2, 3
    int facility = -1;
    int customer = -1;
  };

  explicit ConcaveFlpdSolver(const FacilityInstance<Num>& inst) : inst_(inst) {
    inst.validate();
    const int m = inst_.customers(), n = inst_.facilities();
    connected_.assign(m, false);
    value_.assign(m, num_traits<Num>::zero());
    budget_.assign(m, num_traits<Num>::zero());
    assigned_.assign(m, {-1, Tangent<Num>{}});
    contributors_.assign(n, {});
    open_lines_.assign(n, {});
    tight_cache_.assign(n, std::nullopt);
    unconnected_ = m;
    // Event-3 schedule: connection costs sorted once, a cursor walks forward.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) arrivals_.push_back({inst_.connect[i][j], i, j});
    std::sort(arrivals_.begin(), arrivals_.end(), [](const auto& a, const auto& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      if (a.facility != b.facility) return a.facility < b.facility;
      return a.customer < b.customer;
    });
    for (int j = 0; j < n; ++j) refresh_tight(j);
  }

  bool finished() const { return unconnected_ == 0; }

  EventInfo peek() {
    skip_stale_arrivals();
    EventInfo best;
    best.kind = 0;
    // Event 3 first at equal times: it only updates contributor bookkeeping.
    if (cursor_ < arrivals_.size()) {
      best.time = arrivals_[cursor_].cost;
      best.kind = 3;
      best.facility = arrivals_[cursor_].facility;
      best.customer = arrivals_[cursor_].customer;
    }
    for (int j = 0; j < inst_.facilities(); ++j) {
      if (!tight_cache_[j]) continue;
      Num t = tight_cache_[j]->time;
      if (best.kind == 0 || t < best.time) best = {t, 1, j, -1};
    }
    for (int j = 0; j < inst_.facilities(); ++j) {
      for (const auto& line : open_lines_[j]) {
        for (int i = 0; i < inst_.customers(); ++i) {
          if (connected_[i]) continue;
          Num t = std::max(inst_.connect[i][j] + line.s, now_);
          if (best.kind == 0 || t < best.time) best = {t, 2, j, i};
        }
      }
    }
    if (best.kind == 0) throw std::logic_error("no further event with customers still unconnected");
    return best;
  }

  void step() {
    EventInfo ev = peek();
    now_ = ev.time;
    switch (ev.kind) {
      case 3: {
        contributors_[ev.facility].push_back(ev.customer);
        ++cursor_;
        TraceEvent<Num> log;
        log.time = now_;
        log.kind = TraceKind::CustomerContributesFacility;
        log.facility = ev.facility;
        log.customer = ev.customer;
        trace_.push_back(log);
        refresh_tight(ev.facility);
        break;
      }
      case 1: {
        process_tight(ev.facility);
        break;
      }
      case 2: {
        // Find the open line the customer reached.
        const Tangent<Num>* line = nullptr;
        for (const auto& l : open_lines_[ev.facility]) {
          Num t = inst_.connect[ev.customer][ev.facility] + l.s;
          if (num_traits<Num>::eq(std::max(t, now_), now_)) {
            line = &l;
            break;
          }
        }
        assert(line);
        connect(ev.customer, ev.facility, *line);
        refresh_all();
        break;
      }
      default:
        throw std::logic_error("bad event");
    }
  }

  void run() {
    while (!finished()) step();
  }

  FacilitySolution<Num> result() const {
    FacilitySolution<Num> sol;
    const int m = inst_.customers(), n = inst_.facilities();
    sol.assigned.resize(m);
    std::vector<Num> load(n, num_traits<Num>::zero());
    Num primal = num_traits<Num>::zero();
    for (int i = 0; i < m; ++i) {
      sol.assigned[i].facility = assigned_[i].first;
      sol.assigned[i].line = assigned_[i].second;
      load[assigned_[i].first] += inst_.demand[i];
      primal += inst_.connect[i][assigned_[i].first] * inst_.demand[i];
    }
    for (int j = 0; j < n; ++j) primal += inst_.cost[j].eval(load[j]);
    sol.open = opened_;
    sol.primal_cost = primal;
    sol.budgets = budget_;
    Num gamma = detail::approx_ratio_bound<Num>();
    sol.duals.resize(m);
    Num dual = num_traits<Num>::zero();
    for (int i = 0; i < m; ++i) {
      sol.duals[i] = budget_[i] / gamma;
      dual += sol.duals[i];
    }
    sol.dual_value = dual;
    sol.trace = trace_;
    return sol;
  }

  const TraceLog<Num>& trace() const { return trace_; }
  const Num& time() const { return now_; }

 private:
  struct Arrival {
    Num cost;
    int customer;
    int facility;
  };

  void skip_stale_arrivals() {
    while (cursor_ < arrivals_.size() && connected_[arrivals_[cursor_].customer]) ++cursor_;
  }

  // First tangent of facility j to become tight, reduced to the single-cost
  // setting: contributors keep their budgets with the connection cost
  // subtracted, and the clock restarts at the current instant.
  void refresh_tight(int j) {
    tight_cache_[j] = std::nullopt;
    auto& members = contributors_[j];
    // Drop members whose budgets fell below the contribution threshold after
    // a reconnection.
    members.erase(std::remove_if(members.begin(), members.end(),
                                 [&](int i) {
                                   if (!connected_[i]) return false;
                                   return value_[i] < inst_.connect[i][j] * inst_.demand[i];
                                 }),
                  members.end());
    if (members.empty()) return;
    RateProfile<Num> profile;
    profile.demands.reserve(members.size());
    profile.budgets.reserve(members.size());
    profile.rates.reserve(members.size());
    for (int i : members) {
      Num threshold = inst_.connect[i][j] * inst_.demand[i];
      profile.demands.push_back(inst_.demand[i]);
      if (connected_[i]) {
        profile.budgets.push_back(value_[i] - threshold);
        profile.rates.push_back(num_traits<Num>::zero());
      } else {
        profile.budgets.push_back((now_ - inst_.connect[i][j]) * inst_.demand[i]);
        profile.rates.push_back(inst_.demand[i]);
      }
    }
    // A closed tangent can be exactly tight from frozen contributions alone
    // (a tie with the event that froze the last contributor); the growth-based
    // computation cannot see it, so check the static prefixes first.
    if (auto line = static_tight_line(j, profile)) {
      tight_cache_[j] = TightCandidate{now_, *line};
      return;
    }
    // Only closed support lines count as tight events; an open line's
    // re-tightness is an unconnected customer reaching it, which the reach
    // scan reports at the same instant.
    auto pick = [&](const Tangent<Num>& steep, const Tangent<Num>& flat) -> std::optional<Tangent<Num>> {
      if (!line_open(j, steep)) return steep;
      if (!(num_traits<Num>::eq(steep.f, flat.f) && num_traits<Num>::eq(steep.s, flat.s)) &&
          !line_open(j, flat))
        return flat;
      return std::nullopt;
    };
    auto res = first_tight_mixed_lines(inst_.cost[j], profile, pick);
    if (res) tight_cache_[j] = TightCandidate{res->first.t_star + now_, res->second};
  }

  // Closed support line of facility j that is already tight from the frozen
  // budgets: some prefix (by per-unit budget) of the stopped contributors
  // covers the cost value at its demand total. Returns the steepest such
  // closed line.
  std::optional<Tangent<Num>> static_tight_line(int j, const RateProfile<Num>& profile) const {
    Num zero = num_traits<Num>::zero();
    std::vector<std::pair<Num, Num>> stopped;  // (per-unit budget, demand)
    for (std::size_t q = 0; q < profile.size(); ++q)
      if (!(profile.rates[q] > zero))
        stopped.push_back({profile.budgets[q] / profile.demands[q], profile.demands[q]});
    if (stopped.empty()) return std::nullopt;
    std::sort(stopped.begin(), stopped.end(), [](const auto& a, const auto& b) { return b.first < a.first; });
    Num d_sum = zero, v_sum = zero;
    for (const auto& [per_unit, d] : stopped) {
      d_sum += d;
      v_sum += per_unit * d;
      if (!(v_sum >= inst_.cost[j].eval(d_sum))) continue;
      for (Tangent<Num> line : {inst_.cost[j].tangent_at_steep(d_sum), inst_.cost[j].tangent_at(d_sum)}) {
        if (line_open(j, line)) continue;
        if (v_sum - line.s * d_sum >= line.f) {
          line.p = d_sum;
          return line;
        }
      }
    }
    return std::nullopt;
  }

  void refresh_all() {
    for (int j = 0; j < inst_.facilities(); ++j) refresh_tight(j);
  }

  bool line_open(int j, const Tangent<Num>& line) const {
    for (const auto& l : open_lines_[j])
      if (num_traits<Num>::eq(l.f, line.f) && num_traits<Num>::eq(l.s, line.s)) return true;
    return false;
  }

  void process_tight(int j) {
    Tangent<Num> line = tight_cache_[j]->line;
    Num p = line.p;
    bool fresh = !line_open(j, line);
    if (fresh) {
      open_lines_[j].push_back(line);
      opened_.push_back({j, line});
      TraceEvent<Num> log;
      log.time = now_;
      log.kind = TraceKind::TangentTight;
      log.facility = j;
      log.touch = p;
      log.intercept = line.f;
      log.slope = line.s;
      trace_.push_back(log);
    }
    // A fresh opening connects everyone whose budget reaches the line,
    // switching connected customers over; an already-open line only picks up
    // unconnected customers (the regular reach event).
    for (int i = 0; i < inst_.customers(); ++i) {
      if (!fresh && connected_[i]) continue;
      Num threshold = (inst_.connect[i][j] + line.s) * inst_.demand[i];
      Num v = connected_[i] ? value_[i] : now_ * inst_.demand[i];
      if (v >= threshold) {
        if (connected_[i] && assigned_[i].first == j && num_traits<Num>::eq(assigned_[i].second.s, line.s) &&
            num_traits<Num>::eq(assigned_[i].second.f, line.f))
          continue;
        connect(i, j, line);
      }
    }
    refresh_all();
  }

  void connect(int i, int j, const Tangent<Num>& line) {
    if (!connected_[i]) budget_[i] = now_ * inst_.demand[i];
    if (!connected_[i]) --unconnected_;
    connected_[i] = true;
    assigned_[i] = {j, line};
    value_[i] = (inst_.connect[i][j] + line.s) * inst_.demand[i];
    TraceEvent<Num> log;
    log.time = now_;
    log.kind = TraceKind::CustomerConnects;
    log.facility = j;
    log.customer = i;
    log.intercept = line.f;
    log.slope = line.s;
    trace_.push_back(log);
  }

  const FacilityInstance<Num>& inst_;
  Num now_ = num_traits<Num>::zero();
  std::vector<bool> connected_;
  std::vector<Num> value_;
  std::vector<Num> budget_;
  std::vector<std::pair<int, Tangent<Num>>> assigned_;
  std::vector<std::vector<int>> contributors_;
  std::vector<std::vector<Tangent<Num>>> open_lines_;
  struct TightCandidate {
    Num time;
    Tangent<Num> line;
  };
  std::vector<std::optional<TightCandidate>> tight_cache_;
  std::vector<std::pair<int, Tangent<Num>>> opened_;
  std::vector<Arrival> arrivals_;
  std::size_t cursor_ = 0;
  int unconnected_ = 0;
  TraceLog<Num> trace_;
};

template <class Num>
FacilitySolution<Num> solve_concave_flpd(const FacilityInstance<Num>& inst) {
  ConcaveFlpdSolver<Num> solver(inst);
  solver.run();
  return solver.result();
}

}  // namespace concavepd
