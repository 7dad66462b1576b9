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

// Economic lot-sizing instance over periods 0..n-1. `holding[t]` is the
// per-unit cost of carrying one unit from period t to t+1; ordering costs are
// concave per period (classical = fixed plus per-unit, i.e. AffineFixed or
// FixedCharge).
template <class Num>
struct LotSizingInstance {
  std::vector<Num> demand;                 // size n, >= 0
  std::vector<Num> holding;                // size n-1, >= 0
  std::vector<ConcaveFunction<Num>> cost;  // size n

  int periods() const { return static_cast<int>(demand.size()); }

  bool classical() const {
    for (const auto& fn : cost) {
      auto k = fn.kind();
      if (k != ConcaveFunction<Num>::Kind::FixedCharge && k != ConcaveFunction<Num>::Kind::AffineFixed)
        return false;
    }
    return true;
  }

  void validate() const {
    if (demand.empty()) throw std::invalid_argument("lot-sizing instance needs at least one period");
    if (cost.size() != demand.size()) throw std::invalid_argument("cost count must match period count");
    if (holding.size() + 1 != demand.size()) throw std::invalid_argument("holding count must be n-1");
    for (const auto& d : demand)
      if (d < num_traits<Num>::zero()) throw std::invalid_argument("demands must be >= 0");
    for (const auto& h : holding)
      if (h < num_traits<Num>::zero()) throw std::invalid_argument("holding costs must be >= 0");
  }

  // Prefix holding costs: H[t] carries a unit from period 0 to t, so the
  // holding cost from s to t is H[t] - H[s].
  std::vector<Num> holding_prefix() const {
    std::vector<Num> H(demand.size(), num_traits<Num>::zero());
    for (std::size_t t = 1; t < demand.size(); ++t) H[t] = H[t - 1] + holding[t - 1];
    return H;
  }
};

template <class Num>
struct LotSizingSolution {
  struct Order {
    int period = -1;
    Tangent<Num> line{};  // support line (fixed, unit cost) the order opened with
    Num wave{};           // wave position of its tight event
    Num load{};
  };
  std::vector<int> serve;  // per period: serving order period, or -1 when d_t = 0
  std::vector<Order> orders;
  std::vector<Num> duals;
  Num primal_cost{};
  Num dual_value{};
  Num final_wave{};
  TraceLog<Num> trace;
};

namespace lsdetail {

// One purchasable order option; the classical problem has one per period,
// the piecewise expansion one per (period, piece).
template <class Num>
struct OrderOption {
  int period;
  Num fixed;
  Num unit;
  int rank;  // tie order within a period (pieces by decreasing slope)
};

// Wave-based primal-dual run over explicit order options, followed by the
// pruning pass. While the wave descends, every unserved demand point behind it
// grows its budget; an order option becomes tight when the offered
// contributions cover its fixed cost, and then serves every unserved demand
// point in reach.
template <class Num>
class ExplicitLspd {
 public:
  ExplicitLspd(const LotSizingInstance<Num>& inst, std::vector<OrderOption<Num>> options)
      : inst_(inst), options_(std::move(options)), H_(inst.holding_prefix()) {
    const int n = inst_.periods();
    served_.assign(n, false);
    value_.assign(n, num_traits<Num>::zero());
    serve_.assign(n, -1);
    serve_id_.assign(n, -1);
    opened_.assign(options_.size(), false);
    unserved_ = 0;
    for (int t = 0; t < n; ++t) {
      if (inst_.demand[t] > num_traits<Num>::zero())
        ++unserved_;
      else
        served_[t] = true;
    }
    wave_ = H_[n - 1];
    start_ = wave_;
  }

  void run() {
    while (unserved_ > 0) step();
    prune();
  }

  LotSizingSolution<Num> result() const {
    LotSizingSolution<Num> sol;
    const int n = inst_.periods();
    sol.serve = serve_;
    Num primal = num_traits<Num>::zero();
    for (const auto& rec : log_) {
      if (!rec.open) continue;
      const auto& opt = options_[rec.option];
      typename LotSizingSolution<Num>::Order o;
      o.period = opt.period;
      o.line = Tangent<Num>{opt.fixed, opt.unit, num_traits<Num>::zero()};
      o.wave = rec.wave;
      for (int t = 0; t < n; ++t)
        if (serve_id_[t] == rec.id) o.load += inst_.demand[t];
      primal += opt.fixed + opt.unit * o.load;
      sol.orders.push_back(o);
    }
    sol.duals.assign(n, num_traits<Num>::zero());
    Num dual = num_traits<Num>::zero();
    for (int t = 0; t < n; ++t) {
      if (serve_[t] >= 0) primal += (H_[t] - H_[serve_[t]]) * inst_.demand[t];
      sol.duals[t] = value_[t];
      dual += value_[t];
    }
    sol.primal_cost = primal;
    sol.dual_value = dual;
    sol.final_wave = wave_;
    sol.trace = trace_;
    return sol;
  }

 private:
  struct OpenRecord {
    int option;
    Num wave;
    bool open;
    int id;
  };

  static bool option_before(const OrderOption<Num>& a, const OrderOption<Num>& b) {
    if (a.period != b.period) return a.period < b.period;
    return a.rank < b.rank;
  }

  void step() {
    std::optional<Num> best_w;
    int best = -1;
    for (std::size_t q = 0; q < options_.size(); ++q) {
      if (opened_[q]) continue;
      auto w = tight_wave(static_cast<int>(q));
      if (!w) continue;
      bool better = !best_w || *w > *best_w ||
                    (num_traits<Num>::eq(*w, *best_w) && option_before(options_[q], options_[best]));
      if (better) {
        best_w = *w;
        best = static_cast<int>(q);
      }
    }
    if (!best_w) throw std::logic_error("wave exhausted with demand points still unserved");
    wave_ = *best_w;
    open_order(best);
  }

  // Wave position where option q becomes tight, or nullopt when no unserved
  // demand can reach it. Unserved demand points t >= s all share the per-unit
  // excess H[s] - unit - W toward the option, so the growing part is linear.
  std::optional<Num> tight_wave(int q) const {
    const auto& opt = options_[q];
    Num zero = num_traits<Num>::zero();
    Num d_grow = zero, base = zero;
    for (int t = opt.period; t < inst_.periods(); ++t) {
      if (!(inst_.demand[t] > zero)) continue;
      if (served_[t]) {
        Num w = value_[t] - (opt.unit + H_[t] - H_[opt.period]) * inst_.demand[t];
        if (w > zero) base += w;
      } else {
        d_grow += inst_.demand[t];
      }
    }
    if (!(d_grow > zero)) return std::nullopt;
    Num w_tight;
    if (base >= opt.fixed && base > zero)
      w_tight = wave_;  // frozen contributions already cover the cost: tie at the current position
    else
      w_tight = H_[opt.period] - opt.unit - (opt.fixed - base) / d_grow;
    if (w_tight > wave_) w_tight = wave_;
    return w_tight;
  }

  void open_order(int q) {
    const auto& opt = options_[q];
    opened_[q] = true;
    int id = next_id_++;
    log_.push_back({q, wave_, true, id});
    TraceEvent<Num> ev;
    ev.time = start_ - wave_;
    ev.wave = wave_;
    ev.kind = TraceKind::TangentTight;
    ev.facility = opt.period;
    ev.intercept = opt.fixed;
    ev.slope = opt.unit;
    trace_.push_back(ev);
    for (int t = opt.period; t < inst_.periods(); ++t) {
      if (served_[t]) continue;
      Num v = inst_.demand[t] * std::max(H_[t] - wave_, num_traits<Num>::zero());
      if (v >= (opt.unit + H_[t] - H_[opt.period]) * inst_.demand[t]) {
        served_[t] = true;
        --unserved_;
        value_[t] = v;
        serve_[t] = opt.period;
        serve_id_[t] = id;
        TraceEvent<Num> sv;
        sv.time = start_ - wave_;
        sv.wave = wave_;
        sv.kind = TraceKind::CustomerConnects;
        sv.facility = opt.period;
        sv.customer = t;
        trace_.push_back(sv);
      }
    }
  }

  bool contributes(int t, int q) const {
    const auto& opt = options_[q];
    if (t < opt.period) return false;
    return value_[t] >= (opt.unit + H_[t] - H_[opt.period]) * inst_.demand[t];
  }

  // Close any open order sharing a contributing demand point with an earlier
  // open order; its demand points move there.
  void prune() {
    std::sort(log_.begin(), log_.end(), [&](const OpenRecord& a, const OpenRecord& b) {
      return option_before(options_[a.option], options_[b.option]);
    });
    const int n = inst_.periods();
    for (std::size_t a = 0; a < log_.size(); ++a) {
      for (std::size_t b = 0; b < a && log_[a].open; ++b) {
        if (!log_[b].open) continue;
        for (int t = options_[log_[a].option].period; t < n; ++t) {
          if (!(inst_.demand[t] > num_traits<Num>::zero())) continue;
          if (contributes(t, log_[a].option) && contributes(t, log_[b].option)) {
            close_into(a, b);
            break;
          }
        }
      }
    }
  }

  void close_into(std::size_t a, std::size_t b) {
    log_[a].open = false;
    TraceEvent<Num> ev;
    ev.time = start_ - wave_;
    ev.wave = wave_;
    ev.kind = TraceKind::OrderClosed;
    ev.facility = options_[log_[a].option].period;
    trace_.push_back(ev);
    for (int t = 0; t < inst_.periods(); ++t)
      if (serve_id_[t] == log_[a].id) {
        serve_[t] = options_[log_[b].option].period;
        serve_id_[t] = log_[b].id;
      }
  }

  const LotSizingInstance<Num>& inst_;
  std::vector<OrderOption<Num>> options_;
  std::vector<Num> H_;
  Num wave_{}, start_{};
  std::vector<bool> served_;
  std::vector<Num> value_;
  std::vector<int> serve_;
  std::vector<int> serve_id_;
  std::vector<bool> opened_;
  std::vector<OpenRecord> log_;
  int next_id_ = 0;
  int unserved_ = 0;
  TraceLog<Num> trace_;
};

template <class Num>
std::vector<OrderOption<Num>> classical_options(const LotSizingInstance<Num>& inst) {
  std::vector<OrderOption<Num>> options;
  for (int t = 0; t < inst.periods(); ++t) {
    Num unit = inst.cost[t].kind() == ConcaveFunction<Num>::Kind::AffineFixed ? inst.cost[t].unit_part()
                                                                              : num_traits<Num>::zero();
    options.push_back({t, inst.cost[t].fixed_part(), unit, 0});
  }
  return options;
}

template <class Num>
std::vector<OrderOption<Num>> expansion_options(const LotSizingInstance<Num>& inst) {
  std::vector<OrderOption<Num>> options;
  for (int t = 0; t < inst.periods(); ++t) {
    std::vector<std::pair<Num, Num>> pieces;
    switch (inst.cost[t].kind()) {
      case ConcaveFunction<Num>::Kind::FixedCharge:
        pieces = {{inst.cost[t].fixed_part(), num_traits<Num>::zero()}};
        break;
      case ConcaveFunction<Num>::Kind::AffineFixed:
        pieces = {{inst.cost[t].fixed_part(), inst.cost[t].unit_part()}};
        break;
      case ConcaveFunction<Num>::Kind::PiecewiseLinearMin:
        pieces = inst.cost[t].pieces();
        break;
      default:
        throw std::invalid_argument("expansion requires piecewise-linear costs");
    }
    int rank = 0;
    for (const auto& [f, s] : pieces) options.push_back({t, f, s, rank++});
  }
  return options;
}

}  // namespace lsdetail

// Classical wave algorithm (exact).
template <class Num>
LotSizingSolution<Num> solve_classical_lspd(const LotSizingInstance<Num>& inst) {
  inst.validate();
  if (!inst.classical()) throw std::invalid_argument("classical solver needs fixed/affine order costs");
  lsdetail::ExplicitLspd<Num> run(inst, lsdetail::classical_options(inst));
  run.run();
  return run.result();
}

// Classical wave algorithm on the per-piece expansion of piecewise-linear
// costs (used by tests as the explicit counterpart of the implicit solver).
template <class Num>
LotSizingSolution<Num> solve_lspd_on_expansion(const LotSizingInstance<Num>& inst) {
  inst.validate();
  lsdetail::ExplicitLspd<Num> run(inst, lsdetail::expansion_options(inst));
  run.run();
  return run.result();
}

// Tight wave positions of the implicit run, one per order period that ever
// opens (the sweep's surviving stack entries).
template <class Num>
struct TightWaveSchedule {
  struct Entry {
    int period;
    Num wave;            // W2: wave position where the order's first tangent gets tight
    Tangent<Num> line;   // that tangent
    int upto;            // serves demand periods [period, upto)
  };
  std::vector<Entry> entries;  // by period, ascending
};

// Backward sweep computing the tight positions W2 via repeated
// first-tight-tangent computations against the stack of later survivors.
// Working values for later periods get deleted when the current order point
// would become tight no later than the stack front (an over-tight front).
template <class Num>
TightWaveSchedule<Num> compute_tight_waves(const LotSizingInstance<Num>& inst) {
  const int n = inst.periods();
  const auto H = inst.holding_prefix();
  Num zero = num_traits<Num>::zero();

  struct StackEntry {
    int period;
    Num wave;
    Tangent<Num> line;
    int upto;
    Num interval_demand;
  };
  std::vector<StackEntry> stack;  // front = smallest period = back of vector

  std::vector<Num> suffix_demand(n + 1, zero);
  for (int t = n - 1; t >= 0; --t) suffix_demand[t] = suffix_demand[t + 1] + inst.demand[t];

  for (int t = n - 1; t >= 0; --t) {
    int front_period = stack.empty() ? n : stack.back().period;
    Num d_grow = suffix_demand[t] - suffix_demand[front_period];
    while (true) {
      bool popped_for_check = false;
      Num d_eff = d_grow;
      // With no growing demand of its own, the order point can still preempt
      // the stack front: test with the front interval growing instead.
      if (!(d_eff > zero)) {
        if (stack.empty()) break;
        d_eff = stack.back().interval_demand;
        popped_for_check = true;
        if (!(d_eff > zero)) {
          // Front serves no demand either; it cannot be preempted, and order
          // point t has nothing to serve.
          break;
        }
      }
      RateProfile<Num> profile;
      profile.demands.push_back(d_eff);
      profile.budgets.push_back(zero);
      profile.rates.push_back(d_eff);
      // Stopped classes: every surviving entry frozen at its tight position,
      // expressed in order-t local time theta = H[t] - W.
      std::size_t skip_front = popped_for_check ? 1 : 0;
      for (std::size_t idx = skip_front; idx < stack.size(); ++idx) {
        const auto& e = stack[stack.size() - 1 - idx];
        Num theta = H[t] - e.wave;
        if (!(theta > zero)) continue;
        if (!(e.interval_demand > zero)) continue;
        profile.demands.push_back(e.interval_demand);
        profile.budgets.push_back(theta * e.interval_demand);
        profile.rates.push_back(zero);
      }
      auto res = first_tight_mixed(inst.cost[t], profile);
      assert(res);
      Num w_cand = H[t] - res->t_star;
      if (!stack.empty() && w_cand >= stack.back().wave) {
        // Over-tight front: order t goes tight first; drop the front and redo.
        d_grow += stack.back().interval_demand;
        stack.pop_back();
        front_period = stack.empty() ? n : stack.back().period;
        continue;
      }
      if (popped_for_check) break;  // no preemption and nothing of our own to serve
      StackEntry e;
      e.period = t;
      e.wave = w_cand;
      e.line = inst.cost[t].tangent_at_steep(res->p_star);
      e.upto = front_period;
      e.interval_demand = d_grow;
      stack.push_back(e);
      break;
    }
  }

  TightWaveSchedule<Num> sched;
  for (auto it = stack.rbegin(); it != stack.rend(); ++it)
    sched.entries.push_back({it->period, it->wave, it->line, it->upto});
  return sched;
}

// Dual recovery: each demand point's budget froze when the latest order point
// at or before it went tight.
template <class Num>
std::vector<Num> recover_duals(const TightWaveSchedule<Num>& sched, const LotSizingInstance<Num>& inst) {
  const auto H = inst.holding_prefix();
  std::vector<Num> duals(inst.periods(), num_traits<Num>::zero());
  for (const auto& e : sched.entries)
    for (int t = e.period; t < e.upto; ++t)
      if (inst.demand[t] > num_traits<Num>::zero())
        duals[t] = inst.demand[t] * std::max(H[t] - e.wave, num_traits<Num>::zero());
  return duals;
}

// Implicit wave algorithm for concave order costs (exact): the sweep yields
// the tight events, then the explicit pruning pass runs over the surviving
// (order, tangent) pairs.
template <class Num>
LotSizingSolution<Num> solve_concave_lspd(const LotSizingInstance<Num>& inst) {
  inst.validate();
  const int n = inst.periods();
  const auto H = inst.holding_prefix();
  Num zero = num_traits<Num>::zero();
  auto sched = compute_tight_waves(inst);
  auto duals = recover_duals(sched, inst);

  LotSizingSolution<Num> sol;
  sol.serve.assign(n, -1);
  sol.duals = duals;
  Num start = H[n - 1];

  struct OpenOrder {
    typename TightWaveSchedule<Num>::Entry entry;
    bool open = true;
  };
  std::vector<OpenOrder> orders;
  for (const auto& e : sched.entries) orders.push_back({e, true});
  std::vector<int> serve_idx(n, -1);
  for (std::size_t q = 0; q < orders.size(); ++q)
    for (int t = orders[q].entry.period; t < orders[q].entry.upto; ++t)
      if (inst.demand[t] > zero) {
        sol.serve[t] = orders[q].entry.period;
        serve_idx[t] = static_cast<int>(q);
      }

  // Tight events in wave order (descending W; earliest period first on ties).
  {
    std::vector<std::size_t> order(orders.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (!num_traits<Num>::eq(orders[a].entry.wave, orders[b].entry.wave))
        return orders[b].entry.wave < orders[a].entry.wave;
      return orders[a].entry.period < orders[b].entry.period;
    });
    for (std::size_t q : order) {
      const auto& e = orders[q].entry;
      TraceEvent<Num> ev;
      ev.time = start - e.wave;
      ev.wave = e.wave;
      ev.kind = TraceKind::TangentTight;
      ev.facility = e.period;
      ev.touch = e.line.p;
      ev.intercept = e.line.f;
      ev.slope = e.line.s;
      sol.trace.push_back(ev);
      for (int t = e.period; t < e.upto; ++t)
        if (inst.demand[t] > zero) {
          TraceEvent<Num> sv;
          sv.time = start - e.wave;
          sv.wave = e.wave;
          sv.kind = TraceKind::CustomerConnects;
          sv.facility = e.period;
          sv.customer = t;
          sol.trace.push_back(sv);
        }
    }
  }

  Num final_wave = start;
  for (const auto& o : orders)
    if (o.entry.wave < final_wave) final_wave = o.entry.wave;

  // Pruning pass. A demand point t contributes to an order (s, line) iff
  // v_t/d_t - H[t] >= line.s - H[s], so a suffix maximum of the left side
  // answers each pair-overlap query in O(1).
  std::vector<Num> key_suffix(n);
  std::vector<bool> demand_seen(n, false);
  {
    bool have = false;
    Num best{};
    for (int t = n - 1; t >= 0; --t) {
      if (inst.demand[t] > zero) {
        Num g = duals[t] / inst.demand[t] - H[t];
        if (!have || g > best) best = g;
        have = true;
      }
      demand_seen[t] = have;
      key_suffix[t] = best;
    }
  }
  auto order_key = [&](const typename TightWaveSchedule<Num>::Entry& e) { return e.line.s - H[e.period]; };
  for (std::size_t a = 0; a < orders.size(); ++a) {
    int pa = orders[a].entry.period;
    if (!demand_seen[pa]) continue;
    Num ka = order_key(orders[a].entry);
    for (std::size_t b = 0; b < a && orders[a].open; ++b) {
      if (!orders[b].open) continue;
      Num kb = order_key(orders[b].entry);
      Num need = ka < kb ? kb : ka;
      if (key_suffix[pa] >= need) {
        orders[a].open = false;
        TraceEvent<Num> ev;
        ev.time = start - final_wave;
        ev.wave = final_wave;
        ev.kind = TraceKind::OrderClosed;
        ev.facility = orders[a].entry.period;
        sol.trace.push_back(ev);
        for (int u = 0; u < n; ++u)
          if (serve_idx[u] == static_cast<int>(a)) {
            sol.serve[u] = orders[b].entry.period;
            serve_idx[u] = static_cast<int>(b);
          }
      }
    }
  }

  Num primal = zero;
  for (std::size_t q = 0; q < orders.size(); ++q) {
    if (!orders[q].open) continue;
    typename LotSizingSolution<Num>::Order o;
    o.period = orders[q].entry.period;
    o.line = orders[q].entry.line;
    o.wave = orders[q].entry.wave;
    for (int t = 0; t < n; ++t)
      if (serve_idx[t] == static_cast<int>(q)) o.load += inst.demand[t];
    primal += inst.cost[o.period].eval(o.load);
    sol.orders.push_back(o);
  }
  Num dual = zero;
  for (int t = 0; t < n; ++t) {
    if (sol.serve[t] >= 0) primal += (H[t] - H[sol.serve[t]]) * inst.demand[t];
    dual += duals[t];
  }
  sol.primal_cost = primal;
  sol.dual_value = dual;
  sol.final_wave = final_wave;
  return sol;
}

}  // namespace concavepd
