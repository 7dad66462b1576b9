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

// Joint replenishment instance: K items over n periods, a joint fixed charge
// per order period, concave individual ordering costs, per-item holding.
template <class Num>
struct JrpInstance {
  Num joint_fixed{};                            // f0 >= 0
  std::vector<ConcaveFunction<Num>> item_cost;  // size K
  std::vector<std::vector<Num>> demand;         // K x n, >= 0
  std::vector<std::vector<Num>> holding;        // K x (n-1), >= 0

  int items() const { return static_cast<int>(item_cost.size()); }
  int periods() const { return demand.empty() ? 0 : static_cast<int>(demand.front().size()); }

  void validate() const {
    if (item_cost.empty()) throw std::invalid_argument("jrp instance needs at least one item");
    if (demand.size() != item_cost.size() || holding.size() != item_cost.size())
      throw std::invalid_argument("jrp arrays must have one row per item");
    if (joint_fixed < num_traits<Num>::zero()) throw std::invalid_argument("joint cost must be >= 0");
    const std::size_t n = demand.front().size();
    if (n == 0) throw std::invalid_argument("jrp instance needs at least one period");
    for (const auto& row : demand) {
      if (row.size() != n) throw std::invalid_argument("demand rows must have equal length");
      for (const auto& d : row)
        if (d < num_traits<Num>::zero()) throw std::invalid_argument("demands must be >= 0");
    }
    for (const auto& row : holding) {
      if (row.size() + 1 != n) throw std::invalid_argument("holding rows must have n-1 entries");
      for (const auto& h : row)
        if (h < num_traits<Num>::zero()) throw std::invalid_argument("holding costs must be >= 0");
    }
  }

  std::vector<Num> holding_prefix(int k) const {
    std::vector<Num> H(periods(), num_traits<Num>::zero());
    for (int t = 1; t < periods(); ++t) H[t] = H[t - 1] + holding[k][t - 1];
    return H;
  }
};

// Item wave position for master wave W: the item waves meet the master wave at
// integer periods and advance linearly in between; below period 0 all items
// descend at unit rate.
template <class Num>
Num item_wave(const Num& master, const std::vector<Num>& holding_prefix, const std::vector<Num>& holding_row) {
  const int n = static_cast<int>(holding_prefix.size());
  Num zero = num_traits<Num>::zero();
  if (!(master > zero)) return master;  // W <= 0: unit-rate extension
  Num top = num_traits<Num>::from_int(n - 1);
  if (!(master < top)) return holding_prefix[n - 1];
  long long j = num_traits<Num>::floor(master);
  Num frac = master - num_traits<Num>::from_int(j);
  return holding_prefix[j] + holding_row[j] * frac;
}

template <class Num>
struct JrpSolution {
  struct TightItemOrder {
    int period = -1;
    int item = -1;
    Tangent<Num> line{};
    Num wave{};                 // master wave at the tight event
    std::vector<Num> frozen_w;  // per period t >= 0: contribution fixed at the event
  };
  struct ItemOrder {
    int period = -1;
    int item = -1;
    Num load{};
    Tangent<Num> line{};
  };
  std::vector<TightItemOrder> tight_items;
  std::vector<int> joint_open;             // open joint order periods after pruning
  std::vector<int> joint_all;              // every joint order opened by the wave phase
  std::vector<ItemOrder> item_orders;      // final individual orders
  std::vector<std::vector<int>> serve;       // K x n: final serving order period, -1 when d=0
  std::vector<std::vector<int>> serve_wave;  // K x n: joint order that served the point in the wave phase
  std::vector<std::vector<Num>> duals;       // K x n
  std::vector<std::vector<Num>> freeze;      // K x n: master wave when the budget stopped
  Num primal_cost{};
  Num dual_value{};
  Num final_wave{};
  // Pruning may reassign a demand point to an order before its freeze
  // position (exactly like the lot-sizing postprocessing); this flag records
  // that the post-prune joint set no longer covers [freeze, t] for some point.
  bool freeze_interval_gap = false;
  TraceLog<Num> trace;
};

namespace jrpdetail {

// Shared wave mechanics: exact budget evaluation and exact first-crossing
// computations, walking the master wave segment by segment.
template <class Num>
class WaveContext {
 public:
  explicit WaveContext(const JrpInstance<Num>& inst) : inst_(inst) {
    for (int k = 0; k < inst.items(); ++k) H_.push_back(inst.holding_prefix(k));
  }

  const std::vector<Num>& prefix(int k) const { return H_[k]; }

  Num wave_k(int k, const Num& master) const { return item_wave(master, H_[k], inst_.holding[k]); }

  // Budget of an unserved demand point at master position W.
  Num budget(int t, int k, const Num& master) const {
    Num v = inst_.demand[k][t] * (H_[k][t] - wave_k(k, master));
    return v > num_traits<Num>::zero() ? v : num_traits<Num>::zero();
  }

  // Earliest (largest) master W <= from where the item wave reaches `target`.
  // Flat stretches resolve to their first point.
  std::optional<Num> wave_k_inverse(int k, const Num& target, const Num& from) const {
    Num w = from;
    Num cur = wave_k(k, w);
    if (cur < target) return std::nullopt;  // already past (item waves never rise)
    if (num_traits<Num>::eq(cur, target)) return w;
    while (true) {
      Num lo = next_boundary(w);
      bool unbounded = !(w > num_traits<Num>::zero());
      Num slope = segment_slope(k, w);
      if (unbounded) {
        // wave_k = W here, strictly decreasing.
        return target;
      }
      Num at_lo = wave_k(k, lo);
      if (at_lo <= target) {
        if (slope > num_traits<Num>::zero()) {
          Num hit = w - (cur - target) / slope;
          return hit < lo ? lo : hit;
        }
        // Flat segment that still reaches target at its lower boundary.
        if (num_traits<Num>::eq(at_lo, target)) {
          w = lo;
          cur = at_lo;
          continue;  // keep descending until the value actually drops
        }
        return lo;
      }
      w = lo;
      cur = at_lo;
    }
  }

  // Master-wave positions walk: next integer boundary strictly below W
  // (clamped at 0); below zero a single unbounded segment remains.
  Num next_boundary(const Num& w) const {
    Num zero = num_traits<Num>::zero();
    if (!(w > zero)) return w;  // caller handles the unbounded tail
    long long f = num_traits<Num>::floor(w);
    Num fl = num_traits<Num>::from_int(f);
    Num lo = num_traits<Num>::eq(fl, w) ? num_traits<Num>::from_int(f - 1) : fl;
    return lo < zero ? zero : lo;
  }

  // Item-wave slope (per unit of master descent) on the segment just below W.
  Num segment_slope(int k, const Num& w) const {
    Num zero = num_traits<Num>::zero();
    if (!(w > zero)) return num_traits<Num>::one();
    long long f = num_traits<Num>::floor(w);
    Num fl = num_traits<Num>::from_int(f);
    long long seg = num_traits<Num>::eq(fl, w) ? f - 1 : f;
    if (seg < 0) return num_traits<Num>::one();
    return inst_.holding[k][seg];
  }

  struct GrowTerm {
    int t;
    int k;
    Num threshold;  // contribution starts once the budget reaches it
  };

  // First (largest) master W <= from where
  //   base + sum_i max{0, budget_i(W) - threshold_i} >= target
  // and at least one contributor is present (budget >= threshold, or
  // `static_present`). Handles zero targets with the arrival convention.
  std::optional<Num> first_crossing(const std::vector<GrowTerm>& terms, const Num& base, const Num& target,
                                    const Num& from, bool static_present) const {
    Num zero = num_traits<Num>::zero();
    Num w_hi = from;
    bool present = static_present;
    // Immediate hit at the current position.
    {
      Num total = base;
      bool pres = static_present;
      for (const auto& tm : terms) {
        Num v = budget(tm.t, tm.k, w_hi);
        if (v >= tm.threshold) pres = true;
        if (v > tm.threshold) total += v - tm.threshold;
      }
      if (total >= target && pres) return w_hi;
    }
    const long long max_segments = 4 * (inst_.periods() + 2);
    for (long long guard = 0; guard < max_segments; ++guard) {
      bool unbounded = !(w_hi > zero);
      Num w_lo = unbounded ? w_hi : next_boundary(w_hi);
      // x measures descent inside the segment: W = w_hi - x.
      Num seg_len = unbounded ? zero : w_hi - w_lo;
      // Active and pending terms at the segment top.
      struct Pending {
        Num x_activate;
        Num slope;
      };
      std::vector<Pending> pending;
      Num slope_sum = zero, value_sum = base;
      bool present_now = present;
      for (const auto& tm : terms) {
        if (!(inst_.demand[tm.k][tm.t] > zero)) continue;
        bool started = unbounded || tm.t >= w_hi;  // t > W throughout the segment
        Num slope = inst_.demand[tm.k][tm.t] *
                    (unbounded ? num_traits<Num>::one() : segment_slope(tm.k, w_hi));
        if (!started) continue;
        Num v0 = budget(tm.t, tm.k, w_hi);
        if (v0 >= tm.threshold) {
          present_now = true;
          value_sum += v0 - tm.threshold;
          slope_sum += slope;
        } else if (slope > zero) {
          Num x_a = (tm.threshold - v0) / slope;
          if (unbounded || x_a <= seg_len) pending.push_back({x_a, slope});
        }
      }
      std::sort(pending.begin(), pending.end(),
                [](const Pending& a, const Pending& b) { return a.x_activate < b.x_activate; });
      Num x_cur = zero;
      std::size_t next = 0;
      while (true) {
        // Crossing on the current linear stretch?
        if (present_now && value_sum >= target) return w_hi - x_cur;
        Num x_stop;
        bool has_stop = false;
        if (next < pending.size()) {
          x_stop = pending[next].x_activate;
          has_stop = true;
        }
        if (present_now && slope_sum > zero) {
          Num x_hit = x_cur + (target - value_sum) / slope_sum;
          if ((!has_stop || x_hit <= x_stop) && (unbounded || x_hit <= seg_len)) return w_hi - x_hit;
        }
        if (!has_stop) break;
        if (!unbounded && x_stop > seg_len) break;
        value_sum += slope_sum * (x_stop - x_cur);
        x_cur = x_stop;
        while (next < pending.size() && num_traits<Num>::eq(pending[next].x_activate, x_cur)) {
          slope_sum += pending[next].slope;
          ++next;
        }
        present_now = true;
        if (value_sum >= target) return w_hi - x_cur;
      }
      if (unbounded) return std::nullopt;  // nothing grows below zero: no crossing ever
      w_hi = w_lo;
      present = present_now;
    }
    return std::nullopt;
  }

 private:
  const JrpInstance<Num>& inst_;
  std::vector<std::vector<Num>> H_;
};

}  // namespace jrpdetail

// Primal-dual run for the generalized JRP over tangent candidates. In
// explicit mode the per-(period,item) first tight tangent is found by
// scanning the cost's pieces; in implicit mode by the first-tight-tangent
// engine. Everything else is shared: joint tightness watches only tangents
// that already went tight for their item.
template <class Num>
class JrppdSolver {
 public:
  JrppdSolver(const JrpInstance<Num>& inst, bool explicit_mode, long long explicit_limit = 100'000)
      : inst_(inst), explicit_(explicit_mode), ctx_(inst) {
    inst.validate();
    const int n = inst_.periods(), K = inst_.items();
    if (explicit_) {
      double tuples = 1;
      for (int k = 0; k < K; ++k) {
        pieces_.push_back(cost_pieces(inst_.item_cost[k]));
        tuples *= static_cast<double>(pieces_.back().size());
      }
      if (tuples * n > static_cast<double>(explicit_limit))
        throw std::invalid_argument("explicit jrp mode beyond the candidate-tuple limit");
    }
    served_.assign(K, std::vector<bool>(n, false));
    value_.assign(K, std::vector<Num>(n, num_traits<Num>::zero()));
    freeze_.assign(K, std::vector<Num>(n, num_traits<Num>::zero()));
    serve_joint_.assign(K, std::vector<int>(n, -1));
    tight_.assign(K, std::vector<int>(n, -1));  // index into tight_items_, -1 = not tight
    joint_open_.assign(n, false);
    unserved_ = 0;
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < n; ++t)
        if (inst_.demand[k][t] > num_traits<Num>::zero())
          ++unserved_;
        else
          served_[k][t] = true;
    wave_ = num_traits<Num>::from_int(n - 1);
    start_ = wave_;
  }

  void run() {
    while (unserved_ > 0) step();
    postprocess();
  }

  JrpSolution<Num> result() const { return sol_; }

 private:
  enum class EventKind { Joint, Item, Serve };
  struct Event {
    Num wave;
    EventKind kind;
    int period;
    int item;
    int demand_t;
  };

  static std::vector<std::pair<Num, Num>> cost_pieces(const ConcaveFunction<Num>& fn) {
    switch (fn.kind()) {
      case ConcaveFunction<Num>::Kind::FixedCharge:
        return {{fn.fixed_part(), num_traits<Num>::zero()}};
      case ConcaveFunction<Num>::Kind::AffineFixed:
        return {{fn.fixed_part(), fn.unit_part()}};
      case ConcaveFunction<Num>::Kind::PiecewiseLinearMin:
        return fn.pieces();
      default:
        throw std::invalid_argument("explicit jrp mode requires piecewise-linear costs");
    }
  }

  Num current_value(int t, int k) const {
    return served_[k][t] ? value_[k][t] : ctx_.budget(t, k, wave_);
  }

  // --- candidate events ---------------------------------------------------

  // First tight tangent of (phi^k, s): explicit piece scan or tangent engine.
  std::optional<std::pair<Num, Tangent<Num>>> item_tight_candidate(int s, int k) const {
    Num zero = num_traits<Num>::zero();
    const auto& H = ctx_.prefix(k);
    if (explicit_) {
      std::optional<std::pair<Num, Tangent<Num>>> best;
      int rank = 0;
      for (const auto& [f, c] : pieces_[k]) {
        Num base = zero;
        bool present = false;
        std::vector<typename jrpdetail::WaveContext<Num>::GrowTerm> terms;
        for (int t = s; t < inst_.periods(); ++t) {
          if (!(inst_.demand[k][t] > zero)) continue;
          Num thr = (c + H[t] - H[s]) * inst_.demand[k][t];
          if (served_[k][t]) {
            if (value_[k][t] >= thr) present = true;
            if (value_[k][t] > thr) base += value_[k][t] - thr;
          } else {
            terms.push_back({t, k, thr});
          }
        }
        auto w = ctx_.first_crossing(terms, base, f, wave_, present);
        if (w && (!best || *w > best->first))
          best = {{*w, Tangent<Num>{f, c, zero}}};
        ++rank;
      }
      return best;
    }
    // Implicit: first-tight-tangent computation in item-local time
    // theta = H^k[s] - W^k, where every growing budget's per-unit excess is
    // exactly theta.
    RateProfile<Num> profile;
    for (int t = s; t < inst_.periods(); ++t) {
      if (!(inst_.demand[k][t] > zero)) continue;
      if (served_[k][t]) {
        Num per_unit = value_[k][t] / inst_.demand[k][t] - (H[t] - H[s]);
        if (per_unit > zero) {
          profile.demands.push_back(inst_.demand[k][t]);
          profile.budgets.push_back(per_unit * inst_.demand[k][t]);
          profile.rates.push_back(zero);
        }
      } else {
        profile.demands.push_back(inst_.demand[k][t]);
        profile.budgets.push_back(zero);
        profile.rates.push_back(inst_.demand[k][t]);
      }
    }
    auto res = first_tight_mixed(inst_.item_cost[k], profile);
    if (!res) return std::nullopt;
    Num target_wave_k = H[s] - res->t_star;
    auto w = ctx_.wave_k_inverse(k, target_wave_k, start_);
    if (!w) return std::nullopt;
    Tangent<Num> line = inst_.item_cost[k].tangent_at_steep(res->p_star);
    return {{*w > wave_ ? wave_ : *w, line}};
  }

  // Joint order tightness at period s: overflow contributions from items whose
  // tracked tangent already went tight.
  std::optional<Num> joint_tight_candidate(int s) const {
    Num zero = num_traits<Num>::zero();
    Num base = zero;
    bool present = false;
    std::vector<typename jrpdetail::WaveContext<Num>::GrowTerm> terms;
    for (int k = 0; k < inst_.items(); ++k) {
      int ti = tight_[k][s];
      if (ti < 0) continue;
      const auto& rec = sol_.tight_items[ti];
      const auto& H = ctx_.prefix(k);
      for (int t = s; t < inst_.periods(); ++t) {
        if (!(inst_.demand[k][t] > zero)) continue;
        Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t] + rec.frozen_w[t];
        if (served_[k][t]) {
          if (value_[k][t] >= thr) present = true;
          if (value_[k][t] > thr) base += value_[k][t] - thr;
        } else {
          terms.push_back({t, k, thr});
        }
      }
    }
    if (terms.empty() && !present) return std::nullopt;
    return ctx_.first_crossing(terms, base, inst_.joint_fixed, wave_, present);
  }

  // An unserved point reaching positive overflow toward an open joint order.
  std::optional<Num> serve_candidate(int t, int k) const {
    Num zero = num_traits<Num>::zero();
    const auto& H = ctx_.prefix(k);
    std::optional<Num> best;
    for (int s = 0; s <= t; ++s) {
      if (!joint_open_[s]) continue;
      int ti = tight_[k][s];
      if (ti < 0) continue;
      const auto& rec = sol_.tight_items[ti];
      Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t] + rec.frozen_w[t];
      std::vector<typename jrpdetail::WaveContext<Num>::GrowTerm> terms{{t, k, thr}};
      auto w = ctx_.first_crossing(terms, zero, zero, wave_, false);
      if (w && (!best || *w > *best)) best = w;
    }
    return best;
  }

  void step() {
    std::optional<Event> best;
    auto consider = [&](const Event& e) {
      if (!best) {
        best = e;
        return;
      }
      if (e.wave > best->wave) {
        best = e;
        return;
      }
      if (!num_traits<Num>::eq(e.wave, best->wave)) return;
      auto rank = [](const Event& ev) { return ev.kind == EventKind::Joint ? 0 : ev.kind == EventKind::Item ? 1 : 2; };
      if (rank(e) != rank(*best)) {
        if (rank(e) < rank(*best)) best = e;
        return;
      }
      if (std::tie(e.period, e.item, e.demand_t) < std::tie(best->period, best->item, best->demand_t)) best = e;
    };

    const int n = inst_.periods(), K = inst_.items();
    for (int s = 0; s < n; ++s) {
      if (joint_open_[s]) continue;
      auto w = joint_tight_candidate(s);
      if (w) consider({*w, EventKind::Joint, s, -1, -1});
    }
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < K; ++k) {
        if (tight_[k][s] >= 0) continue;
        auto c = item_tight_candidate(s, k);
        if (c) consider({c->first, EventKind::Item, s, k, -1});
      }
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < n; ++t) {
        if (served_[k][t]) continue;
        auto w = serve_candidate(t, k);
        if (w) consider({*w, EventKind::Serve, -1, k, t});
      }
    if (!best) throw std::logic_error("jrp wave exhausted with demand points still unserved");

    wave_ = best->wave;
    switch (best->kind) {
      case EventKind::Joint:
        open_joint(best->period);
        break;
      case EventKind::Item:
        mark_item_tight(best->period, best->item);
        break;
      case EventKind::Serve:
        serve_from_open_joint(best->demand_t, best->item);
        break;
    }
  }

  void mark_item_tight(int s, int k) {
    const auto& H = ctx_.prefix(k);
    Num zero = num_traits<Num>::zero();
    auto cand = item_tight_candidate(s, k);
    assert(cand);
    typename JrpSolution<Num>::TightItemOrder rec;
    rec.period = s;
    rec.item = k;
    rec.line = cand->second;
    rec.wave = wave_;
    rec.frozen_w.assign(inst_.periods(), zero);
    for (int t = s; t < inst_.periods(); ++t) {
      Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t];
      Num v = current_value(t, k);
      if (v > thr) rec.frozen_w[t] = v - thr;
    }
    tight_[k][s] = static_cast<int>(sol_.tight_items.size());
    sol_.tight_items.push_back(rec);

    TraceEvent<Num> ev;
    ev.time = start_ - wave_;
    ev.wave = wave_;
    ev.kind = TraceKind::TangentTight;
    ev.facility = s;
    ev.item = k;
    ev.intercept = rec.line.f;
    ev.slope = rec.line.s;
    ev.touch = rec.line.p;
    sol_.trace.push_back(ev);

    // Joint order already open: its item contributors get served right away.
    if (joint_open_[s]) {
      for (int t = s; t < inst_.periods(); ++t) {
        if (served_[k][t]) continue;
        Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t];
        if (current_value(t, k) >= thr) serve_point(t, k, s);
      }
    }
  }

  void open_joint(int s) {
    joint_open_[s] = true;
    sol_.joint_all.push_back(s);
    TraceEvent<Num> ev;
    ev.time = start_ - wave_;
    ev.wave = wave_;
    ev.kind = TraceKind::JointOrderTight;
    ev.facility = s;
    sol_.trace.push_back(ev);
    for (int k = 0; k < inst_.items(); ++k) {
      int ti = tight_[k][s];
      if (ti < 0) continue;
      const auto& rec = sol_.tight_items[ti];
      const auto& H = ctx_.prefix(k);
      for (int t = s; t < inst_.periods(); ++t) {
        if (served_[k][t]) continue;
        Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t];
        if (current_value(t, k) >= thr) serve_point(t, k, s);
      }
    }
  }

  void serve_from_open_joint(int t, int k) {
    // Earliest open joint whose tracked tangent the budget has reached.
    const auto& H = ctx_.prefix(k);
    for (int s = 0; s <= t; ++s) {
      if (!joint_open_[s] || tight_[k][s] < 0) continue;
      const auto& rec = sol_.tight_items[tight_[k][s]];
      Num thr = (rec.line.s + H[t] - H[s]) * inst_.demand[k][t] + rec.frozen_w[t];
      if (current_value(t, k) >= thr) {
        serve_point(t, k, s);
        return;
      }
    }
    throw std::logic_error("serve event without a reachable open joint order");
  }

  void serve_point(int t, int k, int s) {
    served_[k][t] = true;
    --unserved_;
    value_[k][t] = ctx_.budget(t, k, wave_);
    Num tnum = num_traits<Num>::from_int(t);
    freeze_[k][t] = wave_ < tnum ? wave_ : tnum;
    serve_joint_[k][t] = s;
    TraceEvent<Num> ev;
    ev.time = start_ - wave_;
    ev.wave = wave_;
    ev.kind = TraceKind::CustomerConnects;
    ev.facility = s;
    ev.item = k;
    ev.customer = t;
    sol_.trace.push_back(ev);
  }

  // --- postprocessing -----------------------------------------------------

  // Per item, the pruning pass of the lot-sizing algorithm runs over its
  // serving orders: an order sharing a contributing demand point with an
  // earlier surviving order of the same item closes, and its demand points
  // move there. A joint order stays open while any item still orders at its
  // period. (With one item and zero joint cost this reduces verbatim to the
  // lot-sizing postprocessing.)
  void postprocess() {
    const int n = inst_.periods(), K = inst_.items();
    Num zero = num_traits<Num>::zero();

    sol_.serve = serve_joint_;
    sol_.serve_wave = serve_joint_;
    sol_.duals = value_;
    sol_.freeze = freeze_;

    Num primal = zero;
    std::vector<bool> any_order(n, false);
    for (int k = 0; k < K; ++k) {
      const auto& H = ctx_.prefix(k);
      // Serving orders of item k, ascending by period.
      struct ItemRec {
        int period;
        int tight_index;
        bool open = true;
      };
      std::vector<ItemRec> recs;
      for (int s = 0; s < n; ++s) {
        bool serves = false;
        for (int t = s; t < n; ++t)
          if (serve_joint_[k][t] == s) serves = true;
        if (serves) recs.push_back({s, tight_[k][s], true});
      }
      auto contributes = [&](int t, const ItemRec& r) {
        if (t < r.period || !(inst_.demand[k][t] > zero)) return false;
        const auto& line = sol_.tight_items[r.tight_index].line;
        return value_[k][t] >= (line.s + H[t] - H[r.period]) * inst_.demand[k][t];
      };
      for (std::size_t a = 0; a < recs.size(); ++a) {
        for (std::size_t b = 0; b < a && recs[a].open; ++b) {
          if (!recs[b].open) continue;
          for (int t = recs[a].period; t < n; ++t) {
            if (contributes(t, recs[a]) && contributes(t, recs[b])) {
              recs[a].open = false;
              TraceEvent<Num> ev;
              ev.time = start_ - wave_;
              ev.wave = wave_;
              ev.kind = TraceKind::OrderClosed;
              ev.facility = recs[a].period;
              ev.item = k;
              sol_.trace.push_back(ev);
              for (int u = 0; u < n; ++u)
                if (sol_.serve[k][u] == recs[a].period) sol_.serve[k][u] = recs[b].period;
              break;
            }
          }
        }
      }
      for (const auto& r : recs) {
        if (!r.open) continue;
        any_order[r.period] = true;
        typename JrpSolution<Num>::ItemOrder ord;
        ord.period = r.period;
        ord.item = k;
        for (int t = r.period; t < n; ++t)
          if (sol_.serve[k][t] == r.period) {
            ord.load += inst_.demand[k][t];
            primal += (H[t] - H[r.period]) * inst_.demand[k][t];
          }
        ord.line = sol_.tight_items[r.tight_index].line;
        primal += inst_.item_cost[k].eval(ord.load);
        sol_.item_orders.push_back(ord);
      }
    }
    for (int s = 0; s < n; ++s)
      if (any_order[s]) sol_.joint_open.push_back(s);
    primal += inst_.joint_fixed * num_traits<Num>::from_int(static_cast<long long>(sol_.joint_open.size()));

    // Freeze-interval invariant: every demand point keeps an open joint order
    // between its freeze position and its period.
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < n; ++t) {
        if (!(inst_.demand[k][t] > zero)) continue;
        bool found = false;
        for (int s : sol_.joint_open)
          if (s <= t && num_traits<Num>::from_int(s) >= freeze_[k][t]) found = true;
        if (!found) sol_.freeze_interval_gap = true;
      }

    Num dual = zero;
    for (int k = 0; k < K; ++k)
      for (int t = 0; t < n; ++t) dual += value_[k][t];
    sol_.primal_cost = primal;
    sol_.dual_value = dual;
    sol_.final_wave = wave_;
  }

  const JrpInstance<Num>& inst_;
  bool explicit_;
  jrpdetail::WaveContext<Num> ctx_;
  std::vector<std::vector<std::pair<Num, Num>>> pieces_;
  Num wave_{}, start_{};
  std::vector<std::vector<bool>> served_;
  std::vector<std::vector<Num>> value_, freeze_;
  std::vector<std::vector<int>> serve_joint_;
  std::vector<std::vector<int>> tight_;
  std::vector<bool> joint_open_;
  int unserved_ = 0;
  JrpSolution<Num> sol_;
};

// Explicit generalized algorithm on piecewise-linear costs (desk scale).
template <class Num>
JrpSolution<Num> solve_generalized_jrppd(const JrpInstance<Num>& inst, long long limit = 100'000) {
  JrppdSolver<Num> solver(inst, /*explicit_mode=*/true, limit);
  solver.run();
  return solver.result();
}

// Implicit algorithm for general concave individual ordering costs.
template <class Num>
JrpSolution<Num> solve_concave_jrppd(const JrpInstance<Num>& inst) {
  JrppdSolver<Num> solver(inst, /*explicit_mode=*/false);
  solver.run();
  return solver.result();
}

}  // namespace concavepd
