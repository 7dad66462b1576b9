#pragma once

#include <string>
#include <vector>

#include "concavepd/concave.hpp"

namespace concavepd {

enum class TraceKind {
  TangentTight,              // a closed tangent/order reached its fixed cost
  CustomerConnects,          // a demand point got assigned
  CustomerContributesFacility,  // an unconnected customer entered a facility's contributor set
  JointOrderTight,           // JRP: joint order opened
  OrderClosed,               // postprocessing closed an order
};

// One event of a primal-dual run. `time` is elapsed progress (for the wave
// algorithms: start position minus current wave position), so it is
// nondecreasing along the log; `wave` carries the raw wave position when one
// exists.
template <class Num>
struct TraceEvent {
  Num time{};
  TraceKind kind{};
  int facility = -1;  // facility / order period
  int customer = -1;  // customer / demand period
  int item = -1;      // JRP item
  Num touch{};        // tangent touch point
  Num intercept{};    // support line intercept
  Num slope{};        // support line slope
  Num wave{};
};

template <class Num>
using TraceLog = std::vector<TraceEvent<Num>>;

inline const char* trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::TangentTight: return "tangent_tight";
    case TraceKind::CustomerConnects: return "connect";
    case TraceKind::CustomerContributesFacility: return "contributes";
    case TraceKind::JointOrderTight: return "joint_tight";
    case TraceKind::OrderClosed: return "order_closed";
  }
  return "?";
}

}  // namespace concavepd
