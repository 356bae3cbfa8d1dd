#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ringsim::rt {

enum class Act : int {
  Local = 0,
  Send,
  Recv,
  Drain,
  SleepEnter,
  TryLift,
  PutDown,
  Eat,
  Hunger,
};

inline const char* act_name(Act a) {
  switch (a) {
    case Act::Local: return "local";
    case Act::Send: return "send";
    case Act::Recv: return "recv";
    case Act::Drain: return "drain";
    case Act::SleepEnter: return "sleep";
    case Act::TryLift: return "try-lift";
    case Act::PutDown: return "put-down";
    case Act::Eat: return "eat";
    case Act::Hunger: return "hunger";
  }
  return "?";
}

// One atomic action. `a`..`d` are action-specific small integers:
//   Send/Recv/Drain: a = message kind, b = payload, c = channel id, d = seq
//   TryLift:         a = chopstick index, b = success
//   PutDown:         a,b = released sticks (-1 if none)
//   Local:           free-form, note labels the pseudocode line
struct TraceEvent {
  std::uint64_t step;
  int actor;
  Act act;
  std::int64_t a = -1, b = -1, c = -1, d = -1;
  const char* note = "";
};

struct ExecutionTrace {
  std::vector<TraceEvent> events;
  bool recording = true;

  void push(TraceEvent e) {
    if (recording) events.push_back(e);
  }
};

}  // namespace ringsim::rt
