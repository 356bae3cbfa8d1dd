#pragma once

#include <stdexcept>
#include <string>

namespace ringsim {

enum class Err {
  EmptyAlloc,
  NotFresh,
  SameQubit,
  NumericalFailure,
  BadArity,
  UnsupportedMagic,
  BadPattern,
  CannotRelease,
  NotOwner,
  NoChopstick,
  AlreadyHungry,
  NotALeaderConfig,
  TreeTooLarge,
  NotEnoughData,
  BadProperty,
  BadConfig,
  ProtocolViolation,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::EmptyAlloc: return "EmptyAlloc";
    case Err::NotFresh: return "NotFresh";
    case Err::SameQubit: return "SameQubit";
    case Err::NumericalFailure: return "NumericalFailure";
    case Err::BadArity: return "BadArity";
    case Err::UnsupportedMagic: return "UnsupportedMagic";
    case Err::BadPattern: return "BadPattern";
    case Err::CannotRelease: return "CannotRelease";
    case Err::NotOwner: return "NotOwner";
    case Err::NoChopstick: return "NoChopstick";
    case Err::AlreadyHungry: return "AlreadyHungry";
    case Err::NotALeaderConfig: return "NotALeaderConfig";
    case Err::TreeTooLarge: return "TreeTooLarge";
    case Err::NotEnoughData: return "NotEnoughData";
    case Err::BadProperty: return "BadProperty";
    case Err::BadConfig: return "BadConfig";
    case Err::ProtocolViolation: return "ProtocolViolation";
  }
  return "Unknown";
}

class SimError : public std::runtime_error {
 public:
  SimError(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace ringsim
