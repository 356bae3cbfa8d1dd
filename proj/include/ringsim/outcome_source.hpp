#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ringsim/errors.hpp"

namespace ringsim {

// A recorded binary measurement decision. Decisions are only recorded when
// both outcomes carry probability above `kBranchEps`; forced outcomes are
// invisible to replay and exploration.
struct Decision {
  double p0 = 0;
  double p1 = 0;
  int outcome = 0;
};

inline constexpr double kBranchEps = 1e-12;

// Source of measurement outcomes. The engine asks it to pick between the two
// outcomes of a projective measurement given their Born probabilities.
class OutcomeSource {
 public:
  virtual ~OutcomeSource() = default;
  virtual int choose(double p0, double p1) = 0;
};

// Seeded Born-rule sampling. Identical seeds give identical outcome streams.
class SampledOutcomes final : public OutcomeSource {
 public:
  explicit SampledOutcomes(std::uint64_t seed) : rng_(seed) {}

  int choose(double p0, double p1) override {
    if (p0 < kBranchEps && p1 < kBranchEps)
      throw SimError(Err::NumericalFailure, "both measurement outcomes have ~zero probability");
    if (p0 < kBranchEps) return 1;
    if (p1 < kBranchEps) return 0;
    double u = to_unit(rng_());
    return u < p0 / (p0 + p1) ? 0 : 1;
  }

 private:
  static double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
};

// Follows a forced outcome prefix, then extends with a default rule
// (outcome 0 whenever it has nonzero probability). Records every genuine
// decision point so the branch explorer can enumerate alternatives.
class RecordingOutcomes final : public OutcomeSource {
 public:
  explicit RecordingOutcomes(std::vector<int> prefix) : prefix_(std::move(prefix)) {}

  int choose(double p0, double p1) override {
    if (p0 < kBranchEps && p1 < kBranchEps)
      throw SimError(Err::NumericalFailure, "both measurement outcomes have ~zero probability");
    int out;
    if (p0 < kBranchEps) {
      out = 1;  // forced, not recorded
      return out;
    }
    if (p1 < kBranchEps) {
      return 0;
    }
    if (next_ < prefix_.size()) {
      out = prefix_[next_++];
    } else {
      out = 0;
    }
    decisions_.push_back({p0, p1, out});
    return out;
  }

  const std::vector<Decision>& decisions() const { return decisions_; }
  std::size_t prefix_length() const { return prefix_.size(); }

 private:
  std::vector<int> prefix_;
  std::size_t next_ = 0;
  std::vector<Decision> decisions_;
};

}  // namespace ringsim
