#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ringsim::rt {

// Tracks the classical registers a party currently holds, in bits. Counters
// are charged at the bit width of their range; the high-water mark is what
// the memory-complexity audit reads.
class RegisterFile {
 public:
  void alloc(int bits) {
    cur_ += bits;
    if (cur_ > hw_) hw_ = cur_;
  }
  void free(int bits) { cur_ -= bits; }
  int high_water() const { return hw_; }
  int current() const { return cur_; }

 private:
  int cur_ = 0;
  int hw_ = 0;
};

inline int bits_for_range(std::int64_t count) {
  int b = 0;
  std::int64_t v = count - 1;
  while (v > 0) {
    ++b;
    v >>= 1;
  }
  return b == 0 ? 1 : b;
}

// Cost counters for one run. Time counts atomic actions; the DP measurement
// window opens at the first hunger event and closes at the first eat.
struct CostLedger {
  std::uint64_t time = 0;
  std::uint64_t classical_bits = 0;
  std::uint64_t qubits_sent = 0;
  std::optional<std::uint64_t> first_hunger_step;
  std::optional<std::uint64_t> first_eat_step;
  int iterations = 0;  // DP' rounds completed (leader election)

  std::vector<int> mem_bits_max;     // per-party classical high-water
  std::vector<int> qubits_max;       // per-party live-qubit high-water
  std::vector<int> failed_lifts_before_first_eat;

  std::uint64_t window_time() const {
    if (!first_hunger_step) return 0;
    std::uint64_t close = first_eat_step ? *first_eat_step : time;
    return close >= *first_hunger_step ? close - *first_hunger_step : 0;
  }
  int max_mem_bits() const {
    int m = 0;
    for (int v : mem_bits_max) m = std::max(m, v);
    return m;
  }
  int max_qubits() const {
    int m = 0;
    for (int v : qubits_max) m = std::max(m, v);
    return m;
  }
};

}  // namespace ringsim::rt
