#pragma once

#include <cstdint>

namespace pptfe {

// Per-thread tallies of the operations the cost tables are expressed in.
// Backends bump these from pair(), pow() and hash_to_scalar(); sampling,
// decoding checks and group multiplications are not counted.
struct OpCounts {
  std::uint64_t pairings = 0;
  std::uint64_t exps = 0;     // exponentiations in the source group
  std::uint64_t gt_exps = 0;  // exponentiations in the target group
  std::uint64_t hashes = 0;

  OpCounts operator-(const OpCounts& o) const {
    return {pairings - o.pairings, exps - o.exps, gt_exps - o.gt_exps, hashes - o.hashes};
  }
  bool operator==(const OpCounts&) const = default;
};

inline OpCounts& op_counts() {
  thread_local OpCounts counts;
  return counts;
}

// Snapshot at construction; delta() reports what happened since.
class CountScope {
 public:
  CountScope() : start_(op_counts()) {}
  OpCounts delta() const { return op_counts() - start_; }

 private:
  OpCounts start_;
};

}  // namespace pptfe
