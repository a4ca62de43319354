//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_DONATION_HPP
#define IDWS_CORE_DONATION_HPP

#include <cstdint>
#include <optional>

#include "core/iteration_range.hpp"

namespace idws {

struct Donation {
  uint64_t new_victim_end;   // victim's range shrinks to [start, new_victim_end)
  IterationRange thief_range; // always == [new_victim_end, old_end)
};

// Decide how much of the range [start, end) with `processed` iterations
// already done the owner can give away. The donated chunk is a suffix —
// half of what remains after holding back a safety margin of exactly one
// iteration. The margin covers the iteration the owner may be executing
// right now against a progress value a reader sampled one boundary ago.
//
// Refusals (nullopt): fewer than 3 iterations remaining, since the margin
// plus the halving would round the grant down to nothing, and an empty grant
// wastes the whole rendezvous round trip.
//
// `processed` may exceed end - start when the inputs come from a racy
// snapshot; the subtraction saturates to "nothing remaining".
inline std::optional<Donation> split_donation(uint64_t start, uint64_t end,
                                              uint64_t processed) {
  uint64_t len = end >= start ? end - start : 0;
  uint64_t remaining = processed < len ? len - processed : 0;
  if (remaining < 2)
    return std::nullopt;
  uint64_t donatable = remaining - 1; // safety margin: one iteration
  uint64_t chunk = donatable / 2;
  if (chunk < 1)
    return std::nullopt;
  return Donation{end - chunk, IterationRange{end - chunk, end}};
}

} // namespace idws

#endif // IDWS_CORE_DONATION_HPP
