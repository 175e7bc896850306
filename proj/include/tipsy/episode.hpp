#pragma once

#include <cstdint>

namespace tipsy {

/// Outcome of one simulated game. Steps are counted from 1; a game captured on
/// its k-th spin has capture_time == steps_run == k. Uncaptured games are
/// censored at the horizon.
struct EpisodeReport {
  bool captured = false;
  std::uint64_t capture_time = 0;  // valid iff captured
  std::uint64_t steps_run = 0;
  std::int64_t final_distance = 0;

  friend bool operator==(const EpisodeReport&, const EpisodeReport&) = default;
};

}  // namespace tipsy
