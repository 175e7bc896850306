// Batches of independent episodes and the statistics built on them.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tipsy/analytics.hpp"
#include "tipsy/episode.hpp"
#include "tipsy/grid.hpp"
#include "tipsy/tree.hpp"

namespace tipsy {

struct GridGameSpec {
  GameParams params;
  GridStrategy cop = GridStrategy::cs1();
  GridStrategy robber = GridStrategy::rs();
  GridState start{0, 1};
};

struct TreeGameSpec {
  TreeParams tree;
  GameParams params;
  TreeStrategy cop = TreeStrategy::cs;
  TreeStrategy robber = TreeStrategy::rsa;
  TreeGameState start = default_tree_start();
};

using GameSpec = std::variant<GridGameSpec, TreeGameSpec>;

struct BatchConfig {
  std::uint64_t horizon = 100'000;
  std::uint64_t episodes = 1'000;
  std::uint64_t master_seed = 0;
  /// Worker threads; 0 means one per hardware thread. Never affects results.
  unsigned threads = 1;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `n`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n,
                         double z = kWilsonZ95);

/// Pooled tree bookkeeping with derived means.
struct TreeAggregate {
  TreeEpisodeStats totals;
  double robber_gap_mean = 0.0;
  double robber_gap_se = 0.0;
  double cop_gap_mean = 0.0;
  double cop_gap_se = 0.0;
  double robber_lower_mean = 0.0;
  double cop_lower_mean = 0.0;
  /// Total recorded f over total spins.
  double y_slope = 0.0;
};

struct BatchSummary {
  std::uint64_t n_episodes = 0;
  std::uint64_t captured = 0;
  double capture_fraction = 0.0;
  Interval capture_interval;
  std::optional<double> mean_capture_time;
  std::optional<double> median_capture_time;
  double censored_fraction = 0.0;
  std::uint64_t horizon = 0;
  /// Per-episode reports in stream order.
  std::vector<EpisodeReport> episodes;
  std::optional<TreeAggregate> tree;
};

/// Runs episodes 0..n-1; episode i draws from RngStream(master_seed, i).
BatchSummary run_batch(const GameSpec& spec, const BatchConfig& config);

/// Recomputes the summary as if the horizon had been `horizon` (<= the
/// original): a game captured later than that counts as censored.
BatchSummary truncate_horizon(const BatchSummary& summary,
                              std::uint64_t horizon);

double capture_fraction_within(const std::vector<EpisodeReport>& reports,
                               std::uint64_t horizon);

enum class PhaseBand { captured, escaped, boundary };
std::string to_string(PhaseBand band);

/// A cell is captured (escaped) when its whole interval lies above (below)
/// the threshold capture fraction, and boundary otherwise.
PhaseBand classify_band(const Interval& interval, double threshold = 0.5);

struct PhaseObservation {
  double capture_fraction = 0.0;
  Interval interval;
  PhaseBand band = PhaseBand::boundary;
};

struct PhasePoint {
  double tr = 0.0;
  double tc = 0.0;
  std::optional<TreeRegime> analytic;
  /// RSA against CS and RSB against CSB.
  std::optional<PhaseObservation> rsa;
  std::optional<PhaseObservation> rsb;
  std::optional<std::string> error;
};

struct PhaseSweepConfig {
  BatchConfig batch;
  std::size_t start_distance = 20;
  double band_threshold = 0.5;
};

/// Evaluates every (t_r, t_c) pair; point k uses master seed
/// mix_seed(batch.master_seed, k). Failures are recorded per point.
std::vector<PhasePoint> sweep_phase(const TreeParams& tree,
                                    const std::vector<double>& tr_values,
                                    const std::vector<double>& tc_values,
                                    const PhaseSweepConfig& config);

struct MuEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t gaps = 0;
};

/// Pooled mean gap between robber base moves for a robber playing RSB. The
/// cop plays CSB with tipsiness `tc`.
MuEstimate estimate_mu(const TreeParams& tree, double tr,
                       const BatchConfig& config, double tc = 0.5,
                       std::size_t start_distance = 20);

}  // namespace tipsy
