#include "tipsy/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace tipsy {
namespace {

unsigned worker_count(unsigned hint, std::uint64_t jobs) {
  unsigned n = hint == 0 ? std::max(1u, std::thread::hardware_concurrency())
                         : hint;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(jobs, 1)));
}

// Runs body(i) for i in [0, n) on `threads` workers with a static split, so
// the mapping of episodes to results never depends on the thread count.
template <class Body>
void parallel_for(std::uint64_t n, unsigned threads, Body&& body) {
  const unsigned k = worker_count(threads, n);
  if (k <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(k);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < k; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < n; i += k) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void fill_capture_stats(BatchSummary& s) {
  s.n_episodes = s.episodes.size();
  std::vector<std::uint64_t> times;
  for (const auto& r : s.episodes)
    if (r.captured) times.push_back(r.capture_time);
  s.captured = times.size();
  s.capture_fraction =
      s.n_episodes ? static_cast<double>(s.captured) / s.n_episodes : 0.0;
  s.capture_interval = wilson_interval(s.captured, s.n_episodes);
  s.censored_fraction = s.n_episodes ? 1.0 - s.capture_fraction : 0.0;
  s.mean_capture_time.reset();
  s.median_capture_time.reset();
  if (times.empty()) return;
  double sum = 0.0;
  for (auto t : times) sum += static_cast<double>(t);
  s.mean_capture_time = sum / static_cast<double>(times.size());
  std::sort(times.begin(), times.end());
  const auto m = times.size();
  s.median_capture_time =
      m % 2 ? static_cast<double>(times[m / 2])
            : 0.5 * (static_cast<double>(times[m / 2 - 1]) +
                     static_cast<double>(times[m / 2]));
}

double mean_of(double sum, std::uint64_t n) {
  return n ? sum / static_cast<double>(n) : 0.0;
}

double se_of(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double m = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, (sum_sq - n * m * m) / static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

TreeAggregate aggregate(TreeEpisodeStats totals, std::uint64_t spins) {
  TreeAggregate a;
  const auto& r = totals.robber;
  const auto& c = totals.cop;
  a.robber_gap_mean = mean_of(r.gap_sum, r.gaps);
  a.robber_gap_se = se_of(r.gap_sum, r.gap_sum_sq, r.gaps);
  a.cop_gap_mean = mean_of(c.gap_sum, c.gaps);
  a.cop_gap_se = se_of(c.gap_sum, c.gap_sum_sq, c.gaps);
  a.robber_lower_mean = mean_of(static_cast<double>(r.f_lower_sum), r.moves);
  a.cop_lower_mean = mean_of(static_cast<double>(c.f_lower_sum), c.moves);
  a.y_slope = mean_of(static_cast<double>(totals.y), spins);
  a.totals = std::move(totals);
  return a;
}

}  // namespace

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  iv.lo = std::min(iv.lo, p);
  iv.hi = std::max(iv.hi, p);
  return iv;
}

BatchSummary run_batch(const GameSpec& spec, const BatchConfig& config) {
  if (config.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (config.horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  BatchSummary s;
  s.horizon = config.horizon;
  s.episodes.resize(config.episodes);

  if (const auto* grid = std::get_if<GridGameSpec>(&spec)) {
    parallel_for(config.episodes, config.threads, [&](std::uint64_t i) {
      RngStream rng(config.master_seed, i);
      s.episodes[i] = run_grid_episode(grid->params, grid->cop, grid->robber,
                                       grid->start, config.horizon, rng);
    });
  } else {
    const auto& t = std::get<TreeGameSpec>(spec);
    const Tree tree(t.tree);
    std::vector<TreeEpisodeStats> stats(config.episodes);
    parallel_for(config.episodes, config.threads, [&](std::uint64_t i) {
      RngStream rng(config.master_seed, i);
      auto result = run_tree_episode(tree, t.params, t.cop, t.robber, t.start,
                                     config.horizon, rng);
      s.episodes[i] = result.report;
      stats[i] = std::move(result.stats);
    });
    TreeEpisodeStats totals;
    std::uint64_t spins = 0;
    for (std::uint64_t i = 0; i < config.episodes; ++i) {
      totals.merge(stats[i]);
      spins += s.episodes[i].steps_run;
    }
    s.tree = aggregate(std::move(totals), spins);
  }
  fill_capture_stats(s);
  return s;
}

BatchSummary truncate_horizon(const BatchSummary& summary,
                              std::uint64_t horizon) {
  if (horizon < 1 || horizon > summary.horizon)
    throw std::invalid_argument("can only shorten the horizon");
  BatchSummary s;
  s.horizon = horizon;
  s.episodes = summary.episodes;
  for (auto& r : s.episodes) {
    if (r.steps_run <= horizon) continue;
    r.captured = false;
    r.capture_time = 0;
    r.steps_run = horizon;
    // The position at the new horizon was not recorded.
    r.final_distance = -1;
  }
  fill_capture_stats(s);
  return s;
}

double capture_fraction_within(const std::vector<EpisodeReport>& reports,
                               std::uint64_t horizon) {
  if (reports.empty()) return 0.0;
  std::uint64_t n = 0;
  for (const auto& r : reports)
    if (r.captured && r.capture_time <= horizon) ++n;
  return static_cast<double>(n) / static_cast<double>(reports.size());
}

std::string to_string(PhaseBand band) {
  switch (band) {
    case PhaseBand::captured: return "captured";
    case PhaseBand::escaped: return "escaped";
    case PhaseBand::boundary: return "boundary";
  }
  return "?";
}

PhaseBand classify_band(const Interval& interval, double threshold) {
  if (interval.lo > threshold) return PhaseBand::captured;
  if (interval.hi < threshold) return PhaseBand::escaped;
  return PhaseBand::boundary;
}

std::vector<PhasePoint> sweep_phase(const TreeParams& tree,
                                    const std::vector<double>& tr_values,
                                    const std::vector<double>& tc_values,
                                    const PhaseSweepConfig& config) {
  validate(tree);
  std::vector<PhasePoint> out;
  std::uint64_t k = 0;
  for (double tr : tr_values) {
    for (double tc : tc_values) {
      PhasePoint point;
      point.tr = tr;
      point.tc = tc;
      BatchConfig batch = config.batch;
      batch.master_seed = mix_seed(config.batch.master_seed, k++);
      try {
        const GameParams params = tree_params(tc, tr);
        point.analytic = tree_regime(tr, tc, tree.delta, tree.Delta);
        const auto start = default_tree_start(config.start_distance);
        const auto observe = [&](TreeStrategy cop, TreeStrategy robber) {
          const auto s =
              run_batch(TreeGameSpec{tree, params, cop, robber, start}, batch);
          return PhaseObservation{
              s.capture_fraction, s.capture_interval,
              classify_band(s.capture_interval, config.band_threshold)};
        };
        point.rsa = observe(TreeStrategy::cs, TreeStrategy::rsa);
        point.rsb = observe(TreeStrategy::csb, TreeStrategy::rsb);
      } catch (const std::exception& e) {
        point.error = e.what();
      }
      out.push_back(std::move(point));
    }
  }
  return out;
}

MuEstimate estimate_mu(const TreeParams& tree, double tr,
                       const BatchConfig& config, double tc,
                       std::size_t start_distance) {
  if (!(tr >= 0.0 && tr < return_limit(tree.delta)))
    throw std::domain_error(
        "mean return time is infinite for t_r >= delta / (4 delta - 4)");
  const auto s = run_batch(TreeGameSpec{tree, tree_params(tc, tr),
                                        TreeStrategy::csb, TreeStrategy::rsb,
                                        default_tree_start(start_distance)},
                           config);
  return {s.tree->robber_gap_mean, s.tree->robber_gap_se,
          s.tree->totals.robber.gaps};
}

}  // namespace tipsy
