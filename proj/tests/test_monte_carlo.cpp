#include <doctest.h>

#include <cmath>

#include "tipsy/chain_oracle.hpp"
#include "tipsy/monte_carlo.hpp"

using namespace tipsy;

TEST_CASE("Wilson intervals") {
  const auto none = wilson_interval(0, 10);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == doctest::Approx(0.2775).epsilon(1e-3));
  const auto half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(half.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto all = wilson_interval(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo < 1.0);
}

TEST_CASE("bands") {
  CHECK(classify_band({0.6, 0.7}) == PhaseBand::captured);
  CHECK(classify_band({0.2, 0.4}) == PhaseBand::escaped);
  CHECK(classify_band({0.45, 0.55}) == PhaseBand::boundary);
  CHECK(to_string(PhaseBand::escaped) == "escaped");
}

TEST_CASE("batches do not depend on the thread count") {
  const GridGameSpec grid{grid_params(0.25, 0.25, 0.5)};
  const TreeGameSpec tree{TreeParams{5, 3}, tree_params(0.1, 0.2),
                          TreeStrategy::csb, TreeStrategy::rsb,
                          default_tree_start(6)};
  for (const GameSpec& spec : {GameSpec(grid), GameSpec(tree)}) {
    BatchConfig one{2000, 64, 7, 1};
    BatchConfig many = one;
    many.threads = 3;
    const auto a = run_batch(spec, one);
    const auto b = run_batch(spec, many);
    CHECK(a.episodes == b.episodes);
    CHECK(a.mean_capture_time == b.mean_capture_time);
    if (a.tree) {
      CHECK(a.tree->totals.robber.f_sum == b.tree->totals.robber.f_sum);
      CHECK(a.tree->robber_gap_mean == b.tree->robber_gap_mean);
    }
    BatchConfig other = one;
    other.master_seed = 8;
    CHECK_FALSE(run_batch(spec, other).episodes == a.episodes);
  }
}

TEST_CASE("summary statistics") {
  const GridGameSpec spec{grid_params(0.3, 0.2, 0.5)};
  const auto s = run_batch(spec, {5000, 400, 1, 1});
  CHECK(s.n_episodes == 400);
  CHECK(s.captured + std::llround(s.censored_fraction * 400) == 400);
  CHECK(s.capture_interval.lo <= s.capture_fraction);
  CHECK(s.capture_interval.hi >= s.capture_fraction);
  REQUIRE(s.mean_capture_time);
  double sum = 0;
  for (const auto& e : s.episodes)
    if (e.captured) sum += double(e.capture_time);
  CHECK(*s.mean_capture_time == doctest::Approx(sum / double(s.captured)));

  const auto cut = truncate_horizon(s, 20);
  CHECK(cut.horizon == 20);
  CHECK(cut.capture_fraction ==
        doctest::Approx(capture_fraction_within(s.episodes, 20)));
  for (const auto& e : cut.episodes) {
    CHECK(e.steps_run <= 20);
    if (!e.captured) CHECK((e.final_distance == -1 || e.steps_run == 20));
  }
  CHECK_THROWS(truncate_horizon(s, 6000));
  CHECK_THROWS(run_batch(spec, {0, 10, 0, 1}));
}

TEST_CASE("Monte Carlo mean capture time agrees with the exact chain") {
  const auto p = grid_params(0.35, 0.2, 0.45);
  const auto sol = solve(build_grid_chain(p, GridStrategy::cs1(),
                                          GridStrategy::rs(), 30,
                                          BoundaryPolicy::reflecting));
  const auto s = run_batch(GridGameSpec{p}, {100000, 20000, 3, 0});
  REQUIRE(s.mean_capture_time);
  CHECK(s.capture_fraction == 1.0);
  CHECK(*s.mean_capture_time ==
        doctest::Approx(sol.time_at({0, 1})).epsilon(0.03));
}

TEST_CASE("phase sweep pairs the strategies and records failures") {
  PhaseSweepConfig config;
  config.batch = {2000, 20, 1, 1};
  config.start_distance = 4;
  const auto points = sweep_phase(TreeParams{7, 3}, {0.05, 0.1}, {0.02, 0.6}, config);
  REQUIRE(points.size() == 4);
  CHECK(points[0].tr == 0.05);
  CHECK(points[0].tc == 0.02);
  CHECK(points[0].rsa);
  CHECK(points[0].rsb);
  CHECK(points[0].analytic);
  CHECK(points[1].error);
  CHECK_FALSE(points[1].rsa);
}

TEST_CASE("mean gap estimate") {
  const TreeParams tree{7, 3};
  const auto est = estimate_mu(tree, 0.1, {20000, 20, 2, 1});
  CHECK(est.gaps > 10000);
  CHECK(std::abs(est.mean - mu(0.1, 3, 7)) < 5 * est.standard_error);
  CHECK_THROWS(estimate_mu(tree, 0.375, {100, 1, 0, 1}));
}
