#include <doctest.h>

#include <array>
#include <cmath>

#include "tipsy/spinner.hpp"

using namespace tipsy;

TEST_CASE("validation reports the first violated constraint") {
  CHECK_FALSE(validate(make_params(0.3, 0.2, 0.25, 0.25)));

  const auto bad_sum = validate(GameParams{0.3, 0.3, 0.25, 0.25});
  REQUIRE(bad_sum);
  CHECK(bad_sum->kind == ParamError::Kind::sum);
  CHECK(bad_sum->message.find("probabilities sum to 1.1") != std::string::npos);

  const auto negative = validate(GameParams{-0.1, 0.6, 0.25, 0.25});
  REQUIRE(negative);
  CHECK(negative->kind == ParamError::Kind::range);

  const auto split =
      validate(GameParams{0.3, 0.3, 0.1, 0.3, GameMode::tree});
  REQUIRE(split);
  CHECK(split->kind == ParamError::Kind::tree_split);
  CHECK(split->message.find("c + t_c = 1/2") != std::string::npos);

  CHECK_THROWS_AS(make_params(0.5, 0.5, 0.5, 0.0), InvalidParams);
}

TEST_CASE("parameter helpers") {
  const auto g = grid_params(0.3, 0.2, 0.5);
  CHECK(g.tc == doctest::Approx(0.25));
  CHECK(g.tr == doctest::Approx(0.25));
  CHECK(g.t() == doctest::Approx(0.5));

  const auto t = tree_params(0.1, 0.25);
  CHECK(t.mode == GameMode::tree);
  CHECK(t.c == doctest::Approx(0.4));
  CHECK(t.r == doctest::Approx(0.25));
  CHECK_THROWS_AS(tree_params(0.6, 0.1), InvalidParams);
}

TEST_CASE("spin partitions the unit interval in fixed order") {
  const auto p = make_params(0.1, 0.2, 0.3, 0.4);
  CHECK(spin(p, 0.0) == SpinnerOutcome::sober_cop);
  CHECK(spin(p, 0.0999) == SpinnerOutcome::sober_cop);
  CHECK(spin(p, 0.1) == SpinnerOutcome::sober_robber);
  CHECK(spin(p, 0.31) == SpinnerOutcome::tipsy_cop);
  CHECK(spin(p, 0.61) == SpinnerOutcome::tipsy_robber);
  CHECK(spin(p, 0.999999) == SpinnerOutcome::tipsy_robber);

  const Spinner spinner(p);
  RngStream rng(3, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(spinner(u) == spin(p, u));
  }
}

TEST_CASE("outcome frequencies match the spinner probabilities") {
  const auto p = make_params(0.1, 0.2, 0.3, 0.4);
  const Spinner spinner(p);
  RngStream rng(11, 0);
  std::array<int, 4> counts{};
  const int n = 400000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<int>(spinner(rng.uniform()))];
  const std::array<double, 4> expected{0.1, 0.2, 0.3, 0.4};
  for (int k = 0; k < 4; ++k) {
    const double se = std::sqrt(expected[k] * (1 - expected[k]) / n);
    CHECK(std::abs(counts[k] / double(n) - expected[k]) < 5 * se);
  }
}

TEST_CASE("random streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    differs_c |= x != c.next();
    differs_d |= x != d.next();
  }
  CHECK(differs_c);
  CHECK(differs_d);

  RngStream u(0, 0);
  for (int i = 0; i < 10000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("pick_index stays in range") {
  CHECK(pick_index(0.0, 5) == 0);
  CHECK(pick_index(0.999999999, 5) == 4);
  CHECK(pick_index(std::nextafter(1.0, 0.0), 3) == 2);
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}
