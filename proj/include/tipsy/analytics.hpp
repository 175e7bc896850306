// Closed-form quantities and winning-region classifiers.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tipsy/spinner.hpp"

namespace tipsy {

enum class WalkClass { transient, null_recurrent, positive_recurrent };

enum class Winner { cop_almost_surely, robber_positive_probability, boundary };

std::string to_string(WalkClass c);
std::string to_string(Winner w);

struct RegimeVerdict {
  Winner winner = Winner::boundary;
  /// Short tag naming the argument that decided the verdict.
  std::string rationale;
  /// Whether the expected capture time is finite; only meaningful when the
  /// cop wins almost surely.
  bool finite_expectation = false;
};

/// Tolerance used to decide equality cases of the thresholds.
inline constexpr double kBoundaryTolerance = 1e-12;

/// Biased walk on the non-negative integers with up-probability p.
WalkClass gamblers_ruin_class(double p);

/// E[T_{n,0}] = n / (1 - 2p) for p < 1/2.
template <class Scalar>
Scalar gamblers_ruin_mean(const Scalar& p, const Scalar& n) {
  if (!(p < Scalar(1) / Scalar(2)))
    throw std::domain_error("hitting time has infinite mean for p >= 1/2");
  return n / (Scalar(1) - Scalar(2) * p);
}

template <class Scalar>
struct Moments {
  Scalar mean{};
  Scalar variance{};
};

/// Mean and variance of the first passage 1 -> 0 of the walk whose
/// up-probability at state i is overrides[i-1] for i <= overrides.size()
/// and `tail` beyond. Solved from the homogeneous tail inward.
template <class Scalar>
Moments<Scalar> hitting_time_moments(const std::vector<Scalar>& overrides,
                                     const Scalar& tail) {
  const Scalar one(1), two(2);
  if (!(tail < one / two))
    throw std::domain_error("tail up-probability must be < 1/2");
  for (const auto& p : overrides)
    if (!(p < one) || p < Scalar(0))
      throw std::domain_error("overridden up-probabilities must lie in [0, 1)");
  // E and M are the first two moments of the time to step down by one.
  Scalar e = one / (one - two * tail);
  Scalar m = (one + Scalar(4) * tail * e + two * tail * e * e) /
             (one - two * tail);
  for (auto it = overrides.rbegin(); it != overrides.rend(); ++it) {
    const Scalar& p = *it;
    const Scalar e_in = (one + p * e) / (one - p);
    const Scalar m_in =
        (one + two * p * (e_in + e) + p * (two * e_in * e + m)) / (one - p);
    e = e_in;
    m = m_in;
  }
  return {e, m - e * e};
}

/// Grid classifier from the comparison of c and r.
RegimeVerdict grid_regime(const GameParams& params);

/// Edge weights of the folded walk against RS: vertical weight beta^y and
/// horizontal weight alpha * beta^(y-1), with the reversible CS2 mixing.
template <class Scalar>
struct WeightModel {
  Scalar beta{};
  Scalar alpha{};
  Scalar p_star{};
  Scalar sum_vertical{};
  Scalar sum_horizontal{};
};

template <class Scalar>
WeightModel<Scalar> grid_weight_model(const BasicGameParams<Scalar>& params) {
  if (!(params.c > params.r))
    throw std::domain_error("weight sums diverge unless c > r");
  const Scalar quarter = params.t() / Scalar(4);
  WeightModel<Scalar> w;
  w.beta = (params.r + quarter) / (params.c + quarter);
  w.alpha = quarter / (params.c + quarter);
  w.p_star = params.t() * (params.c - params.r) /
             (Scalar(2) * params.c * (Scalar(2) * params.r + params.t()));
  const Scalar gap = (w.beta - Scalar(1)) * (w.beta - Scalar(1));
  w.sum_vertical = (w.beta + Scalar(1)) / gap;
  w.sum_horizontal = Scalar(2) * w.alpha / gap;
  return w;
}

/// 2r^2 + 2rt - 3ct/2 - 2c^2; positive means RS escapes FoolishCop with
/// positive probability.
template <class Scalar>
Scalar foolish_margin(const BasicGameParams<Scalar>& p) {
  const Scalar t = p.t();
  return Scalar(2) * p.r * p.r + Scalar(2) * p.r * t -
         Scalar(3) * p.c * t / Scalar(2) - Scalar(2) * p.c * p.c;
}

/// Cop wins almost surely iff t_r >= t_c (delta - 1).
RegimeVerdict regular_tree_regime(int delta, double tc, double tr);

/// Largest tipsiness for which a player backtracking to B returns to it with
/// finite mean time: delta / (4 delta - 4).
inline double return_limit(int delta) { return delta / (4.0 * delta - 4.0); }

/// Tipsiness beyond which a cop step along B is more likely away from the
/// target copy: Delta / (4 Delta - 6).
inline double base_limit(int Delta) { return Delta / (4.0 * Delta - 6.0); }

inline double cop_limit(int delta, int Delta) {
  return std::min(return_limit(delta), base_limit(Delta));
}

/// Expected number of spins between consecutive base moves of a player who
/// backtracks to B whenever off it.
template <class Scalar>
Scalar mu(const Scalar& t, int delta, int Delta) {
  const Scalar d(delta), D(Delta);
  if (t < Scalar(0) || !(t < d / (Scalar(4) * d - Scalar(4))))
    throw std::domain_error("mu is infinite for t >= delta / (4 delta - 4)");
  const Scalar a = (Scalar(4) * d - Scalar(4)) / d;
  return Scalar(2) * (Scalar(1) - (a - Scalar(2) / D) * t) /
         ((Scalar(1) - a * t) * (Scalar(1) - Scalar(2) * t / D));
}

/// Same quantity in the cleared-denominator form.
template <class Scalar>
Scalar mu_cleared(const Scalar& t, int delta, int Delta) {
  const Scalar d(delta), D(Delta);
  if (t < Scalar(0) || !(t < d / (Scalar(4) * d - Scalar(4))))
    throw std::domain_error("mu is infinite for t >= delta / (4 delta - 4)");
  return (Scalar(2) * d * D -
          (Scalar(8) * d * D - Scalar(4) * d - Scalar(8) * D) * t) /
         ((d - Scalar(4) * (d - Scalar(1)) * t) * (D - Scalar(2) * t));
}

/// E of the lower-bound variables for a robber / cop base move.
template <class Scalar>
Scalar expected_robber_lower(const Scalar& tr, int Delta) {
  const Scalar D(Delta);
  return (Scalar(1) - Scalar(6) * tr / D) / (Scalar(1) - Scalar(2) * tr / D);
}

template <class Scalar>
Scalar expected_cop_lower(const Scalar& tc, int Delta) {
  const Scalar D(Delta);
  return -(Scalar(1) - (Scalar(4) * D - Scalar(6)) * tc / D) /
         (Scalar(1) - Scalar(2) * tc / D);
}

namespace detail {

/// (1 - a x)(1 - b x) / (1 - c x).
template <class Scalar>
Scalar ratio_term(const Scalar& x, const Scalar& a, const Scalar& b,
                  const Scalar& c) {
  return (Scalar(1) - a * x) * (Scalar(1) - b * x) / (Scalar(1) - c * x);
}

}  // namespace detail

/// F(x, y): twice the asymptotic drift per spin of the projected distance
/// when the robber (tipsiness x) and the cop (tipsiness y) both backtrack
/// to B. No box check.
template <class Scalar>
Scalar rsb_margin_unchecked(const Scalar& x, const Scalar& y, int delta,
                            int Delta) {
  const Scalar d(delta), D(Delta);
  const Scalar a = (Scalar(4) * d - Scalar(4)) / d;
  const Scalar c = a - Scalar(2) / D;
  return detail::ratio_term(x, a, Scalar(6) / D, c) -
         detail::ratio_term(y, a, (Scalar(4) * D - Scalar(6)) / D, c);
}

/// F(t_r, t_c) on the box [0, return_limit] x [0, cop_limit]; throws
/// outside it.
double rsb_margin(double tr, double tc, int delta, int Delta);

/// The t_c threshold f(t_r) with F(t_r, f(t_r)) = 0, by bisection. Needs
/// Delta >= 4.
double threshold_f(double tr, int delta, int Delta);

/// Tipsiness t0 at which the RSA and RSB thresholds cross. Needs Delta >= 4.
double crossover_t0(int delta, int Delta);

struct TreeRegime {
  RegimeVerdict rsa;
  RegimeVerdict rsb;
};

/// Verdicts for a robber playing RSA and RSB at the given tipsiness values.
TreeRegime tree_regime(double tr, double tc, int delta, int Delta);

}  // namespace tipsy
