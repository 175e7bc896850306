#include "tipsy/analytics.hpp"

#include <array>

namespace tipsy {
namespace {

RegimeVerdict cop(std::string why, bool finite) {
  return {Winner::cop_almost_surely, std::move(why), finite};
}
RegimeVerdict robber(std::string why) {
  return {Winner::robber_positive_probability, std::move(why), false};
}
RegimeVerdict boundary(std::string why) {
  return {Winner::boundary, std::move(why), false};
}

bool above(double v, double limit) { return v > limit + kBoundaryTolerance; }
bool near(double a, double b) { return std::abs(a - b) <= kBoundaryTolerance; }

void require_base_degree(int Delta) {
  if (Delta < 4)
    throw std::domain_error("the RSB threshold is only available for Delta >= 4");
}

// Finds the zero of an increasing function on [lo, hi].
template <class F>
double bisect_increasing(F&& g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

using Poly = std::array<double, 4>;  // coefficients of x^0..x^3

Poly mul(const Poly& p, const Poly& q) {
  Poly out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; i + j < 4; ++j) out[i + j] += p[i] * q[j];
  return out;
}

}  // namespace

std::string to_string(WalkClass c) {
  switch (c) {
    case WalkClass::transient: return "transient";
    case WalkClass::null_recurrent: return "null_recurrent";
    case WalkClass::positive_recurrent: return "positive_recurrent";
  }
  return "?";
}

std::string to_string(Winner w) {
  switch (w) {
    case Winner::cop_almost_surely: return "cop_almost_surely";
    case Winner::robber_positive_probability:
      return "robber_positive_probability";
    case Winner::boundary: return "boundary";
  }
  return "?";
}

WalkClass gamblers_ruin_class(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error("up-probability must lie in [0, 1]");
  if (p > 0.5) return WalkClass::transient;
  if (p < 0.5) return WalkClass::positive_recurrent;
  return WalkClass::null_recurrent;
}

RegimeVerdict grid_regime(const GameParams& params) {
  if (auto err = validate(params)) throw InvalidParams(*err);
  if (near(params.c, params.r))
    return cop("analytic:edge-weight-recurrence(null)", false);
  if (params.r > params.c) return robber("analytic:larger-coordinate-drift");
  return cop("analytic:edge-weight-recurrence", true);
}

RegimeVerdict regular_tree_regime(int delta, double tc, double tr) {
  if (delta < 2) throw std::domain_error("delta must be >= 2");
  const double threshold = tc * (delta - 1);
  if (tr >= threshold - kBoundaryTolerance)
    return cop("analytic:regular-tree-ruin", tr > threshold + kBoundaryTolerance);
  return robber("analytic:regular-tree-ruin");
}

double rsb_margin(double tr, double tc, int delta, int Delta) {
  const double xmax = return_limit(delta);
  const double ymax = cop_limit(delta, Delta);
  if (tr < -kBoundaryTolerance || tr > xmax + kBoundaryTolerance)
    throw std::domain_error("t_r outside [0, delta/(4 delta - 4)]");
  if (tc < -kBoundaryTolerance || tc > ymax + kBoundaryTolerance)
    throw std::domain_error(
        "t_c outside [0, min(delta/(4 delta - 4), Delta/(4 Delta - 6))]");
  return rsb_margin_unchecked(tr, tc, delta, Delta);
}

double threshold_f(double tr, int delta, int Delta) {
  require_base_degree(Delta);
  const double xmax = return_limit(delta);
  if (tr < -kBoundaryTolerance || tr > xmax + kBoundaryTolerance)
    throw std::domain_error("t_r outside [0, delta/(4 delta - 4)]");
  const double x = std::clamp(tr, 0.0, xmax);
  return bisect_increasing(
      [&](double y) { return rsb_margin_unchecked(x, y, delta, Delta); }, 0.0,
      cop_limit(delta, Delta));
}

double crossover_t0(int delta, int Delta) {
  require_base_degree(Delta);
  if (delta < 2) throw std::domain_error("delta must be >= 2");
  if (delta == 2) return 0.5;
  if (2 * delta >= Delta + 1) return 0.0;

  // F(x, kx) = 0 with denominators cleared is a cubic vanishing at 0.
  const double d = delta, D = Delta, k = 1.0 / (delta - 1);
  const double a = (4 * d - 4) / d, b1 = 6 / D, b2 = (4 * D - 6) / D;
  const double c = a - 2 / D;
  const Poly n1 = mul({1, -a, 0, 0}, {1, -b1, 0, 0});
  const Poly n2 = mul({1, -a * k, 0, 0}, {1, -b2 * k, 0, 0});
  const Poly lhs = mul(n1, {1, -c * k, 0, 0});
  const Poly rhs = mul(n2, {1, -c, 0, 0});
  const double q2 = lhs[3] - rhs[3], q1 = lhs[2] - rhs[2],
               q0 = lhs[1] - rhs[1];

  const double xmax = return_limit(delta);
  const auto inside = [&](double x) { return x > 0.0 && x <= xmax + 1e-12; };
  const double disc = q1 * q1 - 4 * q2 * q0;
  if (q2 != 0.0 && disc >= 0.0) {
    const double s = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double q = -0.5 * (q1 + (q1 >= 0 ? s : -s));
    for (double x : {q / q2, q != 0.0 ? q0 / q : 0.0})
      if (inside(x)) return std::min(x, xmax);
  }
  // f - g changes sign once on (0, xmax]: negative near 0, positive at xmax.
  return bisect_increasing(
      [&](double x) {
        return -rsb_margin_unchecked(x, k * x, delta, Delta);
      },
      1e-12, xmax);
}

TreeRegime tree_regime(double tr, double tc, int delta, int Delta) {
  if (delta < 2 || Delta < 3 || Delta < delta)
    throw std::domain_error("need Delta >= 3, delta >= 2, Delta >= delta");
  if (auto err = validate(GameParams{0.5 - tc, 0.5 - tr, tc, tr,
                                     GameMode::tree}))
    throw InvalidParams(*err);

  TreeRegime out;
  const double rsa_limit = std::min(tr / (delta - 1), base_limit(Delta));
  if (above(tc, rsa_limit))
    out.rsa = robber(above(tc, base_limit(Delta)) ? "analytic:cop-too-tipsy"
                                                  : "analytic:small-tree-drift");
  else if (tr < 0.5 - kBoundaryTolerance)
    out.rsa = cop("analytic:small-tree-capture", false);
  else
    out.rsa = boundary("undetermined:fully-tipsy-robber");

  const double xmax = return_limit(delta);
  if (above(tc, return_limit(delta)) || above(tc, base_limit(Delta))) {
    out.rsb = robber("analytic:cop-too-tipsy");
  } else if (Delta < 4) {
    out.rsb = boundary("unsupported:Delta<4");
  } else if (near(tc, 0.0)) {
    out.rsb = cop("analytic:sober-cop", false);
  } else if (near(tr, 0.0)) {
    out.rsb = robber("analytic:sober-robber");
  } else if (above(tr, xmax)) {
    if (above(tc, rsa_limit))
      out.rsb = boundary("undetermined:robber-stranded-off-base");
    else
      out.rsb = cop("analytic:robber-stranded-off-base", false);
  } else {
    const double m =
        rsb_margin_unchecked(std::min(tr, xmax), tc, delta, Delta);
    if (std::abs(m) <= kBoundaryTolerance)
      out.rsb = boundary("analytic:projected-drift-margin(zero)");
    else if (m > 0)
      out.rsb = robber("analytic:projected-drift-margin");
    else
      out.rsb = cop("analytic:projected-drift-margin", false);
  }
  return out;
}

}  // namespace tipsy
