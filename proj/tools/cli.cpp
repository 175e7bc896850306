#include "cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tipsy/analytics.hpp"
#include "tipsy/chain_oracle.hpp"
#include "tipsy/grid.hpp"
#include "tipsy/monte_carlo.hpp"
#include "tipsy/tree.hpp"

namespace tipsy::cli {
namespace {

using nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string game = "grid";
  std::optional<std::string> c, r, tc, tr, t, p;
  int Delta = 7;
  int delta = 3;
  std::optional<std::string> cop, robber;
  std::optional<long long> start;
  std::uint64_t horizon = 100'000;
  std::uint64_t episodes = 1'000;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string output;
  unsigned threads = 1;
  bool deterministic = false;

  std::string tr_min = "0", tr_max = "1/2", tc_min = "0", tc_max = "1/2";
  std::string step = "0.025";
  double band_threshold = 0.5;

  std::string chain = "grid";
  std::string radii = "10,20,30,40";
  std::string boundary = "reflecting";
  std::string solver = "gauss-seidel";
  std::optional<std::string> up;
};

// Runs `f`, turning any validation failure into a ConfigError.
template <class F>
auto configure(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ordered_json value(double v, const std::string& source) {
  ordered_json j;
  if (std::isfinite(v))
    j["value"] = v;
  else
    j["value"] = nullptr;
  j["source"] = source;
  return j;
}

ordered_json value(std::uint64_t v, const std::string& source) {
  return {{"value", v}, {"source", source}};
}

ordered_json optional_value(const std::optional<double>& v,
                            const std::string& source) {
  return v ? value(*v, source) : value(std::nan(""), source);
}

ordered_json verdict_json(const RegimeVerdict& v) {
  return {{"winner", to_string(v.winner)},
          {"finite_expectation", v.finite_expectation},
          {"source", v.rationale}};
}

ordered_json error_json(const std::exception& e) {
  return {{"error", e.what()}};
}

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("TIPSY_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("TIPSY_SEED must be an unsigned integer, got '" +
                        std::string(s) + "'");
    return v;
  }
  return 0;
}

double opt_number(const std::optional<std::string>& s, double fallback) {
  return s ? parse_number(*s) : fallback;
}

bool is_tree(const Options& o) {
  if (o.game == "grid") return false;
  if (o.game == "tree") return true;
  throw ConfigError("--game must be grid or tree");
}

GameParams resolve_params(const Options& o) {
  return configure([&] {
    if (!is_tree(o)) {
      if (!o.c || !o.r) throw ConfigError("grid games need --c and --r");
      const double c = parse_number(*o.c), r = parse_number(*o.r);
      double tc = opt_number(o.tc, 0.0), tr = opt_number(o.tr, 0.0);
      if (o.t) {
        const double t = parse_number(*o.t);
        if (!o.tc && !o.tr) {
          tc = tr = t / 2;
        } else if (std::abs(tc + tr - t) > kProbabilityTolerance) {
          throw ConfigError("--t disagrees with --tc + --tr");
        }
      }
      return make_params(c, r, tc, tr, GameMode::grid);
    }
    if (!o.tc || !o.tr) throw ConfigError("tree games need --tc and --tr");
    const double tc = parse_number(*o.tc), tr = parse_number(*o.tr);
    return make_params(opt_number(o.c, 0.5 - tc), opt_number(o.r, 0.5 - tr),
                       tc, tr, GameMode::tree);
  });
}

TreeParams resolve_tree(const Options& o) {
  return configure([&] {
    TreeParams tp{o.Delta, o.delta};
    validate(tp);
    return tp;
  });
}

GridStrategy resolve_grid_strategy(const std::string& name,
                                   const Options& o, const GameParams& params,
                                   Side side) {
  return configure([&] {
    std::optional<double> mixing;
    if (o.p) mixing = parse_number(*o.p);
    std::string lower = name;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(ch));
    if (lower == "cs2" && !mixing) mixing = cs2_reversible_mixing(params);
    const auto s = GridStrategy::parse(name, mixing);
    if (s.side() != side)
      throw ConfigError(name + " is not a " +
                        (side == Side::cop ? "cop" : "robber") + " strategy");
    return s;
  });
}

TreeStrategy resolve_tree_strategy(const std::string& name, Side side) {
  return configure([&] {
    const auto s = parse_tree_strategy(name);
    if (side_of(s) != side)
      throw ConfigError(name + " is not a " +
                        (side == Side::cop ? "cop" : "robber") + " strategy");
    return s;
  });
}

BatchConfig resolve_batch(const Options& o) {
  if (o.episodes < 1) throw ConfigError("--episodes must be >= 1");
  if (o.horizon < 1) throw ConfigError("--horizon must be >= 1");
  return {o.horizon, o.episodes, resolve_seed(o), o.threads};
}

std::vector<double> number_range(const std::string& lo, const std::string& hi,
                                 const std::string& step) {
  return configure([&] {
    const double a = parse_number(lo), b = parse_number(hi),
                 s = parse_number(step);
    if (!(s > 0)) throw ConfigError("--step must be positive");
    if (b < a) throw ConfigError("empty range");
    std::vector<double> out;
    for (long k = 0;; ++k) {
      const double v = a + static_cast<double>(k) * s;
      if (v > b + 1e-12) break;
      out.push_back(std::min(v, b));
    }
    return out;
  });
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json document(const std::string& kind, const Options& o) {
  ordered_json doc;
  doc["schema"] = "tipsy/" + kind + "/1";
  if (!o.deterministic) {
    doc["generated_at"] = timestamp();
    doc["machine"] = {{"hardware_threads", std::thread::hardware_concurrency()},
                      {"threads", o.threads}};
  }
  return doc;
}

ordered_json params_json(const GameParams& p) {
  return {{"c", value(p.c, "config")},
          {"r", value(p.r, "config")},
          {"t_c", value(p.tc, "config")},
          {"t_r", value(p.tr, "config")},
          {"mode", p.mode == GameMode::tree ? "tree" : "grid"}};
}

ordered_json interval_json(const Interval& iv, const std::string& source) {
  return {{"lo", value(iv.lo, source)}, {"hi", value(iv.hi, source)}};
}

ordered_json summary_json(const BatchSummary& s) {
  ordered_json j;
  j["n_episodes"] = value(s.n_episodes, "mc");
  j["captured"] = value(s.captured, "mc");
  j["capture_fraction"] = value(s.capture_fraction, "mc");
  j["capture_interval"] = interval_json(s.capture_interval, "mc");
  j["mean_capture_time"] = optional_value(s.mean_capture_time, "mc");
  j["median_capture_time"] = optional_value(s.median_capture_time, "mc");
  j["censored_fraction"] = value(s.censored_fraction, "mc");
  if (s.tree) {
    const auto& a = *s.tree;
    j["tree"] = {
        {"robber_base_moves", value(a.totals.robber.moves, "mc")},
        {"cop_base_moves", value(a.totals.cop.moves, "mc")},
        {"robber_gap_mean", value(a.robber_gap_mean, "mc")},
        {"robber_gap_se", value(a.robber_gap_se, "mc")},
        {"cop_gap_mean", value(a.cop_gap_mean, "mc")},
        {"cop_gap_se", value(a.cop_gap_se, "mc")},
        {"robber_lower_mean", value(a.robber_lower_mean, "mc")},
        {"cop_lower_mean", value(a.cop_lower_mean, "mc")},
        {"y_slope", value(a.y_slope, "mc")},
        {"domination_violations",
         value(a.totals.robber.domination_violations +
                   a.totals.cop.domination_violations,
               "mc")}};
  }
  return j;
}

void write_csv_episodes(std::ostream& os, const BatchSummary& s) {
  os << "episode,captured,capture_time,steps_run,final_distance\n";
  for (std::size_t i = 0; i < s.episodes.size(); ++i) {
    const auto& e = s.episodes[i];
    os << i << ',' << (e.captured ? "true" : "false") << ',';
    if (e.captured) os << e.capture_time;
    os << ',' << e.steps_run << ',' << e.final_distance << '\n';
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_format(const Options& o) {
  if (o.format != "json" && o.format != "csv")
    throw ConfigError("--format must be json or csv");
}

// ---- simulate ------------------------------------------------------------

void cmd_simulate(const Options& o, std::ostream& out) {
  check_format(o);
  const GameParams params = resolve_params(o);
  const BatchConfig batch = resolve_batch(o);
  ordered_json config = {{"game", o.game}, {"params", params_json(params)}};
  GameSpec spec;
  RegimeVerdict analytic;
  std::optional<TreeRegime> tree_verdicts;

  if (!is_tree(o)) {
    const auto cop =
        resolve_grid_strategy(o.cop.value_or("CS1"), o, params, Side::cop);
    const auto robber =
        resolve_grid_strategy(o.robber.value_or("RS"), o, params, Side::robber);
    const long long y = o.start.value_or(1);
    if (y < 1) throw ConfigError("--start must be >= 1");
    spec = GridGameSpec{params, cop, robber, GridState{0, y}};
    config["cop"] = cop.name();
    if (cop.kind() == GridStrategy::Kind::cs2)
      config["p"] = value(cop.mixing(), "config");
    config["robber"] = robber.name();
    config["start"] = {{"x", 0}, {"y", y}};
    analytic = grid_regime(params);
  } else {
    const TreeParams tree = resolve_tree(o);
    const auto cop = resolve_tree_strategy(o.cop.value_or("CS"), Side::cop);
    const auto robber =
        resolve_tree_strategy(o.robber.value_or("RSA"), Side::robber);
    const long long d0 = o.start.value_or(20);
    if (d0 < 1) throw ConfigError("--start must be >= 1");
    spec = TreeGameSpec{tree, params, cop, robber,
                        default_tree_start(static_cast<std::size_t>(d0))};
    config["Delta"] = tree.Delta;
    config["delta"] = tree.delta;
    config["cop"] = to_string(cop);
    config["robber"] = to_string(robber);
    config["start_base_distance"] = d0;
    try {
      tree_verdicts = tree_regime(params.tr, params.tc, tree.delta, tree.Delta);
    } catch (const std::exception&) {
    }
  }
  config["horizon"] = batch.horizon;
  config["episodes"] = batch.episodes;
  config["seed"] = batch.master_seed;

  const BatchSummary summary = run_batch(spec, batch);
  if (o.format == "csv") {
    write_csv_episodes(out, summary);
    return;
  }
  auto doc = document("simulate", o);
  doc["config"] = config;
  doc["summary"] = summary_json(summary);
  if (tree_verdicts)
    doc["analytic"] = {{"rsa", verdict_json(tree_verdicts->rsa)},
                       {"rsb", verdict_json(tree_verdicts->rsb)}};
  else if (!is_tree(o))
    doc["analytic"] = verdict_json(analytic);
  out << doc.dump(2) << '\n';
}

// ---- phase ---------------------------------------------------------------

std::string short_verdict(const std::optional<TreeRegime>& r, bool rsa) {
  if (!r) return "";
  const Winner w = rsa ? r->rsa.winner : r->rsb.winner;
  switch (w) {
    case Winner::cop_almost_surely: return "cop";
    case Winner::robber_positive_probability: return "robber";
    case Winner::boundary: return "boundary";
  }
  return "";
}

void cmd_phase(const Options& o, std::ostream& out) {
  check_format(o);
  const TreeParams tree = resolve_tree(o);
  const auto trs = number_range(o.tr_min, o.tr_max, o.step);
  const auto tcs = number_range(o.tc_min, o.tc_max, o.step);
  PhaseSweepConfig cfg;
  cfg.batch = resolve_batch(o);
  cfg.start_distance = static_cast<std::size_t>(o.start.value_or(20));
  if (o.start && *o.start < 1) throw ConfigError("--start must be >= 1");
  cfg.band_threshold = o.band_threshold;

  const auto points = sweep_phase(tree, trs, tcs, cfg);
  if (o.format == "csv") {
    out << "t_r,t_c,analytic_rsa,analytic_rsb,observed_capture_rsa,"
           "observed_capture_rsb\n";
    for (const auto& p : points) {
      out << fmt(p.tr) << ',' << fmt(p.tc) << ','
          << short_verdict(p.analytic, true) << ','
          << short_verdict(p.analytic, false) << ',';
      if (p.rsa) out << fmt(p.rsa->capture_fraction);
      out << ',';
      if (p.rsb) out << fmt(p.rsb->capture_fraction);
      out << '\n';
    }
    return;
  }
  auto doc = document("phase", o);
  doc["config"] = {{"Delta", tree.Delta},
                   {"delta", tree.delta},
                   {"horizon", cfg.batch.horizon},
                   {"episodes", cfg.batch.episodes},
                   {"seed", cfg.batch.master_seed},
                   {"start_base_distance", cfg.start_distance},
                   {"band_threshold", value(cfg.band_threshold, "config")}};
  ordered_json rows = ordered_json::array();
  for (const auto& p : points) {
    ordered_json row = {{"t_r", value(p.tr, "config")},
                        {"t_c", value(p.tc, "config")}};
    if (p.analytic)
      row["analytic"] = {{"rsa", verdict_json(p.analytic->rsa)},
                         {"rsb", verdict_json(p.analytic->rsb)}};
    const auto obs = [](const PhaseObservation& ob) {
      return ordered_json{{"capture_fraction", value(ob.capture_fraction, "mc")},
                          {"capture_interval", interval_json(ob.interval, "mc")},
                          {"band", to_string(ob.band)}};
    };
    if (p.rsa) row["observed_rsa"] = obs(*p.rsa);
    if (p.rsb) row["observed_rsb"] = obs(*p.rsb);
    if (p.error) row["error"] = *p.error;
    rows.push_back(std::move(row));
  }
  doc["points"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

// ---- analyze -------------------------------------------------------------

template <class F>
ordered_json attempt(F&& f, int& failures, int& total) {
  ++total;
  try {
    return f();
  } catch (const std::exception& e) {
    ++failures;
    return error_json(e);
  }
}

std::string grid_verdict_text(const RegimeVerdict& v) {
  if (v.winner == Winner::robber_positive_probability)
    return "RobberPositiveProb";
  return v.finite_expectation ? "CopAS, finite expected capture time"
                              : "CopAS, null recurrent";
}

void cmd_analyze(const Options& o, std::ostream& out) {
  int failures = 0, total = 0;
  auto doc = document("analyze", o);
  ordered_json q;

  if (!is_tree(o)) {
    const GameParams params = resolve_params(o);
    doc["config"] = {{"game", "grid"}, {"params", params_json(params)}};
    q["regime"] = attempt(
        [&] {
          const auto v = grid_regime(params);
          auto j = verdict_json(v);
          j["summary"] = grid_verdict_text(v);
          return j;
        },
        failures, total);
    q["weight_model"] = attempt(
        [&] {
          const auto w = grid_weight_model(params);
          const std::string src = "analytic:edge-weight-recurrence";
          return ordered_json{{"beta", value(w.beta, src)},
                              {"alpha", value(w.alpha, src)},
                              {"p_star", value(w.p_star, src)},
                              {"sum_vertical", value(w.sum_vertical, src)},
                              {"sum_horizontal", value(w.sum_horizontal, src)}};
        },
        failures, total);
    q["cs2_reversible_mixing"] = attempt(
        [&] {
          return value(cs2_reversible_mixing(params),
                       "analytic:edge-weight-recurrence");
        },
        failures, total);
    q["foolish_margin"] = attempt(
        [&] { return value(foolish_margin(params), "analytic:two-round-drift"); },
        failures, total);
    const double c = params.c, r = params.r, t = params.t();
    q["foolish_two_round_off_axis"] = attempt(
        [&] {
          return value(2 * r * r + 2 * r * t + 2 * r * c - c * c - c * t / 4,
                       "analytic:two-round-drift");
        },
        failures, total);
  } else {
    const TreeParams tree = resolve_tree(o);
    doc["config"] = {{"game", "tree"}, {"Delta", tree.Delta},
                     {"delta", tree.delta}};
    const std::optional<double> tr =
        configure([&] { return o.tr ? std::optional(parse_number(*o.tr))
                                    : std::nullopt; });
    const std::optional<double> tc =
        configure([&] { return o.tc ? std::optional(parse_number(*o.tc))
                                    : std::nullopt; });
    if (tr) doc["config"]["t_r"] = value(*tr, "config");
    if (tc) doc["config"]["t_c"] = value(*tc, "config");

    q["return_limit"] =
        value(return_limit(tree.delta), "analytic:base-return-time");
    q["base_limit"] = value(base_limit(tree.Delta), "analytic:cop-too-tipsy");
    q["crossover_t0"] = attempt(
        [&] {
          return value(crossover_t0(tree.delta, tree.Delta),
                       "analytic:strategy-crossover");
        },
        failures, total);
    q["threshold_slope_at_zero"] =
        value(2.0 / (tree.Delta - 1), "analytic:rsb-threshold");
    if (tr) {
      q["mu_robber"] = attempt(
          [&] {
            return value(mu(*tr, tree.delta, tree.Delta),
                         "analytic:base-return-time");
          },
          failures, total);
      q["threshold_f"] = attempt(
          [&] {
            return value(threshold_f(*tr, tree.delta, tree.Delta),
                         "analytic:rsb-threshold");
          },
          failures, total);
      q["rsa_threshold"] = value(*tr / (tree.delta - 1),
                                 "analytic:small-tree-drift");
      q["expected_robber_lower"] = value(expected_robber_lower(*tr, tree.Delta),
                                         "analytic:base-move-lower-bound");
    }
    if (tc) {
      q["mu_cop"] = attempt(
          [&] {
            return value(mu(*tc, tree.delta, tree.Delta),
                         "analytic:base-return-time");
          },
          failures, total);
      q["expected_cop_lower"] = value(expected_cop_lower(*tc, tree.Delta),
                                      "analytic:base-move-lower-bound");
    }
    if (tr && tc) {
      q["regular_tree_regime"] = attempt(
          [&] { return verdict_json(regular_tree_regime(tree.delta, *tc, *tr)); },
          failures, total);
      q["rsb_margin"] = attempt(
          [&] {
            return value(rsb_margin(*tr, *tc, tree.delta, tree.Delta),
                         "analytic:projected-drift-margin");
          },
          failures, total);
      q["tree_regime"] = attempt(
          [&] {
            const auto v = tree_regime(*tr, *tc, tree.delta, tree.Delta);
            return ordered_json{{"rsa", verdict_json(v.rsa)},
                                {"rsb", verdict_json(v.rsb)}};
          },
          failures, total);
    }
  }
  doc["quantities"] = std::move(q);
  out << doc.dump(2) << '\n';
  if (total > 0 && failures == total)
    throw std::runtime_error("every requested quantity failed");
}

// ---- oracle --------------------------------------------------------------

std::vector<std::int64_t> parse_radii(const std::string& text) {
  return configure([&] {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::int64_t v = 0;
      const auto [ptr, ec] =
          std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || v < 1)
        throw ConfigError("--radii must list positive integers");
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError("--radii is empty");
    return out;
  });
}

void cmd_oracle(const Options& o, std::ostream& out) {
  const auto radii = parse_radii(o.radii);
  BoundaryPolicy boundary;
  if (o.boundary == "killing")
    boundary = BoundaryPolicy::killing;
  else if (o.boundary == "reflecting")
    boundary = BoundaryPolicy::reflecting;
  else
    throw ConfigError("--boundary must be killing or reflecting");
  SolverOptions solver;
  if (o.solver == "gauss-seidel")
    solver.method = LinearSolver::gauss_seidel;
  else if (o.solver == "lu")
    solver.method = LinearSolver::sparse_lu;
  else
    throw ConfigError("--solver must be gauss-seidel or lu");
  const long long y = o.start.value_or(1);
  if (y < 1) throw ConfigError("--start must be >= 1");
  const GridState start{0, y};

  auto doc = document("oracle", o);
  ordered_json config = {{"chain", o.chain},
                         {"boundary", to_string(boundary)},
                         {"solver", o.solver},
                         {"start", {{"x", 0}, {"y", y}}}};
  std::function<TruncatedChain(std::int64_t)> build;
  std::optional<GridGameSpec> mc_spec;

  if (o.chain == "grid") {
    if (is_tree(o)) throw ConfigError("the oracle supports grid games only");
    const GameParams params = resolve_params(o);
    const auto cop =
        resolve_grid_strategy(o.cop.value_or("CS1"), o, params, Side::cop);
    const auto robber =
        resolve_grid_strategy(o.robber.value_or("RS"), o, params, Side::robber);
    config["params"] = params_json(params);
    config["cop"] = cop.name();
    config["robber"] = robber.name();
    build = [=](std::int64_t radius) {
      return build_grid_chain(params, cop, robber, radius, boundary);
    };
    mc_spec = GridGameSpec{params, cop, robber, start};
  } else if (o.chain == "ruin") {
    if (!o.up) throw ConfigError("--chain ruin needs --up");
    const double p = configure([&] { return parse_number(*o.up); });
    if (!(p >= 0 && p <= 1)) throw ConfigError("--up must lie in [0, 1]");
    config["up"] = value(p, "config");
    build = [=](std::int64_t radius) {
      return build_ruin_chain(p, radius, boundary);
    };
    if (p < 0.5)
      doc["analytic"] = {
          {"mean_hitting_time",
           value(gamblers_ruin_mean(p, static_cast<double>(y)),
                 "analytic:gamblers-ruin")}};
  } else {
    throw ConfigError("--chain must be grid or ruin");
  }

  ordered_json ladder = ordered_json::array();
  double last_time = std::nan("");
  for (auto radius : radii) {
    const auto chain = build(radius);
    const auto sol = solve(chain, solver);
    const auto idx = chain.index_of(start);
    ordered_json row = {{"radius", radius}, {"states", chain.size()}};
    if (idx) {
      const auto i = static_cast<Eigen::Index>(*idx);
      row["absorption"] = value(sol.absorption[i], "oracle");
      row["conditional_time"] = value(sol.conditional_time[i], "oracle");
      last_time = sol.conditional_time[i];
    } else {
      row["error"] = "start lies outside the truncation";
    }
    row["iterations"] = sol.iterations;
    row["residual"] = value(sol.residual, "oracle");
    ladder.push_back(std::move(row));
  }
  config["horizon"] = o.horizon;
  config["episodes"] = o.episodes;
  doc["config"] = std::move(config);
  doc["ladder"] = std::move(ladder);

  if (mc_spec && o.episodes > 0) {
    const auto s = run_batch(*mc_spec, resolve_batch(o));
    ordered_json mc = {{"capture_fraction", value(s.capture_fraction, "mc")},
                       {"mean_capture_time",
                        optional_value(s.mean_capture_time, "mc")}};
    if (s.mean_capture_time && std::isfinite(last_time))
      mc["relative_delta"] =
          value((*s.mean_capture_time - last_time) / last_time, "mc");
    doc["monte_carlo"] = std::move(mc);
  }
  out << doc.dump(2) << '\n';
}

void add_game_options(CLI::App* sub, Options& o) {
  sub->add_option("--game", o.game, "grid or tree");
  sub->add_option("--c", o.c, "sober cop probability");
  sub->add_option("--r", o.r, "sober robber probability");
  sub->add_option("--tc", o.tc, "tipsy cop probability");
  sub->add_option("--tr", o.tr, "tipsy robber probability");
  sub->add_option("--t", o.t, "combined tipsiness (grid), split evenly");
  sub->add_option("--Delta", o.Delta, "base-vertex degree");
  sub->add_option("--delta", o.delta, "small-tree degree");
}

void add_run_options(CLI::App* sub, Options& o) {
  sub->add_option("--horizon", o.horizon, "spins per episode");
  sub->add_option("--episodes", o.episodes, "episodes per batch");
  sub->add_option("--seed", o.seed, "master seed (default $TIPSY_SEED or 0)");
  sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_output_options(CLI::App* sub, Options& o, bool csv) {
  if (csv) sub->add_option("--format", o.format, "json or csv");
  sub->add_option("--output", o.output, "write results to this file");
  sub->add_flag("--deterministic", o.deterministic,
                "omit timestamp and machine information");
}

}  // namespace

double parse_number(std::string_view text) {
  const auto parse_part = [](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_part(text);
  const auto num_text = text.substr(0, slash);
  const auto den_text = text.substr(slash + 1);
  long long num = 0, den = 0;
  const auto [p1, e1] =
      std::from_chars(num_text.data(), num_text.data() + num_text.size(), num);
  const auto [p2, e2] =
      std::from_chars(den_text.data(), den_text.data() + den_text.size(), den);
  if (num_text.empty() || den_text.empty() || e1 != std::errc() ||
      e2 != std::errc() || p1 != num_text.data() + num_text.size() ||
      p2 != den_text.data() + den_text.size())
    throw std::invalid_argument("not a fraction of integers: '" +
                                std::string(text) + "'");
  if (den == 0) throw std::invalid_argument("zero denominator");
  return static_cast<double>(num) / static_cast<double>(den);
}

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Simulator and analytics for the tipsy cop and robber game"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "run a batch of episodes");
  add_game_options(simulate, o);
  simulate->add_option("--cop", o.cop, "cop strategy");
  simulate->add_option("--robber", o.robber, "robber strategy");
  simulate->add_option("--p", o.p, "CS2 mixing probability");
  simulate->add_option("--start", o.start,
                       "grid: start (0, start); tree: base distance");
  add_run_options(simulate, o);
  add_output_options(simulate, o, true);

  auto* phase = app.add_subcommand("phase", "sweep (t_r, t_c) on a tree");
  phase->add_option("--Delta", o.Delta, "base-vertex degree");
  phase->add_option("--delta", o.delta, "small-tree degree");
  phase->add_option("--tr-min", o.tr_min, "lowest t_r");
  phase->add_option("--tr-max", o.tr_max, "highest t_r");
  phase->add_option("--tc-min", o.tc_min, "lowest t_c");
  phase->add_option("--tc-max", o.tc_max, "highest t_c");
  phase->add_option("--step", o.step, "grid resolution");
  phase->add_option("--start", o.start, "base distance between the players");
  phase->add_option("--band-threshold", o.band_threshold,
                    "capture fraction separating the bands");
  add_run_options(phase, o);
  o.format = "csv";
  add_output_options(phase, o, true);

  auto* analyze = app.add_subcommand("analyze", "evaluate closed forms");
  add_game_options(analyze, o);
  add_output_options(analyze, o, false);

  auto* oracle = app.add_subcommand("oracle", "exact truncated-chain solves");
  add_game_options(oracle, o);
  oracle->add_option("--cop", o.cop, "cop strategy");
  oracle->add_option("--robber", o.robber, "robber strategy");
  oracle->add_option("--p", o.p, "CS2 mixing probability");
  oracle->add_option("--start", o.start, "start state (0, start)");
  oracle->add_option("--chain", o.chain, "grid or ruin");
  oracle->add_option("--up", o.up, "up-probability of the ruin chain");
  oracle->add_option("--radii", o.radii, "comma-separated truncation radii");
  oracle->add_option("--boundary", o.boundary, "killing or reflecting");
  oracle->add_option("--solver", o.solver, "gauss-seidel or lu");
  add_run_options(oracle, o);
  add_output_options(oracle, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  // The phase default is CSV; the others default to JSON unless asked.
  if (!phase->parsed() && simulate->count("--format") == 0) o.format = "json";

  std::ofstream file;
  std::ostringstream buffer;
  try {
    std::ostream& sink = o.output.empty() ? out : static_cast<std::ostream&>(buffer);
    if (simulate->parsed())
      cmd_simulate(o, sink);
    else if (phase->parsed())
      cmd_phase(o, sink);
    else if (analyze->parsed())
      cmd_analyze(o, sink);
    else
      cmd_oracle(o, sink);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParams& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  if (!o.output.empty()) {
    file.open(o.output);
    if (!file) {
      err << "error: cannot open " << o.output << '\n';
      return kExitRuntime;
    }
    file << buffer.str();
  }
  return kExitOk;
}

}  // namespace tipsy::cli
