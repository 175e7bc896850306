#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "tipsy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tipsy::cli::run(static_cast<int>(argv.size()), argv.data(),
                                   out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("numbers and fractions") {
  using tipsy::cli::parse_number;
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("7/22") == doctest::Approx(7.0 / 22));
  CHECK(parse_number("1e-3") == 0.001);
  CHECK_THROWS_AS(parse_number("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number("1/2/3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_number(""), std::invalid_argument);
}

TEST_CASE("simulate writes sourced JSON") {
  const auto r = invoke({"simulate", "--c", "3/10", "--r", "0.2", "--t", "0.5",
                         "--episodes", "50", "--horizon", "5000",
                         "--deterministic"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == "tipsy/simulate/1");
  CHECK_FALSE(doc.contains("generated_at"));
  CHECK_FALSE(doc.contains("machine"));
  CHECK(doc["config"]["params"]["c"]["source"] == "config");
  CHECK(doc["config"]["params"]["t_c"]["value"] == 0.25);
  CHECK(doc["summary"]["capture_fraction"]["source"] == "mc");
  CHECK(doc["analytic"]["source"] == "analytic:edge-weight-recurrence");

  const auto timed = invoke({"simulate", "--c", "0.3", "--r", "0.2", "--t",
                             "0.5", "--episodes", "5", "--horizon", "100"});
  const auto tdoc = nlohmann::json::parse(timed.out);
  CHECK(tdoc.contains("generated_at"));
  CHECK(tdoc.contains("machine"));
}

TEST_CASE("deterministic output ignores the thread count") {
  const std::vector<std::string> base{
      "simulate", "--game", "tree", "--tc", "0.1", "--tr", "0.2", "--cop",
      "csb", "--robber", "rsb", "--episodes", "40", "--horizon", "3000",
      "--seed", "12", "--deterministic", "--threads"};
  auto one = base, three = base;
  one.push_back("1");
  three.push_back("3");
  const auto a = invoke(one), b = invoke(three);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("seed comes from the flag, then the environment") {
  const std::vector<std::string> args{"simulate", "--c", "0.25", "--r", "0.25",
                                      "--t", "0.5", "--episodes", "30",
                                      "--horizon", "2000", "--deterministic",
                                      "--format", "csv"};
  ::unsetenv("TIPSY_SEED");
  const auto zero = invoke(args);
  auto seeded = args;
  seeded.insert(seeded.end(), {"--seed", "99"});
  const auto flag = invoke(seeded);
  ::setenv("TIPSY_SEED", "99", 1);
  const auto env = invoke(args);
  ::setenv("TIPSY_SEED", "5", 1);
  const auto both = invoke(seeded);
  ::setenv("TIPSY_SEED", "x", 1);
  const auto bad = invoke(args);
  ::unsetenv("TIPSY_SEED");
  CHECK(env.out == flag.out);
  CHECK(both.out == flag.out);
  CHECK(zero.out != flag.out);
  CHECK(bad.code == tipsy::cli::kExitConfig);
}

TEST_CASE("CSV output") {
  const auto sim = invoke({"simulate", "--c", "0.3", "--r", "0.2", "--t", "0.5",
                           "--episodes", "3", "--horizon", "50", "--format",
                           "csv"});
  REQUIRE(sim.code == 0);
  CHECK(sim.out.rfind("episode,captured,capture_time,steps_run,final_distance\n", 0) == 0);

  const auto phase = invoke({"phase", "--Delta", "5", "--delta", "3", "--tr-max",
                             "0.2", "--tc-max", "0.1", "--step", "0.1",
                             "--episodes", "4", "--horizon", "200"});
  REQUIRE(phase.code == 0);
  std::istringstream lines(phase.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "t_r,t_c,analytic_rsa,analytic_rsb,observed_capture_rsa,observed_capture_rsb");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("tipsiness defaults and conflicts") {
  const auto split = invoke({"analyze", "--c", "0.3", "--r", "0.2", "--t", "0.5"});
  REQUIRE(split.code == 0);
  const auto doc = nlohmann::json::parse(split.out);
  CHECK(doc["config"]["params"]["t_r"]["value"] == 0.25);

  const auto only_tc = invoke({"analyze", "--c", "0.3", "--r", "0.2", "--tc", "0.5"});
  CHECK(only_tc.code == 0);

  const auto conflict = invoke({"analyze", "--c", "0.3", "--r", "0.2", "--tc",
                                "0.1", "--t", "0.5"});
  CHECK(conflict.code == tipsy::cli::kExitConfig);

  const auto tree = invoke({"simulate", "--game", "tree", "--tc", "0.1", "--tr",
                            "0.2", "--episodes", "2", "--horizon", "10"});
  REQUIRE(tree.code == 0);
  const auto tdoc = nlohmann::json::parse(tree.out);
  CHECK(tdoc["config"]["params"]["c"]["value"] == doctest::Approx(0.4));
}

TEST_CASE("exit codes") {
  using namespace tipsy::cli;
  CHECK(invoke({}).code == kExitConfig);
  CHECK(invoke({"nonsense"}).code == kExitConfig);
  CHECK(invoke({"simulate", "--c", "0.3"}).code == kExitConfig);
  CHECK(invoke({"simulate", "--c", "0.5", "--r", "0.5", "--t", "0.5"}).code ==
        kExitConfig);
  CHECK(invoke({"simulate", "--c", "0.3", "--r", "0.2", "--t", "0.5", "--cop",
                "RS"}).code == kExitConfig);
  CHECK(invoke({"simulate", "--game", "tree", "--tc", "0.1", "--tr", "0.1",
                "--Delta", "2"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--chain", "ruin", "--up", "0.3", "--radii",
                "5,x"}).code == kExitConfig);
  CHECK(invoke({"oracle", "--chain", "ruin"}).code == kExitConfig);
  CHECK(invoke({"simulate", "--c", "0.3", "--r", "0.2", "--t", "0.5",
                "--episodes", "2", "--horizon", "10", "--output",
                "/nonexistent-dir/out.json"}).code == kExitRuntime);
  const auto help = invoke({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("analyze reports per-quantity failures") {
  const auto r = invoke({"analyze", "--c", "0.2", "--r", "0.3", "--t", "0.5",
                         "--deterministic"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const auto& q = doc["quantities"];
  CHECK(q["regime"]["winner"] == "robber_positive_probability");
  CHECK(q["weight_model"].contains("error"));
  CHECK(q["foolish_margin"]["source"] == "analytic:two-round-drift");

  const auto tree = invoke({"analyze", "--game", "tree", "--Delta", "7",
                            "--delta", "3", "--tr", "0.1", "--tc", "0.2"});
  REQUIRE(tree.code == 0);
  const auto tdoc = nlohmann::json::parse(tree.out);
  CHECK(tdoc["quantities"]["mu_robber"]["value"].get<double>() ==
        doctest::Approx(2.13903743));
  CHECK(tdoc["quantities"]["tree_regime"]["rsb"]["source"] ==
        "analytic:projected-drift-margin");
}

TEST_CASE("oracle ladder") {
  const auto r = invoke({"oracle", "--chain", "ruin", "--up", "0.3", "--radii",
                         "10,80", "--deterministic"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc["ladder"].size() == 2);
  CHECK(doc["ladder"][1]["conditional_time"]["source"] == "oracle");
  CHECK(doc["ladder"][1]["conditional_time"]["value"].get<double>() ==
        doctest::Approx(2.5).epsilon(1e-6));
  CHECK(doc["analytic"]["mean_hitting_time"]["value"].get<double>() ==
        doctest::Approx(2.5));
}

TEST_CASE("documented command examples") {
  const auto sober = invoke({"simulate", "--game", "grid", "--c", "1", "--r",
                             "0", "--tc", "0", "--tr", "0", "--cop", "CS1",
                             "--robber", "RS", "--start", "3", "--episodes",
                             "1", "--format", "csv"});
  REQUIRE(sober.code == 0);
  CHECK(sober.out.find("\n0,true,3,3,0\n") != std::string::npos);

  const auto bad = invoke({"simulate", "--c", "0.6", "--r", "0.6", "--tc", "0",
                           "--tr", "0"});
  CHECK(bad.code == tipsy::cli::kExitConfig);
  CHECK(bad.err.find("probabilities sum to 1.2 ≠ 1") != std::string::npos);

  const auto endpoint = invoke({"analyze", "--game", "tree", "--Delta", "7",
                                "--delta", "2", "--tr", "0.5"});
  REQUIRE(endpoint.code == 0);
  const auto e = nlohmann::json::parse(endpoint.out);
  CHECK(e["quantities"]["threshold_f"]["value"].get<double>() ==
        doctest::Approx(7.0 / 22));

  const auto null = invoke({"analyze", "--game", "grid", "--c", "1/4", "--r",
                            "1/4", "--t", "1/2"});
  const auto n = nlohmann::json::parse(null.out);
  CHECK(n["quantities"]["regime"]["summary"] == "CopAS, null recurrent");

  const auto t0 = invoke({"analyze", "--game", "tree", "--Delta", "5",
                          "--delta", "3"});
  const auto t = nlohmann::json::parse(t0.out);
  CHECK(t["quantities"]["crossover_t0"]["value"] == 0.0);

  const auto cell = invoke({"phase", "--Delta", "7", "--delta", "2", "--tr-min",
                            "0.1", "--tr-max", "0.1", "--tc-min", "0.05",
                            "--tc-max", "0.05", "--episodes", "5",
                            "--horizon", "500"});
  REQUIRE(cell.code == 0);
  CHECK(std::count(cell.out.begin(), cell.out.end(), '\n') == 2);
}
