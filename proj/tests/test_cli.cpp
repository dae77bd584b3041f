#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "cli_runner.hpp"

using nlohmann::json;

TEST(Cli, SpectrumOfQubit) {
  auto r = cli::run("spectrum " + cli::data("rho_07_03.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["mults"], json::parse("[1,1]"));
  EXPECT_NEAR(j["values"][0].get<double>(), 0.7, 1e-15);
  EXPECT_EQ(j["frame"]["n"], 2);
}

TEST(Cli, SpectrumOfMaximallyMixed) {
  auto r = cli::run("spectrum " + cli::data("maximally_mixed_2.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["mults"], json::parse("[2]"));
  EXPECT_NEAR(j["values"][0].get<double>(), 0.5, 1e-15);
}

TEST(Cli, IdentityObservablesGiveZeros) {
  auto r = cli::run("uncertainty " + cli::data("rho_07_03.json") + " " + cli::data("identity_2.json") + " " +
                    cli::data("identity_2.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  for (const char* key : {"deltaA", "deltaB", "product", "geometric_bound", "rs_bound"})
    EXPECT_EQ(j[key].get<double>(), 0.0) << key;
}

TEST(Cli, KahlerQubit) {
  auto r = cli::run("kahler " + cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json") + " " +
                    cli::data("sigma_y.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["omega"].get<double>(), 0.8, 1e-14);
  EXPECT_NEAR(j["h"]["im"].get<double>(), 0.8, 1e-14);
  EXPECT_NEAR(j["h"]["re"].get<double>(), 0.0, 1e-14);
  EXPECT_NEAR(j["h_blocks"]["im"].get<double>(), 0.8, 1e-14);
}

TEST(Cli, UncertaintyQubitAndCsv) {
  const auto csv = cli::scratch("unc.csv");
  std::filesystem::remove(csv);
  const std::string args = "uncertainty " + cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json") +
                           " " + cli::data("sigma_y.json") + " --csv " + csv.string();
  auto r = cli::run(args);
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_NEAR(j["geometric_bound"].get<double>(), 0.4, 1e-14);
  EXPECT_NEAR(j["rs_bound"].get<double>(), 0.4, 1e-14);
  EXPECT_NEAR(j["product"].get<double>(), 1.0, 1e-14);
  cli::run(args);
  const auto text = cli::slurp(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(Cli, MaximallyMixedBoundsZero) {
  auto r = cli::run("uncertainty " + cli::data("maximally_mixed_2.json") + " " + cli::data("sigma_x.json") +
                    " " + cli::data("sigma_y.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["geometric_bound"].get<double>(), 0.0);
  EXPECT_NEAR(j["rs_bound"].get<double>(), 0.0, 1e-15);
}

TEST(Cli, TangentOutput) {
  auto r = cli::run("tangent " + cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json"));
  ASSERT_EQ(r.code, 0);
  auto j = json::parse(r.out);
  for (const char* key : {"tangent", "kernel_part", "complement_part", "lift"}) EXPECT_TRUE(j.contains(key));
  EXPECT_NEAR(j["tangent"]["im"][0][1].get<double>(), 0.4, 1e-15);
}

TEST(Cli, EvolveLines) {
  auto r = cli::run("evolve " + cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json") +
                    " --t-max 1 --steps 4");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

TEST(Cli, HbarFlagScalesOmega) {
  auto r = cli::run("--hbar 2 kahler " + cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json") + " " +
                    cli::data("sigma_y.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["omega"].get<double>(), 0.4, 1e-14);
}

TEST(Cli, ConfigFileThenFlagPrecedence) {
  const auto cfg = cli::scratch("cfg.json");
  std::ofstream(cfg) << R"({"hbar": 4.0})";
  const std::string files =
      cli::data("rho_07_03.json") + " " + cli::data("sigma_x.json") + " " + cli::data("sigma_y.json");
  auto from_file = cli::run("--config " + cfg.string() + " kahler " + files);
  ASSERT_EQ(from_file.code, 0);
  EXPECT_NEAR(json::parse(from_file.out)["omega"].get<double>(), 0.2, 1e-14);
  auto flag_wins = cli::run("--config " + cfg.string() + " --hbar 2 kahler " + files);
  EXPECT_NEAR(json::parse(flag_wins.out)["omega"].get<double>(), 0.4, 1e-14);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli::run("spectrum " + cli::data("not_psd.json")).code, 3);
  EXPECT_EQ(cli::run("spectrum " + cli::data("not_hermitian.json")).code, 3);
  EXPECT_EQ(cli::run("spectrum /nonexistent.json").code, 2);
  EXPECT_EQ(cli::run("nosuchcommand").code, 2);
  EXPECT_EQ(cli::run("").code, 2);
  EXPECT_EQ(cli::run("kahler " + cli::data("rho_07_03.json") + " " + cli::data("qutrit_mixed.json") + " " +
                     cli::data("sigma_y.json"))
                .code,
            2);
  EXPECT_EQ(cli::run("--hbar -1 spectrum " + cli::data("rho_07_03.json")).code, 2);
  EXPECT_EQ(cli::run("sweep --qubit-grid 0:1").code, 2);
  EXPECT_EQ(cli::run("checks --samples 5 --dims 2,x").code, 2);
}

TEST(Cli, ChecksPassAndFailOnPerturbedJ) {
  auto ok = cli::run("checks --quick --samples 40 --dims 2,3,4");
  ASSERT_EQ(ok.code, 0);
  auto j = json::parse(ok.out);
  ASSERT_TRUE(j.is_array());
  for (const auto& r : j) EXPECT_TRUE(r["passed"].get<bool>()) << r["check"];
  auto bad = cli::run("checks --samples 5 --perturb-J 1e-3");
  EXPECT_EQ(bad.code, 5);
  auto jb = json::parse(bad.out);
  EXPECT_FALSE(jb[0]["passed"].get<bool>());
  EXPECT_TRUE(jb[0]["worst_case"].contains("point"));
}

TEST(Cli, ChecksDeterministicUnderSeed) {
  auto a = cli::run("--seed 5 checks --samples 30");
  auto b = cli::run("checks --samples 30", "ORBIT_KAHLER_SEED=5");
  auto c = cli::run("--seed 6 checks --samples 30");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SweepDeterministicAndQubitValues) {
  auto a = cli::run("--seed 3 sweep --qubit-grid 0:1:51 --a " + cli::data("sigma_x.json") + " --b " +
                    cli::data("sigma_y.json"));
  ASSERT_EQ(a.code, 0);
  std::istringstream in(a.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p1,p2,deltaA,deltaB,product,geom_bound,rs_bound");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 7u);
    EXPECT_NEAR(v[5], v[0] - v[1], 1e-12);
    EXPECT_NEAR(v[4], 1.0, 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 51);
  const auto out = cli::scratch("sweep.csv");
  ASSERT_EQ(cli::run("--seed 3 sweep --grid " + cli::data("spectra_small.json") + " --random-frame -o " +
                     out.string())
                .code,
            2);  // spectra of different dimension
}

TEST(Cli, SweepSpectrumGrid) {
  const auto grid = cli::scratch("grid.json");
  std::ofstream(grid) << R"([{"values":[0.5,0.25],"mults":[1,2]},{"values":[0.6,0.2],"mults":[1,2]}])";
  auto a = cli::run("--seed 9 sweep --random-frame --grid " + grid.string());
  auto b = cli::run("--seed 9 sweep --random-frame --grid " + grid.string());
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 3);
}
