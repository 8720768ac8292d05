#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "stabcert/certificate.hpp"
#include "stabcert/config.hpp"
#include "stabcert/pipeline.hpp"

using namespace stabcert;
using R = Rational;
namespace fs = std::filesystem;

namespace {

RunConfig light() {
  RunConfig c;
  c.lemma32_samples = 500;
  c.barrier_samples = 50;
  c.quadform_samples = 200;
  return c;
}

Certificate tiny(CheckStatus st, const std::string& command = "verify") {
  Certificate c;
  c.command = command;
  Section s;
  s.name = "x";
  s.check({"c", CheckKind::exact, "1/2", R(1, 2), st, ""});
  c.sections.push_back(s);
  return c;
}

}  // namespace

TEST(Config, ParsesKeyValueText) {
  RunConfig run;
  SearchConfig search;
  apply_config(parse_config_text("# comment\n\nC_MS = 2.5\nR=1000\nseed = 7\nseeds = 3, 4\n"
                                 "n = 4\nobjective = epsilon\ndelta0 = 1/2\nbox_b = 0.5, 2\n"),
               run, search);
  EXPECT_DOUBLE_EQ(run.C_MS, 2.5);
  EXPECT_TRUE(run.C_MS_set);
  EXPECT_DOUBLE_EQ(run.R, 1000);
  EXPECT_EQ(run.seed, 7u);
  EXPECT_EQ(search.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(search.n, 4);
  EXPECT_EQ(search.objective, Objective::maximize_epsilon);
  EXPECT_EQ(*search.delta0_fixed, R(1, 2));
  ASSERT_TRUE(search.box.has_value());
  EXPECT_DOUBLE_EQ(search.box->b.lo, 0.5);
  EXPECT_DOUBLE_EQ(search.box->alpha.lo, default_box(4).alpha.lo);
}

TEST(Config, EmptyTextKeepsDefaults) {
  RunConfig run;
  SearchConfig search;
  apply_config(parse_config_text(""), run, search);
  EXPECT_FALSE(run.C_MS_set);
  EXPECT_EQ(run.lemma32_samples, 100000u);
  EXPECT_EQ(run.barrier_samples, 1000u);
  EXPECT_EQ(search.budget, 100000u);
  EXPECT_FALSE(search.box.has_value());
}

TEST(Config, RejectsBadInput) {
  RunConfig run;
  SearchConfig search;
  for (const char* text : {"C_MS = -1", "R = 1", "nonsense = 3", "no equals sign", "seed = x", "n = 2",
                           "objective = fastest", "precision_digits = 20", "box_b = 2, 1", "s = 0",
                           "epsilon1_grid = 3:1/2", "delta0 = -1/2", "budget = 0"})
    EXPECT_THROW(apply_config(parse_config_text(text), run, search), ConfigError) << text;
  EXPECT_THROW(load_config_file("/nonexistent/config.txt", run, search), ConfigError);
}

TEST(Config, EpsilonGridParses) {
  RunConfig run;
  SearchConfig search;
  apply_config(parse_config_text("epsilon1_grid = 3:1/2:1; 4:3/4:1"), run, search);
  ASSERT_EQ(run.epsilon1_grid.size(), 2u);
  EXPECT_EQ(run.epsilon1_grid[1].q, R(3, 4));
}

TEST(ExitCode, PureMapping) {
  EXPECT_EQ(exit_code(tiny(CheckStatus::pass), false), kExitPass);
  EXPECT_EQ(exit_code(tiny(CheckStatus::fail), true), kExitFail);
  EXPECT_EQ(exit_code(tiny(CheckStatus::discrepancy), false), kExitPass);
  EXPECT_EQ(exit_code(tiny(CheckStatus::discrepancy), true), kExitDiscrepancy);
  EXPECT_EQ(exit_code(tiny(CheckStatus::not_applicable), true), kExitPass);
  EXPECT_EQ(exit_code(tiny(CheckStatus::pass, "optimize"), false), kExitUncertified);
  EXPECT_EQ(overall_status(tiny(CheckStatus::discrepancy)), "pass_with_discrepancies");
}

TEST(ExitCode, ReplayFromSerializedCertificate) {
  for (auto st : {CheckStatus::pass, CheckStatus::fail, CheckStatus::discrepancy})
    for (bool strict : {false, true}) {
      const auto c = tiny(st);
      EXPECT_EQ(exit_code(parse_certificate(serialize(c)), strict), exit_code(c, strict));
    }
}

TEST(CertificateJson, RoundTripAndStringValues) {
  const auto c = verify_published_row(4, light());
  const std::string text = serialize(c);
  const auto back = parse_certificate(text);
  EXPECT_EQ(back, c);
  EXPECT_EQ(serialize(back), text);
  const auto j = Json::parse(text);
  EXPECT_EQ(j["schema_version"], "1");
  for (const auto& s : j["sections"]) {
    for (const auto& [k, v] : s["values"].items()) EXPECT_TRUE(v.is_string()) << k;
    for (const auto& [k, v] : s["approximate"].items()) EXPECT_TRUE(v.contains("digits")) << k;
  }
}

TEST(CertificateJson, RejectsOtherSchemaVersion) {
  auto j = to_json(tiny(CheckStatus::pass));
  j["schema_version"] = "2";
  EXPECT_THROW(certificate_from_json(j), std::invalid_argument);
  EXPECT_THROW(parse_certificate("{"), std::exception);
}

TEST(WriteAtomic, ReplacesTargetAndLeavesNoTemporary) {
  const fs::path dir = fs::temp_directory_path() / ("stabcert_atomic_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path target = dir / "out.json";
  write_atomic(target, "old");
  write_atomic(target, serialize(tiny(CheckStatus::pass)));
  EXPECT_EQ(read_certificate(target), tiny(CheckStatus::pass));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
  EXPECT_THROW(write_atomic(dir / "missing" / "x.json", "y"), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Pipeline, VerifyRowRecordsTargetsAndFlags) {
  const auto c = verify_published_row(3, light());
  ASSERT_EQ(c.sections.size(), 1u);
  const auto& s = c.sections.front();
  EXPECT_EQ(*s.find_value("epsilon"), "9/11");
  EXPECT_EQ(*s.find_value("L_max"), "71/11");
  EXPECT_EQ(*s.find_value("gamma0_bare"), "77/142");
  EXPECT_EQ(*s.find_value("gamma0_with_ratio"), "847/1704");
  EXPECT_EQ(s.published_targets.size(), 4u);
  for (const auto& t : s.published_targets) EXPECT_TRUE(t.match) << t.quantity;
  ASSERT_FALSE(c.flags.empty());
  EXPECT_NE(c.flags.front().find("gamma0 convention"), std::string::npos);
  EXPECT_EQ(exit_code(c, true), kExitPass);
}

TEST(Pipeline, VerifyAllSectionsAndOptionalDeGiorgi) {
  auto cfg = light();
  const auto c = verify_all(cfg);
  for (const char* name : {"row n=3", "row n=4", "row n=5", "delta1", "critical_exponent", "caccioppoli"})
    EXPECT_NE(c.find_section(name), nullptr) << name;
  EXPECT_EQ(c.find_section("degiorgi"), nullptr);
  cfg.C_MS_set = true;
  const auto d = verify_all(cfg);
  ASSERT_NE(d.find_section("degiorgi"), nullptr);
  EXPECT_EQ(exit_code(d, true), kExitPass);
}

TEST(Pipeline, DeGiorgiGridOutsideWindowFails) {
  auto cfg = light();
  cfg.C_MS_set = true;
  cfg.epsilon1_grid = {{3, R(1, 4), R(1)}};
  const auto s = degiorgi_section(cfg);
  EXPECT_EQ(s.find_check("q_window_0")->status, CheckStatus::fail);
}

TEST(Pipeline, EnvironmentRecordsSampleCounts) {
  const auto c = verify_published_row(5, light());
  auto env = [&](const std::string& k) {
    for (const auto& [kk, v] : c.environment)
      if (kk == k) return v;
    return std::string("missing");
  };
  EXPECT_EQ(env("lemma32_samples"), "500");
  EXPECT_EQ(env("barrier_samples"), "50");
  EXPECT_NE(env("seed"), "missing");
  EXPECT_NE(env("C_MS_source"), "missing");
}

TEST(Pipeline, RecursionCertificate) {
  const auto r = recursion_simulate(0.25, 1, 1, 4, 10);
  const auto c = recursion_certificate(r, 4, 0.25, 1, 1);
  EXPECT_EQ(exit_code(c, true), kExitPass);
  EXPECT_EQ(*c.sections.front().find_value("tends_to_zero"), "true");
}
