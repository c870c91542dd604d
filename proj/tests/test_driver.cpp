#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "hsbqsci/hsbqsci.hpp"
#include "oracles.hpp"

using namespace hsbqsci;

namespace {

RunConfig h2o_config(std::size_t k_max, std::uint64_t shots, std::uint64_t seed) {
  RunConfig cfg;
  cfg.integrals_path = oracle::data("h2o.fcidump");
  cfg.k_max = k_max;
  cfg.shots = shots;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Config, ParsesEverySection) {
  const auto cfg = parse_config_string(R"(
# comment line
integrals = ints/h2o.fcidump
dt = 0.5
k_max = 3
shots = 2000   # trailing comment
seed = 17
ordering = lexicographic
locality = 8
spin_completion = false
irrep_filter = yes
backend = dense
casci = off

[initial_state]
det = 1.0 hf
det = -0.5 2a0b2
seed = 99

[initial_state]
det = 1 22200

[noise]
flip_prob = 0.01
seed = 3

[sccr]
max_iterations = 4

[output]
report = out/report.txt
kv = /tmp/r.kv
)",
                                       "/base");
  EXPECT_EQ(cfg.integrals_path, "/base/ints/h2o.fcidump");
  EXPECT_DOUBLE_EQ(cfg.dt, 0.5);
  EXPECT_EQ(cfg.k_max, 3u);
  EXPECT_EQ(cfg.shots, 2000u);
  EXPECT_EQ(cfg.seed, 17u);
  EXPECT_EQ(cfg.ordering, OrderingScheme::integral_lexicographic);
  EXPECT_EQ(cfg.locality, std::optional<std::size_t>(8));
  EXPECT_FALSE(cfg.spin_completion);
  EXPECT_TRUE(cfg.irrep_filter);
  EXPECT_EQ(cfg.backend, Backend::dense);
  EXPECT_FALSE(cfg.compute_casci);
  ASSERT_EQ(cfg.initial_states.size(), 2u);
  ASSERT_EQ(cfg.initial_states[0].terms.size(), 2u);
  EXPECT_FALSE(cfg.initial_states[0].terms[0].det);
  EXPECT_EQ(*cfg.initial_states[0].terms[1].det, Determinant::from_occupation_string("2a0b2"));
  EXPECT_DOUBLE_EQ(cfg.initial_states[0].terms[1].coefficient, -0.5);
  EXPECT_EQ(cfg.initial_states[0].seed, std::optional<std::uint64_t>(99));
  EXPECT_FALSE(cfg.initial_states[1].seed);
  ASSERT_TRUE(cfg.noise);
  EXPECT_DOUBLE_EQ(cfg.noise->flip_prob, 0.01);
  EXPECT_EQ(cfg.noise->seed, 3u);
  EXPECT_TRUE(cfg.sccr);
  EXPECT_EQ(cfg.sccr_max_iterations, 4u);
  EXPECT_EQ(cfg.report_path, "/base/out/report.txt");
  EXPECT_EQ(cfg.kv_path, "/tmp/r.kv");
}

TEST(Config, Defaults) {
  const auto cfg = parse_config_string("integrals = x.fcidump\n");
  EXPECT_DOUBLE_EQ(cfg.dt, 1.0);
  EXPECT_EQ(cfg.k_max, 10u);
  EXPECT_EQ(cfg.shots, 10000u);
  EXPECT_FALSE(cfg.noise);
  EXPECT_FALSE(cfg.sccr);
  EXPECT_TRUE(cfg.spin_completion);
  EXPECT_TRUE(cfg.initial_states.empty());
  EXPECT_FALSE(parse_config_string("integrals = x\n[sccr]\nenabled = false\n").sccr);
}

TEST(Config, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_config_string(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return 999;
  };
  EXPECT_EQ(line_of("integrals = x\nshots = lots\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\nshots = -5\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\n\nbogus = 1\n"), 3u);
  EXPECT_EQ(line_of("integrals = x\n[weird]\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\n[noise]\n[noise]\n"), 3u);
  EXPECT_EQ(line_of("integrals = x\n[initial_state]\ndet = 1.0\n"), 3u);
  EXPECT_EQ(line_of("integrals = x\n[initial_state]\ndet = 1.0 2x\n"), 3u);
  EXPECT_EQ(line_of("integrals = x\nno equals sign\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\n[noise\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\nordering = random\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\nspin_completion = maybe\n"), 2u);
  EXPECT_EQ(line_of("integrals = x\nseed =\n"), 2u);
  // Whole-document checks report line 0.
  EXPECT_EQ(line_of("shots = 5\n"), 0u);
  EXPECT_EQ(line_of("integrals = x\nk_max = 0\n"), 0u);
  EXPECT_THROW(parse_config_string("integrals = x\n[noise]\nflip_prob = 2\n"), std::invalid_argument);
  EXPECT_EQ(line_of("integrals = x\n[initial_state]\n"), 0u);
  EXPECT_EQ(line_of("integrals = x\n[initial_state]\ndet = 0 hf\n"), 0u);
  EXPECT_THROW(read_config("/nonexistent/run.conf"), ConfigError);
}

TEST(Config, ShippedConfigsResolveData) {
  for (const char* name : {"h2o_k1.conf", "h2o_k10.conf", "benzene_s0.conf", "benzene_t1.conf", "h2o_noisy_sccr.conf"}) {
    const auto cfg = read_config(std::string(HSBQSCI_CONFIG_DIR) + "/" + name);
    EXPECT_TRUE(std::filesystem::exists(cfg.integrals_path)) << name;
  }
}

TEST(Pipeline, ReportIsDeterministic) {
  const auto cfg = h2o_config(2, 3000, 4);
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  EXPECT_EQ(report_kv_string(a.report, false), report_kv_string(b.report, false));
  EXPECT_EQ(a.counts, b.counts);
  auto other = cfg;
  other.seed = 5;
  EXPECT_NE(run_pipeline(other).counts, a.counts);
}

TEST(Pipeline, StepInvariants) {
  const auto res = run_pipeline(h2o_config(4, 4000, 2));
  const auto& r = res.report;
  ASSERT_EQ(r.steps.size(), 4u);
  std::size_t prev = 0;
  double prev_e = std::numeric_limits<double>::infinity();
  for (const auto& s : r.steps) {
    EXPECT_EQ(s.shots, 4000u);
    EXPECT_LE(s.usable_shots, s.shots);
    EXPECT_GE(s.n_dets, prev);
    EXPECT_LE(s.energy, prev_e + 1e-12);
    EXPECT_GE(s.energy, *r.casci_energy - 1e-10);
    EXPECT_NEAR(s.s_squared, 0.0, 1e-8);
    prev = s.n_dets;
    prev_e = s.energy;
  }
  EXPECT_EQ(r.final_dets, res.final_state.basis.size());
  EXPECT_EQ(r.casci_dets, std::optional<std::size_t>(100));
  EXPECT_TRUE(is_spin_complete(res.final_state.basis));
  EXPECT_TRUE(res.final_state.basis.contains(reference_determinant(read_fcidump(oracle::data("h2o.fcidump")))));
  EXPECT_NEAR(r.hf_energy, slater_condon_element({0b111, 0b111}, {0b111, 0b111}, read_fcidump(oracle::data("h2o.fcidump"))), 0.0);
}

TEST(Pipeline, MultipleStatesUnionTheirSamples) {
  const auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  auto make_state = [](const std::string& occ, std::uint64_t seed) {
    InitialStateSpec s;
    s.terms.push_back({1.0, Determinant::from_occupation_string(occ)});
    s.seed = seed;
    return s;
  };
  auto both = h2o_config(1, 2000, 0);
  both.compute_casci = false;
  both.initial_states = {make_state("22200", 11), make_state("22020", 12)};
  auto only_a = both, only_b = both;
  only_a.initial_states = {both.initial_states[0]};
  only_b.initial_states = {both.initial_states[1]};
  const auto rb = run_pipeline(both, ints);
  const auto ra = run_pipeline(only_a, ints);
  const auto rc = run_pipeline(only_b, ints);
  auto merged = ra.counts[0];
  merged.merge(rc.counts[0]);
  EXPECT_EQ(rb.counts[0], merged);
  auto union_set = ra.final_state.basis;
  union_set.merge(rc.final_state.basis);
  EXPECT_EQ(rb.final_state.basis, spin_complete(union_set));
  EXPECT_EQ(rb.report.n_initial_states, 2u);
  EXPECT_EQ(rb.report.steps[0].shots, 4000u);
}

TEST(Pipeline, SccrWithoutNoiseAddsNothingToCleanCounts) {
  auto plain = h2o_config(2, 5000, 3);
  auto sccr = plain;
  sccr.sccr = true;
  const auto a = run_pipeline(plain);
  const auto b = run_pipeline(sccr);
  EXPECT_TRUE(b.final_state.basis.includes(a.final_state.basis));
  bool clean = true;
  for (const auto& s : a.report.steps) clean = clean && s.usable_shots == s.shots;
  if (clean) {
    EXPECT_EQ(a.final_state.basis, b.final_state.basis);
  }
  EXPECT_LE(b.report.final_energy, a.report.final_energy + 1e-12);
  for (const auto& s : b.report.steps) EXPECT_GE(s.sccr_iterations, 1u);
}

TEST(Pipeline, RejectsBadInitialState) {
  auto cfg = h2o_config(1, 100, 1);
  InitialStateSpec s;
  s.terms.push_back({1.0, Determinant::from_occupation_string("22000")});
  cfg.initial_states = {s};
  EXPECT_THROW(run_pipeline(cfg), std::invalid_argument);
}

TEST(Pipeline, KvRoundTrip) {
  const auto r = run_pipeline(h2o_config(2, 1000, 6)).report;
  std::istringstream in(report_kv_string(r));
  const auto back = read_report_kv(in);
  EXPECT_EQ(report_kv_string(back), report_kv_string(r));
  EXPECT_EQ(back.steps, r.steps);
  EXPECT_EQ(back.final_energy, r.final_energy);
  std::istringstream bad("system = x\n");
  EXPECT_THROW(read_report_kv(bad), std::runtime_error);
  std::ostringstream text;
  write_report_text(text, r);
  EXPECT_NE(text.str().find("final dets"), std::string::npos);
}

TEST(Reporting, Percentages) {
  EXPECT_DOUBLE_EQ(*percent_determinants(28, 100), 28.0);
  EXPECT_FALSE(percent_determinants(28, std::nullopt));
  EXPECT_DOUBLE_EQ(*percent_correlation(-1.0, -1.5, -2.0), 50.0);
  EXPECT_FALSE(percent_correlation(-1.0, -1.0, -1.0));
  EXPECT_FALSE(percent_correlation(-1.0, -1.0, std::nullopt));
  StepReport s;
  s.energy = -1.5;
  s.n_dets = 7;
  const auto r = report_results({}, {s}, {-1.0, -2.0, 14});
  EXPECT_DOUBLE_EQ(*r.pct_dets, 50.0);
  EXPECT_DOUBLE_EQ(*r.pct_ecorr, 50.0);
  EXPECT_THROW(report_results({}, {}, {}), std::invalid_argument);
}

TEST(Reporting, SingletTripletGap) {
  const auto g = singlet_triplet_gap(-1.0, -1.1);
  EXPECT_NEAR(g.hartree, 0.1, 1e-15);
  EXPECT_NEAR(g.kcal_per_mol, 62.75094740631, 1e-9);
}

TEST(Baseline, SelectionProperties) {
  const auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  const auto hf = reference_determinant(ints);
  EXPECT_EQ(random_baseline_select(ints, 1, 3), DeterminantSet{hf});
  EXPECT_EQ(random_baseline_select(ints, 100, 3), enumerate_cas_determinants(ints, true));
  EXPECT_THROW(random_baseline_select(ints, 101, 3), std::invalid_argument);
  EXPECT_THROW(random_baseline_select(ints, 0, 3), std::invalid_argument);
  const auto a = random_baseline_select(ints, 40, 8);
  EXPECT_EQ(a.size(), 40u);
  EXPECT_TRUE(a.contains(hf));
  EXPECT_EQ(a, random_baseline_select(ints, 40, 8));
  EXPECT_NE(a, random_baseline_select(ints, 40, 9));
}

TEST(Baseline, SelectionIsUniform) {
  // Each non-reference determinant is chosen with probability 9/99.
  const auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  std::map<Determinant, int> hits;
  const int trials = 3000;
  for (int t = 0; t < trials; ++t)
    for (const auto& d : random_baseline_select(ints, 10, static_cast<std::uint64_t>(t))) ++hits[d];
  const double p = 9.0 / 99.0, sigma = std::sqrt(p * (1 - p) / trials);
  for (const auto& [d, n] : hits) {
    if (d == reference_determinant(ints)) {
      EXPECT_EQ(n, trials);
      continue;
    }
    EXPECT_NEAR(static_cast<double>(n) / trials, p, 4.5 * sigma);
  }
  EXPECT_EQ(hits.size(), 100u);
}

TEST(Truncation, ScanEndpoints) {
  const auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  const auto rows = truncation_scan(ints, {10, 6, 2});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].fidelity, 1.0);
  EXPECT_EQ(rows[0].kept_terms, rows[0].total_terms);
  EXPECT_NEAR(rows[0].ground_energy, casci(ints, false).energy, 1e-10);
  for (const auto& r : rows) {
    EXPECT_GE(r.fidelity, 0.0);
    EXPECT_LE(r.fidelity, 1.0);
  }
  EXPECT_GE(rows[0].kept_terms, rows[1].kept_terms);
  EXPECT_GE(rows[1].kept_terms, rows[2].kept_terms);
}
