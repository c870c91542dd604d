#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsbqsci/hsbqsci.hpp"

namespace {

using namespace hsbqsci;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

int cmd_run(const std::string& config_path, std::string report, std::string kv, std::string dets, bool quiet) {
  const auto cfg = read_config(config_path);
  if (report.empty()) report = cfg.report_path;
  if (kv.empty()) kv = cfg.kv_path;
  if (dets.empty()) dets = cfg.determinants_path;
  const auto res = run_pipeline(cfg);
  if (!quiet) write_report_text(std::cout, res.report);
  if (!report.empty()) {
    auto out = open_out(report);
    write_report_text(out, res.report);
  }
  if (!kv.empty()) {
    auto out = open_out(kv);
    write_report_kv(out, res.report);
  }
  if (!dets.empty()) {
    auto out = open_out(dets);
    write_eigenpair_report(out, res.final_state);
  }
  return 0;
}

int cmd_casci(const std::string& path, bool no_filter, std::size_t roots, const std::string& backend,
              std::size_t show) {
  const auto ints = read_fcidump(path);
  const auto cas = enumerate_cas_determinants(ints, !no_filter);
  const auto results = diagonalize_subspace(build_subspace_matrix(cas, ints), roots, parse_backend(backend));
  std::printf("determinants %zu\n", cas.size());
  const auto hf = reference_determinant(ints);
  std::printf("E(HF)        %.12f\n", slater_condon_element(hf, hf, ints));
  for (std::size_t r = 0; r < results.size(); ++r)
    std::printf("root %zu       %.12f  <S^2> = %.8f\n", r, results[r].energy, s_squared_expectation(results[r]));
  if (show > 0) {
    std::ostringstream rep;
    write_eigenpair_report(rep, results.front());
    std::istringstream lines(rep.str());
    std::string line;
    for (std::size_t i = 0; i <= show && std::getline(lines, line); ++i) std::cout << line << '\n';
  }
  return 0;
}

int cmd_truncate(const std::string& path, std::vector<std::size_t> ms) {
  const auto ints = read_fcidump(path);
  if (ms.empty())
    for (std::size_t m = ints.n_qubits(); m >= 2; m -= 2) ms.push_back(m);
  const auto rows = truncation_scan(ints, ms);
  std::printf("%4s %12s %12s %12s %18s %12s\n", "m", "kept_terms", "total_terms", "pauli_terms", "ground_energy",
              "fidelity");
  for (const auto& r : rows)
    std::printf("%4zu %12zu %12zu %12zu %18.10f %12.6f\n", r.m, r.kept_terms, r.total_terms, r.pauli_terms,
                r.ground_energy, r.fidelity);
  return 0;
}

int cmd_sample(const std::string& path, std::size_t k, std::uint64_t shots, std::uint64_t seed, double dt,
               double flip, const std::string& out_path) {
  const auto ints = read_fcidump(path);
  const auto ordered = order_terms(jordan_wigner(ints), OrderingScheme::magnitude);
  auto psi = prepare_determinant_state(reference_determinant(ints), ints.n_qubits());
  for (std::size_t i = 0; i < k; ++i) trotter_step(psi, ordered, dt);
  auto counts = sample_counts(psi, shots, seed);
  if (flip > 0.0) counts = inject_readout_noise(counts, {flip, derive_seed(seed, 1)});
  if (out_path.empty()) {
    write_counts(std::cout, counts);
  } else {
    auto out = open_out(out_path);
    write_counts(out, counts);
  }
  return 0;
}

int cmd_baseline(const std::string& path, std::size_t n_dets, std::uint64_t seed, std::size_t trials) {
  const auto ints = read_fcidump(path);
  const double e_cas = casci(ints, true).energy;
  std::printf("E(CASCI) %.12f\n", e_cas);
  std::printf("%6s %8s %18s %12s %10s\n", "trial", "n_dets", "energy", "error", "kcal/mol");
  for (std::size_t t = 0; t < trials; ++t) {
    const auto set = random_baseline_select(ints, n_dets, derive_seed(seed, t));
    const double e = solve_subspace(set, ints).energy;
    std::printf("%6zu %8zu %18.10f %12.3e %10.4f\n", t, set.size(), e, e - e_cas, (e - e_cas) * kKcalPerHartree);
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& files, const std::vector<std::string>& gap) {
  for (const auto& f : files) {
    const auto r = read_report_kv_file(f);
    std::cout << "== " << f << '\n';
    write_report_text(std::cout, r, false);
  }
  if (!gap.empty()) {
    const auto s = read_report_kv_file(gap.at(0));
    const auto t = read_report_kv_file(gap.at(1));
    const auto g = singlet_triplet_gap(s.final_energy, t.final_energy);
    std::printf("dE(S-T) %.10f Eh  %.4f kcal/mol\n", g.hartree, g.kcal_per_mol);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-evolved sampling with selected configuration interaction"};
  app.require_subcommand(1);

  std::string config_path, report, kv, dets;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  run->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  run->add_option("--report", report, "Write the text report here");
  run->add_option("--kv", kv, "Write the key/value report here");
  run->add_option("--determinants", dets, "Write the final eigenpair report here");
  run->add_flag("-q,--quiet", quiet);

  std::string fcidump;
  bool no_filter = false;
  std::size_t roots = 1, show = 0;
  std::string backend = "auto";
  auto* cas = app.add_subcommand("casci", "Complete-active-space CI reference");
  cas->add_option("fcidump", fcidump)->required()->check(CLI::ExistingFile);
  cas->add_flag("--no-irrep-filter", no_filter);
  cas->add_option("--roots", roots)->check(CLI::PositiveNumber);
  cas->add_option("--backend", backend)->check(CLI::IsMember({"auto", "dense", "davidson"}));
  cas->add_option("--show", show, "Print the leading coefficients");

  std::vector<std::size_t> ms;
  auto* trunc = app.add_subcommand("truncate", "Locality truncation term counts and fidelities");
  trunc->add_option("fcidump", fcidump)->required()->check(CLI::ExistingFile);
  trunc->add_option("--m", ms, "Locality bounds (default: every even m)");

  std::size_t k = 1, n_dets = 1, trials = 5;
  std::uint64_t shots = 10000, seed = 0;
  double dt = 1.0, flip = 0.0;
  std::string out_path;
  auto* sample = app.add_subcommand("sample", "Sample the k-th Trotterized state from the reference");
  sample->add_option("fcidump", fcidump)->required()->check(CLI::ExistingFile);
  sample->add_option("--k", k);
  sample->add_option("--shots", shots)->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed);
  sample->add_option("--dt", dt);
  sample->add_option("--flip", flip)->check(CLI::Range(0.0, 1.0));
  sample->add_option("-o,--out", out_path);

  auto* base = app.add_subcommand("baseline", "Random symmetry-allowed determinant selection");
  base->add_option("fcidump", fcidump)->required()->check(CLI::ExistingFile);
  base->add_option("--n-dets", n_dets)->required();
  base->add_option("--seed", seed);
  base->add_option("--trials", trials);

  std::vector<std::string> files, gap;
  auto* rep = app.add_subcommand("report", "Summarize key/value run reports");
  rep->add_option("files", files)->check(CLI::ExistingFile);
  rep->add_option("--gap", gap, "Singlet and triplet reports")->expected(2)->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, report, kv, dets, quiet);
    if (*cas) return cmd_casci(fcidump, no_filter, roots, backend, show);
    if (*trunc) return cmd_truncate(fcidump, ms);
    if (*sample) return cmd_sample(fcidump, k, shots, seed, dt, flip, out_path);
    if (*base) return cmd_baseline(fcidump, n_dets, seed, trials);
    if (*rep) return cmd_report(files, gap);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
