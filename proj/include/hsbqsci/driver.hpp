#pragma once

// End-to-end pipeline: evolve -> sample -> recover -> complete ->
// diagonalize, with per-step reports on the accumulated determinant set.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "determinant.hpp"
#include "integrals.hpp"
#include "pauli.hpp"
#include "recovery.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "sci.hpp"
#include "statevector.hpp"

namespace hsbqsci {

inline constexpr double kKcalPerHartree = 627.5094740631;
inline constexpr double kChemicalPrecision = 1.6e-3;

struct StepReport {
  std::size_t k = 0;
  std::uint64_t shots = 0;
  std::uint64_t usable_shots = 0;
  double reference_frequency = 0.0;
  std::size_t recovered_dets = 0;  // from this step's counts alone, before completion
  std::size_t n_dets = 0;          // accumulated basis after completion
  double energy = 0.0;
  double s_squared = 0.0;
  std::size_t sccr_iterations = 0;

  bool operator==(const StepReport&) const = default;
};

struct StageTimings {
  double evolve = 0.0;
  double sample = 0.0;
  double recover = 0.0;
  double diagonalize = 0.0;
  double casci = 0.0;
};

struct RunReport {
  std::string system;
  std::size_t n_orb = 0;
  std::size_t n_alpha = 0;
  std::size_t n_beta = 0;
  std::size_t n_initial_states = 0;
  std::size_t pauli_terms = 0;
  std::vector<StepReport> steps;

  double hf_energy = 0.0;
  std::optional<double> casci_energy;
  std::optional<std::size_t> casci_dets;

  double final_energy = 0.0;
  std::size_t final_dets = 0;
  double final_s_squared = 0.0;
  std::optional<double> pct_dets;
  std::optional<double> pct_ecorr;

  StageTimings timings;
};

// ---------------------------------------------------------------------------
// Reporting

struct ReferenceEnergies {
  double hf_energy = 0.0;
  std::optional<double> casci_energy;
  std::optional<std::size_t> casci_dets;
};

inline std::optional<double> percent_determinants(std::size_t n_dets, std::optional<std::size_t> cas_dets) {
  if (!cas_dets || *cas_dets == 0) return std::nullopt;
  return 100.0 * static_cast<double>(n_dets) / static_cast<double>(*cas_dets);
}

/// Undefined when the reference carries no correlation energy.
inline std::optional<double> percent_correlation(double e_hf, double e, std::optional<double> e_casci) {
  if (!e_casci || e_hf == *e_casci) return std::nullopt;
  return 100.0 * (e_hf - e) / (e_hf - *e_casci);
}

/// Fills the final and percentage fields from the per-step results.
inline RunReport report_results(RunReport base, const std::vector<StepReport>& steps, const ReferenceEnergies& refs) {
  if (steps.empty()) throw std::invalid_argument("report_results: no steps");
  base.steps = steps;
  base.hf_energy = refs.hf_energy;
  base.casci_energy = refs.casci_energy;
  base.casci_dets = refs.casci_dets;
  base.final_energy = steps.back().energy;
  base.final_dets = steps.back().n_dets;
  base.final_s_squared = steps.back().s_squared;
  base.pct_dets = percent_determinants(base.final_dets, refs.casci_dets);
  base.pct_ecorr = percent_correlation(refs.hf_energy, base.final_energy, refs.casci_energy);
  return base;
}

struct EnergyGap {
  double hartree = 0.0;
  double kcal_per_mol = 0.0;
};

/// E_S - E_T
inline EnergyGap singlet_triplet_gap(double e_singlet, double e_triplet) {
  const double d = e_singlet - e_triplet;
  return {d, d * kKcalPerHartree};
}

// ---------------------------------------------------------------------------
// Random-selection baseline

/// The reference determinant plus n_dets - 1 determinants drawn uniformly
/// without replacement from the symmetry-allowed pool.
inline DeterminantSet random_baseline_select(const MolecularIntegrals& ints, std::size_t n_dets, std::uint64_t seed) {
  if (n_dets < 1) throw std::invalid_argument("random_baseline_select: n_dets must be >= 1");
  const auto hf = reference_determinant(ints);
  std::vector<Determinant> pool;
  for (const auto& d : enumerate_cas_determinants(ints, true))
    if (d != hf) pool.push_back(d);
  if (n_dets - 1 > pool.size())
    throw std::invalid_argument("random_baseline_select: n_dets = " + std::to_string(n_dets) +
                                " exceeds the pool of " + std::to_string(pool.size() + 1) + " determinants");
  CounterRng rng(seed);
  std::vector<Determinant> chosen{hf};
  for (std::size_t i = 0; i + 1 < n_dets; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
    chosen.push_back(pool[i]);
  }
  return DeterminantSet(std::move(chosen));
}

// ---------------------------------------------------------------------------
// Locality truncation scan

struct TruncationRow {
  std::size_t m = 0;
  std::size_t kept_terms = 0;
  std::size_t total_terms = 0;
  std::size_t pauli_terms = 0;
  double ground_energy = 0.0;
  double fidelity = 0.0;
};

namespace detail {

inline std::pair<double, Eigen::VectorXd> sector_ground_state(const SectorOperator& op) {
  const auto dim = op.basis.size();
  if (dim < kDenseThreshold) {
    const Eigen::MatrixXd m(op.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return {es.eigenvalues()(0), es.eigenvectors().col(0)};
  }
  auto r = davidson(op.matrix, 1);
  return {r.eigenvalues(0), r.eigenvectors.col(0).normalized()};
}

}  // namespace detail

/// Kept-term counts and ground-state fidelity |<psi_m|psi_full>|^2 in the
/// integrals' particle-number sector for each locality bound m.
inline std::vector<TruncationRow> truncation_scan(const MolecularIntegrals& ints, const std::vector<std::size_t>& ms) {
  const auto full = jordan_wigner(ints);
  const auto [e_full, v_full] = detail::sector_ground_state(sector_hamiltonian(full, ints.n_alpha, ints.n_beta));
  std::vector<TruncationRow> rows;
  for (auto m : ms) {
    const auto t = truncate_by_locality(ints, m);
    TruncationRow row{m, t.kept_terms, t.total_terms, t.hamiltonian.size(), e_full, 1.0};
    // An unchanged operator has the same ground state by definition.
    if (!(t.hamiltonian == full)) {
      const auto [e, v] = detail::sector_ground_state(sector_hamiltonian(t.hamiltonian, ints.n_alpha, ints.n_beta));
      const double ov = v.dot(v_full);
      row.ground_energy = e;
      row.fidelity = std::min(1.0, ov * ov);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineResult {
  RunReport report;
  CIResult final_state;
  std::vector<BitstringCounts> counts;  // per step, merged over initial states, after noise
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::vector<std::pair<double, Determinant>> resolve_terms(const InitialStateSpec& s,
                                                                 const MolecularIntegrals& ints) {
  std::vector<std::pair<double, Determinant>> out;
  for (const auto& t : s.terms) {
    const auto d = t.det ? *t.det : reference_determinant(ints);
    if (d.n_alpha() != ints.n_alpha || d.n_beta() != ints.n_beta)
      throw std::invalid_argument("initial state determinant " + d.occupation_string(ints.n_orb) +
                                  " has the wrong particle numbers");
    out.emplace_back(t.coefficient, d);
  }
  return out;
}

}  // namespace detail

/// Seed of initial state `index`: its explicit seed, else derived from the
/// run seed.
inline std::uint64_t state_seed(const RunConfig& cfg, std::size_t index) {
  if (index < cfg.initial_states.size() && cfg.initial_states[index].seed) return *cfg.initial_states[index].seed;
  return derive_seed(cfg.seed, index);
}

inline PipelineResult run_pipeline(const RunConfig& cfg, const MolecularIntegrals& ints) {
  cfg.validate();
  if (ints.n_qubits() > kMaxStateQubits)
    throw std::invalid_argument("run_pipeline: " + std::to_string(ints.n_qubits()) + " qubits exceeds the " +
                                std::to_string(kMaxStateQubits) + "-qubit ceiling");
  using clock = std::chrono::steady_clock;
  RunReport base;
  base.system = cfg.integrals_path;
  base.n_orb = ints.n_orb;
  base.n_alpha = ints.n_alpha;
  base.n_beta = ints.n_beta;
  const std::size_t nq = ints.n_qubits();

  auto t0 = clock::now();
  const PauliSum h = cfg.locality ? truncate_by_locality(ints, *cfg.locality).hamiltonian : jordan_wigner(ints);
  const auto ordered = order_terms(h, cfg.ordering);
  base.pauli_terms = h.size();

  std::vector<InitialStateSpec> states = cfg.initial_states;
  if (states.empty()) states.push_back({{{1.0, std::nullopt}}, std::nullopt});
  base.n_initial_states = states.size();

  // Evolution and sampling.
  std::vector<BitstringCounts> counts(cfg.k_max);
  for (auto& c : counts) c.n_qubits = nq;
  std::vector<std::pair<double, Determinant>> all_terms;
  const EvolutionParams params{cfg.dt, cfg.k_max, cfg.ordering};
  double sample_time = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto terms = detail::resolve_terms(states[s], ints);
    all_terms.insert(all_terms.end(), terms.begin(), terms.end());
    const auto seed = state_seed(cfg, s);
    const auto psi0 = prepare_superposition_state(terms, nq);
    evolve_k_steps(psi0, ordered, params, [&](std::size_t k, const StateVector& psi) {
      const auto ts = clock::now();
      auto c = sample_counts(psi, cfg.shots, derive_seed(seed, k));
      if (cfg.noise) c = inject_readout_noise(c, {cfg.noise->flip_prob, derive_seed(seed ^ cfg.noise->seed, k, 1)});
      counts[k - 1].merge(c);
      sample_time += detail::seconds_since(ts);
    });
  }
  base.timings.sample = sample_time;
  base.timings.evolve = detail::seconds_since(t0) - sample_time;

  // Recovery and diagonalization on the accumulated basis.
  const auto hf = reference_determinant(ints);
  const bool filter_irrep = cfg.irrep_filter && ints.has_symmetry();
  auto finish_basis = [&](const DeterminantSet& recovered, const DeterminantSet& previous) {
    DeterminantSet set = filter_irrep ? recovered.filtered([&](const Determinant& d) {
      return matches_target_irrep(d, ints);
    })
                                      : recovered;
    set.merge(previous);
    return cfg.spin_completion ? spin_complete(set) : set;
  };
  auto diagonalize = [&](const DeterminantSet& set) {
    if (set.empty())
      throw std::runtime_error("run_pipeline: no determinant survived recovery (too few shots or too much noise)");
    const auto tdiag = clock::now();
    auto r = diagonalize_subspace(build_subspace_matrix(set, ints), 1, cfg.backend).front();
    base.timings.diagonalize += detail::seconds_since(tdiag);
    return r;
  };

  OccupationVector occ = mean_occupations(all_terms, ints.n_orb);
  DeterminantSet basis;
  CIResult current;
  std::vector<StepReport> steps;
  for (std::size_t k = 1; k <= cfg.k_max; ++k) {
    const auto& ck = counts[k - 1];
    StepReport st;
    st.k = k;
    st.shots = ck.shots;
    st.usable_shots = usable_shots(ck, ints.n_alpha, ints.n_beta);
    st.reference_frequency = ck.frequency(hf.qubit_index());

    if (!cfg.sccr) {
      auto tr = clock::now();
      const auto recovered = filter_by_particle_number(ck, ints.n_alpha, ints.n_beta);
      st.recovered_dets = recovered.size();
      const auto set = finish_basis(recovered, basis);
      base.timings.recover += detail::seconds_since(tr);
      current = diagonalize(set);
      basis = set;
      st.sccr_iterations = 0;
    } else {
      const auto sccr_seed = derive_seed(cfg.seed, k, 2);
      DeterminantSet prev;
      for (std::size_t it = 1; it <= cfg.sccr_max_iterations; ++it) {
        auto tr = clock::now();
        const auto recovered = sccr_pass(ck, ints.n_alpha, ints.n_beta, occ, sccr_seed);
        st.recovered_dets = recovered.size();
        const auto set = finish_basis(recovered, basis);
        base.timings.recover += detail::seconds_since(tr);
        st.sccr_iterations = it;
        if (it > 1 && set == prev) break;
        current = diagonalize(set);
        occ = orbital_occupations(current);
        prev = set;
      }
      basis = prev;
    }
    occ = orbital_occupations(current);
    st.n_dets = basis.size();
    st.energy = current.energy;
    st.s_squared = s_squared_expectation(current);
    steps.push_back(st);
  }

  ReferenceEnergies refs;
  refs.hf_energy = slater_condon_element(hf, hf, ints);
  if (cfg.compute_casci) {
    const auto tc = clock::now();
    const auto cas = enumerate_cas_determinants(ints, filter_irrep);
    refs.casci_energy = diagonalize_subspace(build_subspace_matrix(cas, ints), 1, cfg.backend).front().energy;
    refs.casci_dets = cas.size();
    base.timings.casci = detail::seconds_since(tc);
  }
  return {report_results(std::move(base), steps, refs), std::move(current), std::move(counts)};
}

inline PipelineResult run_pipeline(const RunConfig& cfg) {
  return run_pipeline(cfg, read_fcidump(cfg.integrals_path));
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string exact(double v) { return fmt("%.17g", v); }

}  // namespace detail

inline void write_report_text(std::ostream& out, const RunReport& r, bool timings = true) {
  using detail::fmt;
  out << "system          " << r.system << '\n';
  out << "active space    " << r.n_alpha + r.n_beta << "e, " << r.n_orb << "o (" << r.n_alpha << " alpha, "
      << r.n_beta << " beta), " << 2 * r.n_orb << " qubits\n";
  out << "initial states  " << r.n_initial_states << '\n';
  out << "pauli terms     " << r.pauli_terms << '\n';
  out << "E(HF)           " << fmt("%.10f", r.hf_energy) << '\n';
  if (r.casci_energy) out << "E(CASCI)        " << fmt("%.10f", *r.casci_energy) << "  (" << *r.casci_dets << " dets)\n";
  out << '\n';
  out << "   k      shots     usable  ref_freq   dets          energy       error     <S^2>  sccr\n";
  for (const auto& s : r.steps) {
    char buf[200];
    const double err = r.casci_energy ? s.energy - *r.casci_energy : std::nan("");
    std::snprintf(buf, sizeof buf, "%4zu %10llu %10llu %9.5f %6zu %15.10f %11.3e %9.6f %5zu\n", s.k,
                  static_cast<unsigned long long>(s.shots), static_cast<unsigned long long>(s.usable_shots),
                  s.reference_frequency, s.n_dets, s.energy, err, s.s_squared, s.sccr_iterations);
    out << buf;
  }
  out << '\n';
  out << "final energy    " << fmt("%.10f", r.final_energy) << '\n';
  out << "final dets      " << r.final_dets << '\n';
  out << "final <S^2>     " << fmt("%.8f", r.final_s_squared) << '\n';
  if (r.casci_energy) {
    const double err = r.final_energy - *r.casci_energy;
    out << "error           " << fmt("%.3e", err) << " Eh (" << fmt("%.4f", err * kKcalPerHartree) << " kcal/mol)\n";
  }
  out << "%Dets           " << (r.pct_dets ? fmt("%.2f", *r.pct_dets) : "undefined") << '\n';
  out << "%E_corr         " << (r.pct_ecorr ? fmt("%.4f", *r.pct_ecorr) : "undefined") << '\n';
  if (timings) {
    const auto& t = r.timings;
    out << "time [s]        evolve " << fmt("%.3f", t.evolve) << ", sample " << fmt("%.3f", t.sample)
        << ", recover " << fmt("%.3f", t.recover) << ", diagonalize " << fmt("%.3f", t.diagonalize) << ", casci "
        << fmt("%.3f", t.casci) << '\n';
  }
}

/// `key = value` lines; reals carry 17 significant digits so the document
/// round-trips exactly.
inline void write_report_kv(std::ostream& out, const RunReport& r, bool timings = true) {
  using detail::exact;
  out << "system = " << r.system << '\n';
  out << "n_orb = " << r.n_orb << '\n';
  out << "n_alpha = " << r.n_alpha << '\n';
  out << "n_beta = " << r.n_beta << '\n';
  out << "n_initial_states = " << r.n_initial_states << '\n';
  out << "pauli_terms = " << r.pauli_terms << '\n';
  out << "hf_energy = " << exact(r.hf_energy) << '\n';
  out << "casci_energy = " << (r.casci_energy ? exact(*r.casci_energy) : "undefined") << '\n';
  out << "casci_dets = " << (r.casci_dets ? std::to_string(*r.casci_dets) : "undefined") << '\n';
  out << "final_energy = " << exact(r.final_energy) << '\n';
  out << "final_dets = " << r.final_dets << '\n';
  out << "final_s_squared = " << exact(r.final_s_squared) << '\n';
  out << "pct_dets = " << (r.pct_dets ? exact(*r.pct_dets) : "undefined") << '\n';
  out << "pct_ecorr = " << (r.pct_ecorr ? exact(*r.pct_ecorr) : "undefined") << '\n';
  out << "steps = " << r.steps.size() << '\n';
  for (const auto& s : r.steps) {
    const std::string p = "step." + std::to_string(s.k) + ".";
    out << p << "shots = " << s.shots << '\n';
    out << p << "usable_shots = " << s.usable_shots << '\n';
    out << p << "reference_frequency = " << exact(s.reference_frequency) << '\n';
    out << p << "recovered_dets = " << s.recovered_dets << '\n';
    out << p << "n_dets = " << s.n_dets << '\n';
    out << p << "energy = " << exact(s.energy) << '\n';
    out << p << "s_squared = " << exact(s.s_squared) << '\n';
    out << p << "sccr_iterations = " << s.sccr_iterations << '\n';
  }
  if (timings) {
    out << "time.evolve = " << exact(r.timings.evolve) << '\n';
    out << "time.sample = " << exact(r.timings.sample) << '\n';
    out << "time.recover = " << exact(r.timings.recover) << '\n';
    out << "time.diagonalize = " << exact(r.timings.diagonalize) << '\n';
    out << "time.casci = " << exact(r.timings.casci) << '\n';
  }
}

inline std::string report_kv_string(const RunReport& r, bool timings = true) {
  std::ostringstream out;
  write_report_kv(out, r, timings);
  return out.str();
}

inline RunReport read_report_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::runtime_error("report line " + std::to_string(line_no) + ": expected 'key = value'");
    kv[detail::trim(text.substr(0, eq))] = detail::trim(text.substr(eq + 1));
  }
  auto get = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error("report: missing key '" + k + "'");
    return it->second;
  };
  auto real = [&](const std::string& k) { return std::stod(get(k)); };
  auto count = [&](const std::string& k) { return static_cast<std::size_t>(std::stoull(get(k))); };
  auto opt_real = [&](const std::string& k) -> std::optional<double> {
    const auto& v = get(k);
    if (v == "undefined") return std::nullopt;
    return std::stod(v);
  };
  RunReport r;
  r.system = get("system");
  r.n_orb = count("n_orb");
  r.n_alpha = count("n_alpha");
  r.n_beta = count("n_beta");
  r.n_initial_states = count("n_initial_states");
  r.pauli_terms = count("pauli_terms");
  r.hf_energy = real("hf_energy");
  r.casci_energy = opt_real("casci_energy");
  if (get("casci_dets") != "undefined") r.casci_dets = count("casci_dets");
  r.final_energy = real("final_energy");
  r.final_dets = count("final_dets");
  r.final_s_squared = real("final_s_squared");
  r.pct_dets = opt_real("pct_dets");
  r.pct_ecorr = opt_real("pct_ecorr");
  const auto n_steps = count("steps");
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const std::string p = "step." + std::to_string(k) + ".";
    StepReport s;
    s.k = k;
    s.shots = std::stoull(get(p + "shots"));
    s.usable_shots = std::stoull(get(p + "usable_shots"));
    s.reference_frequency = real(p + "reference_frequency");
    s.recovered_dets = count(p + "recovered_dets");
    s.n_dets = count(p + "n_dets");
    s.energy = real(p + "energy");
    s.s_squared = real(p + "s_squared");
    s.sccr_iterations = count(p + "sccr_iterations");
    r.steps.push_back(s);
  }
  if (kv.count("time.evolve")) {
    r.timings = {real("time.evolve"), real("time.sample"), real("time.recover"), real("time.diagonalize"),
                 real("time.casci")};
  }
  return r;
}

inline RunReport read_report_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_report_kv(in);
}

}  // namespace hsbqsci
