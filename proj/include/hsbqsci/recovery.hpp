#pragma once

// From raw bitstring counts to a determinant set with the right particle
// numbers and complete spin multiplets.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "determinant.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "sci.hpp"

namespace hsbqsci {

inline bool has_particle_numbers(Bits b, std::size_t n_alpha, std::size_t n_beta) {
  const auto d = Determinant::from_qubit_index(b);
  return d.n_alpha() == n_alpha && d.n_beta() == n_beta;
}

/// Bitstrings whose alpha and beta popcounts both hit their targets.
inline DeterminantSet filter_by_particle_number(const BitstringCounts& c, std::size_t n_alpha, std::size_t n_beta) {
  if (c.n_qubits % 2) throw std::invalid_argument("filter_by_particle_number: odd register width");
  std::vector<Determinant> dets;
  for (const auto& [b, n] : c.counts)
    if (has_particle_numbers(b, n_alpha, n_beta)) dets.push_back(Determinant::from_qubit_index(b));
  return DeterminantSet(std::move(dets));
}

/// Shots that survive particle-number filtering.
inline std::uint64_t usable_shots(const BitstringCounts& c, std::size_t n_alpha, std::size_t n_beta) {
  std::uint64_t s = 0;
  for (const auto& [b, n] : c.counts)
    if (has_particle_numbers(b, n_alpha, n_beta)) s += n;
  return s;
}

namespace detail {

// Flips `k` bits of `mask` among `candidates`, drawing without replacement
// with weights `w`. Zero-weight candidates are drawn uniformly once the
// positive ones are exhausted.
inline Bits flip_weighted(Bits mask, std::vector<unsigned> candidates, std::vector<double> w, std::size_t k,
                          CounterRng& rng) {
  for (std::size_t step = 0; step < k; ++step) {
    double total = 0.0;
    for (auto v : w) total += v;
    std::size_t pick = candidates.size();
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        acc += w[i];
        pick = i;
        if (u < acc) break;
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(candidates.size()));
    }
    mask ^= Bits{1} << candidates[pick];
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(pick));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return mask;
}

inline Bits recover_sector(Bits mask, std::size_t target, const std::vector<double>& occ, std::size_t n_orb,
                           CounterRng& rng) {
  const auto have = static_cast<std::size_t>(std::popcount(mask));
  if (have == target) return mask;
  const bool add = have < target;
  std::vector<unsigned> cand;
  std::vector<double> w;
  for (unsigned p = 0; p < n_orb; ++p) {
    const bool set = (mask >> p) & 1u;
    if (set == add) continue;
    cand.push_back(p);
    w.push_back(std::abs(occ[p] - (set ? 1.0 : 0.0)));
  }
  return flip_weighted(mask, std::move(cand), std::move(w), add ? target - have : have - target, rng);
}

}  // namespace detail

/// One configuration-recovery pass. Each distinct bitstring with a wrong
/// alpha or beta popcount has bits flipped toward the targets, bit p chosen
/// with probability proportional to |occ_p - b_p|. The draws for bitstring
/// b come from a generator keyed by (seed, b).
inline DeterminantSet sccr_pass(const BitstringCounts& c, std::size_t n_alpha, std::size_t n_beta,
                                const OccupationVector& occ, std::uint64_t seed) {
  if (c.n_qubits % 2) throw std::invalid_argument("sccr_pass: odd register width");
  const std::size_t n_orb = c.n_qubits / 2;
  if (n_alpha > n_orb || n_beta > n_orb)
    throw std::invalid_argument("sccr_pass: target of " + std::to_string(n_alpha) + " alpha / " +
                                std::to_string(n_beta) + " beta electrons does not fit in " + std::to_string(n_orb) +
                                " orbitals");
  if (occ.alpha.size() != n_orb || occ.beta.size() != n_orb)
    throw std::invalid_argument("sccr_pass: occupation vector length does not match the register");
  std::vector<Determinant> dets;
  dets.reserve(c.counts.size());
  for (const auto& [b, n] : c.counts) {
    auto d = Determinant::from_qubit_index(b);
    if (d.n_alpha() != n_alpha || d.n_beta() != n_beta) {
      CounterRng rng(derive_seed(seed, b));
      d.alpha = detail::recover_sector(d.alpha, n_alpha, occ.alpha, n_orb, rng);
      d.beta = detail::recover_sector(d.beta, n_beta, occ.beta, n_orb, rng);
    }
    dets.push_back(d);
  }
  return DeterminantSet(std::move(dets));
}

/// Every redistribution of alpha/beta spins over d's singly occupied
/// orbitals with the open-alpha count held fixed (d itself included).
inline std::vector<Determinant> spin_partners(const Determinant& d) {
  const Bits closed = d.alpha & d.beta;
  const Bits open = d.alpha ^ d.beta;
  const int n_open = std::popcount(open);
  const int n_up = std::popcount(d.alpha & ~d.beta);
  std::vector<unsigned> pos;
  for (Bits m = open; m; m &= m - 1) pos.push_back(static_cast<unsigned>(std::countr_zero(m)));
  std::vector<Determinant> out;
  if (n_open == 0) return {d};
  // Gosper's hack over n_open-bit patterns with n_up ones.
  const std::uint64_t limit = std::uint64_t{1} << n_open;
  std::uint64_t pat = (std::uint64_t{1} << n_up) - 1;
  while (pat < limit) {
    Bits up = 0;
    for (int i = 0; i < n_open; ++i)
      if ((pat >> i) & 1u) up |= Bits{1} << pos[static_cast<std::size_t>(i)];
    out.push_back({closed | up, closed | (open & ~up)});
    if (pat == 0) break;
    const std::uint64_t t = pat | (pat - 1);
    pat = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(pat) + 1));
  }
  return out;
}

inline DeterminantSet spin_complete(const DeterminantSet& set) {
  std::vector<Determinant> dets;
  dets.reserve(set.size());
  for (const auto& d : set)
    for (const auto& p : spin_partners(d)) dets.push_back(p);
  return DeterminantSet(std::move(dets));
}

inline bool is_spin_complete(const DeterminantSet& set) {
  for (const auto& d : set)
    for (const auto& p : spin_partners(d))
      if (!set.contains(p)) return false;
  return true;
}

/// Average occupations of a set of weighted determinants, e.g. the initial
/// state before any CI vector exists.
inline OccupationVector mean_occupations(const std::vector<std::pair<double, Determinant>>& terms, std::size_t n_orb) {
  OccupationVector o{std::vector<double>(n_orb, 0.0), std::vector<double>(n_orb, 0.0)};
  double norm = 0.0;
  for (const auto& [c, d] : terms) {
    const double w = c * c;
    norm += w;
    for (std::size_t p = 0; p < n_orb; ++p) {
      o.alpha[p] += w * static_cast<double>((d.alpha >> p) & 1u);
      o.beta[p] += w * static_cast<double>((d.beta >> p) & 1u);
    }
  }
  if (norm == 0.0) throw std::invalid_argument("mean_occupations: all weights are zero");
  for (auto& v : o.alpha) v /= norm;
  for (auto& v : o.beta) v /= norm;
  return o;
}

}  // namespace hsbqsci
