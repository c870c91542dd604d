#pragma once

// Computational-basis sampling, readout noise, and Hamming-weight statistics.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "determinant.hpp"
#include "rng.hpp"
#include "statevector.hpp"

namespace hsbqsci {

/// Measurement record: bitstring (qubit 0 = bit 0) -> occurrences.
struct BitstringCounts {
  std::size_t n_qubits = 0;
  std::uint64_t shots = 0;
  std::map<Bits, std::uint64_t> counts;

  void add(Bits b, std::uint64_t c = 1) {
    counts[b] += c;
    shots += c;
  }

  void merge(const BitstringCounts& other) {
    if (n_qubits == 0 && counts.empty()) n_qubits = other.n_qubits;
    if (other.n_qubits != n_qubits) throw std::invalid_argument("BitstringCounts::merge: width mismatch");
    for (const auto& [b, c] : other.counts) add(b, c);
  }

  double frequency(Bits b) const {
    auto it = counts.find(b);
    return it == counts.end() || shots == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(shots);
  }

  bool operator==(const BitstringCounts&) const = default;
};

struct NoiseSpec {
  double flip_prob = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(flip_prob >= 0.0 && flip_prob <= 1.0))
      throw std::invalid_argument("NoiseSpec: flip_prob must lie in [0, 1]");
  }
};

/// i.i.d. draws from |amps|^2 by inverse CDF; draw i uses counter i of a
/// generator keyed by `seed`.
inline BitstringCounts sample_counts(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("sample_counts: shots must be >= 1");
  const auto& a = state.amplitudes();
  std::vector<double> cdf(a.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::norm(a[i]);
    cdf[i] = acc;
  }
  BitstringCounts out;
  out.n_qubits = state.n_qubits();
  CounterRng rng(seed);
  // Index of the last basis state with nonzero weight: guards u * total
  // landing past the final increment through rounding.
  std::size_t last = a.size() - 1;
  while (last > 0 && std::norm(a[last]) == 0.0) --last;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = it == cdf.end() ? last : static_cast<std::size_t>(it - cdf.begin());
    idx = std::min(idx, last);
    out.add(static_cast<Bits>(idx));
  }
  return out;
}

/// Flips every recorded bit of every shot independently with flip_prob.
inline BitstringCounts inject_readout_noise(const BitstringCounts& c, const NoiseSpec& spec) {
  spec.validate();
  if (spec.flip_prob == 0.0) return c;
  BitstringCounts out;
  out.n_qubits = c.n_qubits;
  const Bits full = c.n_qubits >= 64 ? ~Bits{0} : (Bits{1} << c.n_qubits) - 1;
  if (spec.flip_prob == 1.0) {
    for (const auto& [b, n] : c.counts) out.add(b ^ full, n);
    return out;
  }
  CounterRng rng(spec.seed);
  for (const auto& [b, n] : c.counts)
    for (std::uint64_t s = 0; s < n; ++s) {
      Bits flips = 0;
      for (std::size_t q = 0; q < c.n_qubits; ++q)
        if (rng.uniform() < spec.flip_prob) flips |= Bits{1} << q;
      out.add(b ^ flips);
    }
  return out;
}

/// popcount -> occurrences
inline std::map<std::size_t, std::uint64_t> hamming_weight_histogram(const BitstringCounts& c) {
  std::map<std::size_t, std::uint64_t> h;
  for (const auto& [b, n] : c.counts) h[static_cast<std::size_t>(std::popcount(b))] += n;
  return h;
}

/// Total-variation distance between the empirical frequencies and |amps|^2.
inline double total_variation_distance(const BitstringCounts& c, const StateVector& s) {
  double tv = 0.0;
  for (std::size_t b = 0; b < s.dimension(); ++b)
    tv += std::abs(c.frequency(static_cast<Bits>(b)) - std::norm(s[b]));
  return 0.5 * tv;
}

// Counts file: `bitstring count`, descending count, ties by bitstring text.

inline std::vector<std::pair<Bits, std::uint64_t>> sorted_counts(const BitstringCounts& c) {
  std::vector<std::pair<Bits, std::uint64_t>> v(c.counts.begin(), c.counts.end());
  // Fixed-width binary text sorts like the integer value.
  std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return v;
}

inline void write_counts(std::ostream& out, const BitstringCounts& c) {
  for (const auto& [b, n] : sorted_counts(c)) out << to_bitstring(b, c.n_qubits) << ' ' << n << '\n';
}

inline BitstringCounts read_counts(std::istream& in) {
  BitstringCounts c;
  std::string bits;
  std::uint64_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    if (!(ls >> bits)) continue;
    if (!(ls >> n)) throw std::invalid_argument("counts line " + std::to_string(line_no) + ": missing count");
    if (c.n_qubits == 0) c.n_qubits = bits.size();
    if (bits.size() != c.n_qubits)
      throw std::invalid_argument("counts line " + std::to_string(line_no) + ": inconsistent width");
    c.add(from_bitstring(bits), n);
  }
  return c;
}

}  // namespace hsbqsci
