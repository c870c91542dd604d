#pragma once

// Dense statevector simulation of Trotterized real-time evolution.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "determinant.hpp"
#include "pauli.hpp"

namespace hsbqsci {

inline constexpr std::size_t kMaxStateQubits = 24;

/// 2^n complex amplitudes; bit q of the basis index is the occupation of
/// qubit q (qubit 0 least significant).
class StateVector {
 public:
  StateVector() = default;

  /// |0...0>
  explicit StateVector(std::size_t n_qubits) : n_(n_qubits) {
    if (n_qubits > kMaxStateQubits)
      throw std::invalid_argument("StateVector: " + std::to_string(n_qubits) + " qubits exceeds the " +
                                  std::to_string(kMaxStateQubits) + "-qubit ceiling");
    amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
    amps_[0] = 1.0;
  }

  StateVector(std::size_t n_qubits, std::vector<cplx> amps) : n_(n_qubits), amps_(std::move(amps)) {
    if (n_qubits > kMaxStateQubits) throw std::invalid_argument("StateVector: too many qubits");
    if (amps_.size() != (std::size_t{1} << n_qubits))
      throw std::invalid_argument("StateVector: amplitude count is not 2^n");
  }

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const noexcept { return amps_; }
  std::vector<cplx>& amplitudes() noexcept { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

  void normalize() {
    const double nrm = std::sqrt(norm_squared());
    if (nrm == 0.0) throw std::domain_error("StateVector: cannot normalize the zero vector");
    for (auto& a : amps_) a /= nrm;
  }

 private:
  std::size_t n_ = 0;
  std::vector<cplx> amps_;
};

inline void check_determinant_width(const Determinant& d, std::size_t n_qubits) {
  if (n_qubits % 2) throw std::invalid_argument("determinant register must have even width");
  const std::size_t n_orb = n_qubits / 2;
  const Bits mask = n_orb >= 64 ? ~Bits{0} : (Bits{1} << n_orb) - 1;
  if ((d.alpha | d.beta) & ~mask)
    throw std::invalid_argument("determinant occupies orbitals beyond the " + std::to_string(n_orb) +
                                "-orbital register");
}

inline StateVector prepare_determinant_state(const Determinant& d, std::size_t n_qubits) {
  check_determinant_width(d, n_qubits);
  StateVector s(n_qubits);
  s.amplitudes()[0] = 0.0;
  s.amplitudes()[d.qubit_index()] = 1.0;
  return s;
}

/// Superposition with amplitudes proportional to the given coefficients at
/// each determinant's qubit index, normalized. Coefficients refer to the
/// qubit basis states themselves (interleaved order, no extra sign).
inline StateVector prepare_superposition_state(const std::vector<std::pair<double, Determinant>>& terms,
                                               std::size_t n_qubits) {
  if (terms.empty()) throw std::invalid_argument("prepare_superposition_state: no terms");
  StateVector s(n_qubits);
  auto& a = s.amplitudes();
  a[0] = 0.0;
  std::vector<Bits> seen;
  double nrm = 0.0;
  for (const auto& [c, d] : terms) {
    check_determinant_width(d, n_qubits);
    const Bits idx = d.qubit_index();
    if (std::find(seen.begin(), seen.end(), idx) != seen.end())
      throw std::invalid_argument("prepare_superposition_state: duplicate determinant");
    seen.push_back(idx);
    a[idx] = c;
    nrm += c * c;
  }
  if (nrm == 0.0) throw std::invalid_argument("prepare_superposition_state: all coefficients are zero");
  s.normalize();
  return s;
}

/// state <- exp(-i theta P) state = cos(theta) state - i sin(theta) P state.
inline void apply_pauli_exponential(StateVector& state, const PauliString& p, double theta) {
  if (p.n_qubits() != state.n_qubits())
    throw std::invalid_argument("apply_pauli_exponential: string width " + std::to_string(p.n_qubits()) +
                                " != register width " + std::to_string(state.n_qubits()));
  if (theta == 0.0) return;
  auto& a = state.amplitudes();
  const std::size_t dim = a.size();
  const Bits x = p.x();
  const Bits z = p.z();
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  if (x == 0) {
    if (z == 0) {
      const cplx ph{c, -s};
      for (auto& v : a) v *= ph;
      return;
    }
    const cplx plus{c, -s}, minus{c, s};
    for (std::size_t b = 0; b < dim; ++b) a[b] *= (std::popcount(b & z) & 1) ? minus : plus;
    return;
  }

  // Pairs (b, b ^ x) with the top bit of x clear in b.
  // (P psi)_b = i^{ny} (-1)^{|(b^x)&z|} psi_{b^x}
  const int ny = std::popcount(x & z);
  const cplx iny = i_pow(ny);
  const cplx m = cplx{0.0, -s} * iny;  // -i sin(theta) i^{ny}
  const Bits top = Bits{1} << (63 - std::countl_zero(x));
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & top) continue;
    const std::size_t bp = b ^ x;
    const cplx ab = a[b], abp = a[bp];
    const bool sign_from_bp = std::popcount(bp & z) & 1;
    const bool sign_from_b = std::popcount(b & z) & 1;
    a[b] = c * ab + (sign_from_bp ? -m : m) * abp;
    a[bp] = c * abp + (sign_from_b ? -m : m) * ab;
  }
}

struct EvolutionParams {
  double dt = 1.0;
  std::size_t k_max = 10;
  OrderingScheme ordering = OrderingScheme::magnitude;

  void validate() const {
    if (!(dt >= 0.0)) throw std::invalid_argument("EvolutionParams: dt must be >= 0");
  }
};

/// One first-order Trotter step: exp(-i w_j dt P_j) in the given order. The
/// identity term contributes the global phase exp(-i w_I dt).
inline void trotter_step(StateVector& state, const std::vector<PauliTerm>& ordered, double dt) {
  for (const auto& t : ordered) apply_pauli_exponential(state, t.string, t.weight * dt);
}

/// Applies `trotter_step` k_max times, handing each |Phi_k> (k = 1..k_max)
/// to `visit` before the next step.
inline void evolve_k_steps(const StateVector& state0, const std::vector<PauliTerm>& ordered,
                           const EvolutionParams& params,
                           const std::function<void(std::size_t, const StateVector&)>& visit) {
  params.validate();
  StateVector s = state0;
  for (std::size_t k = 1; k <= params.k_max; ++k) {
    trotter_step(s, ordered, params.dt);
    visit(k, s);
  }
}

inline std::vector<StateVector> evolve_k_steps(const StateVector& state0, const std::vector<PauliTerm>& ordered,
                                               const EvolutionParams& params) {
  std::vector<StateVector> out;
  out.reserve(params.k_max);
  evolve_k_steps(state0, ordered, params, [&](std::size_t, const StateVector& s) { out.push_back(s); });
  return out;
}

/// H |state>
inline StateVector apply_hamiltonian(const StateVector& state, const PauliSum& h) {
  if (h.n_qubits() != state.n_qubits()) throw std::invalid_argument("apply_hamiltonian: width mismatch");
  const auto& a = state.amplitudes();
  std::vector<cplx> out(a.size(), cplx{0.0, 0.0});
  for (const auto& t : h) {
    const Bits x = t.string.x(), z = t.string.z();
    const cplx base = t.weight * i_pow(std::popcount(x & z));
    for (std::size_t b = 0; b < a.size(); ++b) {
      const cplx v = (std::popcount(b & z) & 1) ? -base : base;
      out[b ^ x] += v * a[b];
    }
  }
  return StateVector(state.n_qubits(), std::move(out));
}

/// <state|H|state>; the imaginary part must vanish to 1e-10.
inline double expectation_value(const StateVector& state, const PauliSum& h) {
  if (h.n_qubits() != state.n_qubits())
    throw std::invalid_argument("expectation_value: width mismatch");
  const auto& a = state.amplitudes();
  cplx e{0.0, 0.0};
  for (const auto& t : h) {
    const Bits x = t.string.x(), z = t.string.z();
    const cplx base = i_pow(std::popcount(x & z));
    cplx acc{0.0, 0.0};
    for (std::size_t b = 0; b < a.size(); ++b) {
      const cplx v = std::conj(a[b ^ x]) * a[b];
      acc += (std::popcount(b & z) & 1) ? -v : v;
    }
    e += t.weight * base * acc;
  }
  if (std::abs(e.imag()) > 1e-10) throw std::logic_error("expectation_value: non-real energy");
  return e.real();
}

inline cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("inner_product: width mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// |<a|b>|^2
inline double state_fidelity(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("state_fidelity: width mismatch");
  return std::min(1.0, std::norm(inner_product(a, b)));
}

/// Hamming-weight (popcount) probability mass of the state.
inline std::vector<double> hamming_weight_distribution(const StateVector& s) {
  std::vector<double> w(s.n_qubits() + 1, 0.0);
  for (std::size_t b = 0; b < s.dimension(); ++b) w[static_cast<std::size_t>(std::popcount(b))] += std::norm(s[b]);
  return w;
}

// Binary dump: uint64 qubit count, then 2^n (real, imag) doubles, little endian.

namespace detail {
inline void put_le64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}
inline std::uint64_t get_le64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("state dump truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
}  // namespace detail

inline void write_state(std::ostream& out, const StateVector& s) {
  detail::put_le64(out, s.n_qubits());
  for (const auto& a : s.amplitudes()) {
    detail::put_le64(out, std::bit_cast<std::uint64_t>(a.real()));
    detail::put_le64(out, std::bit_cast<std::uint64_t>(a.imag()));
  }
}

inline StateVector read_state(std::istream& in) {
  const auto n = detail::get_le64(in);
  if (n > kMaxStateQubits) throw std::runtime_error("state dump: qubit count too large");
  std::vector<cplx> amps(std::size_t{1} << n);
  for (auto& a : amps) {
    const double re = std::bit_cast<double>(detail::get_le64(in));
    const double im = std::bit_cast<double>(detail::get_le64(in));
    a = {re, im};
  }
  return StateVector(static_cast<std::size_t>(n), std::move(amps));
}

}  // namespace hsbqsci
