#pragma once

// Qubit Hamiltonians: Pauli strings, weighted sums, the Jordan-Wigner map of
// the second-quantized Hamiltonian, and locality-based truncation.

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "determinant.hpp"
#include "integrals.hpp"

namespace hsbqsci {

using cplx = std::complex<double>;

enum class Axis : std::uint8_t { I, X, Y, Z };

inline char axis_char(Axis a) { return "IXYZ"[static_cast<int>(a)]; }

/// Tensor product of single-qubit Paulis in symplectic form: qubit q carries
/// X if only x_q is set, Z if only z_q, Y if both. The operator is
/// i^{|x&z|} X^x Z^z, so Y = iXZ on every qubit where both bits are set.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits) : n_(n_qubits) { check_width(n_qubits); }
  PauliString(std::size_t n_qubits, Bits x, Bits z) : n_(n_qubits), x_(x), z_(z) {
    check_width(n_qubits);
    const Bits mask = n_ == 64 ? ~Bits{0} : (Bits{1} << n_) - 1;
    if ((x | z) & ~mask) throw std::invalid_argument("PauliString: qubit index beyond register width");
  }

  /// Builds from a sparse qubit -> axis map.
  PauliString(std::size_t n_qubits, const std::map<std::size_t, Axis>& ops) : n_(n_qubits) {
    check_width(n_qubits);
    for (auto [q, a] : ops) set(q, a);
  }

  /// Parses a dense axis string, qubit 0 first, e.g. "XZY" = X0 Z1 Y2.
  static PauliString from_text(const std::string& axes) {
    PauliString s(axes.size());
    for (std::size_t q = 0; q < axes.size(); ++q) {
      switch (axes[q]) {
        case 'I': break;
        case 'X': s.set(q, Axis::X); break;
        case 'Y': s.set(q, Axis::Y); break;
        case 'Z': s.set(q, Axis::Z); break;
        default: throw std::invalid_argument(std::string("PauliString: bad axis '") + axes[q] + "'");
      }
    }
    return s;
  }

  std::size_t n_qubits() const noexcept { return n_; }
  Bits x() const noexcept { return x_; }
  Bits z() const noexcept { return z_; }
  Bits support() const noexcept { return x_ | z_; }
  bool is_identity() const noexcept { return (x_ | z_) == 0; }
  bool is_diagonal() const noexcept { return x_ == 0; }

  Axis axis(std::size_t q) const noexcept {
    const bool xb = (x_ >> q) & 1u, zb = (z_ >> q) & 1u;
    return xb ? (zb ? Axis::Y : Axis::X) : (zb ? Axis::Z : Axis::I);
  }

  void set(std::size_t q, Axis a) {
    if (q >= n_) throw std::out_of_range("PauliString: qubit " + std::to_string(q) + " >= width");
    const Bits m = Bits{1} << q;
    x_ &= ~m;
    z_ &= ~m;
    if (a == Axis::X || a == Axis::Y) x_ |= m;
    if (a == Axis::Z || a == Axis::Y) z_ |= m;
  }

  /// Dense axis text, qubit 0 first.
  std::string text() const {
    std::string s(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) s[q] = axis_char(axis(q));
    return s;
  }

  /// True when the two strings commute.
  bool commutes_with(const PauliString& o) const noexcept {
    return (std::popcount((x_ & o.z_) ^ (z_ & o.x_)) & 1) == 0;
  }

  bool operator==(const PauliString&) const = default;

  /// Orders by the dense text encoding (I < X < Y < Z, qubit 0 most
  /// significant), the deterministic tie-break used by magnitude ordering.
  bool text_less(const PauliString& o) const { return text() < o.text(); }

 private:
  static void check_width(std::size_t n) {
    if (n > 64) throw std::invalid_argument("PauliString: at most 64 qubits");
  }
  std::size_t n_ = 0;
  Bits x_ = 0;
  Bits z_ = 0;
};

/// Number of non-identity axes.
inline std::size_t pauli_locality(const PauliString& s) noexcept {
  return static_cast<std::size_t>(std::popcount(s.support()));
}

/// a * b = i^phase * result.
struct PauliProduct {
  int phase = 0;  // exponent of i, in [0, 4)
  PauliString result;
};

inline PauliProduct multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw std::invalid_argument("multiply: width mismatch");
  const Bits x = a.x() ^ b.x();
  const Bits z = a.z() ^ b.z();
  // i^{ya} X^xa Z^za i^{yb} X^xb Z^zb = i^{ya+yb} (-1)^{|za & xb|} X^x Z^z
  int e = std::popcount(a.x() & a.z()) + std::popcount(b.x() & b.z()) - std::popcount(x & z) +
          2 * std::popcount(a.z() & b.x());
  e = ((e % 4) + 4) % 4;
  return {e, PauliString(a.n_qubits(), x, z)};
}

inline cplx i_pow(int e) {
  switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct PauliTerm {
  double weight = 0.0;
  PauliString string;
};

/// Real-weighted sum of distinct Pauli strings. Terms keep the order in which
/// their strings were first produced; construction merges repeats and drops
/// weights below the pruning threshold.
class PauliSum {
 public:
  static constexpr double kPrune = 1e-12;

  PauliSum() = default;
  explicit PauliSum(std::size_t n_qubits) : n_(n_qubits) {}
  PauliSum(std::size_t n_qubits, const std::vector<PauliTerm>& terms) : n_(n_qubits) {
    for (const auto& t : terms) add(t.weight, t.string);
    prune();
  }

  std::size_t n_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  auto begin() const noexcept { return terms_.begin(); }
  auto end() const noexcept { return terms_.end(); }

  /// Coefficient of the identity string (0 when absent).
  double identity_weight() const {
    for (const auto& t : terms_)
      if (t.string.is_identity()) return t.weight;
    return 0.0;
  }

  /// Weight of `s`, or 0 when absent.
  double weight_of(const PauliString& s) const {
    auto it = index_.find(key(s));
    return it == index_.end() ? 0.0 : terms_[it->second].weight;
  }

  bool contains(const PauliString& s) const { return index_.count(key(s)) != 0; }

  /// Sum of |w_j|.
  double one_norm() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.weight);
    return s;
  }

  bool operator==(const PauliSum& o) const {
    if (n_ != o.n_ || terms_.size() != o.terms_.size()) return false;
    for (const auto& t : terms_)
      if (!o.contains(t.string) || o.weight_of(t.string) != t.weight) return false;
    return true;
  }

 private:
  friend class PauliAccumulator;

  static std::pair<Bits, Bits> key(const PauliString& s) { return {s.x(), s.z()}; }

  struct KeyHash {
    std::size_t operator()(const std::pair<Bits, Bits>& k) const noexcept {
      return std::hash<Bits>{}(k.first * 0x9e3779b97f4a7c15ULL) ^ std::hash<Bits>{}(k.second + 0x7f4a7c15ULL);
    }
  };

  void add(double w, const PauliString& s) {
    if (s.n_qubits() != n_) throw std::invalid_argument("PauliSum: string width mismatch");
    auto [it, inserted] = index_.emplace(key(s), terms_.size());
    if (inserted)
      terms_.push_back({w, s});
    else
      terms_[it->second].weight += w;
  }

  void prune() {
    std::vector<PauliTerm> kept;
    kept.reserve(terms_.size());
    for (auto& t : terms_)
      if (std::abs(t.weight) >= kPrune) kept.push_back(t);
    terms_ = std::move(kept);
    index_.clear();
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(key(terms_[i].string), i);
  }

  std::size_t n_ = 0;
  std::vector<PauliTerm> terms_;
  std::unordered_map<std::pair<Bits, Bits>, std::size_t, KeyHash> index_;
};

/// Collects complex-weighted strings in first-seen order and produces a
/// PauliSum after checking that every merged weight is real.
class PauliAccumulator {
 public:
  explicit PauliAccumulator(std::size_t n_qubits) : n_(n_qubits) {}

  void add(cplx w, const PauliString& s) {
    auto [it, inserted] = index_.emplace(std::make_pair(s.x(), s.z()), strings_.size());
    if (inserted) {
      strings_.push_back(s);
      weights_.push_back(w);
    } else {
      weights_[it->second] += w;
    }
  }

  PauliSum finish(double imag_tol = 1e-10) const {
    PauliSum out(n_);
    for (std::size_t i = 0; i < strings_.size(); ++i) {
      if (std::abs(weights_[i].imag()) > imag_tol)
        throw std::logic_error("PauliAccumulator: non-Hermitian weight on " + strings_[i].text());
      out.add(weights_[i].real(), strings_[i]);
    }
    out.prune();
    return out;
  }

 private:
  std::size_t n_;
  std::vector<PauliString> strings_;
  std::vector<cplx> weights_;
  std::unordered_map<std::pair<Bits, Bits>, std::size_t, PauliSum::KeyHash> index_;
};

// ---------------------------------------------------------------------------
// Second-quantized terms and the Jordan-Wigner map

/// Spin-orbital of spatial orbital p with spin s (0 = alpha, 1 = beta).
constexpr std::size_t spin_orbital(std::size_t p, std::size_t s) noexcept { return 2 * p + s; }

struct LadderOp {
  std::size_t mode = 0;
  bool create = false;
};

/// coefficient * (product of ladder operators, leftmost first).
struct FermionTerm {
  double coefficient = 0.0;
  std::vector<LadderOp> ops;
};

/// Every nonzero term of H = sum h_pq a+_p a_q + 1/2 sum g_pqrs a+_p a+_q a_s a_r
/// over spin orbitals, with g_pqrs = (pr|qs). One-body terms come first
/// (p then q), two-body terms follow with loop order p, r, q, s. Terms whose
/// operator vanishes identically (repeated creation or annihilation index)
/// are included, matching the usual term count of this Hamiltonian.
inline std::vector<FermionTerm> hamiltonian_terms(const MolecularIntegrals& ints,
                                                  double threshold = PauliSum::kPrune) {
  const std::size_t n = ints.n_orb;
  const std::size_t ns = 2 * n;
  std::vector<FermionTerm> out;
  for (std::size_t P = 0; P < ns; ++P)
    for (std::size_t Q = 0; Q < ns; ++Q) {
      if (P % 2 != Q % 2) continue;
      const double v = ints.one(P / 2, Q / 2);
      if (std::abs(v) < threshold) continue;
      out.push_back({v, {{P, true}, {Q, false}}});
    }
  for (std::size_t P = 0; P < ns; ++P)
    for (std::size_t R = 0; R < ns; ++R) {
      if (P % 2 != R % 2) continue;
      for (std::size_t Q = 0; Q < ns; ++Q)
        for (std::size_t S = 0; S < ns; ++S) {
          if (Q % 2 != S % 2) continue;
          const double v = 0.5 * ints.two(P / 2, R / 2, Q / 2, S / 2);
          if (std::abs(v) < threshold) continue;
          out.push_back({v, {{P, true}, {Q, true}, {S, false}, {R, false}}});
        }
    }
  return out;
}

/// Pauli expansion of a single ladder-operator product (within-term
/// cancellations removed). Empty for operators that vanish identically.
inline std::vector<std::pair<cplx, PauliString>> jw_expand(const FermionTerm& term, std::size_t n_qubits) {
  std::vector<std::pair<cplx, PauliString>> acc{{cplx{term.coefficient, 0.0}, PauliString(n_qubits)}};
  for (const auto& op : term.ops) {
    if (op.mode >= n_qubits) throw std::out_of_range("jw_expand: mode beyond register");
    const Bits bit = Bits{1} << op.mode;
    const Bits chain = bit - 1;
    // a+ = Z_<j (X - iY)/2 ; a = Z_<j (X + iY)/2
    const PauliString xs(n_qubits, bit, chain);
    const PauliString ys(n_qubits, bit, chain | bit);
    const cplx cx{0.5, 0.0};
    const cplx cy{0.0, op.create ? -0.5 : 0.5};
    std::vector<std::pair<cplx, PauliString>> next;
    next.reserve(acc.size() * 2);
    auto push = [&](cplx c, const PauliString& s) {
      for (auto& [cc, ss] : next)
        if (ss == s) {
          cc += c;
          return;
        }
      next.emplace_back(c, s);
    };
    for (const auto& [c, s] : acc) {
      auto px = multiply(s, xs);
      push(c * cx * i_pow(px.phase), px.result);
      auto py = multiply(s, ys);
      push(c * cy * i_pow(py.phase), py.result);
    }
    acc.clear();
    for (auto& e : next)
      if (std::abs(e.first) > 0.0) acc.push_back(e);
  }
  std::vector<std::pair<cplx, PauliString>> out;
  for (auto& e : acc)
    if (std::abs(e.first) >= PauliSum::kPrune * 1e-6) out.push_back(e);
  return out;
}

/// Largest locality among the strings a term generates (0 if it vanishes).
inline std::size_t term_locality(const FermionTerm& term, std::size_t n_qubits) {
  std::size_t m = 0;
  for (const auto& [c, s] : jw_expand(term, n_qubits)) m = std::max(m, pauli_locality(s));
  return m;
}

struct TruncationResult {
  PauliSum hamiltonian;
  std::size_t kept_terms = 0;
  std::size_t total_terms = 0;
};

/// Keeps a second-quantized term iff every string it generates has locality
/// <= max_locality; kept terms are mapped and merged. The core energy always
/// survives as the identity weight.
inline TruncationResult truncate_by_locality(const MolecularIntegrals& ints, std::size_t max_locality) {
  const std::size_t nq = ints.n_qubits();
  if (max_locality > nq)
    throw std::invalid_argument("truncate_by_locality: m = " + std::to_string(max_locality) +
                                " outside [0, " + std::to_string(nq) + "]");
  if (nq > 64) throw std::invalid_argument("truncate_by_locality: more than 64 spin orbitals");
  PauliAccumulator acc(nq);
  acc.add(cplx{ints.core_energy, 0.0}, PauliString(nq));
  TruncationResult res;
  for (const auto& term : hamiltonian_terms(ints)) {
    ++res.total_terms;
    const auto expansion = jw_expand(term, nq);
    std::size_t loc = 0;
    for (const auto& [c, s] : expansion) loc = std::max(loc, pauli_locality(s));
    if (loc > max_locality) continue;
    ++res.kept_terms;
    for (const auto& [c, s] : expansion) acc.add(c, s);
  }
  res.hamiltonian = acc.finish();
  return res;
}

/// Full Jordan-Wigner qubit Hamiltonian (interleaved spin orbitals).
inline PauliSum jordan_wigner(const MolecularIntegrals& ints) {
  return truncate_by_locality(ints, ints.n_qubits()).hamiltonian;
}

// ---------------------------------------------------------------------------
// Term ordering

enum class OrderingScheme { magnitude, integral_lexicographic };

inline OrderingScheme parse_ordering(const std::string& name) {
  if (name == "magnitude") return OrderingScheme::magnitude;
  if (name == "integral-lexicographic" || name == "lexicographic") return OrderingScheme::integral_lexicographic;
  throw std::invalid_argument("unknown ordering scheme '" + name + "'");
}

inline std::string to_string(OrderingScheme s) {
  return s == OrderingScheme::magnitude ? "magnitude" : "integral-lexicographic";
}

/// Magnitude: descending |w|, ties by text encoding. Integral-lexicographic:
/// the order in which the strings first arise from the integral loop.
inline std::vector<PauliTerm> order_terms(const PauliSum& h, OrderingScheme scheme) {
  std::vector<PauliTerm> out(h.terms());
  if (scheme == OrderingScheme::magnitude) {
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) keys.emplace_back(out[i].string.text(), i);
    std::vector<std::size_t> idx(out.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const double wa = std::abs(out[a].weight), wb = std::abs(out[b].weight);
      if (wa != wb) return wa > wb;
      return keys[a].first < keys[b].first;
    });
    std::vector<PauliTerm> sorted;
    sorted.reserve(out.size());
    for (auto i : idx) sorted.push_back(out[i]);
    return sorted;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text dump: `weight axis0 axis1 ... axisN-1`

inline void write_pauli_sum(std::ostream& out, const PauliSum& h) {
  char buf[64];
  for (const auto& t : h) {
    std::snprintf(buf, sizeof buf, "%.17g", t.weight);
    out << buf;
    for (std::size_t q = 0; q < h.n_qubits(); ++q) out << ' ' << axis_char(t.string.axis(q));
    out << '\n';
  }
}

inline PauliSum read_pauli_sum(std::istream& in) {
  std::vector<PauliTerm> terms;
  std::size_t width = 0;
  bool first = true;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string wtok;
    if (!(ls >> wtok)) continue;
    const double w = std::stod(wtok);
    std::string axes, a;
    while (ls >> a) {
      if (a.size() != 1) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad axis token");
      axes += a;
    }
    if (first) {
      width = axes.size();
      first = false;
    } else if (axes.size() != width) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": inconsistent register width");
    }
    terms.push_back({w, PauliString::from_text(axes)});
  }
  return PauliSum(width, terms);
}

// ---------------------------------------------------------------------------
// Matrix forms

/// <b ^ x| P |b> = i^{|x&z|} (-1)^{|b&z|}
inline cplx pauli_matrix_element(const PauliString& s, Bits b) {
  const int ny = std::popcount(s.x() & s.z());
  const int sign = std::popcount(b & s.z()) & 1;
  return i_pow(ny + 2 * sign);
}

/// Dense 2^n x 2^n matrix (qubit 0 least significant in the basis index).
inline Eigen::MatrixXcd to_dense(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  if (n > 14) throw std::invalid_argument("to_dense: register too wide");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h)
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<Bits>(b);
      m(static_cast<Eigen::Index>(ub ^ t.string.x()), b) += t.weight * pauli_matrix_element(t.string, ub);
    }
  return m;
}

/// Basis states with fixed alpha/beta popcounts in the interleaved register.
inline std::vector<Bits> sector_basis(std::size_t n_orb, std::size_t n_alpha, std::size_t n_beta) {
  std::vector<Bits> alphas, betas;
  for (Bits m = 0; m < (Bits{1} << n_orb); ++m) {
    const auto pc = static_cast<std::size_t>(std::popcount(m));
    if (pc == n_alpha) alphas.push_back(m);
    if (pc == n_beta) betas.push_back(m);
  }
  std::vector<Bits> out;
  out.reserve(alphas.size() * betas.size());
  for (auto a : alphas)
    for (auto b : betas) out.push_back(Determinant{a, b}.qubit_index());
  std::sort(out.begin(), out.end());
  return out;
}

struct SectorOperator {
  std::vector<Bits> basis;  // sorted qubit indices
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
};

/// Restriction of a number-conserving PauliSum to the (n_alpha, n_beta)
/// sector. Components leaving the sector cancel in the full sum and are
/// skipped; the real part is kept (the imaginary part vanishes for a real
/// Hamiltonian in the occupation basis).
inline SectorOperator sector_hamiltonian(const PauliSum& h, std::size_t n_alpha, std::size_t n_beta) {
  if (h.n_qubits() % 2) throw std::invalid_argument("sector_hamiltonian: odd register width");
  SectorOperator op;
  op.basis = sector_basis(h.n_qubits() / 2, n_alpha, n_beta);
  const auto dim = op.basis.size();
  std::map<Bits, std::vector<const PauliTerm*>> groups;
  for (const auto& t : h) groups[t.string.x()].push_back(&t);
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& [x, terms] : groups) {
    for (std::size_t col = 0; col < dim; ++col) {
      const Bits b = op.basis[col];
      const Bits target = b ^ x;
      auto it = std::lower_bound(op.basis.begin(), op.basis.end(), target);
      if (it == op.basis.end() || *it != target) continue;
      cplx v{0.0, 0.0};
      for (const auto* t : terms) v += t->weight * pauli_matrix_element(t->string, b);
      if (std::abs(v.real()) > 0.0)
        trip.emplace_back(static_cast<int>(it - op.basis.begin()), static_cast<int>(col), v.real());
    }
  }
  op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  return op;
}

}  // namespace hsbqsci
