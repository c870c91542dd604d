#pragma once

// Selected-CI core: Slater-Condon matrix elements, point-group labels,
// subspace Hamiltonians, diagonalization and spin/occupation observables.
//
// Determinant phases follow the canonical creation order alpha block
// (ascending orbital) then beta block (ascending orbital). jw_sign() in
// determinant.hpp converts to the interleaved qubit order.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "davidson.hpp"
#include "determinant.hpp"
#include "integrals.hpp"

namespace hsbqsci {

/// Even qubits -> alpha string, odd qubits -> beta string.
inline Determinant determinant_from_bitstring(Bits b, std::size_t width) {
  if (width % 2) throw std::invalid_argument("determinant_from_bitstring: odd register width");
  if (width < 64 && (b >> width)) throw std::invalid_argument("determinant_from_bitstring: bits beyond width");
  return Determinant::from_qubit_index(b);
}

inline Determinant determinant_from_bitstring(const std::string& text) {
  return determinant_from_bitstring(from_bitstring(text), text.size());
}

namespace detail {

inline int parity(Bits x) noexcept { return (std::popcount(x) & 1) ? -1 : 1; }

/// Sign of moving one electron from `from` to `to` within `mask`
/// (occupied orbitals strictly between the two positions).
inline int excitation_sign(Bits mask, unsigned from, unsigned to) noexcept {
  const unsigned lo = std::min(from, to), hi = std::max(from, to);
  const Bits between = hi - lo > 1 ? (((Bits{1} << hi) - 1) & ~((Bits{1} << (lo + 1)) - 1)) : 0;
  return parity(mask & between);
}

inline unsigned lowest(Bits x) noexcept { return static_cast<unsigned>(std::countr_zero(x)); }
inline unsigned highest(Bits x) noexcept { return 63u - static_cast<unsigned>(std::countl_zero(x)); }

inline double diagonal_element(const Determinant& d, const MolecularIntegrals& ints) {
  double e = ints.core_energy;
  std::vector<unsigned> oa, ob;
  for (Bits a = d.alpha; a; a &= a - 1) oa.push_back(lowest(a));
  for (Bits b = d.beta; b; b &= b - 1) ob.push_back(lowest(b));
  for (auto p : oa) e += ints.one(p, p);
  for (auto p : ob) e += ints.one(p, p);
  auto same_spin = [&](const std::vector<unsigned>& occ) {
    double s = 0.0;
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j) {
        const auto p = occ[i], q = occ[j];
        s += ints.two(p, p, q, q) - ints.two(p, q, q, p);
      }
    return s;
  };
  e += same_spin(oa) + same_spin(ob);
  for (auto p : oa)
    for (auto q : ob) e += ints.two(p, p, q, q);
  return e;
}

// <d1|H|d2> for a single excitation i -> a in one spin block. `same` is the
// ket's occupation in that block, `other` the opposite block.
inline double single_element(Bits same, Bits other, unsigned i, unsigned a, const MolecularIntegrals& ints) {
  double v = ints.one(a, i);
  for (Bits m = same & ~(Bits{1} << i); m; m &= m - 1) {
    const unsigned k = lowest(m);
    v += ints.two(a, i, k, k) - ints.two(a, k, k, i);
  }
  for (Bits m = other; m; m &= m - 1) {
    const unsigned k = lowest(m);
    v += ints.two(a, i, k, k);
  }
  return excitation_sign(same, i, a) * v;
}

inline double same_spin_double(Bits ket, Bits holes, Bits parts, const MolecularIntegrals& ints) {
  const unsigned i = lowest(holes), j = highest(holes);
  const unsigned a = lowest(parts), b = highest(parts);
  const int s1 = excitation_sign(ket, i, a);
  const Bits mid = (ket & ~(Bits{1} << i)) | (Bits{1} << a);
  const int s2 = excitation_sign(mid, j, b);
  return s1 * s2 * (ints.two(a, i, b, j) - ints.two(a, j, b, i));
}

}  // namespace detail

/// <d1|H|d2> including the core energy on the diagonal; zero beyond double
/// excitations. Exactly symmetric in its arguments.
inline double slater_condon_element(const Determinant& d1, const Determinant& d2, const MolecularIntegrals& ints) {
  if (d1.n_alpha() != d2.n_alpha() || d1.n_beta() != d2.n_beta())
    throw std::invalid_argument("slater_condon_element: particle-number mismatch");
  const Determinant& bra = d1 < d2 ? d1 : d2;
  const Determinant& ket = d1 < d2 ? d2 : d1;
  const Bits xa = bra.alpha ^ ket.alpha;
  const Bits xb = bra.beta ^ ket.beta;
  const int na = std::popcount(xa) / 2;
  const int nb = std::popcount(xb) / 2;
  if (na + nb > 2) return 0.0;
  if (na + nb == 0) return detail::diagonal_element(bra, ints);
  if (na == 1 && nb == 0) {
    return detail::single_element(ket.alpha, ket.beta, detail::lowest(ket.alpha & xa), detail::lowest(bra.alpha & xa),
                                  ints);
  }
  if (na == 0 && nb == 1) {
    return detail::single_element(ket.beta, ket.alpha, detail::lowest(ket.beta & xb), detail::lowest(bra.beta & xb),
                                  ints);
  }
  if (na == 2) return detail::same_spin_double(ket.alpha, ket.alpha & xa, bra.alpha & xa, ints);
  if (nb == 2) return detail::same_spin_double(ket.beta, ket.beta & xb, bra.beta & xb, ints);
  // One alpha and one beta electron moved.
  const unsigned i = detail::lowest(ket.alpha & xa), a = detail::lowest(bra.alpha & xa);
  const unsigned j = detail::lowest(ket.beta & xb), b = detail::lowest(bra.beta & xb);
  return detail::excitation_sign(ket.alpha, i, a) * detail::excitation_sign(ket.beta, j, b) * ints.two(a, i, b, j);
}

/// XOR of the irrep labels of all occupied spin orbitals.
inline unsigned determinant_irrep(const Determinant& d, const MolecularIntegrals& ints) {
  if (!ints.orb_irreps) throw std::invalid_argument("determinant_irrep: integrals carry no irrep labels");
  unsigned x = 0;
  for (Bits a = d.alpha; a; a &= a - 1) x ^= (*ints.orb_irreps)[detail::lowest(a)];
  for (Bits b = d.beta; b; b &= b - 1) x ^= (*ints.orb_irreps)[detail::lowest(b)];
  return x;
}

/// True when d belongs to the target irrep, or when no irrep data exists.
inline bool matches_target_irrep(const Determinant& d, const MolecularIntegrals& ints) {
  return !ints.has_symmetry() || determinant_irrep(d, ints) == ints.target_irrep;
}

/// Aufbau reference (RHF or ROHF-like) for the integrals' sector.
inline Determinant reference_determinant(const MolecularIntegrals& ints) {
  return aufbau_determinant(ints.n_alpha, ints.n_beta);
}

/// Every determinant of the active space with the integrals' (n_alpha,
/// n_beta); optionally only those in the target irrep.
inline DeterminantSet enumerate_cas_determinants(const MolecularIntegrals& ints, bool irrep_filter) {
  if (ints.n_orb > kMaxOrbitals) throw std::invalid_argument("enumerate_cas_determinants: too many orbitals");
  std::vector<Bits> alphas, betas;
  const Bits limit = Bits{1} << ints.n_orb;
  for (Bits m = 0; m < limit; ++m) {
    const auto pc = static_cast<std::size_t>(std::popcount(m));
    if (pc == ints.n_alpha) alphas.push_back(m);
    if (pc == ints.n_beta) betas.push_back(m);
  }
  std::vector<Determinant> dets;
  for (auto a : alphas)
    for (auto b : betas) {
      const Determinant d{a, b};
      if (irrep_filter && !matches_target_irrep(d, ints)) continue;
      dets.push_back(d);
    }
  return DeterminantSet(std::move(dets));
}

// ---------------------------------------------------------------------------
// Subspace Hamiltonian

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SubspaceHamiltonian {
  DeterminantSet basis;
  SparseMatrix matrix;
  std::size_t n_orb = 0;
};

inline SubspaceHamiltonian build_subspace_matrix(const DeterminantSet& basis, const MolecularIntegrals& ints) {
  if (basis.empty()) throw std::invalid_argument("build_subspace_matrix: empty basis");
  const auto& d0 = basis[0];
  if (!basis.uniform(d0.n_alpha(), d0.n_beta()))
    throw std::invalid_argument("build_subspace_matrix: basis mixes particle-number sectors");
  const auto n = basis.size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(n * 8);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& di = basis[i];
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), slater_condon_element(di, di, ints));
    for (std::size_t j = 0; j < i; ++j) {
      const auto& dj = basis[j];
      // Screen on the excitation degree before touching integrals.
      if (std::popcount(di.alpha ^ dj.alpha) + std::popcount(di.beta ^ dj.beta) > 4) continue;
      const double v = slater_condon_element(di, dj, ints);
      if (v == 0.0) continue;
      trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
      trip.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
    }
  }
  SubspaceHamiltonian h{basis, SparseMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)), ints.n_orb};
  h.matrix.setFromTriplets(trip.begin(), trip.end());
  h.matrix.makeCompressed();
  return h;
}

enum class Backend { automatic, dense, davidson };

inline Backend parse_backend(const std::string& s) {
  if (s == "auto" || s == "automatic") return Backend::automatic;
  if (s == "dense") return Backend::dense;
  if (s == "davidson") return Backend::davidson;
  throw std::invalid_argument("unknown backend '" + s + "'");
}

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::dense: return "dense";
    case Backend::davidson: return "davidson";
    default: return "auto";
  }
}

/// Dimension below which the automatic backend uses dense diagonalization.
inline constexpr std::size_t kDenseThreshold = 2000;

struct CIResult {
  double energy = 0.0;
  Eigen::VectorXd coefficients;
  DeterminantSet basis;
  std::size_t n_orb = 0;
};

/// Lowest `n_roots` eigenpairs in ascending order. Each vector is signed so
/// that its largest-magnitude coefficient (first one on ties) is positive.
inline std::vector<CIResult> diagonalize_subspace(const SubspaceHamiltonian& h, std::size_t n_roots,
                                                  Backend backend = Backend::automatic,
                                                  const DavidsonOptions& opt = {}) {
  const auto dim = h.basis.size();
  if (n_roots == 0 || n_roots > dim)
    throw std::invalid_argument("diagonalize_subspace: n_roots must lie in [1, " + std::to_string(dim) + "]");
  if (backend == Backend::automatic) backend = dim < kDenseThreshold ? Backend::dense : Backend::davidson;

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (backend == Backend::dense) {
    const Eigen::MatrixXd m(h.matrix);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
    values = es.eigenvalues().head(static_cast<Eigen::Index>(n_roots));
    vectors = es.eigenvectors().leftCols(static_cast<Eigen::Index>(n_roots));
  } else {
    auto res = davidson(h.matrix, n_roots, opt);
    values = res.eigenvalues;
    vectors = res.eigenvectors;
  }

  std::vector<CIResult> out;
  for (std::size_t r = 0; r < n_roots; ++r) {
    Eigen::VectorXd c = vectors.col(static_cast<Eigen::Index>(r));
    c.normalize();
    Eigen::Index imax = 0;
    for (Eigen::Index i = 1; i < c.size(); ++i)
      if (std::abs(c(i)) > std::abs(c(imax))) imax = i;
    if (c(imax) < 0) c = -c;
    out.push_back({values(static_cast<Eigen::Index>(r)), std::move(c), h.basis, h.n_orb});
  }
  return out;
}

/// Convenience: lowest root on `basis`.
inline CIResult solve_subspace(const DeterminantSet& basis, const MolecularIntegrals& ints,
                               Backend backend = Backend::automatic) {
  return diagonalize_subspace(build_subspace_matrix(basis, ints), 1, backend).front();
}

/// Complete-active-space CI reference.
inline CIResult casci(const MolecularIntegrals& ints, bool irrep_filter, Backend backend = Backend::automatic) {
  return solve_subspace(enumerate_cas_determinants(ints, irrep_filter), ints, backend);
}

// ---------------------------------------------------------------------------
// Observables

/// <Psi|S^2|Psi> = Sz^2 + Sz + |S+ Psi|^2. S+ Psi is formed exactly in the
/// M_S + 1 determinant space, so no projection onto the basis is involved.
inline double s_squared_expectation(const CIResult& r) {
  if (r.basis.empty()) return 0.0;
  const auto& d0 = r.basis[0];
  const double sz = 0.5 * (static_cast<double>(d0.n_alpha()) - static_cast<double>(d0.n_beta()));
  std::unordered_map<Determinant, double> raised;
  const auto n_alpha = d0.n_alpha();
  double norm2 = 0.0;
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    const double c = r.coefficients(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    const auto& d = r.basis[i];
    norm2 += c * c;
    // a+_{q alpha} a_{q beta} for every beta-only orbital q.
    for (Bits open = d.beta & ~d.alpha; open; open &= open - 1) {
      const unsigned q = detail::lowest(open);
      const Bits below = (Bits{1} << q) - 1;
      const int sign = ((n_alpha + std::popcount(d.beta & below) + std::popcount(d.alpha & below)) & 1) ? -1 : 1;
      raised[Determinant{d.alpha | (Bits{1} << q), d.beta & ~(Bits{1} << q)}] += sign * c;
    }
  }
  double splus = 0.0;
  for (const auto& [d, v] : raised) splus += v * v;
  return (sz * sz + sz) * norm2 + splus;
}

struct OccupationVector {
  std::vector<double> alpha;
  std::vector<double> beta;

  double total_alpha() const {
    double s = 0.0;
    for (auto v : alpha) s += v;
    return s;
  }
  double total_beta() const {
    double s = 0.0;
    for (auto v : beta) s += v;
    return s;
  }

  /// 0/1 occupations of a single determinant.
  static OccupationVector of(const Determinant& d, std::size_t n_orb) {
    OccupationVector o{std::vector<double>(n_orb, 0.0), std::vector<double>(n_orb, 0.0)};
    for (std::size_t p = 0; p < n_orb; ++p) {
      o.alpha[p] = static_cast<double>((d.alpha >> p) & 1u);
      o.beta[p] = static_cast<double>((d.beta >> p) & 1u);
    }
    return o;
  }
};

/// occ_{sigma,p} = sum_d |c_d|^2 [p occupied with spin sigma in d]
inline OccupationVector orbital_occupations(const CIResult& r) {
  OccupationVector o{std::vector<double>(r.n_orb, 0.0), std::vector<double>(r.n_orb, 0.0)};
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    const double w = r.coefficients(static_cast<Eigen::Index>(i)) * r.coefficients(static_cast<Eigen::Index>(i));
    const auto& d = r.basis[i];
    for (Bits a = d.alpha; a; a &= a - 1) o.alpha[detail::lowest(a)] += w;
    for (Bits b = d.beta; b; b &= b - 1) o.beta[detail::lowest(b)] += w;
  }
  return o;
}

/// `energy` line, then `coefficient alpha_bits beta_bits` by descending
/// |coefficient|.
inline void write_eigenpair_report(std::ostream& out, const CIResult& r, double min_abs = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12f", r.energy);
  out << buf << '\n';
  std::vector<std::size_t> idx(r.basis.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(r.coefficients(static_cast<Eigen::Index>(a))) > std::abs(r.coefficients(static_cast<Eigen::Index>(b)));
  });
  for (auto i : idx) {
    const double c = r.coefficients(static_cast<Eigen::Index>(i));
    if (std::abs(c) < min_abs) break;
    std::snprintf(buf, sizeof buf, "% .10f", c);
    out << buf << ' ' << to_bitstring(r.basis[i].alpha, r.n_orb) << ' ' << to_bitstring(r.basis[i].beta, r.n_orb)
        << '\n';
  }
}

}  // namespace hsbqsci
