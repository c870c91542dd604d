#pragma once

// Independent reference implementations used only by the tests. None of
// these go through the library's Pauli algebra or Slater-Condon code.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hsbqsci/determinant.hpp"
#include "hsbqsci/integrals.hpp"

namespace oracle {

using hsbqsci::Bits;
using hsbqsci::Determinant;
using hsbqsci::MolecularIntegrals;

inline std::string data(const std::string& name) { return std::string(HSBQSCI_DATA_DIR) + "/" + name; }

/// Result of a ladder operator on a Fock basis state; `sign == 0` means the
/// state was annihilated.
struct Ket {
  Bits state = 0;
  int sign = 0;
};

/// Mode j = 2p + s; the sign counts occupied modes with smaller index.
inline Ket annihilate(Ket k, std::size_t j) {
  if (k.sign == 0 || !((k.state >> j) & 1u)) return {0, 0};
  const int parity = std::popcount(k.state & ((Bits{1} << j) - 1)) & 1;
  return {k.state ^ (Bits{1} << j), parity ? -k.sign : k.sign};
}

inline Ket create(Ket k, std::size_t j) {
  if (k.sign == 0 || ((k.state >> j) & 1u)) return {0, 0};
  const int parity = std::popcount(k.state & ((Bits{1} << j) - 1)) & 1;
  return {k.state ^ (Bits{1} << j), parity ? -k.sign : k.sign};
}

/// Dense Fock-space Hamiltonian over all 2^(2n) occupation states built
/// straight from ladder operators:
///   H = E_core + sum h_pq a+_{p s} a_{q s}
///     + 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
inline Eigen::MatrixXd fock_hamiltonian(const MolecularIntegrals& ints) {
  const std::size_t n = ints.n_orb;
  const std::size_t modes = 2 * n;
  const Eigen::Index dim = Eigen::Index{1} << modes;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  auto mode = [](std::size_t p, std::size_t s) { return 2 * p + s; };
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Ket ket{static_cast<Bits>(col), 1};
    H(col, col) += ints.core_energy;
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
          const double v = ints.one(p, q);
          if (v == 0.0) continue;
          const Ket out = create(annihilate(ket, mode(q, s)), mode(p, s));
          if (out.sign) H(static_cast<Eigen::Index>(out.state), col) += out.sign * v;
        }
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t t = 0; t < 2; ++t)
        for (std::size_t p = 0; p < n; ++p)
          for (std::size_t q = 0; q < n; ++q)
            for (std::size_t r = 0; r < n; ++r)
              for (std::size_t u = 0; u < n; ++u) {
                const double v = ints.two(p, q, r, u);
                if (v == 0.0) continue;
                Ket out = annihilate(ket, mode(q, s));
                out = annihilate(out, mode(u, t));
                out = create(out, mode(r, t));
                out = create(out, mode(p, s));
                if (out.sign) H(static_cast<Eigen::Index>(out.state), col) += 0.5 * out.sign * v;
              }
  }
  return H;
}

/// |d> = a+_{alpha p1} ... a+_{alpha pk} a+_{beta q1} ... a+_{beta qm} |vac>
/// with ascending orbitals inside each block, as a Fock-space vector.
inline Eigen::VectorXd determinant_vector(const Determinant& d, std::size_t n_orb) {
  std::vector<std::size_t> ops;
  for (std::size_t p = 0; p < n_orb; ++p)
    if ((d.alpha >> p) & 1u) ops.push_back(2 * p);
  for (std::size_t p = 0; p < n_orb; ++p)
    if ((d.beta >> p) & 1u) ops.push_back(2 * p + 1);
  Ket k{0, 1};
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) k = create(k, *it);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(Eigen::Index{1} << (2 * n_orb));
  v(static_cast<Eigen::Index>(k.state)) = k.sign;
  return v;
}

/// Rows/columns of `H` restricted to the states with the given alpha and
/// beta popcounts (even/odd modes).
inline Eigen::MatrixXd sector_block(const Eigen::MatrixXd& H, std::size_t n_orb, std::size_t na, std::size_t nb) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < H.rows(); ++b) {
    std::size_t a = 0, c = 0;
    for (std::size_t p = 0; p < n_orb; ++p) {
      a += (static_cast<Bits>(b) >> (2 * p)) & 1u;
      c += (static_cast<Bits>(b) >> (2 * p + 1)) & 1u;
    }
    if (a == na && c == nb) idx.push_back(b);
  }
  Eigen::MatrixXd S(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) S(i, j) = H(idx[i], idx[j]);
  return S;
}

inline double lowest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues()(0);
}

/// Dense matrix of a Pauli string given as text, qubit 0 first in the text
/// and least significant in the basis index.
inline Eigen::MatrixXcd pauli_matrix(const std::string& text) {
  using C = std::complex<double>;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : text) {
    Eigen::Matrix2cd s;
    switch (c) {
      case 'X': s << 0, 1, 1, 0; break;
      case 'Y': s << 0, C(0, -1), C(0, 1), 0; break;
      case 'Z': s << 1, 0, 0, -1; break;
      default: s << 1, 0, 0, 1;
    }
    Eigen::MatrixXcd next(2 * m.rows(), 2 * m.cols());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = s(a, b) * m;
    m = next;
  }
  return m;
}

/// exp(-i H t) by eigendecomposition of a Hermitian matrix.
inline Eigen::MatrixXcd exact_propagator(const Eigen::MatrixXcd& H, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0.0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Probability that independent flips with probability p leave the popcount
/// of a k-of-n register unchanged: as many 1->0 as 0->1 flips.
inline double popcount_survival(std::size_t n, std::size_t k, double p) {
  auto binom = [](std::size_t a, std::size_t b) {
    double r = 1.0;
    for (std::size_t i = 1; i <= b; ++i) r = r * static_cast<double>(a - b + i) / static_cast<double>(i);
    return r;
  };
  double s = 0.0;
  for (std::size_t j = 0; j <= std::min(k, n - k); ++j)
    s += binom(k, j) * std::pow(p, static_cast<double>(j)) * std::pow(1 - p, static_cast<double>(k - j)) *
         binom(n - k, j) * std::pow(p, static_cast<double>(j)) * std::pow(1 - p, static_cast<double>(n - k - j));
  return s;
}

/// Random real integrals with full 8-fold symmetry and a positive-definite
/// flavored two-electron part.
inline MolecularIntegrals random_integrals(std::size_t n, std::size_t na, std::size_t nb, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MolecularIntegrals ints(n, na, nb);
  ints.core_energy = u(gen);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q <= p; ++q) ints.set_one_symmetric(p, q, (p == q ? -2.0 : 0.3) * u(gen));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          if (k * n + l > i * n + j) continue;
          const bool coulomb = i == j && k == l;
          ints.set_two_symmetric(i, j, k, l, coulomb ? 0.5 + 0.2 * u(gen) : 0.1 * u(gen));
        }
  return ints;
}

/// Two-orbital, two-electron toy with hand-picked integrals.
inline MolecularIntegrals toy_2e2o() {
  MolecularIntegrals ints(2, 1, 1);
  ints.core_energy = 0.7;
  ints.set_one_symmetric(0, 0, -1.25);
  ints.set_one_symmetric(1, 1, -0.45);
  ints.set_one_symmetric(0, 1, 0.08);
  ints.set_two_symmetric(0, 0, 0, 0, 0.67);
  ints.set_two_symmetric(1, 1, 1, 1, 0.70);
  ints.set_two_symmetric(0, 0, 1, 1, 0.66);
  ints.set_two_symmetric(0, 1, 0, 1, 0.18);
  ints.set_two_symmetric(0, 0, 0, 1, 0.03);
  ints.set_two_symmetric(1, 1, 0, 1, -0.02);
  return ints;
}

}  // namespace oracle
