#pragma once

// Spin-resolved occupation bitmasks and the interleaved qubit encoding
// (qubit 2p = alpha of orbital p, qubit 2p+1 = beta of orbital p).

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsbqsci {

using Bits = std::uint64_t;

inline constexpr std::size_t kMaxOrbitals = 32;

/// Binary text of `bits` with bit 0 rightmost.
inline std::string to_bitstring(Bits bits, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t q = 0; q < width; ++q)
    if ((bits >> q) & 1u) s[width - 1 - q] = '1';
  return s;
}

inline Bits from_bitstring(const std::string& s) {
  if (s.empty() || s.size() > 64) throw std::invalid_argument("bitstring width must be 1..64");
  Bits b = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring contains '" + std::string(1, c) + "'");
    b = (b << 1) | static_cast<Bits>(c == '1');
  }
  return b;
}

/// Spreads the low 32 bits of x onto the even bit positions.
constexpr Bits spread_even(Bits x) {
  x &= 0xffffffffULL;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

/// Inverse of spread_even: gathers the even bit positions.
constexpr Bits gather_even(Bits x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return x;
}

struct Determinant {
  Bits alpha = 0;
  Bits beta = 0;

  std::size_t n_alpha() const noexcept { return static_cast<std::size_t>(std::popcount(alpha)); }
  std::size_t n_beta() const noexcept { return static_cast<std::size_t>(std::popcount(beta)); }

  /// Basis index of the determinant in the interleaved qubit register.
  Bits qubit_index() const noexcept { return spread_even(alpha) | (spread_even(beta) << 1); }

  static Determinant from_qubit_index(Bits b) noexcept { return {gather_even(b), gather_even(b >> 1)}; }

  /// Excitation degree, counted per electron moved.
  std::size_t degree(const Determinant& o) const noexcept {
    return static_cast<std::size_t>(std::popcount(alpha ^ o.alpha) + std::popcount(beta ^ o.beta)) / 2;
  }

  /// Occupation text as used in the literature: 2, a, b, 0 per orbital,
  /// orbital 0 leftmost.
  std::string occupation_string(std::size_t n_orb) const {
    std::string s;
    for (std::size_t p = 0; p < n_orb; ++p) {
      const bool a = (alpha >> p) & 1u;
      const bool b = (beta >> p) & 1u;
      s += a && b ? '2' : a ? 'a' : b ? 'b' : '0';
    }
    return s;
  }

  static Determinant from_occupation_string(const std::string& s) {
    Determinant d;
    for (std::size_t p = 0; p < s.size(); ++p) {
      switch (s[p]) {
        case '2': d.alpha |= Bits{1} << p; d.beta |= Bits{1} << p; break;
        case 'a': d.alpha |= Bits{1} << p; break;
        case 'b': d.beta |= Bits{1} << p; break;
        case '0': break;
        default: throw std::invalid_argument("occupation string may contain only 2, a, b, 0");
      }
    }
    return d;
  }

  auto operator<=>(const Determinant&) const = default;
};

/// Lowest-orbital filling for the given electron counts.
inline Determinant aufbau_determinant(std::size_t n_alpha, std::size_t n_beta) {
  auto low = [](std::size_t k) { return k >= 64 ? ~Bits{0} : (Bits{1} << k) - 1; };
  return {low(n_alpha), low(n_beta)};
}

/// Sign relating the alpha-block-then-beta-block creation order to the
/// interleaved qubit order: |qubit_index(d)> = jw_sign(d) * |d>.
inline int jw_sign(const Determinant& d) noexcept {
  std::size_t inversions = 0;
  for (Bits a = d.alpha; a; a &= a - 1) {
    const auto p = static_cast<unsigned>(std::countr_zero(a));
    const Bits below = p == 0 ? 0 : d.beta & ((Bits{1} << p) - 1);
    inversions += static_cast<std::size_t>(std::popcount(below));
  }
  return inversions % 2 ? -1 : 1;
}

/// Ordered, duplicate-free collection of determinants.
class DeterminantSet {
 public:
  DeterminantSet() = default;
  DeterminantSet(std::initializer_list<Determinant> dets) : dets_(dets) { normalize(); }
  explicit DeterminantSet(std::vector<Determinant> dets) : dets_(std::move(dets)) { normalize(); }

  std::size_t size() const noexcept { return dets_.size(); }
  bool empty() const noexcept { return dets_.empty(); }
  auto begin() const noexcept { return dets_.begin(); }
  auto end() const noexcept { return dets_.end(); }
  const Determinant& operator[](std::size_t i) const { return dets_[i]; }
  const std::vector<Determinant>& dets() const noexcept { return dets_; }

  bool contains(const Determinant& d) const { return std::binary_search(dets_.begin(), dets_.end(), d); }

  /// Position of d, or size() when absent.
  std::size_t index_of(const Determinant& d) const {
    auto it = std::lower_bound(dets_.begin(), dets_.end(), d);
    return (it != dets_.end() && *it == d) ? static_cast<std::size_t>(it - dets_.begin()) : dets_.size();
  }

  bool insert(const Determinant& d) {
    auto it = std::lower_bound(dets_.begin(), dets_.end(), d);
    if (it != dets_.end() && *it == d) return false;
    dets_.insert(it, d);
    return true;
  }

  void merge(const DeterminantSet& other) {
    std::vector<Determinant> out;
    out.reserve(dets_.size() + other.size());
    std::set_union(dets_.begin(), dets_.end(), other.begin(), other.end(), std::back_inserter(out));
    dets_ = std::move(out);
  }

  bool includes(const DeterminantSet& other) const {
    return std::includes(dets_.begin(), dets_.end(), other.begin(), other.end());
  }

  /// True when every member has exactly these sector counts.
  bool uniform(std::size_t n_alpha, std::size_t n_beta) const {
    return std::all_of(dets_.begin(), dets_.end(),
                       [&](const Determinant& d) { return d.n_alpha() == n_alpha && d.n_beta() == n_beta; });
  }

  template <class Pred>
  DeterminantSet filtered(Pred keep) const {
    DeterminantSet out;
    std::copy_if(dets_.begin(), dets_.end(), std::back_inserter(out.dets_), keep);
    return out;
  }

  bool operator==(const DeterminantSet&) const = default;

 private:
  void normalize() {
    std::sort(dets_.begin(), dets_.end());
    dets_.erase(std::unique(dets_.begin(), dets_.end()), dets_.end());
  }
  std::vector<Determinant> dets_;
};

/// One determinant per line: `alpha_bits beta_bits`, orbital 0 rightmost.
inline void write_determinant_set(std::ostream& out, const DeterminantSet& set, std::size_t n_orb) {
  for (const auto& d : set) out << to_bitstring(d.alpha, n_orb) << ' ' << to_bitstring(d.beta, n_orb) << '\n';
}

inline DeterminantSet read_determinant_set(std::istream& in) {
  std::vector<Determinant> dets;
  std::string a, b;
  while (in >> a >> b) dets.push_back({from_bitstring(a), from_bitstring(b)});
  return DeterminantSet(std::move(dets));
}

}  // namespace hsbqsci

template <>
struct std::hash<hsbqsci::Determinant> {
  std::size_t operator()(const hsbqsci::Determinant& d) const noexcept {
    std::uint64_t x = d.alpha * 0x9e3779b97f4a7c15ULL ^ (d.beta + 0x632be59bd9b4e019ULL);
    x ^= x >> 31;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    return static_cast<std::size_t>(x);
  }
};
