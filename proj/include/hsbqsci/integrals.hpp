#pragma once

// Active-space molecular integrals: FCIDUMP ingestion, symmetry validation,
// orbital relabeling.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace hsbqsci {

/// Thrown for every malformed FCIDUMP input. `line()` is 1-based; 0 means the
/// problem is not attached to a single line (e.g. a missing header key).
class FcidumpError : public std::runtime_error {
 public:
  FcidumpError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// One- and two-electron integrals over `n_orb` spatial orbitals.
///
/// `g` is stored densely in chemists' notation, g(i,j,k,l) = (ij|kl), with all
/// eight permutational partners present. Irrep labels are XOR-composable
/// (D2h and subgroups); an empty `orb_irreps` means no point-group data.
struct MolecularIntegrals {
  std::size_t n_orb = 0;
  std::size_t n_alpha = 0;
  std::size_t n_beta = 0;
  double core_energy = 0.0;
  std::vector<double> h;  // n_orb * n_orb, row major
  std::vector<double> g;  // n_orb^4, index ((i*n + j)*n + k)*n + l
  std::optional<std::vector<unsigned>> orb_irreps;
  unsigned target_irrep = 0;

  MolecularIntegrals() = default;
  MolecularIntegrals(std::size_t norb, std::size_t nalpha, std::size_t nbeta)
      : n_orb(norb), n_alpha(nalpha), n_beta(nbeta), h(norb * norb, 0.0),
        g(norb * norb * norb * norb, 0.0) {}

  std::size_t n_electrons() const noexcept { return n_alpha + n_beta; }
  std::size_t n_qubits() const noexcept { return 2 * n_orb; }
  bool has_symmetry() const noexcept { return orb_irreps.has_value(); }

  double& one(std::size_t p, std::size_t q) { return h[p * n_orb + q]; }
  double one(std::size_t p, std::size_t q) const { return h[p * n_orb + q]; }

  double& two(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return g[((i * n_orb + j) * n_orb + k) * n_orb + l];
  }
  double two(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return g[((i * n_orb + j) * n_orb + k) * n_orb + l];
  }

  /// Writes (ij|kl) into all eight symmetry-equivalent slots.
  void set_two_symmetric(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double v) {
    two(i, j, k, l) = v;
    two(j, i, k, l) = v;
    two(i, j, l, k) = v;
    two(j, i, l, k) = v;
    two(k, l, i, j) = v;
    two(l, k, i, j) = v;
    two(k, l, j, i) = v;
    two(l, k, j, i) = v;
  }

  void set_one_symmetric(std::size_t p, std::size_t q, double v) {
    one(p, q) = v;
    one(q, p) = v;
  }

  bool operator==(const MolecularIntegrals&) const = default;
};

// ---------------------------------------------------------------------------
// FCIDUMP parsing

namespace detail {

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<long long> parse_int(std::string_view tok) {
  long long v = 0;
  auto first = tok.data();
  auto last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view tok) {
  std::string s(tok);
  // Fortran double-precision exponent markers.
  for (auto& c : s)
    if (c == 'D' || c == 'd') c = 'E';
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct Header {
  std::map<std::string, std::vector<long long>> values;
  std::size_t first_body_line = 0;
};

// Reads the namelist block up to `&END` or a lone `/`. Keys map to one or
// more integer values; unknown keys (e.g. UHF, IUHF) are kept but unused.
inline Header read_header(std::istream& in, std::size_t& line_no) {
  std::string text;
  std::string line;
  bool started = false;
  bool terminated = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string u = upper(line);
    if (!started) {
      auto pos = u.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (u.compare(pos, 4, "&FCI") != 0)
        throw FcidumpError(line_no, "malformed header: expected '&FCI' namelist");
      started = true;
      u = u.substr(pos + 4);
    }
    auto end_pos = u.find("&END");
    if (end_pos == std::string::npos) {
      const auto last = u.find_last_not_of(" \t\r");
      if (last != std::string::npos && u[last] == '/') end_pos = last;
    }
    if (end_pos != std::string::npos) {
      text += ' ' + u.substr(0, end_pos);
      terminated = true;
      break;
    }
    text += ' ' + u;
  }
  if (!started) throw FcidumpError(0, "malformed header: empty input");
  if (!terminated) throw FcidumpError(line_no, "malformed header: missing '&END' or '/'");

  for (auto& c : text)
    if (c == ',') c = ' ';
  // Normalize "KEY = v" and "KEY= v" into "KEY= v".
  std::string norm;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '=') {
      while (!norm.empty() && norm.back() == ' ') norm.pop_back();
      norm += "= ";
    } else {
      norm += text[i];
    }
  }

  Header hdr;
  std::string key;
  for (const auto& tok : split_ws(norm)) {
    if (tok.back() == '=') {
      key = tok.substr(0, tok.size() - 1);
      if (key.empty()) throw FcidumpError(line_no, "malformed header: '=' without key");
      hdr.values[key];
      continue;
    }
    if (key.empty()) throw FcidumpError(line_no, "malformed header: value '" + tok + "' without key");
    auto v = parse_int(tok);
    if (!v) throw FcidumpError(line_no, "malformed header: non-integer value '" + tok + "' for " + key);
    hdr.values[key].push_back(*v);
  }
  hdr.first_body_line = line_no + 1;
  return hdr;
}

inline long long header_scalar(const Header& hdr, const std::string& key,
                               std::optional<long long> fallback) {
  auto it = hdr.values.find(key);
  if (it == hdr.values.end() || it->second.empty()) {
    if (fallback) return *fallback;
    throw FcidumpError(0, "malformed header: missing " + key);
  }
  if (it->second.size() != 1)
    throw FcidumpError(0, "malformed header: " + key + " must be a single value");
  return it->second.front();
}

inline std::array<std::size_t, 4> canonical_quad(std::size_t i, std::size_t j, std::size_t k,
                                                 std::size_t l) {
  if (i < j) std::swap(i, j);
  if (k < l) std::swap(k, l);
  if (std::make_pair(i, j) < std::make_pair(k, l)) {
    std::swap(i, k);
    std::swap(j, l);
  }
  return {i, j, k, l};
}

}  // namespace detail

/// Parses an FCIDUMP stream. Duplicate records (including symmetry-equivalent
/// index orders) keep the last value and append a message to `warnings`.
/// Records of the form `e i 0 0 0` (orbital energies) are ignored.
inline MolecularIntegrals parse_fcidump(std::istream& in,
                                        std::vector<std::string>* warnings = nullptr) {
  std::size_t line_no = 0;
  const auto hdr = detail::read_header(in, line_no);

  const long long norb = detail::header_scalar(hdr, "NORB", std::nullopt);
  const long long nelec = detail::header_scalar(hdr, "NELEC", std::nullopt);
  const long long ms2 = detail::header_scalar(hdr, "MS2", 0);
  if (norb <= 0) throw FcidumpError(0, "malformed header: NORB must be positive");
  if (nelec < 0) throw FcidumpError(0, "malformed header: NELEC must be non-negative");
  if (ms2 < 0) throw FcidumpError(0, "malformed header: negative MS2 (n_alpha < n_beta) unsupported");
  if ((nelec + ms2) % 2 != 0)
    throw FcidumpError(0, "inconsistent NELEC/MS2 parity: NELEC=" + std::to_string(nelec) +
                              " MS2=" + std::to_string(ms2));
  if (ms2 > nelec) throw FcidumpError(0, "inconsistent NELEC/MS2: MS2 exceeds NELEC");
  const auto n_alpha = static_cast<std::size_t>((nelec + ms2) / 2);
  const auto n_beta = static_cast<std::size_t>((nelec - ms2) / 2);
  const auto n = static_cast<std::size_t>(norb);
  if (n_alpha > n) throw FcidumpError(0, "inconsistent NELEC/MS2: more alpha electrons than orbitals");

  MolecularIntegrals ints(n, n_alpha, n_beta);
  if (auto it = hdr.values.find("ORBSYM"); it != hdr.values.end()) {
    if (it->second.size() != n)
      throw FcidumpError(0, "malformed header: ORBSYM has " + std::to_string(it->second.size()) +
                                " entries, expected " + std::to_string(n));
    std::vector<unsigned> irreps;
    for (auto s : it->second) {
      if (s < 1 || s > 8) throw FcidumpError(0, "malformed header: ORBSYM entry out of range 1..8");
      irreps.push_back(static_cast<unsigned>(s - 1));
    }
    ints.orb_irreps = std::move(irreps);
  }
  const long long isym = detail::header_scalar(hdr, "ISYM", 1);
  if (isym < 1 || isym > 8) throw FcidumpError(0, "malformed header: ISYM out of range 1..8");
  ints.target_irrep = static_cast<unsigned>(isym - 1);

  std::map<std::array<std::size_t, 4>, std::size_t> seen;
  std::optional<std::size_t> core_line;
  auto note_duplicate = [&](const std::array<std::size_t, 4>& key) {
    auto [it, inserted] = seen.emplace(key, line_no);
    if (!inserted && warnings) {
      warnings->push_back("line " + std::to_string(line_no) + ": duplicate of record on line " +
                          std::to_string(it->second) + ", last value kept");
    }
    it->second = line_no;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 5) throw FcidumpError(line_no, "expected 'value i j k l', got " +
                                                          std::to_string(toks.size()) + " fields");
    const auto value = detail::parse_real(toks[0]);
    if (!value) throw FcidumpError(line_no, "non-numeric value '" + toks[0] + "'");
    std::array<long long, 4> idx{};
    for (int t = 0; t < 4; ++t) {
      auto v = detail::parse_int(toks[1 + t]);
      if (!v) throw FcidumpError(line_no, "non-integer index '" + toks[1 + t] + "'");
      if (*v < 0 || *v > norb)
        throw FcidumpError(line_no, "index " + std::to_string(*v) + " out of range [1, " +
                                        std::to_string(norb) + "]");
      idx[t] = *v;
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      if (core_line && warnings)
        warnings->push_back("line " + std::to_string(line_no) + ": duplicate core energy, last value kept");
      core_line = line_no;
      ints.core_energy = *value;
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      const auto p = static_cast<std::size_t>(std::max(i, j) - 1);
      const auto q = static_cast<std::size_t>(std::min(i, j) - 1);
      note_duplicate({p, q, n, n});
      ints.set_one_symmetric(p, q, *value);
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      const auto key = detail::canonical_quad(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1),
                                              static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1));
      note_duplicate(key);
      ints.set_two_symmetric(key[0], key[1], key[2], key[3], *value);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      continue;  // orbital energy
    } else {
      throw FcidumpError(line_no, "unrecognized index pattern");
    }
  }
  return ints;
}

inline MolecularIntegrals parse_fcidump_string(const std::string& text,
                                               std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_fcidump(in, warnings);
}

inline MolecularIntegrals read_fcidump(const std::string& path,
                                       std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw FcidumpError(0, "cannot open '" + path + "'");
  return parse_fcidump(in, warnings);
}

/// Writes unique (ij|kl) with i>=j, k>=l, ij>=kl, then h (i>=j), then the
/// core energy. 17 significant digits make parse(write(x)) == x exact.
inline void write_fcidump(std::ostream& out, const MolecularIntegrals& ints, double tol = 0.0) {
  const auto n = ints.n_orb;
  char buf[64];
  out << " &FCI NORB=" << n << ",NELEC=" << ints.n_electrons()
      << ",MS2=" << (ints.n_alpha - ints.n_beta) << ",\n";
  if (ints.orb_irreps) {
    out << "  ORBSYM=";
    for (auto s : *ints.orb_irreps) out << (s + 1) << ',';
    out << '\n';
  }
  out << "  ISYM=" << (ints.target_irrep + 1) << ",\n &END\n";
  auto rec = [&](double v, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << ' ' << buf << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          if (k == i && l > j) break;
          const double v = ints.two(i, j, k, l);
          if (std::abs(v) > tol || (tol == 0.0 && v != 0.0)) rec(v, i + 1, j + 1, k + 1, l + 1);
        }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = ints.one(i, j);
      if (std::abs(v) > tol || (tol == 0.0 && v != 0.0)) rec(v, i + 1, j + 1, 0, 0);
    }
  rec(ints.core_energy, 0, 0, 0, 0);
}

inline std::string to_fcidump_string(const MolecularIntegrals& ints) {
  std::ostringstream out;
  write_fcidump(out, ints);
  return out.str();
}

// ---------------------------------------------------------------------------
// Symmetry validation

struct SymmetryViolation {
  enum class Kind { one_electron, two_electron } kind;
  std::array<std::size_t, 4> index{};  // unused trailing slots are zero for one-electron entries
  double value = 0.0;
  double expected = 0.0;
};

/// Lists every entry that disagrees (beyond `tol`) with the value shared by
/// the majority of its permutational partners. Ties resolve toward the
/// canonical (largest-index-first) member, so a single perturbed element is
/// the only one reported.
inline std::vector<SymmetryViolation> validate_integral_symmetry(const MolecularIntegrals& ints,
                                                                 double tol = 1e-12) {
  std::vector<SymmetryViolation> report;
  const auto n = ints.n_orb;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < p; ++q) {
      const double a = ints.one(p, q);
      const double b = ints.one(q, p);
      if (std::abs(a - b) > tol)
        report.push_back({SymmetryViolation::Kind::one_electron, {q, p, 0, 0}, b, a});
    }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          if (k == i && l > j) break;
          std::array<std::array<std::size_t, 4>, 8> partners = {{{i, j, k, l},
                                                                 {j, i, k, l},
                                                                 {i, j, l, k},
                                                                 {j, i, l, k},
                                                                 {k, l, i, j},
                                                                 {l, k, i, j},
                                                                 {k, l, j, i},
                                                                 {l, k, j, i}}};
          std::sort(partners.begin(), partners.end());
          const auto last = std::unique(partners.begin(), partners.end());
          const std::vector<std::array<std::size_t, 4>> orbit(partners.begin(), last);
          auto val = [&](const std::array<std::size_t, 4>& x) { return ints.two(x[0], x[1], x[2], x[3]); };

          const double canonical = ints.two(i, j, k, l);
          double reference = canonical;
          std::size_t best = 0;
          for (const auto& cand : orbit) {
            std::size_t agree = 0;
            for (const auto& other : orbit)
              if (std::abs(val(cand) - val(other)) <= tol) ++agree;
            if (agree > best) {
              best = agree;
              reference = val(cand);
            } else if (agree == best && std::abs(val(cand) - canonical) <= tol) {
              reference = canonical;
            }
          }
          for (const auto& m : orbit)
            if (std::abs(val(m) - reference) > tol)
              report.push_back({SymmetryViolation::Kind::two_electron, m, val(m), reference});
        }
  return report;
}

// ---------------------------------------------------------------------------
// Orbital relabeling

/// Bijection on orbital indices; new orbital `a` is old orbital `perm[a]`.
class OrbitalPermutation {
 public:
  explicit OrbitalPermutation(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
    std::vector<bool> hit(perm_.size(), false);
    for (auto p : perm_) {
      if (p >= perm_.size() || hit[p]) throw std::invalid_argument("OrbitalPermutation: not a bijection");
      hit[p] = true;
    }
  }

  static OrbitalPermutation identity(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return OrbitalPermutation(std::move(p));
  }

  std::size_t size() const noexcept { return perm_.size(); }
  std::size_t operator()(std::size_t a) const { return perm_.at(a); }
  const std::vector<std::size_t>& map() const noexcept { return perm_; }

  OrbitalPermutation inverse() const {
    std::vector<std::size_t> inv(perm_.size());
    for (std::size_t a = 0; a < perm_.size(); ++a) inv[perm_[a]] = a;
    return OrbitalPermutation(std::move(inv));
  }

 private:
  std::vector<std::size_t> perm_;
};

inline MolecularIntegrals apply_orbital_permutation(const MolecularIntegrals& ints,
                                                    const OrbitalPermutation& p) {
  const auto n = ints.n_orb;
  if (p.size() != n)
    throw std::invalid_argument("apply_orbital_permutation: permutation size " + std::to_string(p.size()) +
                                " does not match n_orb " + std::to_string(n));
  MolecularIntegrals out(n, ints.n_alpha, ints.n_beta);
  out.core_energy = ints.core_energy;
  out.target_irrep = ints.target_irrep;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.one(a, b) = ints.one(p(a), p(b));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) out.two(a, b, c, d) = ints.two(p(a), p(b), p(c), p(d));
  if (ints.orb_irreps) {
    std::vector<unsigned> irr(n);
    for (std::size_t a = 0; a < n; ++a) irr[a] = (*ints.orb_irreps)[p(a)];
    out.orb_irreps = std::move(irr);
  }
  return out;
}

}  // namespace hsbqsci
