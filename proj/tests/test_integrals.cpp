#include <gtest/gtest.h>

#include <sstream>

#include "hsbqsci/integrals.hpp"
#include "hsbqsci/sci.hpp"
#include "oracles.hpp"

using namespace hsbqsci;

namespace {

const char* kTiny = R"( &FCI NORB=2,NELEC=2,MS2=0,
  ORBSYM=1,5,
  ISYM=1,
 &END
  0.6757101548 1 1 1 1
  0.1809270275 2 1 2 1
  0.6645817233 2 2 1 1
  0.6985121064 2 2 2 2
 -1.2563390710 1 1 0 0
 -0.4718960038 2 2 0 0
  0.7199689944 0 0 0 0
)";

}  // namespace

TEST(Fcidump, ParsesHeaderAndRecords) {
  const auto ints = parse_fcidump_string(kTiny);
  EXPECT_EQ(ints.n_orb, 2u);
  EXPECT_EQ(ints.n_alpha, 1u);
  EXPECT_EQ(ints.n_beta, 1u);
  EXPECT_DOUBLE_EQ(ints.core_energy, 0.7199689944);
  EXPECT_DOUBLE_EQ(ints.one(1, 1), -0.4718960038);
  ASSERT_TRUE(ints.orb_irreps);
  EXPECT_EQ(*ints.orb_irreps, (std::vector<unsigned>{0, 4}));
  EXPECT_EQ(ints.target_irrep, 0u);
}

TEST(Fcidump, FillsAllEightPermutations) {
  const auto ints = parse_fcidump_string(kTiny);
  for (auto [i, j, k, l] : std::vector<std::array<int, 4>>{{1, 0, 1, 0}, {0, 1, 1, 0}, {1, 0, 0, 1}, {0, 1, 0, 1}})
    EXPECT_DOUBLE_EQ(ints.two(i, j, k, l), 0.1809270275);
  EXPECT_DOUBLE_EQ(ints.two(0, 0, 1, 1), 0.6645817233);
  EXPECT_DOUBLE_EQ(ints.two(1, 1, 0, 0), 0.6645817233);
  EXPECT_TRUE(validate_integral_symmetry(ints).empty());
}

TEST(Fcidump, ShippedH2MatchesReference) {
  const auto ints = read_fcidump(oracle::data("h2.fcidump"));
  EXPECT_EQ(ints.n_orb, 2u);
  EXPECT_NEAR(casci(ints, false).energy, -1.1373060357534008, 1e-10);
}

TEST(Fcidump, RoundTripIsExact) {
  for (const char* f : {"h2.fcidump", "h2o.fcidump", "benzene.fcidump", "benzene_t1.fcidump"}) {
    const auto a = read_fcidump(oracle::data(f));
    const auto b = parse_fcidump_string(to_fcidump_string(a));
    EXPECT_EQ(a, b) << f;
  }
}

TEST(Fcidump, RandomIntegralsRoundTrip) {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto a = oracle::random_integrals(4, 2, 1, seed);
    EXPECT_EQ(parse_fcidump_string(to_fcidump_string(a)), a);
  }
}

TEST(Fcidump, OpenShellHeader) {
  const auto ints = read_fcidump(oracle::data("benzene_t1.fcidump"));
  EXPECT_EQ(ints.n_alpha, 4u);
  EXPECT_EQ(ints.n_beta, 2u);
  EXPECT_EQ(ints.target_irrep, 2u);
}

TEST(Fcidump, SlashTerminatorAndMissingMs2) {
  const auto ints = parse_fcidump_string(" &FCI NORB=1, NELEC=2 /\n 0.5 1 1 1 1\n -1.0 1 1 0 0\n");
  EXPECT_EQ(ints.n_alpha, 1u);
  EXPECT_EQ(ints.n_beta, 1u);
  EXPECT_FALSE(ints.has_symmetry());
}

TEST(Fcidump, DuplicateRecordWarnsAndKeepsLast) {
  std::vector<std::string> warnings;
  const auto ints =
      parse_fcidump_string(" &FCI NORB=1,NELEC=2, &END\n 0.5 1 1 1 1\n 0.6 1 1 1 1\n", &warnings);
  EXPECT_DOUBLE_EQ(ints.two(0, 0, 0, 0), 0.6);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("line 3"), std::string::npos);
}

TEST(Fcidump, OrbitalEnergyRecordsIgnored) {
  const auto ints = parse_fcidump_string(" &FCI NORB=1,NELEC=2, &END\n -0.3 1 0 0 0\n 0.5 1 1 1 1\n");
  EXPECT_DOUBLE_EQ(ints.one(0, 0), 0.0);
}

TEST(Fcidump, Errors) {
  EXPECT_THROW(parse_fcidump_string(""), FcidumpError);
  EXPECT_THROW(parse_fcidump_string(" &FCI NORB=2,NELEC=2,\n 0.1 1 1 1 1\n"), FcidumpError);
  EXPECT_THROW(parse_fcidump_string(" &FCI NORB=2,NELEC=3,MS2=0, &END\n"), FcidumpError);
  EXPECT_THROW(parse_fcidump_string(" &FCI NORB=2,NELEC=2,MS2=-2, &END\n"), FcidumpError);
  EXPECT_THROW(parse_fcidump_string(" &FCI NELEC=2, &END\n"), FcidumpError);
  try {
    parse_fcidump_string(" &FCI NORB=2,NELEC=2, &END\n 0.1 1 1 1 1\n 0.2 3 1 1 1\n");
    FAIL() << "expected FcidumpError";
  } catch (const FcidumpError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_fcidump_string(" &FCI NORB=2,NELEC=2, &END\n abc 1 1 1 1\n");
    FAIL() << "expected FcidumpError";
  } catch (const FcidumpError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(read_fcidump("/nonexistent/file.fcidump"), FcidumpError);
}

TEST(IntegralSymmetry, ReportsSinglePerturbedElement) {
  auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  ints.two(3, 1, 2, 0) += 1e-6;
  const auto v = validate_integral_symmetry(ints, 1e-10);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, SymmetryViolation::Kind::two_electron);
  EXPECT_EQ(v[0].index, (std::array<std::size_t, 4>{3, 1, 2, 0}));
  EXPECT_NEAR(v[0].value - v[0].expected, 1e-6, 1e-12);

  auto ints2 = read_fcidump(oracle::data("h2o.fcidump"));
  ints2.one(0, 3) += 1e-3;
  const auto v2 = validate_integral_symmetry(ints2, 1e-10);
  ASSERT_EQ(v2.size(), 1u);
  EXPECT_EQ(v2[0].kind, SymmetryViolation::Kind::one_electron);
}

TEST(OrbitalPermutation, InverseRestoresIntegrals) {
  const auto ints = read_fcidump(oracle::data("benzene.fcidump"));
  const OrbitalPermutation p({3, 0, 5, 1, 4, 2});
  const auto back = apply_orbital_permutation(apply_orbital_permutation(ints, p), p.inverse());
  EXPECT_EQ(back, ints);
  EXPECT_EQ(apply_orbital_permutation(ints, OrbitalPermutation::identity(6)), ints);
}

TEST(OrbitalPermutation, MovesEntries) {
  const auto ints = oracle::random_integrals(3, 1, 1, 9);
  const OrbitalPermutation p({2, 0, 1});
  const auto out = apply_orbital_permutation(ints, p);
  EXPECT_EQ(out.one(0, 1), ints.one(2, 0));
  EXPECT_EQ(out.two(0, 1, 2, 0), ints.two(2, 0, 1, 2));
}

TEST(OrbitalPermutation, CasEnergyInvariant) {
  auto ints = read_fcidump(oracle::data("h2o.fcidump"));
  const auto e0 = casci(ints, false).energy;
  const auto perm = apply_orbital_permutation(ints, OrbitalPermutation({4, 2, 0, 3, 1}));
  EXPECT_NEAR(casci(perm, false).energy, e0, 1e-10);
}

TEST(OrbitalPermutation, RejectsBadInput) {
  EXPECT_THROW(OrbitalPermutation({0, 0, 1}), std::invalid_argument);
  const auto ints = oracle::random_integrals(3, 1, 1, 1);
  EXPECT_THROW(apply_orbital_permutation(ints, OrbitalPermutation::identity(4)), std::invalid_argument);
}
