#include <catch2/catch_amalgamated.hpp>

#include "privstate/ensembles.hpp"
#include "privstate/states.hpp"

using namespace privstate;
using Catch::Matchers::WithinAbs;

TEST_CASE("philox reference blocks", "[rng]") {
  // Known-answer vectors from the Random123 distribution (philox4x32-10).
  auto r = PhiloxRng::block({0, 0, 0, 0}, {0, 0});
  CHECK(r[0] == 0x6627e8d5u);
  CHECK(r[1] == 0xe169c58du);
  CHECK(r[2] == 0xbc57ac4cu);
  CHECK(r[3] == 0x9b00dbd8u);

  r = PhiloxRng::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                       {0xffffffffu, 0xffffffffu});
  CHECK(r[0] == 0x408f276du);
  CHECK(r[1] == 0x41c83b0eu);
  CHECK(r[2] == 0xa20bc7c6u);
  CHECK(r[3] == 0x6d5451fdu);

  r = PhiloxRng::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                       {0xa4093822u, 0x299f31d0u});
  CHECK(r[0] == 0xd16cfe09u);
  CHECK(r[1] == 0x94fdccebu);
  CHECK(r[2] == 0x5001e420u);
  CHECK(r[3] == 0x24126ea1u);
}

TEST_CASE("seeded streams are reproducible and trial-separated", "[rng]") {
  PhiloxRng a({123456789, 42});
  PhiloxRng b({123456789, 42});
  PhiloxRng c({123456789, 43});
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u32();
    if (va != b.next_u32()) all_equal = false;
    if (va != c.next_u32()) any_diff = true;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform and gaussian moments", "[rng]") {
  PhiloxRng rng({99, 0});
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    mean += g;
    var += g * g;
  }
  mean /= n;
  var = var / n - mean * mean;
  CHECK_THAT(mean, WithinAbs(0.0, 0.05));
  CHECK_THAT(var, WithinAbs(1.0, 0.05));
}

TEST_CASE("haar unitaries", "[ensembles]") {
  SECTION("dim 1 gives a phase") {
    const Matrix u = sample_haar_unitary(1, {5, 0});
    CHECK_THAT(std::abs(u(0, 0)), WithinAbs(1.0, 1e-12));
  }
  SECTION("unitarity at dim 16") {
    const Matrix u = sample_haar_unitary(16, {5, 1});
    CHECK((u.adjoint() * u - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SECTION("first-entry moment matches the Haar value") {
    // E|U_11|^2 = 1/dim; 1e4 samples at dim 8, 3-sigma band
    const int dim = 8, samples = 10000;
    double acc = 0.0;
    for (int t = 0; t < samples; ++t) {
      const Matrix u = sample_haar_unitary(dim, {2024, static_cast<std::uint64_t>(t)});
      acc += std::norm(u(0, 0));
    }
    acc /= samples;
    // var(|U11|^2) = (d-1)/(d^2(d+1)) exactly under Haar
    const double sigma = std::sqrt((dim - 1.0) / (static_cast<double>(dim) * dim * (dim + 1.0)) / samples);
    CHECK_THAT(acc, WithinAbs(1.0 / dim, 3.0 * sigma));
  }
  SECTION("bit-exact determinism") {
    const Matrix u1 = sample_haar_unitary(6, {777, 3});
    const Matrix u2 = sample_haar_unitary(6, {777, 3});
    CHECK((u1 - u2).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("shield pairs", "[ensembles]") {
  CHECK_THROWS_AS(sample_shield_pair(3, {1, 0}), std::invalid_argument);

  for (int d : {2, 4}) {
    auto [sp, sm] = sample_shield_pair(d, {314, 7});
    const long n = static_cast<long>(d) * d;
    CHECK_THAT(sp.op().inner(sm.op()), WithinAbs(0.0, 1e-12));
    const Matrix sum = sp.entries() + sm.entries();
    CHECK((sum - 2.0 / n * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    // spectrum is the fixed multiset {2/d^2} x (d^2/2) union {0} x (d^2/2)
    const EigResult e = herm_eig(sp.op());
    for (long i = 0; i < n / 2; ++i) CHECK_THAT(e.eigenvalues(i), WithinAbs(0.0, 1e-12));
    for (long i = n / 2; i < n; ++i) CHECK_THAT(e.eigenvalues(i), WithinAbs(2.0 / n, 1e-12));
  }

  SECTION("delta norms at d=2 over 100 samples") {
    for (int t = 0; t < 100; ++t) {
      auto [sp, sm] = sample_shield_pair(2, {555, static_cast<std::uint64_t>(t)});
      const HermitianOp delta = sp.op() - sm.op();
      CHECK_THAT(trace_norm(delta), WithinAbs(2.0, 1e-9));
      CHECK_THAT(op_norm(delta), WithinAbs(0.5, 1e-10));
    }
  }

  SECTION("bit-exact determinism across construction order") {
    auto [a1, a2] = sample_shield_pair(4, {99, 17});
    auto [b1, b2] = sample_shield_pair(4, {99, 17});
    CHECK((a1.entries() - b1.entries()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a2.entries() - b2.entries()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("random private states", "[ensembles]") {
  CHECK_THROWS_AS(sample_private_state(5, {1, 0}), std::invalid_argument);

  const PrivateState ps = sample_private_state(2, {2718, 1});
  SECTION("key-attacked state is the product form") {
    const DensityState ka = key_attacked(ps);
    const HermitianOp keypart = 0.5 * (bell_state(+1).op() + bell_state(-1).op());
    const HermitianOp expect =
        permute_factors(tensor(keypart, maximally_mixed(ps.shield_plus.layout()).op()), kKeyShieldOrder);
    CHECK((ka.entries() - expect.entries()).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SECTION("trace and positivity") {
    CHECK_THAT(ps.gamma.op().trace(), WithinAbs(1.0, 1e-12));
    CHECK(min_eigenvalue(ps.gamma.op()) >= -1e-12);
  }
  SECTION("block structure matches the interleaved four-block form") {
    // assemble independently on (A,B,A',B') ordering: corners (rho+ + rho-)/4,
    // anti-corners (rho+ - rho-)/4, then permute to A:A':B:B'
    const long n = ps.shield_plus.dim();
    const HermitianOp absdelta = 0.5 * (ps.shield_plus.op() + ps.shield_minus.op());
    const HermitianOp delta = 0.5 * (ps.shield_plus.op() - ps.shield_minus.op());
    Matrix block = Matrix::Zero(4 * n, 4 * n);
    block.block(0, 0, n, n) = 0.5 * absdelta.entries();
    block.block(3 * n, 3 * n, n, n) = 0.5 * absdelta.entries();
    block.block(0, 3 * n, n, n) = 0.5 * delta.entries();
    block.block(3 * n, 0, n, n) = 0.5 * delta.entries();
    SystemLayout keyfirst({{"A", 2}, {"B", 2}, {"A'", ps.d}, {"B'", ps.d}});
    const HermitianOp assembled = permute_factors(HermitianOp(keyfirst, block), kKeyShieldOrder);
    CHECK((assembled.entries() - ps.gamma.entries()).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SECTION("key measurement is a perfectly correlated fair bit") {
    const auto povm = computational_povm(ps.gamma.layout(), {"A", "B"});
    const auto p = apply_povm(povm, ps.gamma);
    REQUIRE(p.size() == 4);
    CHECK_THAT(p[0], WithinAbs(0.5, 1e-10));
    CHECK_THAT(p[1], WithinAbs(0.0, 1e-10));
    CHECK_THAT(p[2], WithinAbs(0.0, 1e-10));
    CHECK_THAT(p[3], WithinAbs(0.5, 1e-10));
  }
}

TEST_CASE("gue traceless", "[ensembles]") {
  const HermitianOp g = sample_gue_traceless(16, {31415, 0});
  CHECK(std::abs(g.trace()) <= 1e-12 * 16);
  CHECK((g.entries() - g.entries().adjoint()).cwiseAbs().maxCoeff() <= 1e-14);

  SECTION("operator norm grows like sqrt(dim)") {
    double mean16 = 0.0, mean64 = 0.0;
    const int samples = 200;
    for (int t = 0; t < samples; ++t) {
      mean16 += op_norm(sample_gue_traceless(16, {161, static_cast<std::uint64_t>(t)}));
      mean64 += op_norm(sample_gue_traceless(64, {641, static_cast<std::uint64_t>(t)}));
    }
    const double ratio = mean64 / mean16;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.4);
  }
}
