#include <catch2/catch_amalgamated.hpp>

#include "privstate/ensembles.hpp"
#include "privstate/norms.hpp"

using namespace privstate;
using Catch::Matchers::WithinAbs;

namespace {
const Bipartition kCD{{"C"}, {"D"}};
const Bipartition kShieldCut{{"A'"}, {"B'"}};
}  // namespace

TEST_CASE("ppt norm reproduces the isotropic closed form", "[norms]") {
  for (int d : {2, 3}) {
    for (auto [p, q] : std::vector<std::pair<double, double>>{{1.0, 0.25}, {0.8, 0.3}, {0.55, 0.5}}) {
      const HermitianOp x = isotropic_state({d, p}).op() - isotropic_state({d, q}).op();
      const double expect = iso_closed_forms(p, q, d).norm_dist;
      CHECK_THAT(ppt_norm(x, kCD), WithinAbs(expect, 1e-6));
    }
  }
}

TEST_CASE("ppt norm of psi2 minus maximally mixed", "[norms]") {
  // psi2 = iota(1), 1/4 = iota(1/4) at d=2
  const HermitianOp x =
      max_entangled(2).op() - maximally_mixed(SystemLayout({{"C", 2}, {"D", 2}})).op();
  CHECK_THAT(ppt_norm(x, kCD), WithinAbs(iso_closed_forms(1.0, 0.25, 2).norm_dist, 1e-6));
}

TEST_CASE("werner difference norms", "[norms]") {
  for (int k : {2, 3}) {
    auto [sym, antisym] = sym_antisym(k);
    const HermitianOp x = sym.op() - antisym.op();
    CHECK_THAT(ppt_norm(x, kCD), WithinAbs(4.0 / (k + 1.0), 1e-6));
    // for Werner-symmetric operators the SEP upper relaxation is tight too
    const NormBracket b = sep_norm_bracket(x, kCD, 1);
    CHECK_THAT(b.upper, WithinAbs(4.0 / (k + 1.0), 1e-6));
  }
}

TEST_CASE("tensoring with psi recovers full distinguishability", "[norms]") {
  const int k = 2;
  auto [sym, antisym] = sym_antisym(k, "A", "B");
  const HermitianOp x = tensor(max_entangled(k).op(), sym.op() - antisym.op());
  const Bipartition cut{{"C", "A"}, {"D", "B"}};
  CHECK_THAT(ppt_norm(x, cut), WithinAbs(2.0, 1e-6));
}

TEST_CASE("ppt certificate achieves the reported value", "[norms]") {
  auto [sp, sm] = sample_shield_pair(2, {77, 0});
  const HermitianOp delta = sp.op() - sm.op();
  const PptNormResult res = ppt_norm_full(delta, kShieldCut);
  CHECK(res.certified_lower <= res.value + 1e-7);
  CHECK(res.certified_upper >= res.value - 1e-7);
  CHECK(res.certified_upper - res.certified_lower <= 1e-5);
  // the optimizer is feasible for the body and attains certified_lower
  CHECK(op_norm(res.optimizer) <= 1.0 + 1e-9);
  CHECK(op_norm(partial_transpose(res.optimizer, {"B'"})) <= 1.0 + 1e-9);
  CHECK_THAT(res.optimizer.inner(delta), WithinAbs(res.certified_lower, 1e-9));
}

TEST_CASE("sep bracket collapses on product operators", "[norms]") {
  PhiloxRng rng({404, 0});
  Matrix ga(2, 2), gb(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      ga(i, j) = rng.complex_gaussian();
      gb(i, j) = rng.complex_gaussian();
    }
  const HermitianOp a(SystemLayout::single("C", 2), Matrix(0.5 * (ga + ga.adjoint())));
  const HermitianOp b(SystemLayout::single("D", 2), Matrix(0.5 * (gb + gb.adjoint())));
  const HermitianOp x = tensor(a, b);
  const double expect = trace_norm(a) * trace_norm(b);
  const NormBracket bracket = sep_norm_bracket(x, kCD, 1);
  CHECK_THAT(bracket.lower, WithinAbs(expect, 1e-8));
  CHECK_THAT(bracket.upper, WithinAbs(expect, 1e-5));
  // the certificate measurement reproduces the lower endpoint
  REQUIRE(bracket.lower_povm.has_value());
  const auto& povm = *bracket.lower_povm;
  const double tv = povm.elements()[0].inner(x) - povm.elements()[1].inner(x);
  CHECK_THAT(std::abs(tv), WithinAbs(bracket.lower, 1e-9));
}

TEST_CASE("sep bracket at level 2 is sandwiched", "[norms]") {
  auto [sp, sm] = sample_shield_pair(2, {88, 1});
  const HermitianOp delta = sp.op() - sm.op();
  const double ppt = ppt_norm(delta, kShieldCut);
  const NormBracket l1 = sep_norm_bracket(delta, kShieldCut, 1);
  const NormBracket l2 = sep_norm_bracket(delta, kShieldCut, 2);
  CHECK(l1.lower <= l1.upper + 1e-6);
  CHECK(l2.lower <= l2.upper + 1e-6);
  CHECK(l2.upper <= l1.upper + 1e-6);  // extra constraints only shrink the body
  CHECK(l1.upper <= ppt + 1e-6);
  CHECK(ppt <= trace_norm(delta) + 1e-6);
}

TEST_CASE("level-2 cap refuses oversized extensions", "[norms]") {
  auto [sp, sm] = sample_shield_pair(4, {88, 2});
  const HermitianOp delta = sp.op() - sm.op();
  BracketOptions opts;
  opts.max_extension_block = 32;  // 4 * 4 * 4 = 64 > 32
  CHECK_THROWS_AS(sep_norm_bracket(delta, kShieldCut, 2, opts), std::invalid_argument);
}

TEST_CASE("separable overlap brackets", "[norms]") {
  SECTION("zero operator") {
    const NormBracket b =
        sep_overlap_bracket(HermitianOp::zero(SystemLayout({{"C", 2}, {"D", 2}})), kCD, 1);
    CHECK_THAT(b.lower, WithinAbs(0.0, 1e-9));
    CHECK_THAT(b.upper, WithinAbs(0.0, 1e-7));
  }
  SECTION("psi2 minus maximally mixed gives 1/4") {
    const HermitianOp x =
        max_entangled(2).op() - maximally_mixed(SystemLayout({{"C", 2}, {"D", 2}})).op();
    for (int level : {1, 2}) {
      const NormBracket b = sep_overlap_bracket(x, kCD, level);
      CHECK_THAT(b.lower, WithinAbs(0.25, 1e-7));
      CHECK_THAT(b.upper, WithinAbs(0.25, 1e-5));
    }
  }
  SECTION("construction-1 delta upper bounded by the operator norm") {
    auto [sp, sm] = sample_shield_pair(2, {99, 3});
    const HermitianOp delta = sp.op() - sm.op();
    const NormBracket b = sep_overlap_bracket(delta, kShieldCut, 1);
    CHECK(b.upper <= op_norm(delta) + 1e-6);
    CHECK(b.lower <= b.upper + 1e-9);
  }
}

TEST_CASE("measured relative entropy", "[norms]") {
  SECTION("extremal isotropic measurement attains the closed form") {
    for (int d : {2, 3}) {
      const double p = 0.9, q = 0.35;
      const double v = measured_relent(isotropic_state({d, p}), isotropic_state({d, q}),
                                       iso_extremal_povm(d));
      CHECK_THAT(v, WithinAbs(iso_closed_forms(p, q, d).relent_dist, 1e-10));
    }
  }
  SECTION("identical states give zero") {
    const DensityState rho = isotropic_state({2, 0.6});
    CHECK_THAT(measured_relent(rho, rho, iso_extremal_povm(2)), WithinAbs(0.0, 1e-12));
  }
  SECTION("support measurement on construction-1 shields gives one bit") {
    auto [sp, sm] = sample_shield_pair(2, {111, 0});
    const DensityState avg = maximally_mixed(sp.layout());
    const auto povm = binary_povm(support_projector(sp));
    CHECK_THAT(measured_relent(sp, avg, povm), WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("pinsker and ordering bounds", "[norms]") {
  CHECK_THAT(pinsker_lower(0.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(pinsker_lower(2.0 / 3.0), WithinAbs((4.0 / 9.0) / (2.0 * std::numbers::ln2), 1e-12));
  CHECK_THROWS_AS(pinsker_lower(2.5), std::invalid_argument);

  CHECK_THAT(order_relent_bound(0.0), WithinAbs(0.0, 1e-15));
  CHECK_THAT(order_relent_bound(1.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(order_relent_bound(0.5), WithinAbs(0.5849625007211562, 1e-12));
  CHECK_THAT(order_trace_bound(0.5), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THROWS_AS(order_trace_bound(1.0), std::invalid_argument);
}

TEST_CASE("continuity bound", "[norms]") {
  CHECK_THAT(continuity_bound(0.0, 4).value, WithinAbs(0.0, 1e-15));
  // independent scalar evaluation at (0.01, 4)
  const double eps = 0.01;
  const double expect = 10.0 * eps * 2.0 + 5.0 * eps * std::log2(3.0) +
                        2.0 * (-0.02 * std::log2(0.02)) +
                        (-0.01 * std::log2(0.01) - 0.99 * std::log2(0.99));
  CHECK_THAT(continuity_bound(eps, 4).value, WithinAbs(expect, 1e-12));
  CHECK(continuity_bound(0.2, 4).within_validity == false);
  CHECK(continuity_bound(0.18, 4).within_validity == true);

  SECTION("monotone in epsilon on the validity range") {
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double e = i * (1.0 / (2.0 * std::numbers::e)) / 40.0;
      const double v = continuity_bound(e, 8).value;
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("sep ordering certificate", "[norms]") {
  SECTION("equal shields are rejected at construction") {
    const DensityState rho = maximally_mixed(SystemLayout({{"A'", 2}, {"B'", 2}}));
    CHECK_THROWS_AS(private_state(rho, rho), std::invalid_argument);
  }
  SECTION("epsilon* bounded by the coarse cap at d=2") {
    const PrivateState ps = sample_private_state(2, {123, 5});
    const double eps = sep_order_epsilon(ps, 1);
    CHECK(eps <= 4.0 * op_norm(ps.delta()) + 1e-6);
    CHECK(eps >= 0.0);
  }
  SECTION("non-complementary shields are rejected") {
    // orthogonal but non-complementary shields: rank-one supports
    SystemLayout sl({{"A'", 2}, {"B'", 2}});
    Matrix p0 = Matrix::Zero(4, 4);
    p0(0, 0) = 1.0;
    Matrix p1 = Matrix::Zero(4, 4);
    p1(3, 3) = 1.0;
    const PrivateState ps = private_state(DensityState(sl, p0), DensityState(sl, p1));
    CHECK_THROWS_AS(sep_order_epsilon(ps, 1), std::invalid_argument);
  }
}

TEST_CASE("ppt-relaxed robustness", "[norms]") {
  for (int k : {2, 3}) {
    const DensityState psi = max_entangled(k);
    CHECK_THAT(robustness_ppt(psi, kCD), WithinAbs(k - 1.0, 1e-5));
  }
  SECTION("separable states have zero robustness") {
    const DensityState mixed = maximally_mixed(SystemLayout({{"C", 2}, {"D", 2}}));
    CHECK_THAT(robustness_ppt(mixed, kCD), WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("norm chain and tensoring inequalities", "[norms][property]") {
  PhiloxRng rng({2025, 0});
  SystemLayout ab({{"A", 2}, {"B", 2}});
  const Bipartition abcut{{"A"}, {"B"}};

  auto random_herm = [&](const SystemLayout& l) {
    const long n = l.total_dim();
    Matrix g(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
    return HermitianOp(l, Matrix(0.5 * (g + g.adjoint())));
  };
  auto random_state = [&](const SystemLayout& l) {
    const long n = l.total_dim();
    Matrix g(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) g(i, j) = rng.complex_gaussian();
    Matrix w = g * g.adjoint();
    w /= w.trace().real();
    return DensityState(l, w);
  };

  SECTION("sandwich on shield differences") {
    for (int t = 0; t < 3; ++t) {
      auto [sp, sm] = sample_shield_pair(2, {3000, static_cast<std::uint64_t>(t)});
      const HermitianOp delta = sp.op() - sm.op();
      const NormBracket sep = sep_norm_bracket(delta, kShieldCut, 2);
      const double ppt = ppt_norm(delta, kShieldCut);
      CHECK(sep.lower <= sep.upper + 1e-6);
      CHECK(sep.upper <= ppt + 1e-6);
      CHECK(ppt <= trace_norm(delta) + 1e-6);
    }
  }

  SECTION("super-additivity under tensoring") {
    for (int t = 0; t < 3; ++t) {
      const HermitianOp y = random_herm(SystemLayout({{"C", 2}, {"D", 2}}));
      const HermitianOp x = random_herm(ab);
      const HermitianOp yx = tensor(y, x);
      const Bipartition joint{{"C", "A"}, {"D", "B"}};
      const double lhs = ppt_norm(y, kCD) * ppt_norm(x, abcut);
      const double rhs = ppt_norm(yx, joint);
      CHECK(lhs <= rhs + 1e-6);
    }
  }

  SECTION("ppt states leave the ppt norm invariant") {
    for (int t = 0; t < 3; ++t) {
      DensityState rho = random_state(SystemLayout({{"C", 2}, {"D", 2}}));
      while (min_eigenvalue(partial_transpose(rho.op(), {"D"})) < 1e-6)
        rho = random_state(SystemLayout({{"C", 2}, {"D", 2}}));
      const HermitianOp x = random_herm(ab);
      const Bipartition joint{{"C", "A"}, {"D", "B"}};
      CHECK_THAT(ppt_norm(tensor(rho.op(), x), joint), WithinAbs(ppt_norm(x, abcut), 1e-6));
    }
  }

  SECTION("tensoring upper bounds") {
    for (int t = 0; t < 3; ++t) {
      const DensityState rho = random_state(SystemLayout({{"C", 2}, {"D", 2}}));
      const HermitianOp x = random_herm(ab);
      const Bipartition joint{{"C", "A"}, {"D", "B"}};
      const double lhs = ppt_norm(tensor(rho.op(), x), joint);
      const double gamma_norm = trace_norm(partial_transpose(rho.op(), {"D"}));
      CHECK(lhs <= gamma_norm * ppt_norm(x, abcut) + 1e-6);
    }
    // SEP route at level 1 with psi_2: upper(psi (x) X) <= 3 upper(X)
    const HermitianOp x = random_herm(ab);
    const HermitianOp px = tensor(max_entangled(2).op(), x);
    const Bipartition joint{{"C", "A"}, {"D", "B"}};
    const NormBracket bx = sep_norm_bracket(x, abcut, 1);
    const NormBracket bpx = sep_norm_bracket(px, joint, 1);
    CHECK(bpx.upper <= 3.0 * bx.upper + 1e-6);
  }
}
