#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evostab/reformulation.hpp"

using namespace evostab;

namespace {

Kernel half_exp() { return Kernel::exp_sum({{0.5, 1.0}}, 0.25); }

// Independent transcription of the block law, written directly from the
// displayed formula as a cross-check oracle for the compositional build.
CMatrix eval_md_direct(const SecondOrderLaw& law, const SpatialC& c, double d, Complex z) {
  Eigen::Index n = law.dim();
  Complex w = 1.0 / z;
  CMatrix m0 = law.m0.eval(z);
  CMatrix m1 = law.m1.eval(z);
  CMatrix m = m0 + w * m1;
  CMatrix md = CMatrix::Zero(2 * n, 2 * n);
  md.topLeftCorner(n, n) = m - d * w * m0;
  md.topRightCorner(n, n) = d * w * (d * m0 - m1) * c.c_inv;
  md.bottomRightCorner(n, n) = (1.0 + d * w) * CMatrix::Identity(n, n);
  return md;
}

SecondOrderLaw damped_scalar() {
  return SecondOrderLaw(LawExpr::constant(Complex(1.0)), LawExpr::constant(Complex(0.2)), 5.0);
}

SpatialC scalar_c(double value) {
  CMatrix m(1, 1);
  m(0, 0) = value;
  return reduce_user_matrix(m);
}

}  // namespace

TEST_CASE("d = 0 degenerates to diag(M, 1)") {
  SpatialC c = dirichlet_1d(3);
  SecondOrderLaw law(LawExpr::constant(cidentity(3)),
                     LawExpr::constant(CMatrix(cidentity(3) * Complex(0.2))), 5.0);
  FirstOrderSystem sys = build_md(law, c, 0.0);
  for (Complex z : {Complex(1.0, 0.0), Complex(0.3, 2.0), Complex(-0.05, -7.0)}) {
    CMatrix md = sys.md.eval(z);
    CMatrix expect = CMatrix::Zero(6, 6);
    expect.topLeftCorner(3, 3) = law.m0.eval(z) + (1.0 / z) * law.m1.eval(z);
    expect.bottomRightCorner(3, 3) = cidentity(3);
    CHECK((md - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("hand-evaluated scalar block at frequency 1") {
  FirstOrderSystem sys = build_md(damped_scalar(), scalar_c(2.0), 0.1);
  CMatrix md = sys.md.eval(1.0);
  CHECK(md(0, 0).real() == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(md(0, 1).real() == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(std::abs(md(1, 0)) == 0.0);
  CHECK(md(1, 1).real() == doctest::Approx(1.1).epsilon(1e-14));
}

TEST_CASE("compositional build matches the direct transcription") {
  SpatialC c = dirichlet_1d(4);
  SecondOrderLaw integro(LawExpr::conv_resolvent(half_exp(), 4),
                         LawExpr::scale(0.05, LawExpr::delay_factor(
                                                  1.0, LawExpr::conv_resolvent(half_exp(), 4))),
                         2.0);
  FirstOrderSystem sys = build_md(integro, c, 0.07);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> re(-0.2, 2.0), im(-10.0, 10.0);
  for (int i = 0; i < 20; ++i) {
    Complex z(re(rng), im(rng));
    if (std::abs(z) < 1e-3) continue;
    CMatrix a = sys.md.eval(z);
    CMatrix b = eval_md_direct(integro, c, 0.07, z);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("split recomposes to the full law") {
  SpatialC c = dirichlet_1d(3);
  SecondOrderLaw law(LawExpr::conv_resolvent(half_exp(), 3),
                     LawExpr::scale(0.1, LawExpr::delay_factor(
                                             0.5, LawExpr::conv_resolvent(half_exp(), 3))),
                     2.0);
  auto [tilde, nd] = split_md(law, c, 0.04);
  FirstOrderSystem sys = build_md(law, c, 0.04);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> re(-0.2, 2.0), im(-20.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    Complex z(re(rng), im(rng));
    if (std::abs(z) < 1e-3) continue;
    CMatrix whole = sys.md.eval(z);
    CMatrix recomposed = tilde.eval(z) + (1.0 / z) * nd.eval(z);
    CHECK((whole - recomposed).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("N_d vanishes without M1 and obeys the row-block bound") {
  SpatialC c = dirichlet_1d(3);
  SecondOrderLaw pure(LawExpr::conv_resolvent(half_exp(), 3), LawExpr::zero(3), 2.0);
  FirstOrderSystem sys0 = build_md(pure, c, 0.05);
  CHECK(sys0.nd.is_zero());
  CHECK_THROWS_AS(split_md(pure, c, 0.05), std::invalid_argument);

  SecondOrderLaw delayed(LawExpr::conv_resolvent(half_exp(), 3),
                         LawExpr::scale(0.1, LawExpr::delay_factor(
                                                 1.0, LawExpr::conv_resolvent(half_exp(), 3))),
                         2.0);
  double d = 0.06;
  FirstOrderSystem sys = build_md(delayed, c, d);
  double row = std::sqrt(1.0 + d * d * c.c_inv_norm * c.c_inv_norm);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> re(-0.2, 1.5), im(-30.0, 30.0);
  for (int i = 0; i < 40; ++i) {
    Complex z(re(rng), im(rng));
    if (std::abs(z) < 1e-3) continue;
    CHECK(op_norm(sys.nd.eval(z)) <= row * op_norm(delayed.m1.eval(z)) + 1e-12);
  }
  CHECK(sys.nd_sup_bound(0.1) <=
        row * delayed.m1.sup_bound(0.1) + 1e-12);
}

TEST_CASE("recover_u pinned values") {
  SpatialC c = scalar_c(2.0);
  Trajectory v = Trajectory::scalar(0.1, std::vector<double>(11, 5.0));
  Trajectory q = Trajectory::scalar(0.1, std::vector<double>(11, 6.0));
  auto [u, du] = recover_u(v, q, c, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(u.values[i](0) == doctest::Approx(3.0));
    CHECK(du.values[i](0) == doctest::Approx(2.0));
  }

  Trajectory q0 = Trajectory::scalar(0.1, std::vector<double>(11, 0.0));
  auto [u0, du0] = recover_u(v, q0, c, 1.0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    CHECK(u0.values[i](0) == 0.0);
    CHECK(du0.values[i](0) == doctest::Approx(5.0));
  }

  Trajectory bad = Trajectory::scalar(0.2, std::vector<double>(11, 5.0));
  CHECK_THROWS_AS(recover_u(bad, q, c, 1.0), std::invalid_argument);
}

TEST_CASE("block positivity estimate transfers to the reformulated law") {
  // Premise and conclusion of the block lower bound, sampled across laws and
  // parameters; the full 1000-sample suite runs in the acceptance binary.
  SpatialC c = dirichlet_1d(3);
  SecondOrderLaw law(LawExpr::constant(cidentity(3)),
                     LawExpr::constant(CMatrix(cidentity(3) * Complex(0.2))), 5.0);
  double m0_sup = 1.0, m1_sup = 0.2;
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> re(-0.09, 2.0), im(-15.0, 15.0), dd(0.001, 0.3);
  for (int i = 0; i < 100; ++i) {
    Complex z(re(rng), im(rng));
    if (std::abs(z) < 1e-6) continue;
    double d = dd(rng);
    FirstOrderSystem sys = build_md(law, c, d);
    double premise = herm_min_eig(law.eval_symbol(z));
    double cross = d * m0_sup + m1_sup * c.c_inv_norm;
    double kd = m0_sup + cross * cross;
    double bound = std::min(premise - d * kd, 0.75 * d + z.real());
    CHECK(herm_min_eig(sys.eval_symbol(z)) >= bound - 1e-10);
  }
}
