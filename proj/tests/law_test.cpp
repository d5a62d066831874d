#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evostab/law.hpp"

using namespace evostab;

namespace {

Kernel half_exp() { return Kernel::exp_sum({{0.5, 1.0}}, 0.25); }

Complex scalar_at(const LawExpr& law, Complex z) { return law.eval(z)(0, 0); }

}  // namespace

TEST_CASE("constant and convolution-resolvent values") {
  LawExpr id = LawExpr::constant(cidentity(2));
  CHECK((id.eval(Complex(2.0, 3.0)) - cidentity(2)).norm() == 0.0);

  LawExpr conv = LawExpr::conv_resolvent(half_exp());
  CHECK(scalar_at(conv, 1.0).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  LawExpr delayed = LawExpr::delay_factor(1.0, LawExpr::scale(0.1, conv));
  bool limit = false;
  CMatrix at0 = delayed.eval(0.0, &limit);
  CHECK(at0(0, 0).real() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(limit);
}

TEST_CASE("frequency symbol of second-order laws") {
  SecondOrderLaw affine(LawExpr::constant(cidentity(2)),
                        LawExpr::constant(CMatrix(cidentity(2) * Complex(0.2))), 5.0);
  CMatrix sym = affine.eval_symbol(Complex(0.0, 1.0));
  CHECK((sym - Complex(0.2, 1.0) * cidentity(2)).norm() < 1e-15);

  SecondOrderLaw integro(LawExpr::conv_resolvent(half_exp()), LawExpr::zero(1), 2.0);
  CHECK(integro.eval_symbol(1.0)(0, 0).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  bool limit = false;
  CMatrix at0 = integro.eval_symbol(0.0, &limit);
  CHECK(at0.norm() == 0.0);  // z * bounded -> 0, M1 absent
  CHECK(limit);
}

TEST_CASE("affine law evaluates identically in both representations") {
  std::mt19937 rng(42);
  std::normal_distribution<double> dist(0.0, 1.0);
  CMatrix p(2, 2), q(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      p(i, j) = Complex(dist(rng), dist(rng));
      q(i, j) = Complex(dist(rng), dist(rng));
    }
  }
  SecondOrderLaw as_affine(LawExpr::affine_in_w(p, q), LawExpr::zero(2), 1.0);
  SecondOrderLaw as_split(LawExpr::constant(p), LawExpr::constant(q), 1.0);
  for (int k = 0; k < 50; ++k) {
    Complex z(0.1 + std::abs(dist(rng)), dist(rng));
    CMatrix a = as_affine.eval_symbol(z);
    CMatrix b = as_split.eval_symbol(z);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a - (z * p + q)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ball sup of the symbol: damped wave, pure mass, memory") {
  SecondOrderLaw damped(LawExpr::constant(Complex(1.0)), LawExpr::constant(Complex(0.2)), 5.0);
  BallSup bs = sup_symbol_on_ball(damped, 0.5);
  CHECK(bs.analytic_bound == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(bs.grid_value <= bs.analytic_bound + 1e-12);
  CHECK(bs.grid_value > 0.69);  // sup attained on the real axis

  SecondOrderLaw pure(LawExpr::constant(Complex(1.0)), LawExpr::zero(1), 5.0);
  CHECK(sup_symbol_on_ball(pure, 0.5).analytic_bound == doctest::Approx(0.5));

  SecondOrderLaw memory(LawExpr::conv_resolvent(half_exp()), LawExpr::zero(1), 2.0);
  BallSup ms = sup_symbol_on_ball(memory, 0.125);
  CHECK(ms.analytic_bound <= 0.125 / (1.0 - 2.0 / 3.0) + 1e-12);  // coarse closed form
  CHECK(ms.grid_value <= ms.analytic_bound + 1e-12);
}

TEST_CASE("half-plane sup bounds per family") {
  CHECK(LawExpr::constant(CMatrix(cidentity(2) * Complex(0.2))).sup_bound(0.7) ==
        doctest::Approx(0.2));
  CHECK(LawExpr::conv_resolvent(half_exp()).sup_bound(0.25) == doctest::Approx(3.0));
  CHECK(LawExpr::delay_factor(1.0, LawExpr::constant(cidentity(2))).sup_bound(0.1) ==
        doctest::Approx(std::exp(0.1)).epsilon(1e-14));
  CHECK(std::isinf(
      LawExpr::affine_in_w(CMatrix::Zero(1, 1), CMatrix(cidentity(1))).sup_bound(0.1)));
}

TEST_CASE("sup bound is sound on random frequencies") {
  LawExpr law = LawExpr::sum(
      {LawExpr::scale(0.3, LawExpr::delay_factor(0.5, LawExpr::conv_resolvent(half_exp()))),
       LawExpr::product(LawExpr::constant(Complex(0.4)), LawExpr::conv_resolvent(half_exp()))});
  const double rho = 0.2;
  double bound = law.sup_bound(rho);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> rez(-rho, 3.0), imz(-80.0, 80.0);
  for (int i = 0; i < 1000; ++i) {
    Complex z(rez(rng), imz(rng));
    if (z == 0.0) continue;
    CHECK(op_norm(law.eval(z)) <= bound + 1e-12);
  }
}

TEST_CASE("evaluation is analytic: Cauchy-Riemann residual") {
  LawExpr law = LawExpr::sum(
      {LawExpr::conv_resolvent(half_exp()),
       LawExpr::scale(0.2, LawExpr::delay_factor(1.0, LawExpr::conv_resolvent(half_exp())))});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> rez(0.1, 2.0), imz(-3.0, 3.0);
  const double step = 1e-4;
  for (int i = 0; i < 50; ++i) {
    Complex z(rez(rng), imz(rng));
    Complex ddx = (scalar_at(law, z + step) - scalar_at(law, z - step)) / (2.0 * step);
    Complex ddy = (scalar_at(law, z + Complex(0.0, step)) - scalar_at(law, z - Complex(0.0, step))) /
                  Complex(0.0, 2.0 * step);
    CHECK(std::abs(ddx - ddy) < 1e-6);
  }
}

TEST_CASE("domain violations throw") {
  LawExpr conv = LawExpr::conv_resolvent(half_exp());
  CHECK_THROWS_AS(conv.eval(Complex(-0.3, 1.0)), std::domain_error);
  CHECK_THROWS_AS(conv.sup_bound(0.3), std::domain_error);
  SecondOrderLaw law(conv, LawExpr::zero(1), 2.0);
  CHECK_THROWS_AS(sup_symbol_on_ball(law, 0.3), std::domain_error);
  CHECK_THROWS_AS(LawExpr::conv_resolvent(Kernel::exp_sum({{0.9, 1.0}}, 0.25)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      LawExpr::affine_in_w(CMatrix::Zero(1, 1), CMatrix(cidentity(1))).eval(0.0),
      std::domain_error);
}
