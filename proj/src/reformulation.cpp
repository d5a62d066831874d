#include "evostab/reformulation.hpp"

#include <cmath>

namespace evostab {

namespace {

// Block-injection constants for lifting n-dim laws into the 2n block space.
CMatrix top_injection(Eigen::Index n) {
  CMatrix e = CMatrix::Zero(2 * n, n);
  e.topRows(n) = CMatrix::Identity(n, n);
  return e;
}

CMatrix bottom_injection(Eigen::Index n) {
  CMatrix e = CMatrix::Zero(2 * n, n);
  e.bottomRows(n) = CMatrix::Identity(n, n);
  return e;
}

LawExpr lift(const CMatrix& row_inj, const LawExpr& inner, const CMatrix& col_inj) {
  return LawExpr::product(LawExpr::constant(row_inj),
                          LawExpr::product(inner, LawExpr::constant(col_inj.adjoint())));
}

LawExpr mul_by_w(Eigen::Index n, LawExpr inner) {
  return LawExpr::product(LawExpr::affine_in_w(CMatrix::Zero(n, n), CMatrix::Identity(n, n)),
                          std::move(inner));
}

}  // namespace

double FirstOrderSystem::nd_sup_bound(double rho) const {
  if (base.m1.is_zero()) return 0.0;
  return std::sqrt(1.0 + d * d * c.c_inv_norm * c.c_inv_norm) * base.m1.sup_bound(rho);
}

double FirstOrderSystem::nd_ball_bound(double delta) const {
  if (base.m1.is_zero()) return 0.0;
  return std::sqrt(1.0 + d * d * c.c_inv_norm * c.c_inv_norm) * base.m1.ball_bound(delta);
}

FirstOrderSystem build_md(const SecondOrderLaw& law, const SpatialC& c, double d) {
  if (d < 0.0) throw std::invalid_argument("build_md: d must be >= 0");
  Eigen::Index n = law.dim();
  if (n != c.n()) throw std::invalid_argument("build_md: law and C dimensions differ");

  const CMatrix e0 = top_injection(n);
  const CMatrix e1 = bottom_injection(n);
  const CMatrix p11 = e1 * e1.adjoint();
  const LawExpr cinv = LawExpr::constant(c.c_inv);
  const bool has_m1 = !law.m1.is_zero();

  // M(w) = M0(w) + w M1(w).
  LawExpr m_full = has_m1 ? LawExpr::sum({law.m0, mul_by_w(n, law.m1)}) : law.m0;

  auto d_block = [&](bool with_m1) {
    // [[-M0, (d M0 - M1) C^{-1}], [0, 1]]
    std::vector<LawExpr> parts;
    parts.push_back(lift(e0, LawExpr::scale(-1.0, law.m0), e0));
    LawExpr coupling = LawExpr::scale(d, law.m0);
    if (with_m1) coupling = LawExpr::sum({coupling, LawExpr::scale(-1.0, law.m1)});
    parts.push_back(lift(e0, LawExpr::product(coupling, cinv), e1));
    parts.push_back(LawExpr::constant(p11));
    return LawExpr::sum(std::move(parts));
  };

  auto assemble = [&](const LawExpr& top_left, bool with_m1) {
    std::vector<LawExpr> parts;
    parts.push_back(lift(e0, top_left, e0));
    parts.push_back(LawExpr::constant(p11));
    if (d > 0.0) {
      parts.push_back(LawExpr::scale(d, mul_by_w(2 * n, d_block(with_m1))));
    }
    return LawExpr::sum(std::move(parts));
  };

  LawExpr md = assemble(m_full, has_m1);
  LawExpr md_tilde = assemble(law.m0, false);

  LawExpr nd = LawExpr::zero(2 * n);
  if (has_m1) {
    std::vector<LawExpr> nd_parts;
    nd_parts.push_back(lift(e0, law.m1, e0));
    if (d > 0.0) {
      nd_parts.push_back(LawExpr::scale(-d, lift(e0, LawExpr::product(law.m1, cinv), e1)));
    }
    nd = LawExpr::sum(std::move(nd_parts));
  }

  FirstOrderSystem sys{std::move(md),
                       md_tilde,
                       nd,
                       SecondOrderLaw(md_tilde, nd, law.r),
                       block_a(c),
                       d,
                       law,
                       c};
  return sys;
}

std::pair<LawExpr, LawExpr> split_md(const SecondOrderLaw& law, const SpatialC& c, double d) {
  if (law.m1.is_zero()) {
    throw std::invalid_argument("split_md: law has no M1 part to split off");
  }
  FirstOrderSystem sys = build_md(law, c, d);
  return {sys.md_tilde, sys.nd};
}

std::pair<Trajectory, Trajectory> recover_u(const Trajectory& v, const Trajectory& q,
                                            const SpatialC& c, double d) {
  if (v.size() != q.size() || v.dt != q.dt) {
    throw std::invalid_argument("recover_u: trajectory grids differ");
  }
  if (!c.is_real()) throw std::invalid_argument("recover_u: C must be real");
  RMatrix c_inv = c.c_inv.real();
  Trajectory u, du;
  u.dt = du.dt = v.dt;
  u.values.resize(v.size());
  du.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    u.values[i] = c_inv * q.values[i];
    du.values[i] = v.values[i] - d * u.values[i];
  }
  return {u, du};
}

}  // namespace evostab
