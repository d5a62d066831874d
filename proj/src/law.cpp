#include "evostab/law.hpp"

#include <cmath>
#include <limits>

namespace evostab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

struct LawExpr::Node {
  Kind kind;
  Eigen::Index rows = 0, cols = 0;
  double alpha_dom = kInf;
  CMatrix p, q;              // Const, AffineInW
  std::shared_ptr<const Kernel> kernel;  // ConvResolvent
  double h = 0.0;            // DelayFactor
  double s = 1.0;            // Scale
  std::vector<LawExpr> children;
};

LawExpr LawExpr::constant(CMatrix p) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->rows = p.rows();
  n->cols = p.cols();
  n->p = std::move(p);
  return LawExpr(std::move(n));
}

LawExpr LawExpr::constant(Complex p) {
  CMatrix m(1, 1);
  m(0, 0) = p;
  return constant(std::move(m));
}

LawExpr LawExpr::affine_in_w(CMatrix p, CMatrix q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("law: affine parts must share dimensions");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::AffineInW;
  n->rows = p.rows();
  n->cols = p.cols();
  n->p = std::move(p);
  n->q = std::move(q);
  return LawExpr(std::move(n));
}

LawExpr LawExpr::conv_resolvent(Kernel k, Eigen::Index dim) {
  double a = k.alpha();
  double norm = k.weighted_l1_norm(a);
  if (!(norm < 1.0)) {
    throw std::invalid_argument("law: convolution kernel needs |k|_{1,-alpha} < 1, got " +
                                std::to_string(norm));
  }
  if (dim == 0) dim = k.dim();
  if (dim != k.dim() && k.dim() != 1) {
    throw std::invalid_argument("law: block dimension incompatible with the kernel dimension");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::ConvResolvent;
  n->rows = n->cols = dim;
  n->alpha_dom = a;
  n->kernel = std::make_shared<Kernel>(std::move(k));
  return LawExpr(std::move(n));
}

LawExpr LawExpr::delay_factor(double h, LawExpr inner) {
  if (!(h > 0.0)) throw std::invalid_argument("law: delay must be > 0");
  auto n = std::make_shared<Node>();
  n->kind = Kind::DelayFactor;
  n->rows = inner.rows();
  n->cols = inner.cols();
  n->alpha_dom = inner.alpha_dom();
  n->h = h;
  n->children.push_back(std::move(inner));
  return LawExpr(std::move(n));
}

LawExpr LawExpr::scale(double s, LawExpr inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Scale;
  n->rows = inner.rows();
  n->cols = inner.cols();
  n->alpha_dom = inner.alpha_dom();
  n->s = s;
  n->children.push_back(std::move(inner));
  return LawExpr(std::move(n));
}

LawExpr LawExpr::sum(std::vector<LawExpr> parts) {
  if (parts.empty()) throw std::invalid_argument("law: empty sum");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->rows = parts.front().rows();
  n->cols = parts.front().cols();
  for (const auto& p : parts) {
    if (p.rows() != n->rows || p.cols() != n->cols) {
      throw std::invalid_argument("law: sum parts must share dimensions");
    }
    n->alpha_dom = std::min(n->alpha_dom, p.alpha_dom());
  }
  n->children = std::move(parts);
  return LawExpr(std::move(n));
}

LawExpr LawExpr::product(LawExpr a, LawExpr b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("law: product dimension mismatch");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->rows = a.rows();
  n->cols = b.cols();
  n->alpha_dom = std::min(a.alpha_dom(), b.alpha_dom());
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  return LawExpr(std::move(n));
}

LawExpr LawExpr::zero(Eigen::Index n) { return constant(CMatrix::Zero(n, n)); }

Eigen::Index LawExpr::rows() const { return node_->rows; }
Eigen::Index LawExpr::cols() const { return node_->cols; }
LawExpr::Kind LawExpr::kind() const { return node_->kind; }
double LawExpr::alpha_dom() const { return node_->alpha_dom; }

bool LawExpr::is_zero() const {
  switch (node_->kind) {
    case Kind::Const:
      return node_->p.isZero(0.0);
    case Kind::AffineInW:
      return node_->p.isZero(0.0) && node_->q.isZero(0.0);
    case Kind::ConvResolvent:
      return false;
    case Kind::DelayFactor:
      return node_->children[0].is_zero();
    case Kind::Scale:
      return node_->s == 0.0 || node_->children[0].is_zero();
    case Kind::Sum: {
      for (const auto& c : node_->children) {
        if (!c.is_zero()) return false;
      }
      return true;
    }
    case Kind::Product:
      return node_->children[0].is_zero() || node_->children[1].is_zero();
  }
  return false;
}

CMatrix LawExpr::eval(Complex z, bool* limit_used) const {
  if (std::isfinite(node_->alpha_dom) && !(z.real() > -node_->alpha_dom)) {
    throw std::domain_error("law eval: frequency outside the analyticity half-plane");
  }
  switch (node_->kind) {
    case Kind::Const:
      return node_->p;
    case Kind::AffineInW: {
      if (z == 0.0) {
        if (node_->q.isZero(0.0)) return node_->p;
        throw std::domain_error("law eval: affine law has no limit at z = 0");
      }
      return node_->p + node_->q / z;
    }
    case Kind::ConvResolvent: {
      if (z == 0.0 && limit_used) *limit_used = true;
      if (node_->kernel->dim() == 1) {
        Complex d = 1.0 - node_->kernel->laplace(z);
        if (d == 0.0) {
          throw std::domain_error("law eval: (1 - K(z)) not invertible at this frequency");
        }
        return (1.0 / d) * CMatrix::Identity(node_->rows, node_->cols);
      }
      // |K(z)| <= |k|_{1,-alpha} < 1 on the admissible half-plane, so the
      // diagonal resolvent exists entrywise.
      CMatrix k = node_->kernel->laplace_matrix(z);
      CMatrix inv = CMatrix::Zero(node_->rows, node_->cols);
      for (Eigen::Index i = 0; i < node_->rows; ++i) {
        Complex d = 1.0 - k(i, i);
        if (d == 0.0) {
          throw std::domain_error("law eval: (1 - K(z)) not invertible at this frequency");
        }
        inv(i, i) = 1.0 / d;
      }
      return inv;
    }
    case Kind::DelayFactor: {
      if (z == 0.0 && limit_used) *limit_used = true;
      return node_->children[0].eval(z, limit_used) * std::exp(-node_->h * z);
    }
    case Kind::Scale:
      return node_->s * node_->children[0].eval(z, limit_used);
    case Kind::Sum: {
      CMatrix acc = CMatrix::Zero(node_->rows, node_->cols);
      for (const auto& c : node_->children) acc += c.eval(z, limit_used);
      return acc;
    }
    case Kind::Product:
      return node_->children[0].eval(z, limit_used) * node_->children[1].eval(z, limit_used);
  }
  throw std::logic_error("law eval: unreachable");
}

double LawExpr::sup_bound(double rho) const {
  // rho == alpha_dom is allowed: the weighted norms behind the family bounds
  // stay finite on the closed edge.
  if (std::isfinite(node_->alpha_dom) && !(rho <= node_->alpha_dom)) {
    throw std::domain_error("law sup_bound: region reaches outside the analyticity half-plane");
  }
  switch (node_->kind) {
    case Kind::Const:
      return op_norm(node_->p);
    case Kind::AffineInW:
      if (node_->q.isZero(0.0)) return op_norm(node_->p);
      return kInf;  // |w| = |1/z| is unbounded on any half-plane touching 0
    case Kind::ConvResolvent:
      return 1.0 / (1.0 - node_->kernel->weighted_l1_norm(rho));
    case Kind::DelayFactor:
      return std::exp(node_->h * rho) * node_->children[0].sup_bound(rho);
    case Kind::Scale:
      return std::abs(node_->s) * node_->children[0].sup_bound(rho);
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& c : node_->children) acc += c.sup_bound(rho);
      return acc;
    }
    case Kind::Product:
      return node_->children[0].sup_bound(rho) * node_->children[1].sup_bound(rho);
  }
  throw std::logic_error("law sup_bound: unreachable");
}

double LawExpr::ball_bound(double delta) const {
  if (!(delta >= 0.0)) throw std::invalid_argument("law ball_bound: delta must be >= 0");
  if (std::isfinite(node_->alpha_dom) && !(delta <= node_->alpha_dom)) {
    throw std::domain_error("law ball_bound: ball reaches outside the analyticity half-plane");
  }
  switch (node_->kind) {
    case Kind::Const:
      return op_norm(node_->p);
    case Kind::AffineInW:
      if (node_->q.isZero(0.0)) return op_norm(node_->p);
      return kInf;
    case Kind::ConvResolvent:
      // Re z >= -delta on the ball.
      return 1.0 / (1.0 - node_->kernel->weighted_l1_norm(delta));
    case Kind::DelayFactor:
      return std::exp(node_->h * delta) * node_->children[0].ball_bound(delta);
    case Kind::Scale:
      return std::abs(node_->s) * node_->children[0].ball_bound(delta);
    case Kind::Sum: {
      double acc = 0.0;
      for (const auto& c : node_->children) acc += c.ball_bound(delta);
      return acc;
    }
    case Kind::Product:
      return node_->children[0].ball_bound(delta) * node_->children[1].ball_bound(delta);
  }
  throw std::logic_error("law ball_bound: unreachable");
}

SecondOrderLaw::SecondOrderLaw(LawExpr m0_, LawExpr m1_, double r_)
    : m0(std::move(m0_)), m1(std::move(m1_)), r(r_) {
  if (!(r > 0.0)) throw std::invalid_argument("law: exclusion radius r must be > 0");
  if (m0.rows() != m0.cols() || m1.rows() != m1.cols() || m0.rows() != m1.rows()) {
    throw std::invalid_argument("law: M0 and M1 must be square with equal dimension");
  }
}

double SecondOrderLaw::analytic_alpha() const {
  return std::min(m0.alpha_dom(), m1.alpha_dom());
}

double SecondOrderLaw::domain_alpha() const {
  return std::min(1.0 / (2.0 * r), analytic_alpha());
}

CMatrix SecondOrderLaw::eval_symbol(Complex z, bool* limit_used) const {
  if (!(z.real() > -analytic_alpha())) {
    throw std::domain_error("eval_symbol: frequency outside the analyticity half-plane");
  }
  if (z == 0.0) {
    // z M0(1/z) -> 0 for bounded M0; the limit is carried by M1 alone.
    if (limit_used) *limit_used = true;
    return m1.eval(z, limit_used);
  }
  return z * m0.eval(z, limit_used) + m1.eval(z, limit_used);
}

BallSup sup_symbol_on_ball(const SecondOrderLaw& law, double delta, int grid_per_unit) {
  BallSup out;
  if (delta == 0.0) return out;
  // Strict: the grid touches Re z = -delta, which must stay evaluable.
  if (!(delta < law.analytic_alpha())) {
    throw std::domain_error("sup_symbol_on_ball: ball reaches outside the analyticity domain");
  }
  out.analytic_bound = delta * law.m0.ball_bound(delta) + law.m1.ball_bound(delta);

  auto scan = [&](double cx, double cy, double half, int pts) {
    for (int i = 0; i <= pts; ++i) {
      for (int j = 0; j <= pts; ++j) {
        Complex z(cx - half + 2.0 * half * i / pts, cy - half + 2.0 * half * j / pts);
        if (std::abs(z) > delta || z == 0.0) continue;
        double v = op_norm(law.eval_symbol(z));
        if (v > out.grid_value) {
          out.grid_value = v;
          out.grid_argmax = z;
        }
      }
    }
  };
  int pts = std::max(16, static_cast<int>(std::ceil(2.0 * delta * grid_per_unit)));
  scan(0.0, 0.0, delta, pts);
  // One refinement pass, x4 density around the coarse argmax.
  double cell = 2.0 * delta / pts;
  scan(out.grid_argmax.real(), out.grid_argmax.imag(), cell, 8);
  return out;
}

}  // namespace evostab
