#include "evostab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace evostab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

void check_terms(const std::vector<ExpTerm>& terms) {
  for (const auto& t : terms) {
    if (!(t.rate > 0.0)) throw std::invalid_argument("kernel: every decay rate must be > 0");
    if (!std::isfinite(t.coef)) throw std::invalid_argument("kernel: non-finite coefficient");
  }
}

double terms_min_rate(const std::vector<ExpTerm>& terms) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) r = std::min(r, t.rate);
  return r;
}

// |sum_j c_j e^{-b_j t}|-weighted integral, exact when all c_j >= 0,
// otherwise the term-wise |c_j| upper bound.
double terms_weighted_l1(const std::vector<ExpTerm>& terms, double a, bool& conservative) {
  bool mixed = false;
  double v = 0.0;
  for (const auto& t : terms) {
    if (t.coef < 0.0) mixed = true;
    v += std::abs(t.coef) / (t.rate - a);
  }
  conservative = mixed;
  return v;
}

Complex terms_laplace(const std::vector<ExpTerm>& terms, Complex z) {
  Complex v = 0.0;
  for (const auto& t : terms) v += t.coef / (t.rate + z);
  return v;
}

}  // namespace

Kernel Kernel::exp_sum(std::vector<ExpTerm> terms, double alpha) {
  check_terms(terms);
  if (!(alpha > 0.0)) throw std::invalid_argument("kernel: alpha must be > 0");
  Kernel k;
  k.family_ = Family::ExpSum;
  k.terms_ = std::move(terms);
  k.alpha_ = alpha;
  if (alpha >= terms_min_rate(k.terms_) && !k.terms_.empty()) {
    throw std::invalid_argument("kernel: alpha must lie below every decay rate");
  }
  return k;
}

Kernel Kernel::diag_exp_sum(std::vector<std::vector<ExpTerm>> channels, double alpha) {
  if (channels.empty()) throw std::invalid_argument("kernel: no channels");
  if (!(alpha > 0.0)) throw std::invalid_argument("kernel: alpha must be > 0");
  Kernel k;
  k.family_ = Family::DiagExpSum;
  k.channels_ = std::move(channels);
  k.alpha_ = alpha;
  for (const auto& ch : k.channels_) {
    check_terms(ch);
    if (!ch.empty() && alpha >= terms_min_rate(ch)) {
      throw std::invalid_argument("kernel: alpha must lie below every decay rate");
    }
  }
  return k;
}

Kernel Kernel::sampled(std::vector<double> t, std::vector<double> k, double tail_rate,
                       double alpha) {
  if (t.empty() || t.size() != k.size()) {
    throw std::invalid_argument("kernel: sampled table empty or column length mismatch");
  }
  if (t.front() != 0.0) throw std::invalid_argument("kernel: sampled table must start at t = 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("kernel: sample times must increase");
  }
  if (!(tail_rate > 0.0)) throw std::invalid_argument("kernel: tail rate must be > 0");
  Kernel kn;
  kn.family_ = Family::Sampled;
  kn.sample_t_ = std::move(t);
  kn.sample_k_ = std::move(k);
  kn.tail_rate_ = tail_rate;
  kn.alpha_ = alpha;
  return kn;
}

Kernel Kernel::sampled_from_csv(const std::string& path, double tail_rate, double alpha) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("kernel: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("kernel: empty table " + path);
  std::vector<double> ts, ks;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, v;
    if (!(row >> t >> v)) throw std::invalid_argument("kernel: bad row in " + path + ": " + line);
    ts.push_back(t);
    ks.push_back(v);
  }
  return sampled(std::move(ts), std::move(ks), tail_rate, alpha);
}

int Kernel::dim() const {
  return family_ == Family::DiagExpSum ? static_cast<int>(channels_.size()) : 1;
}

bool Kernel::is_zero() const {
  switch (family_) {
    case Family::ExpSum:
      return std::all_of(terms_.begin(), terms_.end(), [](auto& t) { return t.coef == 0.0; });
    case Family::DiagExpSum:
      return std::all_of(channels_.begin(), channels_.end(), [](auto& ch) {
        return std::all_of(ch.begin(), ch.end(), [](auto& t) { return t.coef == 0.0; });
      });
    case Family::Sampled:
      return std::all_of(sample_k_.begin(), sample_k_.end(), [](double v) { return v == 0.0; });
  }
  return false;
}

double Kernel::min_rate() const {
  switch (family_) {
    case Family::ExpSum:
      return terms_min_rate(terms_);
    case Family::DiagExpSum: {
      double r = std::numeric_limits<double>::infinity();
      for (const auto& ch : channels_) r = std::min(r, terms_min_rate(ch));
      return r;
    }
    case Family::Sampled:
      return tail_rate_;
  }
  return 0.0;
}

const std::vector<ExpTerm>& Kernel::terms() const {
  if (family_ != Family::ExpSum) {
    throw std::logic_error("kernel: terms() is only available for scalar exponential sums");
  }
  return terms_;
}

const std::vector<ExpTerm>& Kernel::scalar_terms_checked(const char* op) const {
  if (family_ != Family::ExpSum) {
    throw std::invalid_argument(std::string(op) + ": requires a scalar exponential-sum kernel");
  }
  return terms_;
}

Complex Kernel::laplace(Complex z) const {
  if (!(z.real() > -min_rate())) {
    throw std::domain_error("kernel laplace: Re z must exceed -min decay rate");
  }
  switch (family_) {
    case Family::ExpSum:
      return terms_laplace(terms_, z);
    case Family::DiagExpSum:
      throw std::invalid_argument("kernel laplace: diagonal kernel, use laplace_matrix");
    case Family::Sampled:
      return quadrature_laplace(sample_t_, sample_k_, z, tail_rate_);
  }
  return 0.0;
}

CMatrix Kernel::laplace_matrix(Complex z) const {
  if (family_ == Family::DiagExpSum) {
    if (!(z.real() > -min_rate())) {
      throw std::domain_error("kernel laplace: Re z must exceed -min decay rate");
    }
    CMatrix m = CMatrix::Zero(dim(), dim());
    for (int c = 0; c < dim(); ++c) m(c, c) = terms_laplace(channels_[c], z);
    return m;
  }
  CMatrix m(1, 1);
  m(0, 0) = laplace(z);
  return m;
}

double Kernel::weighted_l1_norm(double a, bool* conservative) const {
  if (conservative) *conservative = false;
  if (family_ == Family::ExpSum || family_ == Family::DiagExpSum) {
    if (!(a < min_rate())) {
      throw std::domain_error("weighted_l1_norm: divergent, weight >= min decay rate");
    }
  }
  switch (family_) {
    case Family::ExpSum: {
      bool cons = false;
      double v = terms_weighted_l1(terms_, a, cons);
      if (conservative) *conservative = cons;
      return v;
    }
    case Family::DiagExpSum: {
      bool identical = std::all_of(channels_.begin(), channels_.end(), [&](const auto& ch) {
        if (ch.size() != channels_.front().size()) return false;
        for (std::size_t i = 0; i < ch.size(); ++i) {
          if (ch[i].coef != channels_.front()[i].coef || ch[i].rate != channels_.front()[i].rate)
            return false;
        }
        return true;
      });
      if (identical) {
        bool cons = false;
        double v = terms_weighted_l1(channels_.front(), a, cons);
        if (conservative) *conservative = cons;
        return v;
      }
      // ||k(t)|| = max over channels of |k_c(t)|, integrated numerically with a
      // certified exponential tail; no closed form once channels differ.
      auto norm_at = [&](double t) {
        double m = 0.0;
        for (const auto& ch : channels_) {
          double v = 0.0;
          for (const auto& term : ch) v += term.coef * std::exp(-term.rate * t);
          m = std::max(m, std::abs(v));
        }
        return m;
      };
      double rmin = min_rate();
      double tcut = 60.0 / rmin;  // e^{-60} tail before weighting
      int n = 200000;
      double htr = tcut / n;
      double acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        double t = i * htr;
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::exp(a * t) * norm_at(t);
      }
      acc *= htr;
      double tail = 0.0;
      for (const auto& ch : channels_) {
        for (const auto& term : ch) {
          tail += std::abs(term.coef) * std::exp((a - term.rate) * tcut) / (term.rate - a);
        }
      }
      if (conservative) *conservative = true;
      return acc + tail;
    }
    case Family::Sampled: {
      if (!(a < tail_rate_)) {
        throw std::domain_error("weighted_l1_norm: weight >= declared tail rate");
      }
      double acc = 0.0;
      for (std::size_t i = 1; i < sample_t_.size(); ++i) {
        double dt = sample_t_[i] - sample_t_[i - 1];
        acc += 0.5 * dt *
               (std::exp(a * sample_t_[i - 1]) * std::abs(sample_k_[i - 1]) +
                std::exp(a * sample_t_[i]) * std::abs(sample_k_[i]));
      }
      double tend = sample_t_.back();
      acc += std::abs(sample_k_.back()) * std::exp(a * tend) / (tail_rate_ - a);
      if (conservative) *conservative = true;
      return acc;
    }
  }
  return 0.0;
}

AdmissibilityReport Kernel::admissibility_report() const {
  AdmissibilityReport r;
  r.alpha = alpha_;
  // Measurability holds by construction for all three families.
  r.weakly_measurable = true;
  r.norm_measurable = true;
  try {
    r.weighted_l1 = weighted_l1_norm(alpha_, &r.weighted_l1_conservative);
    r.weighted_l1_below_one = r.weighted_l1 < 1.0;
  } catch (const std::domain_error& e) {
    r.weighted_l1 = std::numeric_limits<double>::infinity();
    r.weighted_l1_below_one = false;
    r.notes += std::string(e.what()) + "; ";
  }
  // Scalar values and diagonal matrices are selfadjoint and commute; the
  // commutator of two diagonal matrices is exactly zero.
  r.selfadjoint = true;
  r.commuting = true;
  r.commutator_norm = 0.0;
  return r;
}

CertifiedBound Kernel::transform_sign_margin(double delta, double rho) const {
  if (!(delta > 0.0)) throw std::invalid_argument("transform_sign_margin: delta must be > 0");
  if (!(rho > -alpha_)) throw std::domain_error("transform_sign_margin: rho must exceed -alpha");
  auto margin_of = [&](const std::vector<ExpTerm>& terms) {
    // t Im K(t - i rho)/sqrt(2 pi) = -sum_j c_j t^2 / (sqrt(2 pi)((b_j + rho)^2 + t^2)).
    // Each nonnegative mode is increasing in t^2 (infimum at t = delta); a
    // negative mode is bounded below by its t -> inf limit c_j.
    double g = 0.0;
    for (const auto& t : terms) {
      double denom = (t.rate + rho) * (t.rate + rho) + delta * delta;
      if (t.coef >= 0.0) {
        g += t.coef * delta * delta / (kSqrt2Pi * denom);
      } else {
        g += t.coef / kSqrt2Pi;
      }
    }
    return g;
  };
  CertifiedBound out;
  switch (family_) {
    case Family::ExpSum:
      out.value = margin_of(terms_);
      break;
    case Family::DiagExpSum: {
      double g = std::numeric_limits<double>::infinity();
      for (const auto& ch : channels_) g = std::min(g, margin_of(ch));
      out.value = g;
      break;
    }
    case Family::Sampled:
      out.certified = false;
      out.note = "not certified by this method (sampled kernels are validation-only)";
      return out;
  }
  if (out.value > 0.0) {
    out.certified = true;
  } else {
    out.certified = false;
    out.note = "not certified by this method (term-wise sign bound is non-positive)";
  }
  return out;
}

bool Kernel::has_decay_rate(double alpha0) const {
  const auto& terms = scalar_terms_checked("has_decay_rate");
  double k0 = 0.0;
  for (const auto& t : terms) {
    if (t.coef < 0.0) {
      throw std::invalid_argument("has_decay_rate: requires nonnegative coefficients");
    }
    k0 += t.coef;
  }
  if (!(k0 > 0.0)) throw std::invalid_argument("has_decay_rate: requires k(0) > 0");
  // k' + alpha0 k = -sum (b_j - alpha0) c_j e^{-b_j t}: nonpositive for all t
  // iff every active mode has b_j >= alpha0 (slowest mode dominates as t -> inf).
  for (const auto& t : terms) {
    if (t.coef > 0.0 && t.rate < alpha0) return false;
  }
  return true;
}

double Kernel::decay_rate_sup() const {
  const auto& terms = scalar_terms_checked("decay_rate_sup");
  double r = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.coef > 0.0) r = std::min(r, t.rate);
  }
  return r;
}

double Kernel::envelope_phi(double alpha, double t) const {
  const auto& terms = scalar_terms_checked("envelope_phi");
  if (!(alpha > 0.0) || !(alpha < decay_rate_sup())) {
    throw std::domain_error("envelope_phi: need 0 < alpha < the kernel's decay rate");
  }
  // Im K(t + i alpha)/sqrt(2 pi) = -sum_j c_j t / (sqrt(2 pi)((b_j - alpha)^2 + t^2)),
  // so Phi(t) = sum_j c_j (1 + t^2) / (sqrt(2 pi)((b_j - alpha)^2 + t^2)); the
  // t -> 0 limit is sum_j c_j / (sqrt(2 pi)(b_j - alpha)^2).
  double phi = 0.0;
  for (const auto& term : terms) {
    double a2 = (term.rate - alpha) * (term.rate - alpha);
    phi += term.coef * (1.0 + t * t) / (kSqrt2Pi * (a2 + t * t));
  }
  return phi;
}

double Kernel::envelope_inf(double alpha) const {
  const auto& terms = scalar_terms_checked("envelope_inf");
  if (!has_decay_rate(alpha)) {
    throw std::domain_error("envelope_inf: kernel does not dominate rate alpha");
  }
  if (!(alpha < decay_rate_sup())) {
    throw std::domain_error("envelope_inf: need alpha strictly below the kernel's decay rate");
  }
  // Each mode of Phi is monotone in t^2 ((1+T)/(a^2+T) falls if a^2 < 1, rises
  // otherwise), so its infimum over t > 0 sits at an endpoint.
  double c = 0.0;
  for (const auto& term : terms) {
    double a2 = (term.rate - alpha) * (term.rate - alpha);
    c += term.coef * std::min(1.0, 1.0 / a2) / kSqrt2Pi;
  }
  if (!(c > 0.0)) throw std::domain_error("envelope_inf: certification failed, infimum is 0");
  return c;
}

double g_from_positivity_constant(double c, double alpha, double delta, double rho) {
  if (!(c > 0.0)) throw std::invalid_argument("g_from_positivity_constant: c must be > 0");
  if (!(rho > -alpha)) {
    throw std::domain_error("g_from_positivity_constant: rho must exceed -alpha");
  }
  double s = alpha + rho + 1.0;
  return c / (kSqrt2Pi * s * s) * (delta * delta) / (1.0 + delta * delta);
}

Complex quadrature_laplace(const std::vector<double>& t, const std::vector<double>& k,
                           Complex z, double tail_rate) {
  if (t.empty() || t.size() != k.size()) {
    throw std::invalid_argument("quadrature_laplace: empty table or length mismatch");
  }
  if (!(z.real() > -tail_rate)) {
    throw std::domain_error("quadrature_laplace: Re z must exceed -tail rate");
  }
  Complex acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    double dt = t[i] - t[i - 1];
    acc += 0.5 * dt *
           (std::exp(-z * t[i - 1]) * k[i - 1] + std::exp(-z * t[i]) * k[i]);
  }
  // Beyond the table, k(t) ~ k(t_end) e^{-tail_rate (t - t_end)}.
  acc += k.back() * std::exp(-z * t.back()) / (z + tail_rate);
  return acc;
}

}  // namespace evostab
