#include "degen/lemma_oracle.hpp"

#include "degen/csv.hpp"
#include "degen/forms.hpp"
#include "degen/kernel.hpp"
#include "degen/parallel.hpp"
#include "degen/random.hpp"

#include <algorithm>
#include <optional>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace degen {

namespace {

const std::vector<std::pair<LemmaId, const char*>>& name_table() {
  static const std::vector<std::pair<LemmaId, const char*>> t{
      {LemmaId::L2_1, "L2_1"},     {LemmaId::L2_2, "L2_2"},     {LemmaId::L2_3a, "L2_3a"},
      {LemmaId::L2_3b, "L2_3b"},   {LemmaId::L2_4, "L2_4"},     {LemmaId::L2_5a, "L2_5a"},
      {LemmaId::L2_5b, "L2_5b"},   {LemmaId::L2_6a, "L2_6a"},   {LemmaId::L2_6b, "L2_6b"},
      {LemmaId::L2_7, "L2_7"},     {LemmaId::L2_8_1, "L2_8_1"}, {LemmaId::L2_8_2, "L2_8_2"},
      {LemmaId::L2_8_3, "L2_8_3"}, {LemmaId::L2_Bfreeze, "L2_Bfreeze"},
      {LemmaId::L2_9, "L2_9"},     {LemmaId::L2_10, "L2_10"},   {LemmaId::L2_11, "L2_11"},
  };
  return t;
}

}  // namespace

const std::vector<LemmaId>& all_lemmas() {
  static const std::vector<LemmaId> ids = [] {
    std::vector<LemmaId> v;
    for (const auto& [id, name] : name_table()) v.push_back(id);
    return v;
  }();
  return ids;
}

std::string lemma_name(LemmaId id) {
  for (const auto& [k, name] : name_table())
    if (k == id) return name;
  throw std::invalid_argument("unknown lemma id");
}

LemmaId parse_lemma(const std::string& name) {
  for (const auto& [k, n] : name_table())
    if (name == n) return k;
  throw std::invalid_argument("unknown lemma id '" + name + "'");
}

LemmaMode lemma_mode(LemmaId id) {
  switch (id) {
    case LemmaId::L2_5a:
    case LemmaId::L2_6a:
    case LemmaId::L2_6b:
    case LemmaId::L2_7:
    case LemmaId::L2_8_2:
      return LemmaMode::exact;
    default:
      return LemmaMode::ratio;
  }
}

const char* mode_name(LemmaMode mode) { return mode == LemmaMode::exact ? "exact" : "ratio"; }

bool LemmaReport::passed() const {
  return mode == LemmaMode::exact ? violations == 0 : (stable && std::isfinite(c_emp));
}

namespace {

constexpr double kExactTol = 1e-10;
constexpr int kMaxTries = 1000;

/// One sample: a list of claimed inequalities lhs <= c * rhs, plus a description.
struct Outcome {
  std::vector<std::pair<double, double>> pairs;
  std::vector<std::pair<const char*, double>> info;
  void add(double lhs, double rhs) { pairs.emplace_back(lhs, rhs); }
  void note(const char* key, double v) { info.emplace_back(key, v); }
};

/// Uniform variates replayed from a buffer, so that a sample can be perturbed coordinate-wise.
/// Draws beyond the buffer are appended from the backing stream.
class Variates {
 public:
  Variates(std::uint64_t seed, std::uint64_t index) : fresh_(seed, index) {}
  Variates(std::vector<double> u, SampleRng fresh) : u_(std::move(u)), fresh_(fresh) {}

  double next() {
    if (cursor_ == u_.size()) u_.push_back(fresh_.uniform());
    return u_[cursor_++];
  }
  double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * next(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double normal() {
    const double a = std::max(next(), 1e-300), b = next();
    return std::sqrt(-2.0 * std::log(a)) * std::cos(6.283185307179586 * b);
  }
  int index(int count) { return std::min(count - 1, static_cast<int>(next() * count)); }
  bool coin() { return index(2) == 1; }

  /// Variates consumed so far.
  std::vector<double> used() const { return {u_.begin(), u_.begin() + cursor_}; }

 private:
  std::vector<double> u_;
  std::size_t cursor_ = 0;
  SampleRng fresh_;
};

struct Sampler {
  Variates& rng;
  double p;
  bool identity = false;
  std::optional<double> fixed_delta;

  /// The case's fixed delta if it has one, else the drawn value.
  double delta(double drawn) const { return fixed_delta.value_or(drawn); }

  /// gamma-norm magnitudes: log-uniform over six decades, or uniform near the unit sphere.
  double magnitude() { return rng.coin() ? rng.log_uniform(1e-3, 1e3) : rng.uniform(0.0, 3.0); }

  int dim() { return 1 + rng.index(2); }

  Point point(int n, double lo = 0.0, double hi = 1.0) {
    Point x(n);
    for (int a = 0; a < n; ++a) x[a] = rng.uniform(lo, hi);
    return x;
  }

  /// Fixed library instances, so the ellipticity and Lipschitz bounds are shared by all samples.
  MetricField metric(int n, bool x_dependent) {
    if (identity) return identity_metric(n);
    const int choice = x_dependent ? 2 + rng.index(n == 2 ? 2 : 1) : rng.index(n == 2 ? 4 : 3);
    switch (choice) {
      case 0:
        return identity_metric(n);
      case 1:
        return diagonal_metric(n == 1 ? std::vector<double>{2.0} : std::vector<double>{0.5, 2.0});
      case 2:
        return affine_diagonal_metric(n, 1.0);
      default:
        return rotation_metric(0.5, 2.0, 1.0);
    }
  }

  GammaVector direction(int n, int big_n) {
    GammaVector v(n, big_n);
    do {
      for (int k = 0; k < v.size(); ++k) v[k] = rng.normal();
    } while (v.euclidean_norm() == 0.0);
    return v;
  }

  /// Random vector with gamma-norm t.
  GammaVector with_norm(const SpatialMatrix& g, int n, int big_n, double t) {
    GammaVector v = direction(n, big_n);
    v *= t / gamma_norm(g, v);
    return v;
  }

  /// Magnitude kept 1e-6 away from the threshold when 1 < p < 2.
  double admissible_magnitude() {
    for (int k = 0; k < kMaxTries; ++k) {
      const double t = magnitude();
      if (t > 0.0 && (p >= 2.0 || std::abs(t - 1.0) >= 1e-6)) return t;
    }
    throw std::runtime_error("lemma sampler could not satisfy its hypotheses");
  }

  /// Partner of xi: independent, or a relative perturbation of it.
  GammaVector partner(const SpatialMatrix& g, const GammaVector& xi) {
    if (rng.index(3) == 0) {
      GammaVector d = with_norm(g, xi.n(), xi.big_n(), 1.0);
      d *= rng.log_uniform(1e-3, 1.0) * gamma_norm(g, xi);
      return xi + d;
    }
    return with_norm(g, xi.n(), xi.big_n(), magnitude());
  }

  double eps_closed() { return rng.coin() ? rng.uniform(0.0, 1.0) : rng.log_uniform(1e-4, 1.0); }
};

void require(bool hypothesis) {
  if (!hypothesis) throw std::logic_error("lemma sampler broke a hypothesis");
}

double eu(const GammaVector& v) { return v.euclidean_norm(); }

/// Euclidean dual norm of a linear functional on R^size, i.e. sup over unit eta of |f(eta)|.
template <class F>
double dual_norm(int size, F&& f) {
  double s = 0.0;
  for (int k = 0; k < size; ++k) {
    const double v = f(k);
    s += v * v;
  }
  return std::sqrt(s);
}

/// A difference small enough relative to its operands is rounding noise on both sides.
bool resolvable(double diff, double scale) { return diff > 1e-8 * scale; }

// ---- scalar lemmas

Outcome l2_4(Sampler& s) {
  Outcome o;
  const double a = 1.0 + s.magnitude() + 1e-12;
  const double b = s.rng.coin() ? s.magnitude() : a * (1.0 + s.rng.uniform(-0.5, 0.5));
  require(a > 1.0 && b >= 0.0);
  if (!resolvable(std::abs(b - a), a + b)) return o;
  const double p = s.p;
  o.add(std::abs(kernel_h(b, p) - kernel_h(a, p)) * b,
        std::pow(a - 1.0 + std::max(0.0, b - 1.0), p - 1.0) / (a - 1.0) * std::abs(b - a));
  o.note("a", a);
  o.note("b", b);
  return o;
}

Outcome l2_5a(Sampler& s) {
  Outcome o;
  const double a = 1.0 + s.magnitude() + 1e-12;
  require(a > 1.0);
  o.add(std::abs(kernel_h_prime(a, s.p)), s.p * std::pow(a - 1.0, s.p - 2.0) / a);
  o.note("a", a);
  return o;
}

Outcome l2_5b(Sampler& s) {
  Outcome o;
  const double a = 1.0 + s.magnitude() + 1e-12;
  const double b = s.rng.coin() ? 1.0 + s.magnitude() + 1e-12
                                : 1.0 + (a - 1.0) * std::exp(s.rng.uniform(-1.0, 1.0));
  require(a > 1.0 && b > 1.0);
  if (!resolvable(std::abs(b - a), a + b)) return o;
  const double p = s.p;
  o.add(std::abs(kernel_h_prime(b, p) * b - kernel_h_prime(a, p) * a),
        (std::pow(a - 1.0, p - 3.0) + std::pow(b - 1.0, p - 3.0)) * std::abs(b - a));
  o.note("a", a);
  o.note("b", b);
  return o;
}

Outcome l2_6a(Sampler& s) {
  Outcome o;
  const double t = s.magnitude();
  const double g = kernel_g(t, s.p);
  o.add(g * g, kernel_h(t, s.p) * std::pow(std::max(0.0, t - 1.0), s.p));
  o.note("t", t);
  return o;
}

Outcome l2_6b(Sampler& s) {
  Outcome o;
  const double t = s.admissible_magnitude();
  const double p = s.p;
  const double g = kernel_g(t, p), gp = kernel_g_prime(t, p);
  const double rhs = t > 1.0 ? p * p / (p - 1.0) * kernel_hh_t(t, p) * std::pow(t - 1.0, p) : 0.0;
  o.add(g * g + gp * gp * t * t, rhs);
  o.note("t", t);
  return o;
}

// ---- vector lemmas

Outcome l2_1(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector eta = s.with_norm(g, n, big_n, s.magnitude() + 1e-300);
  const GammaVector xi = s.partner(g, eta);
  require(eu(eta) > 0.0 && eu(xi) > 0.0);
  const double diff = eu(eta - xi);
  if (!resolvable(diff, eu(eta) + eu(xi))) return o;
  GammaVector a = eta, b = xi;
  a *= 1.0 / gamma_norm(g, eta);
  b *= 1.0 / gamma_norm(g, xi);
  o.add(eu(a - b), diff / eu(eta));
  o.note("eta", gamma_norm(g, eta));
  o.note("xi", gamma_norm(g, xi));
  return o;
}

Outcome l2_2(Sampler& s) {
  Outcome o;
  static constexpr double kAlphas[] = {0.5, 1.5, 2.5};
  const double alpha = kAlphas[s.rng.index(3)];
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector eta = s.with_norm(g, n, big_n, s.magnitude() + 1e-300);
  const GammaVector xi = s.partner(g, eta);
  const double te = gamma_norm(g, eta), tx = gamma_norm(g, xi);
  require(te > 0.0 && tx > 0.0);
  if (!resolvable(eu(eta - xi), eu(eta) + eu(xi))) return o;
  GammaVector a = eta, b = xi;
  a *= std::pow(te, alpha - 1.0);
  b *= std::pow(tx, alpha - 1.0);
  const double lhs = eu(a - b);
  const double mid = std::pow(te + tx, alpha - 1.0) * eu(eta - xi);
  if (lhs == 0.0 && mid == 0.0) return o;
  o.add(lhs, mid);
  o.add(mid, lhs);
  o.note("alpha", alpha);
  o.note("eta", te);
  o.note("xi", tx);
  return o;
}

Outcome l2_3a(Sampler& s) {
  Outcome o;
  const double delta = s.delta(s.rng.coin() ? 0.0 : s.rng.uniform(0.0, 1.0));
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector xi = s.with_norm(g, n, big_n, s.magnitude());
  const GammaVector eta = s.partner(g, xi);
  const double diff = eu(eta - xi);
  if (!resolvable(diff, eu(eta) + eu(xi))) return o;
  o.add(eu(truncated_gradient(g, xi, delta) - truncated_gradient(g, eta, delta)), diff);
  o.note("delta", delta);
  o.note("xi", gamma_norm(g, xi));
  o.note("eta", gamma_norm(g, eta));
  return o;
}

Outcome l2_3b(Sampler& s) {
  Outcome o;
  const double delta = s.delta(s.rng.log_uniform(1e-3, 1.0));
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector eta = s.with_norm(g, n, big_n, 1.0 + delta + s.magnitude());
  const GammaVector xi = s.partner(g, eta);
  require(gamma_norm(g, eta) >= 1.0 + delta);
  const double diff = eu(eta - xi);
  if (!resolvable(diff, eu(eta) + eu(xi))) return o;
  o.add(diff, (1.0 + 1.0 / delta) *
                  eu(truncated_gradient(g, eta, 0.0) - truncated_gradient(g, xi, 0.0)));
  o.note("delta", delta);
  o.note("eta", gamma_norm(g, eta));
  o.note("xi", gamma_norm(g, xi));
  return o;
}

Outcome l2_7(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, s.rng.coin() && n == 2);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector xi = s.with_norm(g, n, big_n, s.admissible_magnitude());
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  const double t = gamma_norm(g, xi);
  const double lo = kp.eps + lambda_env(t, kp.p), hi = kp.eps + big_lambda_env(t, kp.p);
  for (FormSpace space : {FormSpace::second_gradient, FormSpace::gradient, FormSpace::spatial}) {
    FormOperand eta(space, n, big_n);
    const double scale = s.rng.log_uniform(1e-3, 1e3);
    for (int k = 0; k < eta.size(); ++k) eta[k] = scale * s.rng.normal();
    double value = 0.0;
    if (space == FormSpace::second_gradient) value = form_a(g, xi, kp, eta, eta);
    if (space == FormSpace::gradient) value = form_b(g, xi, kp, eta, eta);
    if (space == FormSpace::spatial) value = form_c(g, xi, kp, eta, eta);
    const double nrm = operand_norm_sq(g, eta);
    o.add(lo * nrm, value);
    o.add(value, hi * nrm);
  }
  o.note("t", t);
  o.note("eps", kp.eps);
  return o;
}

double a_pairing(const SpatialMatrix& g, const GammaVector& xi, const GammaVector& xt,
                 const KernelParams& kp, const GammaVector& with) {
  return gamma_inner(g, vector_field_a(g, xt, kp) - vector_field_a(g, xi, kp), with);
}

Outcome l2_8_1(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector xi = s.with_norm(g, n, big_n, 1.0 + s.magnitude() + 1e-12);
  const GammaVector xt = s.partner(g, xi);
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  const double t = gamma_norm(g, xi), tt = gamma_norm(g, xt);
  require(t > 1.0);
  const double diff = eu(xi - xt);
  if (!resolvable(diff, eu(xi) + eu(xt))) return o;
  const double coef =
      kp.eps + std::pow(t - 1.0 + std::max(0.0, tt - 1.0), kp.p - 1.0) / (t - 1.0);
  o.add(gamma_norm(g, vector_field_a(g, xt, kp) - vector_field_a(g, xi, kp)), coef * diff);
  o.note("xi", t);
  o.note("xi_tilde", tt);
  o.note("eps", kp.eps);
  return o;
}

Outcome l2_8_2(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const SpatialMatrix g = SpatialMatrix::Identity(n, n);
  const GammaVector xi = s.with_norm(g, n, big_n, 1.0 + s.magnitude() + 1e-12);
  const GammaVector xt = s.partner(g, xi);
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  require(gamma_norm(g, xi) > 1.0);
  const GammaVector d = xt - xi;
  o.add(kp.eps * gamma_inner(g, d, d), a_pairing(g, xi, xt, kp, d));
  o.note("xi", gamma_norm(g, xi));
  o.note("xi_tilde", gamma_norm(g, xt));
  o.note("eps", kp.eps);
  return o;
}

Outcome l2_8_3(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, true);
  const Point x = s.point(n);
  Point y = x;
  const double r = s.rng.log_uniform(1e-4, 1.0);
  for (int a = 0; a < n; ++a) y[a] = std::clamp(x[a] + r * s.rng.uniform(-1, 1), 0.0, 1.0);
  const SpatialMatrix gx = m.eval(x), gy = m.eval(y);
  const GammaVector xi = s.with_norm(gx, n, big_n, 1.0 + s.magnitude() + 1e-12);
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  const double tx = gamma_norm(gx, xi), ty = gamma_norm(gy, xi);
  require(tx > 1.0);
  const double dist = (x - y).norm();
  if (!resolvable(dist, 1.0)) return o;
  const GammaVector ax = vector_field_a(gx, xi, kp), ay = vector_field_a(gy, xi, kp);
  const double lhs = dual_norm(xi.size(), [&](int k) {
    GammaVector e(n, big_n);
    e[k] = 1.0;
    return gamma_inner(gx, ax, e) - gamma_inner(gy, ay, e);
  });
  const double coef =
      kp.eps + std::pow(tx - 1.0 + std::max(0.0, ty - 1.0), kp.p - 1.0) / (tx - 1.0);
  o.add(lhs, coef * dist * eu(xi));
  o.note("xi_x", tx);
  o.note("xi_y", ty);
  o.note("dist", dist);
  o.note("eps", kp.eps);
  return o;
}

Outcome l2_bfreeze(Sampler& s) {
  Outcome o;
  const int n = 2, big_n = s.dim();
  const MetricField m = s.metric(n, true);
  const double mu = s.rng.log_uniform(1e-2, 1e2);
  const double lo = 1.0 + 0.25 * mu, hi = 1.0 + 2.0 * mu;
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  for (int tries = 0; tries < kMaxTries; ++tries) {
    const Point x = s.point(n);
    Point y = x;
    const double r = s.rng.log_uniform(1e-4, 0.5);
    for (int a = 0; a < n; ++a) y[a] = std::clamp(x[a] + r * s.rng.uniform(-1, 1), 0.0, 1.0);
    const SpatialMatrix gx = m.eval(x), gy = m.eval(y);
    const GammaVector xi = s.with_norm(gx, n, big_n, s.rng.uniform(lo, hi));
    const double ty = gamma_norm(gy, xi);
    if (ty < lo || ty > hi) continue;
    if (kp.p < 2.0 && std::abs(ty - 1.0) < 1e-6) continue;
    const double dist = (x - y).norm();
    if (!resolvable(dist, 1.0)) return o;
    const FormOperand xo = FormOperand::from_gradient(xi);
    const double lhs = dual_norm(xi.size(), [&](int k) {
      FormOperand eta(FormSpace::gradient, n, big_n);
      eta[k] = 1.0;
      return form_b(gx, xi, kp, xo, eta) - form_b(gy, xi, kp, xo, eta);
    });
    o.add(lhs, (kp.eps + std::pow(mu, kp.p - 2.0)) * dist * eu(xi) * eu(xi));
    o.note("mu", mu);
    o.note("xi_x", gamma_norm(gx, xi));
    o.note("xi_y", ty);
    o.note("dist", dist);
    o.note("eps", kp.eps);
    return o;
  }
  throw std::runtime_error("L2_Bfreeze sampler could not satisfy its hypotheses");
}

Outcome l2_9(Sampler& s) {
  Outcome o;
  static constexpr double kDeltas[] = {0.25, 0.5, 1.0};
  const double delta = s.delta(kDeltas[s.rng.index(3)]);
  const double eps = s.rng.log_uniform(1e-4, 1.0);
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const GammaVector xi = s.with_norm(g, n, big_n, s.magnitude());
  const GammaVector xt = s.partner(g, xi);
  const KernelParams kp{s.p, eps, delta};
  const GammaVector d = xi - xt;
  const double d2 = gamma_inner(g, d, d);
  if (!resolvable(std::sqrt(d2), gamma_norm(g, xi) + gamma_norm(g, xt))) return o;
  const double se = std::sqrt(eps);
  const double lhs = se * d2 + std::pow(gamma_norm(g, truncated_gradient(g, xi, delta) -
                                                        truncated_gradient(g, xt, delta)),
                                        s.p);
  const double xi2 = gamma_inner(g, xi, xi);
  o.add(std::max(0.0, lhs - se * xi2), a_pairing(g, xi, xt, kp, xt - xi) / se);
  o.note("delta", delta);
  o.note("eps", eps);
  o.note("xi", std::sqrt(xi2));
  o.note("xi_tilde", gamma_norm(g, xt));
  return o;
}

Outcome l2_10(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, false);
  const SpatialMatrix g = m.eval(s.point(n));
  const double mu = s.rng.log_uniform(1e-2, 1e2);
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  const GammaVector xi = s.with_norm(g, n, big_n, s.rng.uniform(1.0 + 0.25 * mu, 1.0 + 2.0 * mu));
  GammaVector xt(n, big_n);
  if (s.rng.coin()) {
    xt = s.with_norm(g, n, big_n, s.rng.uniform(0.0, 1.0 + 2.0 * mu));
  } else {
    for (int tries = 0;; ++tries) {
      if (tries == kMaxTries) throw std::runtime_error("L2_10 sampler failed");
      GammaVector d = s.with_norm(g, n, big_n, 1.0);
      d *= s.rng.log_uniform(1e-4, 1.0) * mu;
      xt = xi + d;
      if (gamma_norm(g, xt) <= 1.0 + 2.0 * mu) break;
    }
  }
  const double t = gamma_norm(g, xi), tt = gamma_norm(g, xt);
  require(t >= 1.0 + 0.25 * mu && t <= 1.0 + 2.0 * mu && tt <= 1.0 + 2.0 * mu);
  const GammaVector d = xt - xi;
  const double dn = eu(d);
  if (!resolvable(dn, eu(xi) + eu(xt))) return o;
  const FormOperand dop = FormOperand::from_gradient(d);
  const GammaVector da = vector_field_a(g, xt, kp) - vector_field_a(g, xi, kp);
  const double lhs = dual_norm(xi.size(), [&](int k) {
    FormOperand eta(FormSpace::gradient, n, big_n);
    eta[k] = 1.0;
    return form_b(g, xi, kp, dop, eta) - gamma_inner(g, da, eta.as_gradient());
  });
  o.add(lhs, std::pow(mu, kp.p - 3.0) * dn * dn);
  o.note("mu", mu);
  o.note("xi", t);
  o.note("xi_tilde", tt);
  o.note("eps", kp.eps);
  return o;
}

// ---- second-order lemma on smooth fields

struct L211Terms {
  double lhs = 0.0;
  double rhs = 0.0;
  double t = 0.0;
};

GammaVector w_of(const SmoothField& v, const MetricField& m, const Point& x, double p) {
  const GammaVector dv = v(x).dv;
  GammaVector w = dv;
  w *= kernel_g(gamma_norm(m, x, dv), p);
  return w;
}

L211Terms l2_11_terms(const SmoothField& v, const MetricField& m, const Point& x,
                      const KernelParams& kp, double step) {
  const FieldJet jet = v(x);
  const int n = jet.dv.n(), big_n = jet.dv.big_n();
  L211Terms r;
  r.t = gamma_norm(m, x, jet.dv);
  for (int a = 0; a < n; ++a) {
    Point e = Point::Zero(n);
    e[a] = step;
    const GammaVector d = (1.0 / (12.0 * step)) *
                          ((8.0 * w_of(v, m, x + e, kp.p) - 8.0 * w_of(v, m, x - e, kp.p)) -
                           (w_of(v, m, x + 2 * e, kp.p) - w_of(v, m, x - 2 * e, kp.p)));
    r.lhs += d.mat().squaredNorm();
  }
  if (r.t <= 1.0) return r;
  FormOperand hess(FormSpace::second_gradient, n, big_n);
  for (int i = 0; i < big_n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) hess.at(i, a, b) = jet.hess[i](a, b);
  const SpatialMatrix g = m.eval(x);
  const double gp = kernel_g_prime(r.t, kp.p);
  r.rhs = form_a(g, jet.dv, kp, hess, hess) * std::pow(r.t - 1.0, kp.p) +
          gp * gp * std::pow(r.t, 4.0);
  return r;
}

/// Quadratic plus one plane wave per component, with exact derivatives.
SmoothField random_field(Variates& rng, int n, int big_n) {
  struct Component {
    Point b, k;
    SpatialMatrix q;
    double amp, phase;
  };
  std::vector<Component> comps(big_n);
  const double slope = rng.log_uniform(0.3, 30.0);
  const double curv = rng.log_uniform(1e-2, 10.0);
  for (auto& c : comps) {
    c.b = Point(n);
    c.k = Point(n);
    c.q = SpatialMatrix(n, n);
    for (int a = 0; a < n; ++a) {
      c.b[a] = slope * rng.normal();
      c.k[a] = rng.uniform(-5.0, 5.0);
      for (int b = 0; b <= a; ++b) c.q(a, b) = c.q(b, a) = curv * rng.normal();
    }
    c.amp = rng.uniform(0.0, 1.0) * curv;
    c.phase = rng.uniform(0.0, 6.283185307179586);
  }
  return [comps, n, big_n](const Point& x) {
    FieldJet j{GammaVector(n, big_n), {}};
    for (int i = 0; i < big_n; ++i) {
      const auto& c = comps[i];
      const double arg = c.k.dot(x) + c.phase;
      const Point grad = c.b + c.q * x + c.amp * std::cos(arg) * c.k;
      for (int a = 0; a < n; ++a) j.dv(i, a) = grad[a];
      j.hess[i] = c.q - c.amp * std::sin(arg) * (c.k * c.k.transpose());
    }
    return j;
  };
}

bool stencil_same_side(const SmoothField& v, const MetricField& m, const Point& x, double step,
                       double margin) {
  const double t0 = gamma_norm(m, x, v(x).dv);
  if (std::abs(t0 - 1.0) < margin) return false;
  const int n = static_cast<int>(x.size());
  for (int a = 0; a < n; ++a) {
    for (double k : {-2.0, -1.0, 1.0, 2.0}) {
      Point y = x;
      y[a] += k * step;
      if (y[a] < 0.0 || y[a] > 1.0) return false;
      const double t = gamma_norm(m, y, v(y).dv);
      if ((t > 1.0) != (t0 > 1.0) || std::abs(t - 1.0) < 0.5 * margin) return false;
    }
  }
  return true;
}

Outcome l2_11(Sampler& s) {
  Outcome o;
  const int n = s.dim(), big_n = s.dim();
  const MetricField m = s.metric(n, s.rng.coin());
  const KernelParams kp{s.p, s.eps_closed(), 0.0};
  constexpr double kStep = 1e-3;
  for (int tries = 0; tries < kMaxTries; ++tries) {
    const SmoothField v = random_field(s.rng, n, big_n);
    const Point x = s.point(n, 0.1, 0.9);
    if (!stencil_same_side(v, m, x, kStep, 0.05)) continue;
    const L211Terms r = l2_11_terms(v, m, x, kp, kStep);
    if (r.t <= 1.0) return o;
    o.add(r.lhs, r.rhs);
    o.note("t", r.t);
    o.note("eps", kp.eps);
    return o;
  }
  throw std::runtime_error("L2_11 sampler could not keep |Dv| away from 1");
}

using Evaluator = Outcome (*)(Sampler&);

Evaluator evaluator(LemmaId id) {
  switch (id) {
    case LemmaId::L2_1: return l2_1;
    case LemmaId::L2_2: return l2_2;
    case LemmaId::L2_3a: return l2_3a;
    case LemmaId::L2_3b: return l2_3b;
    case LemmaId::L2_4: return l2_4;
    case LemmaId::L2_5a: return l2_5a;
    case LemmaId::L2_5b: return l2_5b;
    case LemmaId::L2_6a: return l2_6a;
    case LemmaId::L2_6b: return l2_6b;
    case LemmaId::L2_7: return l2_7;
    case LemmaId::L2_8_1: return l2_8_1;
    case LemmaId::L2_8_2: return l2_8_2;
    case LemmaId::L2_8_3: return l2_8_3;
    case LemmaId::L2_Bfreeze: return l2_bfreeze;
    case LemmaId::L2_9: return l2_9;
    case LemmaId::L2_10: return l2_10;
    case LemmaId::L2_11: return l2_11;
  }
  throw std::invalid_argument("unknown lemma id");
}

struct SampleResult {
  double ratio = 0.0;  ///< max lhs / rhs; 0 for skipped samples
  bool violated = false;
};

SampleResult reduce(const Outcome& o) {
  SampleResult r;
  for (const auto& [lhs, rhs] : o.pairs) {
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      r.ratio = std::numeric_limits<double>::infinity();
      r.violated = true;
      continue;
    }
    if (lhs > rhs + kExactTol * (std::abs(lhs) + std::abs(rhs))) r.violated = true;
    if (lhs == 0.0) continue;
    r.ratio = std::max(r.ratio, rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity());
  }
  return r;
}

Outcome evaluate(const LemmaCase& c, Variates& v) {
  Sampler s{v, c.p_values[v.index(static_cast<int>(c.p_values.size()))], c.identity_metric,
            c.delta};
  Outcome o = evaluator(c.id)(s);
  o.info.insert(o.info.begin(), {"p", s.p});
  return o;
}

/// Folds a perturbed variate back into (0, 1).
double reflect(double x) {
  x = std::abs(std::fmod(x, 2.0));
  x = x > 1.0 ? 2.0 - x : x;
  return std::clamp(x, 1e-12, 1.0 - 1e-12);
}

struct Climbed {
  SampleResult r;
  Outcome o;
  std::vector<double> u;
};

/// Stochastic hill-climb on the ratio over the underlying variates. Each step perturbs about
/// two variates with a step size shrinking geometrically from s0 to s1. Every variate vector
/// maps to an admissible configuration, so hypotheses hold throughout.
Climbed climb(const LemmaCase& c, Climbed best, SampleRng& walk,
              int steps, double s0, double s1) {
  const double shrink = steps > 1 ? std::pow(s1 / s0, 1.0 / (steps - 1)) : 1.0;
  double sigma = s0;
  for (int step = 0; step < steps; ++step, sigma *= shrink) {
    std::vector<double> u = best.u;
    if (u.empty()) break;
    const double rate = std::min(1.0, 2.0 / static_cast<double>(u.size()));
    bool moved = false;
    for (double& x : u) {
      if (walk.uniform() < rate) {
        x = reflect(x + sigma * walk.normal());
        moved = true;
      }
    }
    if (!moved) {
      double& x = u[walk.index(static_cast<int>(u.size()))];
      x = reflect(x + sigma * walk.normal());
    }
    Variates trial(std::move(u), SampleRng(walk.engine()(), 0));
    Outcome o = evaluate(c, trial);
    const SampleResult r = reduce(o);
    if (r.ratio > best.r.ratio) best = {r, std::move(o), trial.used()};
  }
  return best;
}

/// Exact mode: one plain draw. Ratio mode: a short climb from the plain draw.
Climbed draw(const LemmaCase& lc, std::uint64_t seed, std::uint64_t index) {
  Variates v(seed, index);
  Outcome o = evaluate(lc, v);
  Climbed c{reduce(o), std::move(o), v.used()};
  if (lemma_mode(lc.id) == LemmaMode::exact) return c;
  SampleRng walk(seed ^ 0x5bd1e9955bd1e995ULL, index);
  return climb(lc, std::move(c), walk, 48, 0.3, 2e-3);
}

constexpr int kRefineCandidates = 8;
constexpr int kRefineSteps = 1500;

/// Long fine-grained climbs from the best samples among [lo, hi).
Climbed refine(const LemmaCase& c, const std::vector<SampleResult>& results, std::int64_t lo,
               std::int64_t hi, std::uint64_t seed) {
  std::vector<std::int64_t> idx;
  for (std::int64_t k = lo; k < hi; ++k) idx.push_back(k);
  const std::size_t top = std::min<std::size_t>(kRefineCandidates, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top), idx.end(),
                    [&](std::int64_t a, std::int64_t b) {
                      return results[a].ratio != results[b].ratio ? results[a].ratio > results[b].ratio
                                                                  : a < b;
                    });
  std::vector<Climbed> out(top);
  parallel_for(0, static_cast<std::int64_t>(top), [&](std::int64_t j) {
    const auto k = static_cast<std::uint64_t>(idx[j]);
    SampleRng walk(seed ^ 0x2545f4914f6cdd1dULL, k);
    out[j] = climb(c, draw(c, seed, k), walk, kRefineSteps, 0.05,
                   1e-5);
  });
  Climbed best;
  for (Climbed& x : out)
    if (x.r.ratio > best.r.ratio) best = std::move(x);
  return best;
}

std::string describe(const Outcome& o) {
  std::string s;
  for (const auto& [key, v] : o.info) s += (s.empty() ? "" : " ") + std::string(key) + "=" + fmt_double(v);
  return s;
}

std::vector<SampleResult> sweep(const LemmaCase& c, std::int64_t count, std::uint64_t seed) {
  if (c.p_values.empty()) throw std::invalid_argument("lemma case needs at least one p");
  for (double p : c.p_values)
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (c.delta) {
    const double lo = c.id == LemmaId::L2_3a ? 0.0 : std::numeric_limits<double>::min();
    if (!(*c.delta >= lo && *c.delta <= 1.0)) {
      throw std::invalid_argument("delta out of range for " + lemma_name(c.id));
    }
  }
  std::vector<SampleResult> out(static_cast<std::size_t>(count));
  parallel_for(0, count, [&](std::int64_t k) {
    out[k] = draw(c, seed, static_cast<std::uint64_t>(k)).r;
  });
  return out;
}

}  // namespace

LemmaReport run_lemma(const LemmaCase& c, std::int64_t budget, std::uint64_t seed) {
  if (budget < 1000) throw std::invalid_argument("lemma budget must be at least 1000");
  LemmaReport rep;
  rep.id = lemma_name(c.id);
  rep.mode = lemma_mode(c.id);
  const std::int64_t total = rep.mode == LemmaMode::exact ? budget : 2 * budget;
  const auto results = sweep(c, total, seed);
  rep.samples = total;
  std::int64_t worst = -1;
  for (std::int64_t k = 0; k < total; ++k) {
    const SampleResult& r = results[k];
    if (r.violated) ++rep.violations;
    if (r.ratio > rep.c_emp) {
      rep.c_emp = r.ratio;
      worst = k;
    }
    if (k + 1 == budget) rep.c_emp_half = rep.c_emp;
  }
  if (rep.mode == LemmaMode::ratio) {
    rep.violations = 0;
    const Climbed first = refine(c, results, 0, budget, seed);
    Climbed second = refine(c, results, budget, total, seed);
    rep.c_emp_half = std::max(rep.c_emp_half, first.r.ratio);
    rep.c_emp = std::max({rep.c_emp, rep.c_emp_half, second.r.ratio});
    const Climbed& top = second.r.ratio > first.r.ratio ? second : first;
    if (top.r.ratio >= rep.c_emp) rep.worst_case = describe(top.o);
    rep.stable = std::isfinite(rep.c_emp) &&
                 (rep.c_emp == rep.c_emp_half ||
                  (rep.c_emp_half > 0.0 && rep.c_emp / rep.c_emp_half - 1.0 < 0.05));
  } else {
    rep.c_emp_half = rep.c_emp;
  }
  if (rep.worst_case.empty() && worst >= 0) {
    rep.worst_case = "index=" + std::to_string(worst) + " " +
                     describe(draw(c, seed, static_cast<std::uint64_t>(worst)).o);
  }
  return rep;
}

std::vector<double> estimate_constant(const LemmaCase& c, const std::vector<std::int64_t>& budgets,
                                      std::uint64_t seed) {
  if (lemma_mode(c.id) == LemmaMode::exact) {
    throw std::invalid_argument("estimate_constant: " + lemma_name(c.id) + " is an exact-mode lemma");
  }
  if (budgets.empty()) return {};
  if (!std::is_sorted(budgets.begin(), budgets.end()) || budgets.front() < 1) {
    throw std::invalid_argument("estimate_constant: budgets must be positive and increasing");
  }
  const auto results = sweep(c, budgets.back(), seed);
  std::vector<double> curve;
  double c_emp = 0.0;
  std::size_t b = 0;
  for (std::int64_t k = 0; k < budgets.back(); ++k) {
    c_emp = std::max(c_emp, results[k].ratio);
    while (b < budgets.size() && budgets[b] == k + 1) {
      curve.push_back(c_emp);
      ++b;
    }
  }
  return curve;
}

LemmaReport check_l2_11(const SmoothField& v, const MetricField& m,
                        std::span<const Point> points, const L211Params& params) {
  KernelParams{params.p, params.eps, 0.0}.validate();
  LemmaReport rep;
  rep.id = "L2_11";
  rep.mode = LemmaMode::ratio;
  const KernelParams kp{params.p, params.eps, 0.0};
  double coarse = 0.0, fine = 0.0;
  std::int64_t worst = -1;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Point& x = points[k];
    if (!stencil_same_side(v, m, x, params.fd_step, params.margin)) {
      throw std::invalid_argument("check_l2_11: |Dv|_gamma too close to 1 or stencil outside the cube");
    }
    ++rep.samples;
    const L211Terms a = l2_11_terms(v, m, x, kp, params.fd_step);
    const L211Terms b = l2_11_terms(v, m, x, kp, 0.5 * params.fd_step);
    if (a.t <= 1.0) continue;
    const double ra = a.lhs == 0.0 ? 0.0 : a.lhs / a.rhs;
    const double rb = b.lhs == 0.0 ? 0.0 : b.lhs / b.rhs;
    coarse = std::max(coarse, ra);
    if (rb > fine) worst = static_cast<std::int64_t>(k);
    fine = std::max(fine, rb);
  }
  rep.c_emp = fine;
  rep.c_emp_half = coarse;
  rep.stable = std::isfinite(fine) &&
               (fine == coarse || (coarse > 0.0 && std::abs(fine / coarse - 1.0) < 0.05));
  if (worst >= 0) rep.worst_case = "point=" + std::to_string(worst);
  return rep;
}

}  // namespace degen
