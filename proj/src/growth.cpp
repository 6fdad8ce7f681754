#include "bioremed/growth.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>
#include <vector>

#include "bioremed/errors.hpp"

namespace bioremed {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kBracketShrink = 1e-12;
constexpr int kMaxRootIterations = 200;

}  // namespace

GrowthModel::GrowthModel(Kinetics kinetics) : kinetics_(std::move(kinetics)) {}

GrowthModel GrowthModel::monod(double mu_max, double ks) {
  if (!(mu_max > 0.0) || !(ks > 0.0)) {
    throw ContractViolation("Monod kinetics need mu_max > 0 and ks > 0");
  }
  return GrowthModel(Monod{mu_max, ks});
}

GrowthModel GrowthModel::tessier(double mu_max, double k) {
  if (!(mu_max > 0.0) || !(k > 0.0)) {
    throw ContractViolation("Tessier kinetics need mu_max > 0 and k > 0");
  }
  return GrowthModel(Tessier{mu_max, k});
}

GrowthModel GrowthModel::custom(std::string name, std::function<double(double)> mu,
                                std::function<double(double)> dmu) {
  if (!mu || !dmu) {
    throw ContractViolation("custom kinetics need both mu and its derivative");
  }
  return GrowthModel(CustomKinetics{std::move(name), std::move(mu), std::move(dmu)});
}

double GrowthModel::mu(double s) const {
  return std::visit(
      overloaded{
          [s](const Monod& m) { return m.mu_max * s / (m.ks + s); },
          [s](const Tessier& m) { return -m.mu_max * std::expm1(-s / m.k); },
          [s](const CustomKinetics& m) { return m.mu(s); },
      },
      kinetics_);
}

double GrowthModel::dmu(double s) const {
  return std::visit(
      overloaded{
          [s](const Monod& m) {
            const double den = m.ks + s;
            return m.mu_max * m.ks / (den * den);
          },
          [s](const Tessier& m) { return m.mu_max / m.k * std::exp(-s / m.k); },
          [s](const CustomKinetics& m) { return m.dmu(s); },
      },
      kinetics_);
}

std::string GrowthModel::describe() const {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const Monod& m) { out << "monod(mu_max=" << m.mu_max << ",ks=" << m.ks << ")"; },
                 [&](const Tessier& m) { out << "tessier(mu_max=" << m.mu_max << ",k=" << m.k << ")"; },
                 [&](const CustomKinetics& m) { out << "custom(" << m.name << ")"; },
             },
             kinetics_);
  return out.str();
}

void GrowthModel::validate(std::span<const double> probes) const {
  if (mu(0.0) != 0.0) {
    throw ContractViolation("growth model: mu(0) must be exactly 0");
  }
  std::vector<double> grid(probes.begin(), probes.end());
  std::sort(grid.begin(), grid.end());
  // mu' may underflow to 0 once mu has saturated in floating point.
  const double mu_top = grid.empty() ? 0.0 : mu(grid.back());
  for (double s : grid) {
    if (s < 0.0) {
      throw ContractViolation("growth model: probes must be non-negative");
    }
    const double slope = dmu(s);
    if (!(slope > 0.0) && !(slope == 0.0 && mu(s) == mu_top)) {
      throw ContractViolation("growth model: mu' must be positive at s=" + std::to_string(s));
    }
  }
  // Chord slopes of a concave function are non-increasing.
  for (std::size_t i = 2; i < grid.size(); ++i) {
    const double a = grid[i - 2], b = grid[i - 1], c = grid[i];
    if (!(a < b && b < c)) continue;
    const double left = (mu(b) - mu(a)) / (b - a);
    const double right = (mu(c) - mu(b)) / (c - b);
    if (right > left * (1.0 + 1e-9) + 1e-15) {
      throw ContractViolation("growth model: mu is not concave near s=" + std::to_string(b));
    }
  }
}

void GrowthModel::validate() const {
  std::vector<double> probes{0.0};
  for (double s = 1e-6; s <= 1e3; s *= 1.25) probes.push_back(s);
  validate(probes);
}

double removal_rate(const GrowthModel& model, double sigma, double sr_star) {
  return model.mu(sr_star) * (sigma - sr_star);
}

double optimal_setpoint(const GrowthModel& model, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("optimal_setpoint: sigma must be positive and finite");
  }
  // Strictly increasing under concavity: derivative is 2 mu' - mu'' (sigma - s) > 0.
  const auto residual = [&](double s) { return model.mu(s) - model.dmu(s) * (sigma - s); };

  double lo = kBracketShrink * sigma;
  double hi = sigma - kBracketShrink * sigma;
  double f_lo = residual(lo);
  double f_hi = residual(hi);
  if (!(f_lo < 0.0 && f_hi > 0.0)) {
    throw NumericalFailure("optimal_setpoint: optimality residual is not bracketed", sigma);
  }

  const double scale = model.mu(sigma);
  double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
  int side = 0;
  double width_before = hi - lo;

  for (int it = 0; it < kMaxRootIterations; ++it) {
    if (hi - lo <= 4.0 * DBL_EPSILON * hi || best_f <= 1e-14 * scale) break;

    double s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    // Fall back to bisection every third step when the bracket is not halving.
    if (it % 3 == 2) {
      if (hi - lo > 0.5 * width_before) s = 0.5 * (lo + hi);
      width_before = hi - lo;
    }
    if (!(s > lo && s < hi)) s = 0.5 * (lo + hi);

    const double f = residual(s);
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best = s;
    }
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = s;
      f_lo = f;
      if (side == -1) f_hi *= 0.5;  // Illinois
      side = -1;
    } else {
      hi = s;
      f_hi = f;
      if (side == +1) f_lo *= 0.5;
      side = +1;
    }
  }
  if (!(best_f <= 1e-10 * scale)) {
    throw NumericalFailure("optimal_setpoint: no convergence", sigma);
  }
  return best;
}

double max_removal_rate(const GrowthModel& model, double sigma) {
  const double s = optimal_setpoint(model, sigma);
  return removal_rate(model, sigma, s);
}

double max_removal_rate_slope(const GrowthModel& model, double sigma) {
  return model.mu(optimal_setpoint(model, sigma));
}

TimeFunction::TimeFunction(GrowthModel model, double s_bar, double rel_tol)
    : model_(std::move(model)), s_bar_(s_bar), rel_tol_(rel_tol) {
  if (!(s_bar_ > 0.0)) {
    throw ContractViolation("TimeFunction: threshold must be positive");
  }
  if (!(rel_tol_ > 0.0 && rel_tol_ <= 1e-8)) {
    throw ContractViolation("TimeFunction: quadrature tolerance must lie in (0, 1e-8]");
  }
}

double TimeFunction::unclamped(double sigma) const {
  if (!(sigma > 0.0)) {
    throw DomainError("TimeFunction: sigma must be positive");
  }
  if (sigma == s_bar_) return 0.0;
  // Integrate over t in [0, 1] with xi = s_bar + t (sigma - s_bar). Boost's
  // adaptive driver compares an unscaled error with a scaled tolerance, so on
  // a narrow [s_bar, sigma] it would bisect to full depth.
  const double width = sigma - s_bar_;
  const auto integrand = [this, width](double t) {
    return width / max_removal_rate(model_, s_bar_ + t * width);
  };
  double error = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  try {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, 20, rel_tol_,
                                                                          &error, &l1);
  } catch (const std::exception& e) {
    throw NumericalFailure(std::string("TimeFunction: quadrature failed: ") + e.what(), sigma);
  }
  if (!std::isfinite(value) || error > 10.0 * rel_tol_ * std::abs(l1)) {
    throw NumericalFailure("TimeFunction: quadrature did not reach tolerance", sigma);
  }
  return value;
}

double TimeFunction::operator()(double sigma) const {
  if (sigma < 0.0 || std::isnan(sigma)) {
    throw DomainError("TimeFunction: sigma must be non-negative");
  }
  if (sigma <= s_bar_) return 0.0;
  return std::max(0.0, unclamped(sigma));
}

}  // namespace bioremed
