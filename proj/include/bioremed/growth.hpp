#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>

namespace bioremed {

/// Monod kinetics: mu(s) = mu_max * s / (ks + s).
struct Monod {
  double mu_max = 1.0;  // 1/h
  double ks = 1.0;      // g/L
};

/// Tessier kinetics: mu(s) = mu_max * (1 - exp(-s / k)).
struct Tessier {
  double mu_max = 1.0;  // 1/h
  double k = 1.0;       // g/L
};

/// User-supplied kinetics. The derivative must be given explicitly and agree
/// with `mu` to machine precision.
struct CustomKinetics {
  std::string name;
  std::function<double(double)> mu;
  std::function<double(double)> dmu;
};

/// Specific growth rate of the bioreactor biomass.
///
/// Must be C1, increasing and concave on [0, inf) with mu(0) = 0. Inhibited
/// kinetics (Haldane and the like) are not supported.
class GrowthModel {
 public:
  using Kinetics = std::variant<Monod, Tessier, CustomKinetics>;

  GrowthModel() = default;
  explicit GrowthModel(Kinetics kinetics);

  static GrowthModel monod(double mu_max, double ks);
  static GrowthModel tessier(double mu_max, double k);
  static GrowthModel custom(std::string name, std::function<double(double)> mu,
                            std::function<double(double)> dmu);

  double mu(double s) const;
  double dmu(double s) const;

  const Kinetics& kinetics() const noexcept { return kinetics_; }
  std::string describe() const;

  /// Checks mu(0)=0, mu' > 0 and chord-slope concavity on the probe grid.
  /// Throws ContractViolation on the first failure.
  void validate(std::span<const double> probes) const;
  void validate() const;

 private:
  Kinetics kinetics_ = Monod{};
};

/// beta(sigma, sr) = mu(sr) * (sigma - sr): removal rate from a stream at
/// concentration sigma through a bioreactor held at setpoint sr.
double removal_rate(const GrowthModel& model, double sigma, double sr_star);

/// The unique maximiser s-hat(sigma) in (0, sigma) of sr -> removal_rate.
/// Solves mu(s) = mu'(s) (sigma - s) by safeguarded secant/bisection.
/// Throws DomainError for sigma <= 0, NumericalFailure on non-convergence.
double optimal_setpoint(const GrowthModel& model, double sigma);

/// gamma(sigma) = max over sr of removal_rate(sigma, sr).
double max_removal_rate(const GrowthModel& model, double sigma);

/// gamma'(sigma) = mu(s-hat(sigma)).
double max_removal_rate_slope(const GrowthModel& model, double sigma);

/// T(sigma) = max(0, integral from s_bar to sigma of 1/gamma): the time the
/// scalar flow sigma' = -gamma(sigma) needs to bring sigma down to s_bar.
///
/// Immutable and cheap to copy; safe to share between threads.
class TimeFunction {
 public:
  TimeFunction(GrowthModel model, double s_bar, double rel_tol = 1e-10);

  double operator()(double sigma) const;

  /// Signed integral from s_bar to sigma (no clamping at zero).
  double unclamped(double sigma) const;

  double s_bar() const noexcept { return s_bar_; }
  const GrowthModel& growth() const noexcept { return model_; }

 private:
  GrowthModel model_;
  double s_bar_;
  double rel_tol_;
};

}  // namespace bioremed
