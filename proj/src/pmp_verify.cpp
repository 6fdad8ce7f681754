#include "bioremed/pmp_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bioremed/errors.hpp"
#include "bioremed/integrator.hpp"

namespace bioremed {

namespace {

using Vec4 = std::array<double, 4>;

double setpoint_or_zero(const GrowthModel& growth, double sigma) {
  return sigma > 0.0 ? optimal_setpoint(growth, sigma) : 0.0;
}

double gamma_or_zero(const GrowthModel& growth, double sigma) {
  return sigma > 0.0 ? max_removal_rate(growth, sigma) : 0.0;
}

// Setpoint of the branch selected by alpha: the treated patch's s-hat, and
// s-hat(s1) on the singular arc.
double branch_setpoint(double alpha, State s, const GrowthModel& growth) {
  return alpha == 0.0 ? setpoint_or_zero(growth, s.s2) : setpoint_or_zero(growth, s.s1);
}

AdjointState adjoint_rate(AdjointState l, double alpha, double mu_c, const ReducedParams& p) {
  const double r = p.r, d = p.d;
  return {l.lambda1 * (alpha / r) * mu_c + d * (l.lambda1 / r - l.lambda2 / (1.0 - r)),
          l.lambda2 * ((1.0 - alpha) / (1.0 - r)) * mu_c + d * (l.lambda2 / (1.0 - r) - l.lambda1 / r)};
}

State hermite(const Sample& a, const Sample& b, double t) {
  const double h = b.t - a.t;
  const double u = (t - a.t) / h;
  const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
  const double h10 = u * (1.0 - u) * (1.0 - u);
  const double h01 = u * u * (3.0 - 2.0 * u);
  const double h11 = u * u * (u - 1.0);
  return {h00 * a.s.s1 + h10 * h * a.rate.ds1 + h01 * b.s.s1 + h11 * h * b.rate_in.ds1,
          h00 * a.s.s2 + h10 * h * a.rate.ds2 + h01 * b.s.s2 + h11 * h * b.rate_in.ds2};
}

// Joint state/costate field with the branch frozen.
Vec4 joint_rhs(const Vec4& y, double alpha, const ReducedParams& p, const GrowthModel& growth) {
  const State s{y[0], y[1]};
  const double c = branch_setpoint(alpha, s, growth);
  const StateRate ds = reduced_rhs(s, {alpha, c}, p, growth);
  const AdjointState dl = adjoint_rate({y[2], y[3]}, alpha, growth.mu(c), p);
  return {ds.ds1, ds.ds2, dl.lambda1, dl.lambda2};
}

Vec4 rk4_step(const Vec4& y, double h, double alpha, const ReducedParams& p, const GrowthModel& growth) {
  const auto add = [](const Vec4& a, double f, const Vec4& b) {
    return Vec4{a[0] + f * b[0], a[1] + f * b[1], a[2] + f * b[2], a[3] + f * b[3]};
  };
  const Vec4 k1 = joint_rhs(y, alpha, p, growth);
  const Vec4 k2 = joint_rhs(add(y, h / 2.0, k1), alpha, p, growth);
  const Vec4 k3 = joint_rhs(add(y, h / 2.0, k2), alpha, p, growth);
  const Vec4 k4 = joint_rhs(add(y, h, k3), alpha, p, growth);
  Vec4 out;
  for (int i = 0; i < 4; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

bool branch_matches(double eta, double alpha, double tol) {
  if (eta > tol) return alpha == 1.0;
  if (eta < -tol) return alpha == 0.0;
  return true;
}

double q_for_gradient(State x, double p1, double p2, const ReducedParams& params, const GrowthModel& growth) {
  const AdjointState lambda{-p1, -p2};
  const double q1 = hamiltonian_q(x, lambda, {1.0, setpoint_or_zero(growth, x.s1)}, params, growth);
  const double q2 = hamiltonian_q(x, lambda, {0.0, setpoint_or_zero(growth, x.s2)}, params, growth);
  return -1.0 + std::max(q1, q2);
}

}  // namespace

AdjointState transversality_seed(const Trajectory& traj, const ReducedParams& params) {
  if (!traj.reached() || traj.samples.empty()) {
    throw NoTarget("transversality_seed: trajectory did not reach the target");
  }
  const Sample& last = traj.samples.back();
  const double band = diagonal_band(last.s, 0.0);
  if (last.phase == Phase::diagonal || std::abs(last.s.s1 - last.s.s2) <= band) {
    return {-params.r, -(1.0 - params.r)};
  }
  if (last.s.s1 < last.s.s2) return {0.0, -1.0};
  return {-1.0, 0.0};
}

CostatePath adjoint_backward(const Trajectory& traj, const ReducedParams& params, const GrowthModel& growth,
                             AdjointState seed, const SimConfig& config) {
  const auto& xs = traj.samples;
  if (xs.empty()) throw ResolutionError("adjoint_backward: empty trajectory");
  const std::size_t n = xs.size();
  CostatePath path;
  path.t.resize(n);
  path.lambda.resize(n);
  path.t[n - 1] = xs[n - 1].t;
  path.lambda[n - 1] = seed;

  ode::StepperOptions opt;
  opt.rel_tol = config.rel_tol;
  opt.abs_tol = config.abs_tol;

  for (std::size_t k = n - 1; k-- > 0;) {
    const Sample& a = xs[k];
    const Sample& b = xs[k + 1];
    if (!(b.t > a.t)) {
      throw ResolutionError("adjoint_backward: sample times not strictly increasing at t=" + std::to_string(a.t));
    }
    const double alpha = a.u.alpha;
    const auto rhs = [&](double t, const ode::Vec<2>& y) {
      const State s = hermite(a, b, std::clamp(t, a.t, b.t));
      const double mu_c = growth.mu(branch_setpoint(alpha, s, growth));
      const AdjointState dl = adjoint_rate({y[0], y[1]}, alpha, mu_c, params);
      return ode::Vec<2>{dl.lambda1, dl.lambda2};
    };
    const AdjointState& lb = path.lambda[k + 1];
    const auto out = ode::integrate<2>(rhs, b.t, {lb.lambda1, lb.lambda2}, a.t,
                                       std::span<const ode::Event<2>>{}, opt, [](double, const ode::Vec<2>&) {});
    path.t[k] = a.t;
    path.lambda[k] = {out.y[0], out.y[1]};
  }
  return path;
}

double switching_function(AdjointState lambda, State s, const ReducedParams& params, const GrowthModel& growth) {
  const double r = params.r;
  return (-lambda.lambda1 / r) * gamma_or_zero(growth, s.s1) -
         (-lambda.lambda2 / (1.0 - r)) * gamma_or_zero(growth, s.s2);
}

double switching_rate(AdjointState lambda, State s, const ReducedParams& params, const GrowthModel& growth) {
  const double r = params.r, d = params.d;
  if (d == 0.0) return 0.0;
  const double g1 = gamma_or_zero(growth, s.s1);
  const double g2 = gamma_or_zero(growth, s.s2);
  const double m1 = growth.mu(setpoint_or_zero(growth, s.s1));
  const double m2 = growth.mu(setpoint_or_zero(growth, s.s2));
  const double l1 = lambda.lambda1, l2 = lambda.lambda2;
  return d * (g1 / r + g2 / (1.0 - r)) * (l2 / (1.0 - r) - l1 / r) +
         d * (l1 * m1 / (r * r) + l2 * m2 / ((1.0 - r) * (1.0 - r))) * (s.s1 - s.s2);
}

ExtremalReport check_extremal(const Trajectory& traj, const ReducedParams& params, const GrowthModel& growth,
                              const ExtremalTolerances& tol, const SimConfig& config) {
  ExtremalReport report;
  report.reached = traj.reached();
  if (!report.reached || traj.samples.empty()) return report;

  CostatePath path;
  try {
    path = adjoint_backward(traj, params, growth, transversality_seed(traj, params), config);
  } catch (const Error&) {
    return report;
  }

  const auto& xs = traj.samples;
  const std::size_t n = xs.size();
  int last_sign = 0;
  // The diffusive mode relaxes at rate d / (r (1 - r)); keep the stencil
  // well inside that time scale.
  const double fd_step = tol.fd_step / std::max(1.0, params.d / (params.r * (1.0 - params.r)));
  for (std::size_t k = 0; k < n; ++k) {
    const Sample& smp = xs[k];
    const AdjointState raw = path.lambda[k];
    const double scale = std::abs(raw.lambda1) + std::abs(raw.lambda2);
    ExtremalSample row;
    row.t = smp.t;
    row.alpha = smp.u.alpha;
    row.lambda = scale > 0.0 ? AdjointState{raw.lambda1 / scale, raw.lambda2 / scale} : raw;
    row.eta = switching_function(row.lambda, smp.s, params, growth);
    row.eta_dot = switching_rate(row.lambda, smp.s, params, growth);
    row.eta_dot_fd = std::numeric_limits<double>::quiet_NaN();

    const bool before_end = k + 1 < n;
    if (before_end) {
      report.max_sign_violation =
          std::max({report.max_sign_violation, row.lambda.lambda1, row.lambda.lambda2});

      row.branch_ok = branch_matches(row.eta, row.alpha, tol.sign);
      if (!row.branch_ok) ++report.branch_violations;

      const double band = diagonal_band(smp.s, config.diag_tol);
      row.forbidden = (smp.s.s1 > smp.s.s2 + band && row.eta < -tol.sign) ||
                      (smp.s.s1 < smp.s.s2 - band && row.eta > tol.sign);
      if (row.forbidden) ++report.forbidden_visits;

      // The oracle needs one branch on both sides of the sample.
      const bool same_branch = k == 0 || xs[k - 1].u.alpha == smp.u.alpha;
      if (same_branch && scale > 0.0) {
        const Vec4 y{smp.s.s1, smp.s.s2, raw.lambda1, raw.lambda2};
        const Vec4 yp = rk4_step(y, fd_step, row.alpha, params, growth);
        const Vec4 ym = rk4_step(y, -fd_step, row.alpha, params, growth);
        // gamma is not twice differentiable at 0, so stencils leaving the
        // open orthant say nothing about the formula.
        if (std::min({yp[0], yp[1], ym[0], ym[1]}) > 0.0) {
          const double ep = switching_function({yp[2], yp[3]}, {yp[0], yp[1]}, params, growth);
          const double em = switching_function({ym[2], ym[3]}, {ym[0], ym[1]}, params, growth);
          row.eta_dot_fd = (ep - em) / (2.0 * fd_step) / scale;
          report.max_eta_dot_error =
              std::max(report.max_eta_dot_error, std::abs(row.eta_dot - row.eta_dot_fd));
        }
      }

      if (smp.phase == Phase::offdiag && std::abs(row.eta) > tol.sign) {
        const int sign = row.eta > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++report.sign_changes;
        last_sign = sign;
      }
    }
    report.samples.push_back(row);
  }

  report.pass = report.max_sign_violation <= tol.sign && report.branch_violations == 0 &&
                report.max_eta_dot_error <= tol.eta_dot && report.forbidden_visits == 0 &&
                report.sign_changes <= 1;
  return report;
}

double hamiltonian_q(State x, AdjointState lambda, Control u, const ReducedParams& params,
                     const GrowthModel& growth) {
  const double r = params.r;
  return -(u.alpha * lambda.lambda1 / r * removal_rate(growth, x.s1, u.sr_star) +
           (1.0 - u.alpha) * lambda.lambda2 / (1.0 - r) * removal_rate(growth, x.s2, u.sr_star));
}

std::vector<double> hjb_residuals_v0(State x, const ReducedParams& params, const GrowthModel& growth) {
  params.validate();
  const double sb = params.s_bar, r = params.r;
  if (std::max(x.s1, x.s2) <= sb) throw DomainError("hjb_residual_v0: state lies in the target");

  const double kink_tol = 1e-12 * sb;
  const auto partials = [&](double xi, double weight) -> std::vector<double> {
    if (std::abs(xi - sb) <= kink_tol) return {0.0, weight / max_removal_rate(growth, sb)};
    if (xi > sb) return {weight / max_removal_rate(growth, xi)};
    return {0.0};
  };
  std::vector<double> out;
  for (const double p1 : partials(x.s1, r)) {
    for (const double p2 : partials(x.s2, 1.0 - r)) out.push_back(q_for_gradient(x, p1, p2, params, growth));
  }
  return out;
}

double hjb_residual_v0(State x, const ReducedParams& params, const GrowthModel& growth) {
  const auto all = hjb_residuals_v0(x, params, growth);
  return *std::max_element(all.begin(), all.end(),
                           [](double a, double b) { return std::abs(a) < std::abs(b); });
}

}  // namespace bioremed
