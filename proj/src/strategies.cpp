#include "bioremed/strategies.hpp"

#include <algorithm>
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

double setpoint_for(const GrowthModel& growth, double sigma) {
  return sigma > 0.0 ? optimal_setpoint(growth, sigma) : 0.0;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double parse_unit_interval(std::string_view text, std::string_view what) {
  const std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
    throw ContractViolation("strategy: cannot parse " + std::string(what) + " '" + buf + "'");
  }
  return v;
}

}  // namespace

double diagonal_band(State s, double configured) {
  if (configured > 0.0) return configured;
  return 1e-9 * std::max(1.0, std::hypot(s.s1, s.s2));
}

Control optimal_feedback(State s, const ReducedParams& params, const GrowthModel& growth,
                         double diag_tol) {
  const double band = diagonal_band(s, diag_tol);
  if (s.s1 > s.s2 + band) return {1.0, setpoint_for(growth, s.s1)};
  if (s.s2 > s.s1 + band) return {0.0, setpoint_for(growth, s.s2)};
  return {params.r, setpoint_for(growth, s.s1)};
}

Control one_pump_feedback(State s, int active, const GrowthModel& growth) {
  if (active == 1) return {1.0, setpoint_for(growth, s.s1)};
  if (active == 2) return {0.0, setpoint_for(growth, s.s2)};
  throw ContractViolation("one_pump_feedback: active patch must be 1 or 2");
}

Control homogenizing_feedback(State s, const ReducedParams& params) {
  return {params.r, 0.5 * weighted_mass(s, params.r)};
}

Control constant_zeta_control(State s, double alpha, double zeta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(zeta >= 0.0 && zeta <= 1.0)) {
    throw ContractViolation("constant_zeta_control: alpha and zeta must lie in [0, 1]");
  }
  return {alpha, zeta * inflow_concentration(s, alpha)};
}

Control evaluate(const Strategy& strategy, State s, const FeedbackContext& ctx) {
  return std::visit(
      overloaded{
          [&](const OptimalTwoPump&) { return optimal_feedback(s, ctx.params, ctx.growth, ctx.diag_tol); },
          [&](const OnePump& p) { return one_pump_feedback(s, p.active, ctx.growth); },
          [&](const Homogenizing&) { return homogenizing_feedback(s, ctx.params); },
          [&](const ConstantZeta& c) { return constant_zeta_control(s, c.alpha, c.zeta); },
          [&](const ConstantSetpoint& c) { return Control{c.alpha, c.sr_star}; },
          [&](const SwappedBranches&) {
            const double band = diagonal_band(s, ctx.diag_tol);
            if (s.s1 > s.s2 + band) return Control{0.0, setpoint_for(ctx.growth, s.s2)};
            if (s.s2 > s.s1 + band) return Control{1.0, setpoint_for(ctx.growth, s.s1)};
            return Control{ctx.params.r, setpoint_for(ctx.growth, s.s1)};
          },
      },
      strategy);
}

bool locks_on_diagonal(const Strategy& strategy) {
  return std::holds_alternative<OptimalTwoPump>(strategy);
}

Strategy parse_strategy(std::string_view text) {
  const auto parts = split(text, ':');
  const auto& head = parts.front();
  if (head == "optimal" && parts.size() == 1) return OptimalTwoPump{};
  if (head == "homog" && parts.size() == 1) return Homogenizing{};
  if (head == "swapped" && parts.size() == 1) return SwappedBranches{};
  if (head == "onepump" && parts.size() == 2) {
    if (parts[1] == "1") return OnePump{1};
    if (parts[1] == "2") return OnePump{2};
  }
  if (head == "const" && parts.size() == 3) {
    const double a = parse_unit_interval(parts[1], "alpha");
    const double z = parse_unit_interval(parts[2], "zeta");
    if (a < 0.0 || a > 1.0 || z < 0.0 || z > 1.0) {
      throw ContractViolation("strategy: const:<alpha>:<zeta> needs both in [0, 1]");
    }
    return ConstantZeta{a, z};
  }
  if (head == "constsr" && parts.size() == 3) {
    const double a = parse_unit_interval(parts[1], "alpha");
    const double sr = parse_unit_interval(parts[2], "setpoint");
    if (a < 0.0 || a > 1.0 || sr < 0.0) {
      throw ContractViolation("strategy: constsr:<alpha>:<sr> needs alpha in [0, 1] and sr >= 0");
    }
    return ConstantSetpoint{a, sr};
  }
  throw ContractViolation("strategy: unknown strategy '" + std::string(text) + "'");
}

std::string to_string(const Strategy& strategy) {
  std::ostringstream out;
  out.precision(17);
  std::visit(overloaded{
                 [&](const OptimalTwoPump&) { out << "optimal"; },
                 [&](const OnePump& p) { out << "onepump:" << p.active; },
                 [&](const Homogenizing&) { out << "homog"; },
                 [&](const ConstantZeta& c) { out << "const:" << c.alpha << ":" << c.zeta; },
                 [&](const ConstantSetpoint& c) { out << "constsr:" << c.alpha << ":" << c.sr_star; },
                 [&](const SwappedBranches&) { out << "swapped"; },
             },
             strategy);
  return out.str();
}

}  // namespace bioremed
