#include "popdyn/diagnostics.hpp"

#include <cmath>

namespace popdyn {

double relative_entropy(const GameModel& model, const PopulationState& rho,
                        const PopulationState& rho_inf, NoiseLevel beta) {
  if (beta.beta <= 0.0) {
    throw Error(ErrorCode::unsupported_operation,
                "relative entropy is only defined for beta > 0");
  }
  return beta.beta *
         (noisy_potential(model, rho_inf, beta) - noisy_potential(model, rho, beta));
}

double relative_fisher(const GameModel& model, const StrategyGraph& g,
                       const PopulationState& rho, NoiseLevel beta) {
  if (beta.beta <= 0.0) {
    throw Error(ErrorCode::unsupported_operation,
                "relative Fisher information is only defined for beta > 0");
  }
  if (!rho.interior()) {
    throw Error(ErrorCode::boundary_state, "Fisher information needs an interior state");
  }
  Eigen::VectorXd bar_f = noisy_payoff(model, rho, beta);
  double sum = 0.0;
  for (auto [i, j] : g.edges()) {
    double d = bar_f[j] - bar_f[i];
    // ordered edges (i,j) and (j,i); only the uphill direction contributes
    if (d > 0.0) {
      sum += d * d * rho[i];
    } else {
      sum += d * d * rho[j];
    }
  }
  return sum;
}

double fisher_log_ratio_form(const GameModel& model, const StrategyGraph& g,
                             const PopulationState& rho, NoiseLevel beta) {
  return relative_fisher(model, g, rho, beta) / (beta.beta * beta.beta);
}

void annotate_diagnostics(Trajectory& traj, const GameModel& model,
                          const StrategyGraph& g, const PopulationState& rho_inf) {
  NoiseLevel beta(traj.beta);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    PopulationState state = PopulationState::validate(traj.states[k]);
    traj.relative_entropy[k] = relative_entropy(model, state, rho_inf, beta);
    traj.fisher_information[k] = relative_fisher(model, g, state, beta);
  }
}

double dissipation_check(const Trajectory& traj) {
  if (traj.size() < 3) {
    throw Error(ErrorCode::trajectory_too_short, "dissipation check needs >= 3 samples");
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    double h_entropy = traj.relative_entropy[k + 1] - traj.relative_entropy[k - 1];
    double dt = traj.times[k + 1] - traj.times[k - 1];
    if (std::isnan(h_entropy) || std::isnan(traj.fisher_information[k])) {
      throw Error(ErrorCode::unsupported_operation,
                  "trajectory has no diagnostic columns (annotate first)");
    }
    double dh_dt = h_entropy / dt;
    double residual =
        std::abs(dh_dt + traj.beta * traj.fisher_information[k]) / (1.0 + std::abs(dh_dt));
    worst = std::max(worst, residual);
  }
  return worst;
}

DecayFit decay_rate_fit(const Trajectory& traj, double tail_fraction) {
  double t0 = traj.times.front(), t1 = traj.times.back();
  double tail_start = t1 - tail_fraction * (t1 - t0);

  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if (traj.times[k] < tail_start) continue;
    double h_val = traj.relative_entropy[k];
    if (std::isnan(h_val)) {
      throw Error(ErrorCode::unsupported_operation,
                  "trajectory has no H column (annotate first)");
    }
    if (h_val < 1e-14) break;  // past measurability; fit the pre-plateau part
    double x = traj.times[k], y = std::log(h_val);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++fit.samples;
  }
  if (fit.samples < 3) {
    throw Error(ErrorCode::trajectory_too_short, "too few positive-H samples in the tail");
  }
  double m = static_cast<double>(fit.samples);
  double denom = m * sxx - sx * sx;
  double slope = (m * sxy - sx * sy) / denom;
  fit.rate = -slope;
  double ss_tot = syy - sy * sy / m;
  double ss_res = ss_tot - slope * (sxy - sx * sy / m);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace popdyn
