#pragma once

#include "popdyn/dynamics.hpp"
#include "popdyn/game_model.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// Relative entropy H(rho | rho_inf) = beta (barF(rho_inf) - barF(rho)).
/// Requires a potential game and beta > 0.
double relative_entropy(const GameModel& model, const PopulationState& rho,
                        const PopulationState& rho_inf, NoiseLevel beta);

/// Relative Fisher information, in the noisy-payoff-difference form:
///   I = sum over ordered edges (i,j) of [(barF_j - barF_i)_+]^2 rho_i .
/// This is the normalization under which dH/dt = -beta I holds exactly.
double relative_fisher(const GameModel& model, const StrategyGraph& g,
                       const PopulationState& rho, NoiseLevel beta);

/// The literal log-ratio form sum [(log(rho_i e^{-F_i/beta}) -
/// log(rho_j e^{-F_j/beta}))_+]^2 rho_i. Differs from relative_fisher by
/// the factor 1/beta^2 and does NOT satisfy the dissipation identity;
/// exposed for comparison only.
double fisher_log_ratio_form(const GameModel& model, const StrategyGraph& g,
                             const PopulationState& rho, NoiseLevel beta);

/// Fills the H and I columns of a trajectory against a reference measure.
void annotate_diagnostics(Trajectory& traj, const GameModel& model,
                          const StrategyGraph& g, const PopulationState& rho_inf);

/// Max over interior sample times of |dH/dt + beta I| / (1 + |dH/dt|),
/// with central differences on the trajectory grid. Requires the H and I
/// columns (annotate_diagnostics) and at least 3 samples.
double dissipation_check(const Trajectory& traj);

struct DecayFit {
  double rate = 0.0;       // -slope of log H on the tail window
  double r_squared = 0.0;  // linearity of the fit
  std::size_t samples = 0;
};

/// Least-squares fit of log H(t) on the final `tail_fraction` of the
/// trajectory. Samples with H < 1e-14 (converged past measurability) are
/// dropped; the fit uses the pre-plateau segment.
DecayFit decay_rate_fit(const Trajectory& traj, double tail_fraction = 0.25);

}  // namespace popdyn
