#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "popdyn/game_model.hpp"
#include "popdyn/strategy_graph.hpp"

namespace popdyn {

/// Floor applied to components before log evaluation inside the flow.
/// Interior solutions never reach it in well-resolved runs; activations
/// are counted and reported.
inline constexpr double kStateFloor = 1e-12;

struct IntegratorOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double initial_step = 1e-3;
  double max_step = 1.0;
  /// When > 0, output states land exactly on multiples of sample_dt;
  /// otherwise every accepted step is recorded.
  double sample_dt = 0.0;
};

struct IntegratorStats {
  long steps_accepted = 0;
  long steps_rejected = 0;
  long floor_clamps = 0;
  double max_mass_drift = 0.0;  // |sum rho - 1| before renormalization
};

/// Time-stamped solution of the flow, with diagnostic columns filled in
/// lazily (free energy at integration time; H and I by the diagnostics
/// module once a reference measure is known).
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> free_energy;       // empty unless potential game
  std::vector<double> relative_entropy;  // H; NaN until annotated
  std::vector<double> fisher_information;  // I; NaN until annotated
  double beta = 0.0;
  std::string game_id;
  IntegratorStats stats;
  // agent-simulation metadata; unset for ODE trajectories
  std::optional<long> ensemble_size;
  std::optional<unsigned long long> seed;

  std::size_t size() const { return times.size(); }
  const Eigen::VectorXd& terminal() const { return states.back(); }
};

/// Right-hand side of the flow:
///   drho_i/dt = sum_{j in N(i)} rho_j [barF_i - barF_j]_+
///             - sum_{j in N(i)} rho_i [barF_j - barF_i]_+ .
/// Gain/loss terms pair off per edge, so components sum to zero exactly.
Eigen::VectorXd rhs(const GameModel& model, const StrategyGraph& g,
                    const Eigen::VectorXd& rho, NoiseLevel beta);

/// Adaptive embedded Runge-Kutta 5(4) integration from an interior start,
/// with per-step renormalization and floor clamping.
Trajectory integrate(const GameModel& model, const StrategyGraph& g,
                     const PopulationState& rho0, NoiseLevel beta, double t_end,
                     const IntegratorOptions& opts = {});

enum class AttractorKind { equilibrium, limit_cycle, unresolved };

struct ClassifyOptions {
  double tail_fraction = 0.25;
  double equilibrium_velocity_tol = 1e-6;
  double equilibrium_diameter_tol = 1e-4;
  double cycle_diameter_min = 1e-2;
  double recurrence_tol = 1e-3;
  double min_period = 1e-2;
  int min_recurrences = 3;
  double period_consistency = 0.10;
};

struct AttractorReport {
  AttractorKind kind = AttractorKind::unresolved;
  Eigen::VectorXd equilibrium;          // set when kind == equilibrium
  double period = 0.0;                  // set when kind == limit_cycle
  Eigen::VectorXd amplitude;            // per-coordinate half-range of the tail
  double terminal_velocity = 0.0;       // ||rhs||_inf at the last state
  double tail_diameter = 0.0;           // sup-norm diameter of the tail
  double recurrence_distance = 0.0;
};

const char* to_string(AttractorKind k);

/// Classifies the tail of a trajectory as an equilibrium or a limit cycle.
AttractorReport classify_attractor(const GameModel& model, const StrategyGraph& g,
                                   const Trajectory& traj, const ClassifyOptions& opts = {});

struct SweepEntry {
  double beta = 0.0;
  AttractorReport report;
  std::optional<std::string> error;  // integration failure for this beta
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // sorted by beta
  /// Adjacent beta pairs where the classification flips between
  /// equilibrium and limit cycle.
  std::vector<std::pair<double, double>> flip_brackets;
};

/// Integrates and classifies one trajectory per beta (run concurrently);
/// per-beta failures are recorded, not fatal.
SweepResult sweep_beta(const GameModel& model, const StrategyGraph& g,
                       const PopulationState& rho0, const std::vector<double>& betas,
                       double t_end, const IntegratorOptions& iopts = {},
                       const ClassifyOptions& copts = {});

}  // namespace popdyn
