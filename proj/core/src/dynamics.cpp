#include "popdyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace popdyn {

Eigen::VectorXd rhs(const GameModel& model, const StrategyGraph& g,
                    const Eigen::VectorXd& rho, NoiseLevel beta) {
  Eigen::VectorXd bar_f = noisy_payoff_floored(model, rho, beta, kStateFloor);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (auto [i, j] : g.edges()) {
    double d = bar_f[i] - bar_f[j];
    // one term per edge: mass flows from the lower to the higher noisy payoff
    double flow = d > 0.0 ? std::max(rho[j], 0.0) * d : -std::max(rho[i], 0.0) * d;
    if (d > 0.0) {
      out[i] += flow;
      out[j] -= flow;
    } else if (d < 0.0) {
      out[i] -= flow;
      out[j] += flow;
    }
  }
  return out;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct StepResult {
  Eigen::VectorXd y;
  double error_norm;
};

StepResult dopri_step(const GameModel& model, const StrategyGraph& g, NoiseLevel beta,
                      const Eigen::VectorXd& y, const Eigen::VectorXd& k1, double h,
                      double abs_tol, double rel_tol) {
  auto f = [&](const Eigen::VectorXd& x) { return rhs(model, g, x, beta); };
  Eigen::VectorXd k2 = f(y + h * (a21 * k1));
  Eigen::VectorXd k3 = f(y + h * (a31 * k1 + a32 * k2));
  Eigen::VectorXd k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  Eigen::VectorXd k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  Eigen::VectorXd k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  Eigen::VectorXd k7 = f(y5);
  Eigen::VectorXd err =
      h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double norm = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    double r = err[i] / scale;
    norm += r * r;
  }
  norm = std::sqrt(norm / static_cast<double>(y.size()));
  return {std::move(y5), norm};
}

void record(Trajectory& traj, const GameModel& model, NoiseLevel beta, double t,
            const Eigen::VectorXd& y) {
  traj.times.push_back(t);
  traj.states.push_back(y);
  if (model.is_potential_game()) {
    traj.free_energy.push_back(
        free_energy(model, PopulationState::validate(y), beta));
  }
  traj.relative_entropy.push_back(std::numeric_limits<double>::quiet_NaN());
  traj.fisher_information.push_back(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

Trajectory integrate(const GameModel& model, const StrategyGraph& g,
                     const PopulationState& rho0, NoiseLevel beta, double t_end,
                     const IntegratorOptions& opts) {
  if (t_end <= 0.0) {
    throw Error(ErrorCode::config_error, "t_end must be positive");
  }
  if (beta.beta > 0.0 && !rho0.interior()) {
    throw Error(ErrorCode::boundary_state,
                "initial state must be interior when beta > 0");
  }

  Trajectory traj;
  traj.beta = beta.beta;

  Eigen::VectorXd y = rho0.rho();
  double t = 0.0;
  double h = std::min(opts.initial_step, t_end);
  double next_sample = opts.sample_dt > 0.0 ? opts.sample_dt : -1.0;
  record(traj, model, beta, t, y);

  Eigen::VectorXd k1 = rhs(model, g, y, beta);
  while (t < t_end - 1e-14 * std::max(1.0, t_end)) {
    h = std::min({h, opts.max_step, t_end - t});
    if (opts.sample_dt > 0.0 && next_sample <= t_end + 1e-12) {
      h = std::min(h, next_sample - t);
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::step_size_underflow,
                  "step size underflow at t = " + std::to_string(t));
    }

    StepResult step = dopri_step(model, g, beta, y, k1, h, opts.abs_tol, opts.rel_tol);
    if (step.error_norm > 1.0) {
      ++traj.stats.steps_rejected;
      h *= std::max(0.2, 0.9 * std::pow(step.error_norm, -0.2));
      continue;
    }

    ++traj.stats.steps_accepted;
    t += h;
    y = std::move(step.y);

    // keep the state on the simplex: floor, then renormalize
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      double floor = beta.beta > 0.0 ? kStateFloor : 0.0;
      if (y[i] < floor) {
        y[i] = floor;
        ++traj.stats.floor_clamps;
      }
    }
    double mass = y.sum();
    traj.stats.max_mass_drift = std::max(traj.stats.max_mass_drift, std::abs(mass - 1.0));
    if (std::abs(mass - 1.0) > 1e-6) {
      throw Error(ErrorCode::invariant_violation,
                  "mass drift " + std::to_string(mass - 1.0) + " at t = " + std::to_string(t));
    }
    y /= mass;

    bool at_sample = opts.sample_dt > 0.0 &&
                     t >= next_sample - 1e-9 * std::max(1.0, next_sample);
    if (opts.sample_dt <= 0.0 || at_sample || t >= t_end - 1e-14 * std::max(1.0, t_end)) {
      record(traj, model, beta, t, y);
      if (at_sample) next_sample += opts.sample_dt;
    }

    k1 = rhs(model, g, y, beta);
    double grow = step.error_norm > 0.0
                      ? std::min(5.0, 0.9 * std::pow(step.error_norm, -0.2))
                      : 5.0;
    h *= grow;
  }
  return traj;
}

const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::equilibrium: return "equilibrium";
    case AttractorKind::limit_cycle: return "limit_cycle";
    default: return "unresolved";
  }
}

namespace {

double point_segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b) {
  Eigen::VectorXd ab = b - a;
  double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

AttractorReport classify_attractor(const GameModel& model, const StrategyGraph& g,
                                   const Trajectory& traj, const ClassifyOptions& opts) {
  if (traj.size() < 8) {
    throw Error(ErrorCode::trajectory_too_short, "trajectory too short to classify");
  }
  double t0 = traj.times.front(), t1 = traj.times.back();
  double tail_start = t1 - opts.tail_fraction * (t1 - t0);
  std::size_t first = 0;
  while (first < traj.size() && traj.times[first] < tail_start) ++first;
  if (traj.size() - first < 4) {
    throw Error(ErrorCode::trajectory_too_short, "tail window has too few samples");
  }

  AttractorReport rep;
  rep.terminal_velocity =
      rhs(model, g, traj.terminal(), NoiseLevel(traj.beta)).lpNorm<Eigen::Infinity>();

  const Eigen::Index n = traj.terminal().size();
  Eigen::VectorXd lo = traj.states[first], hi = traj.states[first];
  for (std::size_t k = first; k < traj.size(); ++k) {
    lo = lo.cwiseMin(traj.states[k]);
    hi = hi.cwiseMax(traj.states[k]);
  }
  rep.tail_diameter = (hi - lo).maxCoeff();
  rep.amplitude = 0.5 * (hi - lo);

  if (rep.terminal_velocity <= opts.equilibrium_velocity_tol &&
      rep.tail_diameter <= opts.equilibrium_diameter_tol) {
    rep.kind = AttractorKind::equilibrium;
    rep.equilibrium = traj.terminal();
    return rep;
  }

  if (rep.tail_diameter >= opts.cycle_diameter_min) {
    // recurrence: each pass must return within tolerance of a point on the
    // previous pass. The reference point follows the latest return, so a
    // slow transversal drift onto the cycle does not mask the recurrences.
    Eigen::VectorXd ref = traj.states[first];
    std::vector<double> event_times;
    double max_event_dist = 0.0;
    double last_event = traj.times[first];
    for (std::size_t k = first + 1; k + 2 < traj.size(); ++k) {
      double d = point_segment_distance(ref, traj.states[k], traj.states[k + 1]);
      if (d > opts.recurrence_tol || traj.times[k] - last_event < opts.min_period) {
        continue;
      }
      // only the local minimum of the approach counts as the return
      double d_prev = point_segment_distance(ref, traj.states[k - 1], traj.states[k]);
      double d_next = point_segment_distance(ref, traj.states[k + 1], traj.states[k + 2]);
      if (d > d_prev || d >= d_next) continue;
      event_times.push_back(traj.times[k]);
      max_event_dist = std::max(max_event_dist, d);
      last_event = traj.times[k];
      ref = traj.states[k];
    }
    (void)n;
    if (static_cast<int>(event_times.size()) >= opts.min_recurrences) {
      std::vector<double> gaps;
      gaps.push_back(event_times[0] - traj.times[first]);
      for (std::size_t k = 1; k < event_times.size(); ++k) {
        gaps.push_back(event_times[k] - event_times[k - 1]);
      }
      double mean = 0.0;
      for (double p : gaps) mean += p;
      mean /= static_cast<double>(gaps.size());
      bool consistent = true;
      for (double p : gaps) {
        if (std::abs(p - mean) > opts.period_consistency * mean) consistent = false;
      }
      if (consistent) {
        rep.kind = AttractorKind::limit_cycle;
        rep.period = mean;
        rep.recurrence_distance = max_event_dist;
        return rep;
      }
    }
  }

  rep.kind = AttractorKind::unresolved;
  return rep;
}

SweepResult sweep_beta(const GameModel& model, const StrategyGraph& g,
                       const PopulationState& rho0, const std::vector<double>& betas,
                       double t_end, const IntegratorOptions& iopts,
                       const ClassifyOptions& copts) {
  if (betas.empty()) {
    throw Error(ErrorCode::config_error, "beta list must be nonempty");
  }
  for (double b : betas) {
    if (b < 0.0) throw Error(ErrorCode::config_error, "beta values must be >= 0");
  }

  std::vector<std::future<SweepEntry>> futures;
  futures.reserve(betas.size());
  for (double b : betas) {
    futures.push_back(std::async(std::launch::async, [&, b]() {
      SweepEntry entry;
      entry.beta = b;
      try {
        Trajectory traj = integrate(model, g, rho0, NoiseLevel(b), t_end, iopts);
        entry.report = classify_attractor(model, g, traj, copts);
      } catch (const Error& err) {
        entry.error = err.what();
      }
      return entry;
    }));
  }

  SweepResult result;
  for (auto& f : futures) result.entries.push_back(f.get());
  std::sort(result.entries.begin(), result.entries.end(),
            [](const SweepEntry& a, const SweepEntry& b) { return a.beta < b.beta; });

  for (std::size_t k = 0; k + 1 < result.entries.size(); ++k) {
    const auto& a = result.entries[k];
    const auto& b = result.entries[k + 1];
    if (a.error || b.error) continue;
    bool flip = (a.report.kind == AttractorKind::equilibrium &&
                 b.report.kind == AttractorKind::limit_cycle) ||
                (a.report.kind == AttractorKind::limit_cycle &&
                 b.report.kind == AttractorKind::equilibrium);
    if (flip) result.flip_brackets.emplace_back(a.beta, b.beta);
  }
  return result;
}

}  // namespace popdyn
