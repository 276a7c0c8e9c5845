#pragma once

#include <optional>
#include <vector>

#include "collapsar/dopri5.hpp"
#include "collapsar/model.hpp"

namespace collapsar {

struct ScalingValue {
  double a;
  double a_dot;
  double a_ddot;
};

/// Energy bookkeeping for a'' = -lambda / a^(N-1):
/// E = a'^2 / 2 + lambda a^(2-N) / (2-N)  (N >= 3),  E = a'^2 / 2 + lambda ln a  (N = 2).
struct EnergyMonitor {
  double initial = 0.0;
  double max_abs_drift = 0.0;
  /// max |E - E0| / |E0| over the accepted nodes.
  double max_relative_drift = 0.0;
  /// max |E - E0| / max(|E0|, a'^2/2, |potential|): drift measured against
  /// the largest energy component at each node.
  double max_component_drift = 0.0;
};

/// Trajectory samples recorded at accepted steps of the legacy scaling ODE.
struct ScalingSamples {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> a_dot;
  std::vector<double> energy;
};

/// Temporal factor a(t) of the self-similar ansatz.
///
/// Case1a: a = m t + n. Case1b: a = (m t + n)^(2/N). Case2: a = exp(rate t)
/// with rate = sqrt(delta alpha(N) Lambda / N). Legacy cases carry an
/// integrated trajectory of a'' = -lambda / a^(N-1).
class ScalingFunction {
 public:
  /// Closed-form scaling for Case1a, Case1b or Case2.
  static ScalingFunction closed_form(const PhysicalParams& p, SolutionCase c);

  SolutionCase solution_case() const noexcept { return case_; }
  const PhysicalParams& params() const noexcept { return params_; }
  std::optional<double> blowup_time() const noexcept { return blowup_time_; }

  /// Legacy only: whether the positivity floor stopped the integration.
  bool collapse_detected() const noexcept { return collapse_detected_; }
  bool has_trajectory() const noexcept { return !trajectory_.empty(); }
  const ode::DenseTrajectory<2>& trajectory() const noexcept { return trajectory_; }
  const ScalingSamples& samples() const noexcept { return samples_; }
  const EnergyMonitor& energy() const noexcept { return energy_; }
  const ode::IntegratorStats& integrator_stats() const noexcept { return stats_; }

  ScalingValue evaluate(double t) const;

 private:
  friend ScalingFunction emden_scaling_integrate(double, double, double, int, double, double);

  SolutionCase case_ = SolutionCase::Case1a;
  PhysicalParams params_;
  std::optional<double> blowup_time_;
  double rate_sq_ = 0.0;
  double rate_ = 0.0;
  bool collapse_detected_ = false;
  ode::DenseTrajectory<2> trajectory_;
  ScalingSamples samples_;
  EnergyMonitor energy_;
  ode::IntegratorStats stats_;
};

/// (a, a', a'') at t. Throws BlowupReached at or beyond the blowup time and
/// DomainError where a(t) <= 0 for other reasons.
ScalingValue a_eval(const ScalingFunction& s, double t);

/// Root -n/m of m t + n for the polynomial cases when m < 0; the floor
/// crossing time for a collapsed legacy trajectory; absent otherwise.
std::optional<double> blowup_time(const ScalingFunction& s);

double emden_scaling_energy(double a, double a_dot, double lambda, int N);

/// Integrates a'' = -lambda / a^(N-1), a(0) = a0 > 0, a'(0) = a1 up to
/// t_max, stopping early (collapse_detected) where a falls to 1e-8 a0.
ScalingFunction emden_scaling_integrate(double lambda, double a0, double a1, int N, double t_max, double rel_tol);

}  // namespace collapsar
