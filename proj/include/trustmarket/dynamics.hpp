#pragma once
// Replicator dynamics of seller types on the 2-simplex, the Filippov
// regularization of the reduced one-dimensional field, and the analytic
// long-run equilibrium.

#include <iosfwd>
#include <optional>
#include <vector>

#include "trustmarket/market.hpp"

namespace trustmarket {

// Closed interval of admissible d(xi)/dt; a singleton when lower == upper.
struct FilippovValue {
  double lower = 0.0;
  double upper = 0.0;

  bool is_singleton() const noexcept { return lower == upper; }
  bool contains(double v, double tol = 0.0) const noexcept {
    return v >= lower - tol && v <= upper + tol;
  }
};

struct ReplicatorRates {
  double dx_good = 0.0;
  double dx_inactive = 0.0;
};

enum class EventKind { HitXiGhat, HitXiBhat, SlidingStart, AbsorbedNoTrade };

const char* to_string(EventKind kind) noexcept;

struct TrajectoryEvent {
  double time = 0.0;
  EventKind kind = EventKind::HitXiGhat;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SellerDistribution> states;
  // d(xi)/dt realized by the integrator at each recorded state (0 while
  // sliding or absorbed); aligned with times.
  std::vector<double> xi_rates;
  std::vector<TrajectoryEvent> events;
  bool converged = false;  // stopped early because the field vanished
};

enum class EquilibriumKind { InteriorCoexistence, NoTrade };

const char* to_string(EquilibriumKind kind) noexcept;

struct EquilibriumResult {
  EquilibriumKind kind = EquilibriumKind::NoTrade;
  std::optional<double> xi_star;  // present iff InteriorCoexistence
  Thresholds thresholds;          // of the canonical policy
  double condition_lhs = 0.0;     // alpha (r - c)
  double condition_rhs = 0.0;     // beta (1 - c)
  // xi_star == 1 (alpha == 1): the coexistence point sits on the all-good vertex.
  bool boundary = false;
};

struct IntegrateOptions {
  // Stop once max(|dx_good|, |dx_inactive|) stays below this for
  // `quiet_steps` consecutive steps.
  double convergence_rate = 1e-10;
  int quiet_steps = 100;
  // Threshold-crossing times are bisected down to this width.
  double event_time_tolerance = 1e-10;
};

ReplicatorRates replicator_rhs(const SellerDistribution& state, const MarketParams& params,
                               const SignalPolicy& policy);

FilippovValue filippov_map(double xi, const MarketParams& params, const SignalPolicy& policy);

Trajectory integrate(const SellerDistribution& initial, const MarketParams& params,
                     const SignalPolicy& policy, double horizon, double step = 1e-2,
                     const IntegrateOptions& options = {});

EquilibriumResult stable_equilibrium(const MarketParams& params, const SignalPolicy& policy);

// CSV with header t,x_good,x_bad,x_inactive,xi. Every `stride`-th state is
// written, plus the last one.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory, int stride = 1);

}  // namespace trustmarket
