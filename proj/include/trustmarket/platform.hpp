#pragma once
// Platform revenue at the market equilibrium, the cost of moving the signal
// policy away from its natural accuracy, and the profit-maximizing policy.

#include <optional>
#include <vector>

#include "trustmarket/market.hpp"

namespace trustmarket {

struct CostModel {
  double alpha0 = 0.5;  // natural accuracy
  double beta0 = 0.5;
  double kappa = 0.0;
  double p = 2.0;  // >= 1
  double q = 0.5;  // in (0, 1]
};

struct ProfitReport {
  double revenue = 0.0;
  double cost = 0.0;
  double profit = 0.0;
  bool feasible = false;
};

struct Optimum {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  std::optional<double> s_star;
  double profit = 0.0;
  double cost = 0.0;
  double grid_resolution = 0.0;
  bool fallback = false;  // nothing beats the free natural policy
};

struct RevenueGradient {
  double d_alpha = 0.0;
  double d_beta = 0.0;
};

struct OptimizeOptions {
  double grid_h = 1.0 / 256;
  int refine_iterations = 200;
  int jobs = 1;
};

void validate(const CostModel& model);

// alpha (r - c) > beta (1 - c) for the canonical policy, with r > c.
bool is_feasible(const MarketParams& params, const SignalPolicy& policy);

double beta_bar(const MarketParams& params, double alpha);

double revenue(const MarketParams& params, const SignalPolicy& policy);

// Partials with respect to the caller's (alpha, beta), flipped policies included.
RevenueGradient revenue_gradient(const MarketParams& params, const SignalPolicy& policy);

double hull_distance(const SignalPolicy& policy, const CostModel& model);

double signal_cost(const SignalPolicy& policy, const CostModel& model);

ProfitReport profit(const MarketParams& params, const SignalPolicy& policy,
                    const CostModel& model);

Optimum optimize_signals(const MarketParams& params, const CostModel& model,
                         const OptimizeOptions& options = {});

Optimum optimize_with_commission(double r, const CostModel& model,
                                 const std::vector<double>& s_grid,
                                 const OptimizeOptions& options = {});

}  // namespace trustmarket
