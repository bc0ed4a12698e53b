#pragma once
// Buyer and seller utilities at the stable equilibrium.

#include "trustmarket/dynamics.hpp"
#include "trustmarket/market.hpp"

namespace trustmarket {

struct WelfareReport {
  double u_buyer = 0.0;
  double u_seller = 0.0;
  double u_good_seller = 0.0;  // good sellers' share of u_seller
  EquilibriumResult equilibrium;
};

struct WelfareGradients {
  double buyer_d_alpha = 0.0;
  double buyer_d_beta = 0.0;
  double seller_d_alpha = 0.0;
  double seller_d_beta = 0.0;
  double good_seller_d_alpha = 0.0;
  double good_seller_d_beta = 0.0;
};

// All zero under NoTrade.
WelfareReport welfare(const MarketParams& params, const SignalPolicy& policy);

// Partials with respect to the caller's (alpha, beta). Throws InfeasiblePoint
// when there is no interior equilibrium.
WelfareGradients welfare_gradients(const MarketParams& params, const SignalPolicy& policy);

}  // namespace trustmarket
