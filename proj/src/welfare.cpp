#include "trustmarket/welfare.hpp"

#include "trustmarket/error.hpp"

namespace trustmarket {

WelfareReport welfare(const MarketParams& params, const SignalPolicy& policy) {
  WelfareReport out;
  out.equilibrium = stable_equilibrium(params, policy);
  if (out.equilibrium.kind != EquilibriumKind::InteriorCoexistence) return out;

  const SignalPolicy p = canonicalize(policy).policy;
  const double a = p.alpha;
  const double b = p.beta;
  const double r = params.r;
  const double c = params.c;
  const double xi = *out.equilibrium.xi_star;
  out.u_buyer = 0.5 * (xi * ((1.0 + a) * r + (1.0 + b)) - (1.0 + b));
  out.u_seller = 0.5 * (xi * ((1.0 + a) * (r - c) - (1.0 + b) * (1.0 - c)) + (1.0 + b) * (1.0 - c));
  out.u_good_seller = (1.0 - b) * (1.0 + a) * (r - c) / (2.0 * (r * (1.0 - a) + (1.0 - b)));
  return out;
}

WelfareGradients welfare_gradients(const MarketParams& params, const SignalPolicy& policy) {
  if (stable_equilibrium(params, policy).kind != EquilibriumKind::InteriorCoexistence)
    throw ModelError(ErrorKind::InfeasiblePoint, "no stable equilibrium at this policy");
  const auto [p, flipped] = canonicalize(policy);
  const double a = p.alpha;
  const double b = p.beta;
  const double r = params.r;
  const double c = params.c;
  const double d = r * (1.0 - a) + (1.0 - b);
  const double d2 = d * d;

  WelfareGradients g;
  g.buyer_d_alpha = (1.0 - b) * r * (1.0 + r) / d2;
  g.buyer_d_beta = -(1.0 - a) * r * (1.0 + r) / d2;
  g.seller_d_alpha = -(1.0 - b) * ((1.0 - b) * c * (1.0 + r) - 2.0 * r * (r - b)) / (2.0 * d2);
  g.seller_d_beta = (1.0 - a) * r * (2.0 * (1.0 - a * r) - (1.0 - a) * c * (1.0 + r)) / (2.0 * d2);
  g.good_seller_d_alpha = (1.0 - b) * (1.0 - b + 2.0 * r) * (r - c) / (2.0 * d2);
  g.good_seller_d_beta = -(1.0 - a) * (1.0 + a) * r * (r - c) / (2.0 * d2);

  if (flipped) {
    for (double* v : {&g.buyer_d_alpha, &g.buyer_d_beta, &g.seller_d_alpha, &g.seller_d_beta,
                      &g.good_seller_d_alpha, &g.good_seller_d_beta})
      *v = -*v;
  }
  return g;
}

}  // namespace trustmarket
