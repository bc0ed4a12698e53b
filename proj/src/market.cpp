#include "trustmarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trustmarket/error.hpp"

namespace trustmarket {

namespace {

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::optional<double> SellerDistribution::xi() const noexcept {
  const double a = active();
  if (!(a > 0.0)) return std::nullopt;
  return std::clamp(x_good / a, 0.0, 1.0);
}

void validate(const MarketParams& params) {
  if (!std::isfinite(params.r) || params.r <= 0.0 || params.r >= 1.0)
    throw ModelError(ErrorKind::InvalidArgument,
                     "r must lie in (0, 1), got " + std::to_string(params.r));
  if (!std::isfinite(params.c) || params.c < 0.0)
    throw ModelError(ErrorKind::InvalidArgument,
                     "c must be >= 0, got " + std::to_string(params.c));
}

void validate(const SignalPolicy& policy) {
  if (!is_probability(policy.alpha))
    throw ModelError(ErrorKind::InvalidArgument,
                     "alpha must lie in [0, 1], got " + std::to_string(policy.alpha));
  if (!is_probability(policy.beta))
    throw ModelError(ErrorKind::InvalidArgument,
                     "beta must lie in [0, 1], got " + std::to_string(policy.beta));
}

void validate(const SellerDistribution& state) {
  if (!is_probability(state.x_good) || !is_probability(state.x_bad) ||
      !is_probability(state.x_inactive))
    throw ModelError(ErrorKind::InvalidArgument, "seller shares must lie in [0, 1]");
  const double sum = state.x_good + state.x_bad + state.x_inactive;
  if (std::abs(sum - 1.0) > 1e-12)
    throw ModelError(ErrorKind::InvalidArgument,
                     "seller shares must sum to 1, got " + std::to_string(sum));
}

CanonicalPolicy canonicalize(const SignalPolicy& policy) noexcept {
  if (policy.alpha >= policy.beta) return {policy, false};
  return {{1.0 - policy.alpha, 1.0 - policy.beta}, true};
}

bool is_degenerate(const SignalPolicy& policy) noexcept {
  return (policy.alpha == 0.0 && policy.beta == 0.0) ||
         (policy.alpha == 1.0 && policy.beta == 1.0);
}

double posterior_good(Signal signal, const SignalPolicy& policy, double xi) {
  const double a = policy.alpha;
  const double b = policy.beta;
  double num = 0.0;
  double den = 0.0;
  if (signal == Signal::GoodHat) {
    num = a * xi;
    den = (a - b) * xi + b;
  } else {
    num = (1.0 - a) * xi;
    den = (b - a) * xi + (1.0 - b);
  }
  if (!(den > 0.0))
    throw ModelError(ErrorKind::UndefinedPosterior,
                     signal == Signal::GoodHat ? "good signal has probability zero"
                                               : "bad signal has probability zero");
  return std::clamp(num / den, 0.0, 1.0);
}

double expected_buyer_payoff(Signal signal, const MarketParams& params,
                             const SignalPolicy& policy, double xi) {
  const double p = posterior_good(signal, policy, xi);
  return params.r * p - (1.0 - p);
}

Thresholds thresholds(const MarketParams& params, const SignalPolicy& policy) {
  const double a = policy.alpha;
  const double b = policy.beta;
  const double den_g = params.r * a + b;
  const double den_b = params.r * (1.0 - a) + (1.0 - b);
  if (!(den_g > 0.0) || !(den_b > 0.0))
    throw ModelError(ErrorKind::DegeneratePolicy,
                     "policy (" + std::to_string(a) + ", " + std::to_string(b) +
                         ") never emits one of the signals");
  return {b / den_g, (1.0 - b) / den_b};
}

Thresholds decision_thresholds(const MarketParams& params, const SignalPolicy& policy) {
  if (is_degenerate(policy)) {
    const double t = 1.0 / (1.0 + params.r);
    return {t, t};
  }
  return thresholds(params, policy);
}

double purchase_probability(Signal signal, double xi, const Thresholds& th) noexcept {
  const double t = signal == Signal::GoodHat ? th.xi_ghat : th.xi_bhat;
  if (std::abs(xi - t) <= kThresholdTolerance) return 0.5;
  return xi > t ? 1.0 : 0.0;
}

SellerPayoffs payoffs_from_thresholds(const MarketParams& params, const SignalPolicy& canonical,
                                      const Thresholds& th, double xi) noexcept {
  const double buy_g = purchase_probability(Signal::GoodHat, xi, th);
  const double buy_b = purchase_probability(Signal::BadHat, xi, th);
  const double a = canonical.alpha;
  const double b = canonical.beta;
  SellerPayoffs out;
  out.pi_good = (a * buy_g + (1.0 - a) * buy_b) * (params.r - params.c);
  out.pi_bad = (b * buy_g + (1.0 - b) * buy_b) * (1.0 - params.c);
  return out;
}

SellerPayoffs seller_payoffs(const MarketParams& params, const SignalPolicy& policy, double xi) {
  // Signal labels are arbitrary: the beta > alpha table is the alpha > beta
  // table with the labels swapped.
  const SignalPolicy canonical = canonicalize(policy).policy;
  return payoffs_from_thresholds(params, canonical, thresholds(params, canonical), xi);
}

double payoff_difference(const MarketParams& params, const SignalPolicy& policy, double xi) {
  const SellerPayoffs p = seller_payoffs(params, policy, xi);
  return p.pi_good - p.pi_bad;
}

}  // namespace trustmarket
