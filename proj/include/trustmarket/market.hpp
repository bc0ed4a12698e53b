#pragma once
// Buyer inference and seller per-transaction payoffs for the platform trust
// game. Everything here is a pure function of its arguments.

#include <optional>

namespace trustmarket {

// |xi - threshold| at or below this counts as "exactly at the threshold",
// where the buyer flips a fair coin.
inline constexpr double kThresholdTolerance = 1e-12;

struct MarketParams {
  double r = 0.0;  // benefit of a good-faith transaction, in (0, 1)
  double c = 0.0;  // commission per sale, >= 0
};

struct SignalPolicy {
  double alpha = 0.0;  // P(good signal | good seller)
  double beta = 0.0;   // P(good signal | bad seller)
};

enum class Signal { GoodHat, BadHat };

struct SellerDistribution {
  double x_good = 0.0;
  double x_bad = 0.0;
  double x_inactive = 0.0;

  double active() const noexcept { return x_good + x_bad; }
  // Share of good sellers among active ones; empty when nobody is active.
  std::optional<double> xi() const noexcept;
};

struct Thresholds {
  double xi_ghat = 0.0;  // buy after a good signal iff xi above this
  double xi_bhat = 0.0;  // buy after a bad signal iff xi above this
};

struct SellerPayoffs {
  double pi_good = 0.0;
  double pi_bad = 0.0;
  double pi_inactive = 0.0;
};

struct CanonicalPolicy {
  SignalPolicy policy;
  bool flipped = false;
};

void validate(const MarketParams& params);
void validate(const SignalPolicy& policy);
void validate(const SellerDistribution& state);

// Relabels the signals so that alpha >= beta. Ties keep their orientation.
CanonicalPolicy canonicalize(const SignalPolicy& policy) noexcept;

// True for (0,0) and (1,1), where one of the two signals never occurs.
bool is_degenerate(const SignalPolicy& policy) noexcept;

// P(G | signal). Throws UndefinedPosterior when the signal has probability
// zero under (policy, xi).
double posterior_good(Signal signal, const SignalPolicy& policy, double xi);

// E[R | signal] = r P(G|signal) - (1 - P(G|signal)).
double expected_buyer_payoff(Signal signal, const MarketParams& params,
                             const SignalPolicy& policy, double xi);

// Throws DegeneratePolicy at (0,0) and (1,1).
Thresholds thresholds(const MarketParams& params, const SignalPolicy& policy);

// Thresholds that drive purchase decisions. Identical to thresholds() except
// for degenerate policies, which behave like any uninformative alpha == beta
// policy (both thresholds 1/(1+r)); the missing signal is never observed.
Thresholds decision_thresholds(const MarketParams& params, const SignalPolicy& policy);

// 1, 1/2 or 0.
double purchase_probability(Signal signal, double xi, const Thresholds& th) noexcept;

SellerPayoffs seller_payoffs(const MarketParams& params, const SignalPolicy& policy, double xi);

// pi_good - pi_bad.
double payoff_difference(const MarketParams& params, const SignalPolicy& policy, double xi);

// Shared by seller_payoffs and the integrator: payoffs for a canonical,
// non-degenerate policy given precomputed thresholds.
SellerPayoffs payoffs_from_thresholds(const MarketParams& params, const SignalPolicy& canonical,
                                      const Thresholds& th, double xi) noexcept;

}  // namespace trustmarket
