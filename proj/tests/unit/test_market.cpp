#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "trustmarket/error.hpp"
#include "trustmarket/market.hpp"

using namespace trustmarket;
using doctest::Approx;

namespace {

const MarketParams kRef{0.85, 0.72};
const SignalPolicy kRefPolicy{0.6, 0.2};

}  // namespace

TEST_CASE("canonicalize keeps or flips labels") {
  auto c = canonicalize({0.6, 0.4});
  CHECK(c.policy.alpha == 0.6);
  CHECK(c.policy.beta == 0.4);
  CHECK_FALSE(c.flipped);

  c = canonicalize({0.4, 0.6});
  CHECK(c.policy.alpha == Approx(0.6));
  CHECK(c.policy.beta == Approx(0.4));
  CHECK(c.flipped);

  c = canonicalize({0.5, 0.5});
  CHECK_FALSE(c.flipped);
  CHECK(c.policy.alpha == 0.5);
}

TEST_CASE("posterior_good") {
  CHECK(posterior_good(Signal::GoodHat, {0.6, 0.2}, 0.5) == Approx(0.75).epsilon(1e-14));
  // joint table: 0.3 / (0.3 + 0.1)
  const oracle::Joint j = oracle::joint(0.6, 0.2, 0.5);
  CHECK(posterior_good(Signal::GoodHat, {0.6, 0.2}, 0.5) ==
        Approx(j.g_ghat / (j.g_ghat + j.b_ghat)).epsilon(1e-14));
  CHECK(posterior_good(Signal::GoodHat, {0.5, 0.5}, 0.3) == Approx(0.3).epsilon(1e-14));
  CHECK(posterior_good(Signal::GoodHat, {1.0, 0.0}, 0.7) == 1.0);

  CHECK_THROWS_AS(posterior_good(Signal::BadHat, {1.0, 0.2}, 1.0), ModelError);
  try {
    posterior_good(Signal::BadHat, {1.0, 0.2}, 1.0);
  } catch (const ModelError& e) {
    CHECK(e.kind() == ErrorKind::UndefinedPosterior);
  }
}

TEST_CASE("posterior consistency over random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const SignalPolicy p{u(rng), u(rng)};
    const double xi = u(rng);
    const double pg = (p.alpha - p.beta) * xi + p.beta;
    if (pg <= 1e-9 || pg >= 1 - 1e-9) continue;
    const double total = posterior_good(Signal::GoodHat, p, xi) * pg +
                         posterior_good(Signal::BadHat, p, xi) * (1 - pg);
    CHECK(oracle::near(total, xi, 1e-12));
  }
}

TEST_CASE("thresholds: closed form against bisection") {
  const Thresholds th = thresholds(kRef, kRefPolicy);
  CHECK(th.xi_ghat == Approx(0.2816901408).epsilon(1e-9));
  CHECK(th.xi_bhat == Approx(0.7017543860).epsilon(1e-9));
  CHECK(th.xi_ghat == Approx(oracle::threshold(true, 0.85, 0.6, 0.2)).epsilon(1e-12));
  CHECK(th.xi_bhat == Approx(oracle::threshold(false, 0.85, 0.6, 0.2)).epsilon(1e-12));

  const Thresholds perfect = thresholds(kRef, {1.0, 0.0});
  CHECK(perfect.xi_ghat == 0.0);
  CHECK(perfect.xi_bhat == 1.0);

  const Thresholds flat = thresholds({0.5, 0.0}, {0.5, 0.5});
  CHECK(flat.xi_ghat == Approx(2.0 / 3));
  CHECK(flat.xi_bhat == Approx(2.0 / 3));
  CHECK(flat.xi_ghat == Approx(oracle::threshold(true, 0.5, 0.5, 0.5)).epsilon(1e-12));

  CHECK_THROWS_AS(thresholds(kRef, {0.0, 0.0}), ModelError);
  CHECK_THROWS_AS(thresholds(kRef, {1.0, 1.0}), ModelError);
  const Thresholds dec = decision_thresholds(kRef, {1.0, 1.0});
  CHECK(dec.xi_ghat == Approx(1 / 1.85));
}

TEST_CASE("threshold characterization: buyer indifferent at each threshold") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const MarketParams m{u(rng), 0.0};
    const SignalPolicy p{u(rng), u(rng)};
    const Thresholds th = thresholds(m, p);
    CHECK(std::abs(expected_buyer_payoff(Signal::GoodHat, m, p, th.xi_ghat)) <= 1e-10);
    CHECK(std::abs(expected_buyer_payoff(Signal::BadHat, m, p, th.xi_bhat)) <= 1e-10);
    if (p.alpha > p.beta) CHECK(th.xi_ghat < th.xi_bhat);
  }
}

TEST_CASE("purchase_probability") {
  const Thresholds th = thresholds(kRef, kRefPolicy);
  CHECK(purchase_probability(Signal::GoodHat, 0.5, th) == 1.0);
  CHECK(purchase_probability(Signal::BadHat, th.xi_bhat, th) == 0.5);
  CHECK(purchase_probability(Signal::BadHat, th.xi_bhat + 5e-13, th) == 0.5);
  CHECK(purchase_probability(Signal::BadHat, th.xi_bhat + 1e-9, th) == 1.0);
  CHECK(purchase_probability(Signal::BadHat, 0.5, th) == 0.0);
}

TEST_CASE("seller_payoffs on each branch") {
  SellerPayoffs s = seller_payoffs(kRef, kRefPolicy, 0.5);
  CHECK(s.pi_good == Approx(0.078).epsilon(1e-12));
  CHECK(s.pi_bad == Approx(0.056).epsilon(1e-12));
  CHECK(s.pi_inactive == 0.0);

  s = seller_payoffs(kRef, kRefPolicy, 0.9);
  CHECK(s.pi_good == Approx(0.13).epsilon(1e-12));
  CHECK(s.pi_bad == Approx(0.28).epsilon(1e-12));

  s = seller_payoffs(kRef, kRefPolicy, 0.1);
  CHECK(s.pi_good == 0.0);
  CHECK(s.pi_bad == 0.0);

  // Half-weight rows exactly at each threshold.
  const Thresholds th = thresholds(kRef, kRefPolicy);
  s = seller_payoffs(kRef, kRefPolicy, th.xi_ghat);
  CHECK(s.pi_good == Approx(0.5 * 0.6 * 0.13));
  CHECK(s.pi_bad == Approx(0.5 * 0.2 * 0.28));
  s = seller_payoffs(kRef, kRefPolicy, th.xi_bhat);
  CHECK(s.pi_good == Approx((0.6 + 0.5 * 0.4) * 0.13));
  CHECK(s.pi_bad == Approx((0.2 + 0.5 * 0.8) * 0.28));

  CHECK_THROWS_AS(seller_payoffs(kRef, {0, 0}, 0.5), ModelError);
}

TEST_CASE("seller_payoffs with beta > alpha uses the relabeled table") {
  // Middle branch for beta > alpha: a good seller sells on its B-hat signal.
  const SignalPolicy p{0.4, 0.8};
  const Thresholds th = thresholds(kRef, canonicalize(p).policy);
  const double xi = 0.5 * (th.xi_ghat + th.xi_bhat);
  const SellerPayoffs s = seller_payoffs(kRef, p, xi);
  CHECK(s.pi_good == Approx((1 - 0.4) * 0.13));
  CHECK(s.pi_bad == Approx((1 - 0.8) * 0.28));
}

TEST_CASE("payoff_difference signs") {
  {
    const MarketParams m{0.9, 0.1};
    const SignalPolicy p{0.6, 0.3};
    const Thresholds th = thresholds(m, p);
    CHECK(payoff_difference(m, p, 0.5 * (th.xi_ghat + th.xi_bhat)) == Approx(0.21));
  }
  {
    const MarketParams m{0.7, 0.1};
    const SignalPolicy p{0.5, 0.4};
    const Thresholds th = thresholds(m, p);
    CHECK(payoff_difference(m, p, 0.5 * (th.xi_ghat + th.xi_bhat)) == Approx(-0.06));
  }
  CHECK(payoff_difference(kRef, kRefPolicy, 0.05) == 0.0);
}

TEST_CASE("flip symmetry of seller payoffs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const MarketParams m{0.01 + 0.98 * u(rng), u(rng)};
    const SignalPolicy p{0.01 + 0.98 * u(rng), 0.01 + 0.98 * u(rng)};
    const double xi = u(rng);
    const SellerPayoffs a = seller_payoffs(m, p, xi);
    const SellerPayoffs b = seller_payoffs(m, {1 - p.alpha, 1 - p.beta}, xi);
    CHECK(oracle::near(a.pi_good, b.pi_good, 1e-12));
    CHECK(oracle::near(a.pi_bad, b.pi_bad, 1e-12));
  }
}

TEST_CASE("payoffs are nondecreasing steps with jumps only at thresholds") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int trial = 0; trial < 50; ++trial) {
    const double r = u(rng);
    const MarketParams m{r, r * u(rng)};
    const double a = u(rng), b = u(rng);
    const SignalPolicy p{std::max(a, b), std::min(a, b)};
    if (p.alpha == p.beta) continue;
    const Thresholds th = thresholds(m, p);
    SellerPayoffs prev = seller_payoffs(m, p, 0.0);
    for (int k = 1; k <= 2000; ++k) {
      const double xi = k / 2000.0;
      const SellerPayoffs cur = seller_payoffs(m, p, xi);
      CHECK(cur.pi_good >= prev.pi_good);
      CHECK(cur.pi_bad >= prev.pi_bad);
      const double lo = xi - 1.0 / 2000;
      const bool crosses = (lo < th.xi_ghat + 1e-12 && xi >= th.xi_ghat - 1e-12) ||
                           (lo < th.xi_bhat + 1e-12 && xi >= th.xi_bhat - 1e-12);
      if (!crosses) {
        CHECK(cur.pi_good == prev.pi_good);
        CHECK(cur.pi_bad == prev.pi_bad);
      }
      prev = cur;
    }
  }
}

TEST_CASE("seller_payoffs match a Monte Carlo market within 3 standard errors") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 50; ++i) {
    const MarketParams m{u(rng), 0.8 * u(rng)};
    const SignalPolicy p{u(rng), u(rng)};
    const double xi = u(rng);
    const SellerPayoffs s = seller_payoffs(m, p, xi);
    const oracle::McPayoffs mc =
        oracle::monte_carlo_payoffs(m.r, m.c, p.alpha, p.beta, xi, 2000000, rng);
    CHECK(std::abs(s.pi_good - mc.pi_good) <= 3 * mc.se_good + 1e-9);
    CHECK(std::abs(s.pi_bad - mc.pi_bad) <= 3 * mc.se_bad + 1e-9);
  }
}

TEST_CASE("validation rejects out-of-range inputs") {
  CHECK_THROWS_AS(validate(MarketParams{1.0, 0.1}), ModelError);
  CHECK_THROWS_AS(validate(MarketParams{0.5, -0.1}), ModelError);
  CHECK_THROWS_AS(validate(SignalPolicy{1.1, 0.1}), ModelError);
  CHECK_THROWS_AS(validate(SellerDistribution{0.5, 0.5, 0.1}), ModelError);
  CHECK_NOTHROW(validate(SellerDistribution{0.2, 0.3, 0.5}));
}
