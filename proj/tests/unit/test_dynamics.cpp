#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "trustmarket/csv.hpp"
#include "trustmarket/dynamics.hpp"
#include "trustmarket/error.hpp"

using namespace trustmarket;
using doctest::Approx;

namespace {

const MarketParams kRef{0.85, 0.72};
const SignalPolicy kRefPolicy{0.6, 0.2};

struct FeasiblePoint {
  MarketParams m;
  SignalPolicy p;
};

FeasiblePoint draw_feasible(std::mt19937_64& rng, double margin) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (true) {
    const double r = 0.05 + 0.94 * u(rng);
    const double c = r * u(rng);
    const double a = u(rng), b = u(rng);
    const SignalPolicy p{std::max(a, b), std::min(a, b)};
    if (p.alpha * (r - c) - p.beta * (1 - c) >= margin) return {{r, c}, p};
  }
}

double xi_of(const SellerDistribution& s) { return s.x_good / (s.x_good + s.x_bad); }

}  // namespace

TEST_CASE("replicator_rhs at reference states") {
  auto d = replicator_rhs({1, 0, 0}, kRef, kRefPolicy);
  CHECK(d.dx_good == 0.0);
  CHECK(d.dx_inactive == 0.0);

  d = replicator_rhs({0.5, 0.5, 0}, kRef, kRefPolicy);
  CHECK(d.dx_good == Approx(0.0055).epsilon(1e-12));
  CHECK(d.dx_inactive == 0.0);

  d = replicator_rhs({0.2, 0.2, 0.6}, kRef, kRefPolicy);
  CHECK(d.dx_good == Approx(0.01024).epsilon(1e-12));
  CHECK(d.dx_inactive == Approx(-0.01608).epsilon(1e-12));
}

TEST_CASE("replicator_rhs on the patched sets") {
  // alpha = 1, no bad sellers: the bad-signal posterior is undefined.
  auto d = replicator_rhs({0.5, 0, 0.5}, kRef, {1.0, 0.2});
  const double pi_g = 0.13;  // every buyer sees a good signal and buys
  CHECK(d.dx_good == Approx(0.5 * 0.5 * pi_g));
  CHECK(d.dx_inactive == Approx(-0.5 * 0.5 * pi_g));

  // beta = 1, no good sellers.
  d = replicator_rhs({0, 0.4, 0.6}, kRef, {0.3, 1.0});
  CHECK(d.dx_good == 0.0);
  const double pi_b = seller_payoffs(kRef, {0.3, 1.0}, 0.0).pi_bad;
  CHECK(d.dx_inactive == Approx(-0.6 * 0.4 * pi_b));

  d = replicator_rhs({0, 0, 1}, kRef, kRefPolicy);
  CHECK(d.dx_good == 0.0);
  CHECK(d.dx_inactive == 0.0);
}

TEST_CASE("filippov_map branches") {
  const Thresholds th = thresholds(kRef, kRefPolicy);
  FilippovValue f = filippov_map(0.5, kRef, kRefPolicy);
  CHECK(f.is_singleton());
  CHECK(f.lower == Approx(0.25 * 0.022).epsilon(1e-12));

  const double g = th.xi_bhat * (1 - th.xi_bhat);
  f = filippov_map(th.xi_bhat, kRef, kRefPolicy);
  CHECK(f.lower == Approx(g * (0.85 - 1)));
  CHECK(f.upper == Approx(g * 0.022));
  CHECK(f.contains(0.0));

  f = filippov_map(0.1, kRef, kRefPolicy);
  CHECK(f.lower == 0.0);
  CHECK(f.upper == 0.0);

  f = filippov_map(0.9, kRef, kRefPolicy);
  CHECK(f.is_singleton());
  CHECK(f.lower == Approx(0.09 * -0.15));

  // alpha(r-c) < beta(1-c): the lower threshold becomes a no-trade sink.
  f = filippov_map(thresholds(kRef, {0.6, 0.3}).xi_ghat, kRef, {0.6, 0.3});
  CHECK(f.lower < 0.0);
  CHECK(f.upper == 0.0);
}

TEST_CASE("sign dichotomy between the thresholds") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.02, 0.98);
  for (int i = 0; i < 500; ++i) {
    const MarketParams m{u(rng), 0.9 * u(rng)};
    const double a = u(rng), b = u(rng);
    if (std::abs(a - b) < 1e-3) continue;
    const SignalPolicy p{std::max(a, b), std::min(a, b)};
    const Thresholds th = thresholds(m, p);
    const double xi = th.xi_ghat + (th.xi_bhat - th.xi_ghat) * (0.05 + 0.9 * u(rng));
    const double cond = p.alpha * (m.r - m.c) - p.beta * (1 - m.c);
    const FilippovValue f = filippov_map(xi, m, p);
    const ReplicatorRates d = replicator_rhs({xi, 1 - xi, 0}, m, p);
    const auto sign = [](double v) { return (v > 0) - (v < 0); };
    CHECK(sign(f.lower) == sign(cond));
    CHECK(sign(d.dx_good) == sign(cond));
  }
}

TEST_CASE("integrate converges to the sliding equilibrium") {
  const Trajectory t = integrate({0.5, 0.4, 0.1}, kRef, kRefPolicy, 2000.0);
  const SellerDistribution& last = t.states.back();
  CHECK(last.x_inactive < 1e-6);
  CHECK(std::abs(*last.xi() - 0.7017543860) <= 1e-6);
  REQUIRE(t.events.size() == 2);
  CHECK(t.events[0].kind == EventKind::HitXiBhat);
  CHECK(t.events[1].kind == EventKind::SlidingStart);
  CHECK(t.converged);
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
}

TEST_CASE("integrate holds still below the lower threshold") {
  const Trajectory t = integrate({0.2, 0.8, 0.0}, kRef, kRefPolicy, 50.0);
  for (const auto& s : t.states) {
    CHECK(s.x_good == 0.2);
    CHECK(s.x_bad == 0.8);
  }
}

TEST_CASE("integrate from near all-good decreases monotonically") {
  const Trajectory t = integrate({0.95, 0.05, 0.0}, kRef, kRefPolicy, 1000.0);
  double prev = 1.0;
  for (const auto& s : t.states) {
    CHECK(*s.xi() <= prev + 1e-15);
    prev = *s.xi();
  }
  CHECK(std::abs(prev - 0.7017543860) <= 1e-6);
}

TEST_CASE("all-good vertex is a fixed point but repels") {
  const Trajectory fixed = integrate({1, 0, 0}, kRef, kRefPolicy, 10.0);
  CHECK(fixed.states.back().x_good == 1.0);

  const double eps = 1e-3;
  const Trajectory t = integrate({1 - eps, eps, 0}, kRef, kRefPolicy, 200.0);
  CHECK(xi_of(t.states.back()) < 1 - eps - 0.1);
}

TEST_CASE("integrate absorbs at the lower threshold when no equilibrium exists") {
  const Trajectory t = integrate({0.5, 0.5, 0.0}, kRef, {0.6, 0.3}, 1000.0);
  REQUIRE(t.events.size() == 2);
  CHECK(t.events[0].kind == EventKind::HitXiGhat);
  CHECK(t.events[1].kind == EventKind::AbsorbedNoTrade);
  CHECK(*t.states.back().xi() == Approx(thresholds(kRef, {0.6, 0.3}).xi_ghat).epsilon(1e-12));
}

TEST_CASE("integrate rejects bad steps") {
  CHECK_THROWS_AS(integrate({0.5, 0.5, 0}, kRef, kRefPolicy, 1.0, 0.0), ModelError);
  try {
    integrate({0.5, 0.5, 0}, kRef, kRefPolicy, 1.0, -1.0);
  } catch (const ModelError& e) {
    CHECK(e.kind() == ErrorKind::InvalidStep);
  }
  CHECK_THROWS_AS(integrate({0.5, 0.5, 0}, kRef, kRefPolicy, -1.0), ModelError);
}

TEST_CASE("trajectories stay on the simplex and inside the Filippov map") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const MarketParams m{0.05 + 0.9 * u(rng), 0.0};
    const MarketParams mc{m.r, m.r * u(rng)};
    const SignalPolicy p{u(rng), u(rng)};
    const double g = u(rng), b = u(rng) * (1 - g);
    const Trajectory t = integrate({g, b, 1 - g - b}, mc, p, 300.0, 0.02);
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      const SellerDistribution& s = t.states[k];
      CHECK(s.x_good >= 0.0);
      CHECK(s.x_bad >= 0.0);
      CHECK(s.x_inactive >= 0.0);
      CHECK(std::abs(s.x_good + s.x_bad + s.x_inactive - 1.0) <= 1e-9);
      if (auto xi = s.xi()) CHECK(filippov_map(*xi, mc, p).contains(t.xi_rates[k], 1e-9));
    }
  }
}

TEST_CASE("integrator endpoint matches the closed-form equilibrium") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const FeasiblePoint fp = draw_feasible(rng, 0.01);
    const Thresholds th = thresholds(fp.m, fp.p);
    SellerDistribution x0;
    do {
      const double g = u(rng), b = u(rng) * (1 - g);
      x0 = {g, b, 1 - g - b};
    } while (!(x0.active() > 0.05 && xi_of(x0) > th.xi_ghat + 0.01));
    const Trajectory t = integrate(x0, fp.m, fp.p, 20000.0);
    const EquilibriumResult eq = stable_equilibrium(fp.m, fp.p);
    REQUIRE(eq.xi_star);
    CHECK(std::abs(*t.states.back().xi() - *eq.xi_star) <= 1e-4);
  }
}

TEST_CASE("stable_equilibrium classification") {
  EquilibriumResult e = stable_equilibrium(kRef, kRefPolicy);
  CHECK(e.kind == EquilibriumKind::InteriorCoexistence);
  CHECK(*e.xi_star == e.thresholds.xi_bhat);
  CHECK(*e.xi_star == Approx(0.7017543860).epsilon(1e-9));
  CHECK(e.condition_lhs == Approx(0.078));
  CHECK(e.condition_rhs == Approx(0.056));
  CHECK_FALSE(e.boundary);

  e = stable_equilibrium(kRef, {0.6, 0.3});
  CHECK(e.kind == EquilibriumKind::NoTrade);
  CHECK_FALSE(e.xi_star);

  e = stable_equilibrium(kRef, {1.0, 0.0});
  CHECK(e.kind == EquilibriumKind::InteriorCoexistence);
  CHECK(*e.xi_star == 1.0);
  CHECK(e.boundary);

  e = stable_equilibrium({0.5, 0.6}, {0.9, 0.1});
  CHECK(e.kind == EquilibriumKind::NoTrade);

  e = stable_equilibrium(kRef, {0.4, 0.8});  // flipped labels of (0.6, 0.2)
  CHECK(e.kind == EquilibriumKind::InteriorCoexistence);
  CHECK(*e.xi_star == Approx(0.7017543860).epsilon(1e-9));

  // Equality is not enough.
  e = stable_equilibrium({0.75, 0.5}, {0.5, 0.25});  // 0.125 == 0.125 exactly
  CHECK(e.kind == EquilibriumKind::NoTrade);
}

TEST_CASE("trajectory CSV layout") {
  const Trajectory t = integrate({0.5, 0.4, 0.1}, kRef, kRefPolicy, 1.0, 0.1);
  std::ostringstream os;
  write_trajectory_csv(os, t, 3);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x_good,x_bad,x_inactive,xi");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    CHECK(csv::split_line(line).size() == 5);
    last = line;
    ++rows;
  }
  CHECK(rows == 5);  // indices 0, 3, 6, 9 and the final 10
  CHECK(std::stod(csv::split_line(last)[0]) == Approx(1.0));
}
