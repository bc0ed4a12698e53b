#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "trustmarket/abm.hpp"
#include "trustmarket/csv.hpp"
#include "trustmarket/dynamics.hpp"
#include "trustmarket/error.hpp"
#include "trustmarket/parallel.hpp"
#include "trustmarket/platform.hpp"
#include "trustmarket/welfare.hpp"

namespace trustmarket::cli {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

std::string output_path(Node& root) {
  if (!root.has("out")) root.fail("out", "missing required field (set it in the config or pass --out)");
  return root.string("out");
}

json or_null(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json thresholds_json(const Thresholds& th) {
  return {{"xi_ghat", th.xi_ghat}, {"xi_bhat", th.xi_bhat}};
}

// Payoffs that never throw: degenerate policies use the decision thresholds.
SellerPayoffs payoffs_at(const MarketParams& m, const SignalPolicy& p, double xi) {
  const SignalPolicy canon = canonicalize(p).policy;
  return payoffs_from_thresholds(m, canon, decision_thresholds(m, canon), xi);
}

void write_lines(std::ostream& os, const std::vector<std::string>& chunks) {
  for (const std::string& c : chunks) os << c;
}

struct SweepPoint {
  MarketParams market;
  SignalPolicy policy;
  CostModel cost;
  std::optional<double> xi;
};

using Quantity = std::function<void(const SweepPoint&, csv::Row&)>;

const std::map<std::string, Quantity>& sweep_quantities() {
  static const std::map<std::string, Quantity> table = {
      {"revenue", [](const SweepPoint& p, csv::Row& r) { r.add(revenue(p.market, p.policy)); }},
      {"cost", [](const SweepPoint& p, csv::Row& r) { r.add(signal_cost(p.policy, p.cost)); }},
      {"profit",
       [](const SweepPoint& p, csv::Row& r) { r.add(profit(p.market, p.policy, p.cost).profit); }},
      {"feasible", [](const SweepPoint& p, csv::Row& r) { r.add(is_feasible(p.market, p.policy)); }},
      {"xi_star",
       [](const SweepPoint& p, csv::Row& r) {
         r.add(stable_equilibrium(p.market, p.policy).xi_star);
       }},
      {"u_buyer", [](const SweepPoint& p, csv::Row& r) { r.add(welfare(p.market, p.policy).u_buyer); }},
      {"u_seller",
       [](const SweepPoint& p, csv::Row& r) { r.add(welfare(p.market, p.policy).u_seller); }},
      {"u_good_seller",
       [](const SweepPoint& p, csv::Row& r) { r.add(welfare(p.market, p.policy).u_good_seller); }},
      {"pi_good",
       [](const SweepPoint& p, csv::Row& r) { r.add(payoffs_at(p.market, p.policy, *p.xi).pi_good); }},
      {"pi_bad",
       [](const SweepPoint& p, csv::Row& r) { r.add(payoffs_at(p.market, p.policy, *p.xi).pi_bad); }},
      {"delta",
       [](const SweepPoint& p, csv::Row& r) {
         const SellerPayoffs s = payoffs_at(p.market, p.policy, *p.xi);
         r.add(s.pi_good - s.pi_bad);
       }},
  };
  return table;
}

bool needs_xi(const std::string& q) { return q == "pi_good" || q == "pi_bad" || q == "delta"; }

void check_axis_range(const Axis& a, const std::string& path) {
  const auto bad = [&](const char* what) { throw ConfigError(path + ": " + a.name + " " + what); };
  if (a.name == "alpha" || a.name == "beta" || a.name == "xi") {
    if (a.min < 0.0 || a.max > 1.0) bad("must stay within [0, 1]");
  } else if (a.name == "r") {
    if (a.min <= 0.0 || a.max >= 1.0) bad("must stay within (0, 1)");
  } else if (a.name == "kappa") {
    if (a.min < 0.0) bad("must be >= 0");
  } else if (a.name == "s") {
    if (a.min < 0.0 || a.max >= 1.0) bad("must stay within [0, 1)");
  } else {
    throw ConfigError(path + ": unknown axis '" + a.name + "' (use alpha, beta, xi, r, kappa or s)");
  }
}

}  // namespace

int cmd_equilibrium(Node& root, const RunOptions&, std::ostream& out) {
  const MarketParams market = read_market(root);
  const SignalPolicy policy = read_policy(root);
  const CostModel cost = read_cost(root);
  std::optional<std::string> path;
  if (root.has("out")) path = root.string("out");
  root.finish();

  const WelfareReport w = welfare(market, policy);
  const EquilibriumResult& eq = w.equilibrium;
  const ProfitReport pr = profit(market, policy, cost);
  SellerPayoffs pay;
  if (eq.xi_star) pay = payoffs_at(market, policy, *eq.xi_star);

  json doc = {
      {"kind", to_string(eq.kind)},
      {"xi_star", or_null(eq.xi_star)},
      {"boundary", eq.boundary},
      {"thresholds", thresholds_json(eq.thresholds)},
      {"condition_lhs", eq.condition_lhs},
      {"condition_rhs", eq.condition_rhs},
      {"pi_good", pay.pi_good},
      {"pi_bad", pay.pi_bad},
      {"revenue", pr.revenue},
      {"cost", pr.cost},
      {"profit", pr.profit},
      {"u_buyer", w.u_buyer},
      {"u_seller", w.u_seller},
      {"u_good_seller", w.u_good_seller},
  };
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (path) open_output(*path) << text;
  return 0;
}

int cmd_sweep(Node& root, const RunOptions& opt, std::ostream& out) {
  Node sweep = root.child("sweep");
  std::vector<Axis> axes;
  for (Node& n : sweep.children("axes")) axes.push_back(read_axis(n));
  if (axes.size() != 2) sweep.fail("axes", "exactly two axes are required");
  for (std::size_t i = 0; i < 2; ++i) check_axis_range(axes[i], sweep.path() + ".axes[" + std::to_string(i) + "]");
  if (axes[0].name == axes[1].name) sweep.fail("axes", "the two axes must differ");
  const auto on_axis = [&](const std::string& name) {
    return axes[0].name == name || axes[1].name == name;
  };

  std::vector<std::string> quantities = {"revenue", "cost", "profit", "feasible"};
  if (sweep.has("quantities")) quantities = sweep.strings("quantities");
  if (quantities.empty()) sweep.fail("quantities", "must not be empty");
  for (const std::string& q : quantities) {
    if (!sweep_quantities().count(q)) sweep.fail("quantities", "unknown quantity '" + q + "'");
    if (needs_xi(q) && !on_axis("xi")) sweep.fail("quantities", q + " needs an xi axis");
  }
  sweep.finish();

  SweepPoint base;
  {
    std::optional<double> r;
    std::optional<double> c;
    if (auto m = root.optional_child("market")) {
      r = m->maybe_number("r");
      c = m->maybe_number("c");
      m->finish();
    }
    if (!r && !on_axis("r")) root.fail("market.r", "missing required field");
    if (!c && !on_axis("s")) root.fail("market.c", "missing required field");
    base.market = {r.value_or(0.5), c.value_or(0.0)};

    std::optional<double> a;
    std::optional<double> b;
    if (auto p = root.optional_child("policy")) {
      a = p->maybe_number("alpha");
      b = p->maybe_number("beta");
      p->finish();
    }
    if (!a && !on_axis("alpha")) root.fail("policy.alpha", "missing required field");
    if (!b && !on_axis("beta")) root.fail("policy.beta", "missing required field");
    base.policy = {a.value_or(0.5), b.value_or(0.5)};
    base.cost = read_cost(root, on_axis("kappa"));
  }
  const std::string path = output_path(root);
  root.finish();

  const auto point_at = [&](std::int64_t i, std::int64_t j) {
    SweepPoint p = base;
    double s = -1.0;
    const std::array<std::pair<const Axis*, double>, 2> vals{
        {{&axes[0], axes[0].at(i)}, {&axes[1], axes[1].at(j)}}};
    for (const auto& [axis, v] : vals) {
      if (axis->name == "alpha") p.policy.alpha = v;
      if (axis->name == "beta") p.policy.beta = v;
      if (axis->name == "xi") p.xi = v;
      if (axis->name == "r") p.market.r = v;
      if (axis->name == "kappa") p.cost.kappa = v;
      if (axis->name == "s") s = v;
    }
    if (s >= 0.0) p.market.c = s * p.market.r;
    return p;
  };
  checked("market", [&] { validate(point_at(0, 0).market); });
  checked("policy", [&] { validate(point_at(0, 0).policy); });

  std::vector<std::string> rows(static_cast<std::size_t>(axes[0].steps));
  parallel_for(rows.size(), opt.jobs, [&](std::size_t i) {
    std::ostringstream os;
    for (std::int64_t j = 0; j < axes[1].steps; ++j) {
      const SweepPoint p = point_at(static_cast<std::int64_t>(i), j);
      csv::Row row;
      row.add(axes[0].at(static_cast<std::int64_t>(i))).add(axes[1].at(j));
      for (const std::string& q : quantities) sweep_quantities().at(q)(p, row);
      csv::write_row(os, row);
    }
    rows[i] = os.str();
  });

  std::ofstream os = open_output(path);
  std::vector<std::string> header = {axes[0].name, axes[1].name};
  header.insert(header.end(), quantities.begin(), quantities.end());
  csv::write_header(os, header);
  write_lines(os, rows);
  out << json{{"rows", axes[0].steps * axes[1].steps}, {"out", path}}.dump() << "\n";
  return 0;
}

int cmd_optimize(Node& root, const RunOptions& opt, std::ostream& out) {
  Node o = root.child("optimize");
  std::vector<Axis> axes;
  for (Node& n : o.children("axes")) axes.push_back(read_axis(n));
  if (axes.size() != 2 || axes[0].name != "r" || (axes[1].name != "kappa" && axes[1].name != "s"))
    o.fail("axes", "expected the outer grid (r, kappa) or (r, s)");
  for (std::size_t i = 0; i < 2; ++i) check_axis_range(axes[i], o.path() + ".axes[" + std::to_string(i) + "]");
  const bool kappa_axis = axes[1].name == "kappa";

  OptimizeOptions oo;
  oo.grid_h = o.number("grid_h", oo.grid_h);
  oo.refine_iterations = static_cast<int>(o.integer("refine_iterations", oo.refine_iterations));
  if (!(oo.grid_h > 0.0 && oo.grid_h <= 0.1)) o.fail("grid_h", "must lie in (0, 0.1]");
  if (oo.refine_iterations < 0) o.fail("refine_iterations", "must be >= 0");
  std::vector<double> s_grid;
  if (auto sg = o.optional_child("s_grid")) {
    if (!kappa_axis) o.fail("s_grid", "only valid with the (r, kappa) grid");
    const double lo = sg->number("min");
    const double hi = sg->number("max");
    const std::int64_t steps = sg->integer("steps");
    sg->finish();
    if (steps < 1) sg->fail("steps", "must be >= 1");
    if (lo < 0.0 || hi >= 1.0 || hi < lo) sg->fail("max", "s must stay within [0, 1) with min <= max");
    const Axis a{"s", lo, hi, steps};
    for (std::int64_t i = 0; i < steps; ++i) s_grid.push_back(a.at(i));
  }
  o.finish();

  double c = 0.0;
  if (kappa_axis && s_grid.empty()) {
    Node m = root.child("market");
    c = m.number("c");
    m.number("r", 0.0);  // overridden by the axis
    m.finish();
    if (c < 0.0) m.fail("c", "must be >= 0");
  } else if (auto m = root.optional_child("market")) {
    m->maybe_number("r");
    m->maybe_number("c");
    m->finish();
  }
  const CostModel base_cost = read_cost(root, kappa_axis);
  const std::string path = output_path(root);
  root.finish();

  const bool with_s = !s_grid.empty();
  const std::size_t n0 = static_cast<std::size_t>(axes[0].steps);
  const std::size_t n1 = static_cast<std::size_t>(axes[1].steps);
  std::vector<std::string> rows(n0 * n1);
  parallel_for(rows.size(), opt.jobs, [&](std::size_t k) {
    const auto i = static_cast<std::int64_t>(k / n1);
    const auto j = static_cast<std::int64_t>(k % n1);
    const double r = axes[0].at(i);
    const double v = axes[1].at(j);
    CostModel cost = base_cost;
    MarketParams m{r, c};
    Optimum best;
    if (kappa_axis) {
      cost.kappa = v;
      best = with_s ? optimize_with_commission(r, cost, s_grid, oo) : optimize_signals(m, cost, oo);
    } else {
      m.c = v * r;
      best = optimize_signals(m, cost, oo);
    }
    if (best.s_star) m.c = *best.s_star * r;
    const SignalPolicy star{best.alpha_star, best.beta_star};
    const WelfareReport w = welfare(m, star);

    csv::Row row;
    row.add(r).add(v).add(best.profit).add(best.alpha_star).add(best.beta_star);
    if (with_s) row.add(best.s_star);
    row.add(revenue(m, star)).add(best.cost).add(best.fallback);
    row.add(w.u_buyer).add(w.u_seller).add(w.u_good_seller);
    std::ostringstream os;
    csv::write_row(os, row);
    rows[k] = os.str();
  });

  std::ofstream os = open_output(path);
  std::vector<std::string> header = {"r", axes[1].name, "profit_star", "alpha_star", "beta_star"};
  if (with_s) header.emplace_back("s_star");
  for (const char* h : {"revenue_star", "cost_star", "fallback", "u_buyer", "u_seller", "u_good_seller"})
    header.emplace_back(h);
  csv::write_header(os, header);
  write_lines(os, rows);
  out << json{{"rows", rows.size()}, {"out", path}}.dump() << "\n";
  return 0;
}

int cmd_integrate(Node& root, const RunOptions&, std::ostream& out) {
  const MarketParams market = read_market(root);
  const SignalPolicy policy = read_policy(root);
  Node in = root.child("integrate");
  const SellerDistribution initial = read_shares(in.child("initial"));
  const double horizon = in.number("horizon");
  const double step = in.number("step", 0.01);
  const std::int64_t every = in.integer("record_every", 1);
  in.finish();
  if (horizon < 0.0) in.fail("horizon", "must be >= 0");
  if (step <= 0.0) in.fail("step", "must be > 0");
  if (every < 1) in.fail("record_every", "must be >= 1");
  const std::string path = output_path(root);
  root.finish();

  const Trajectory traj = integrate(initial, market, policy, horizon, step);
  std::ofstream os = open_output(path);
  write_trajectory_csv(os, traj, static_cast<int>(std::min<std::int64_t>(every, 1 << 30)));

  json events = json::array();
  for (const TrajectoryEvent& e : traj.events)
    events.push_back({{"time", e.time}, {"kind", to_string(e.kind)}});
  const SellerDistribution& last = traj.states.back();
  const EquilibriumResult eq = stable_equilibrium(market, policy);
  json doc = {
      {"out", path},
      {"steps", traj.states.size() - 1},
      {"final_time", traj.times.back()},
      {"converged", traj.converged},
      {"events", events},
      {"terminal",
       {{"x_good", last.x_good},
        {"x_bad", last.x_bad},
        {"x_inactive", last.x_inactive},
        {"xi", or_null(last.xi())}}},
      {"equilibrium", {{"kind", to_string(eq.kind)}, {"xi_star", or_null(eq.xi_star)}}},
  };
  out << doc.dump(2) << "\n";
  return 0;
}

int cmd_simulate(Node& root, const RunOptions& opt, std::ostream& out) {
  const MarketParams market = read_market(root);
  const SignalPolicy policy = read_policy(root);
  Node sn = root.child("simulate");
  abm::SimConfig cfg;
  cfg.n_sellers = sn.integer("n_sellers", cfg.n_sellers);
  cfg.lambda_per_seller = sn.number("lambda_per_seller", cfg.lambda_per_seller);
  cfg.sigma = sn.number("sigma", cfg.sigma);
  cfg.periods = sn.integer("periods");
  cfg.record_every = sn.integer("record_every", 1);
  if (sn.has("initial")) cfg.initial = read_shares(sn.child("initial"));
  const std::int64_t bins = sn.integer("bins", 200);
  const std::int64_t replicates = sn.integer("replicates", 1);
  std::vector<double> betas;
  const bool batch = sn.has("beta_values") || replicates != 1;
  if (sn.has("beta_values")) betas = sn.numbers("beta_values");
  sn.finish();
  if (bins < 1 || bins > 1000000) sn.fail("bins", "must lie in [1, 1000000]");
  if (replicates < 1) sn.fail("replicates", "must be >= 1");
  for (double b : betas)
    if (!(b >= 0.0 && b <= 1.0)) sn.fail("beta_values", "entries must lie in [0, 1]");
  if (betas.empty()) betas.push_back(policy.beta);
  checked(sn.path(), [&] { abm::validate(cfg); });
  cfg.seed = root.unsigned_integer("seed", 1);
  const std::string path = output_path(root);
  root.finish();

  if (!batch) {
    const abm::SimTrajectory traj = abm::run(cfg, market, policy);
    const abm::QuasiStationarySummary q = abm::quasi_stationary(traj, static_cast<int>(bins));
    std::ofstream os = open_output(path);
    abm::write_trajectory_csv(os, traj);
    const EquilibriumResult eq = stable_equilibrium(market, policy);
    json doc = {
        {"seed", cfg.seed},
        {"mode_xi", q.mode_xi},
        {"histogram", q.histogram},
        {"window", {q.window_begin, q.window_end}},
        {"extinct_good", q.extinct_good},
        {"final", {{"N_G", traj.final_counts.good},
                   {"N_B", traj.final_counts.bad},
                   {"N_I", traj.final_counts.inactive}}},
        {"xi_star", or_null(eq.xi_star)},
        {"xi_ghat", eq.thresholds.xi_ghat},
    };
    const std::string text = doc.dump(2) + "\n";
    open_output(path + ".summary.json") << text;
    out << text;
    return 0;
  }

  const std::size_t reps = static_cast<std::size_t>(replicates);
  std::vector<std::string> rows(betas.size() * reps);
  parallel_for(rows.size(), opt.jobs, [&](std::size_t k) {
    const double beta = betas[k / reps];
    abm::SimConfig c = cfg;
    c.seed = abm::replicate_seed(cfg.seed, k);
    const SignalPolicy pol{policy.alpha, beta};
    const abm::SimTrajectory traj = abm::run(c, market, pol);
    const abm::QuasiStationarySummary q = abm::quasi_stationary(traj, static_cast<int>(bins));
    const EquilibriumResult eq = stable_equilibrium(market, pol);
    csv::Row row;
    row.add(beta)
        .add(static_cast<std::int64_t>(k % reps))
        .add(c.seed)
        .add(q.mode_xi)
        .add(eq.xi_star)
        .add(eq.thresholds.xi_ghat)
        .add(q.extinct_good)
        .add(traj.final_counts.good)
        .add(traj.final_counts.bad)
        .add(traj.final_counts.inactive);
    std::ostringstream os;
    csv::write_row(os, row);
    rows[k] = os.str();
  });
  std::ofstream os = open_output(path);
  csv::write_header(os, {"beta", "replicate", "seed", "mode_xi", "xi_star", "xi_ghat",
                         "extinct_good", "final_N_G", "final_N_B", "final_N_I"});
  write_lines(os, rows);
  out << json{{"runs", rows.size()}, {"out", path}}.dump() << "\n";
  return 0;
}

}  // namespace trustmarket::cli
