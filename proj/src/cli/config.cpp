#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace trustmarket::cli {

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    json doc = json::parse(in);
    if (!doc.is_object()) throw ConfigError(path + ": top level must be an object");
    return doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("--set expects key.path=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].empty()) throw ConfigError("--set: empty component in '" + key + "'");
    if (!node->is_object()) {
      if (!node->is_null()) throw ConfigError("--set: '" + key + "' descends into a non-object");
      *node = json::object();
    }
    node = &(*node)[path[i]];
  }
  *node = std::move(value);
}

Node::Node(const json& value, std::string path) : value_(&value), path_(std::move(path)) {
  if (!value.is_object()) throw ConfigError(path_ + ": expected an object");
}

std::string Node::path_of(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

void Node::fail(std::string_view key, const std::string& message) const {
  throw ConfigError(path_of(key) + ": " + message);
}

bool Node::has(std::string_view key) const { return value_->contains(key); }

const json& Node::get(std::string_view key) {
  const auto it = value_->find(key);
  if (it == value_->end()) fail(key, "missing required field");
  used_.emplace_back(key);
  return *it;
}

double Node::number(std::string_view key) {
  const json& v = get(key);
  if (!v.is_number()) fail(key, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(key, "expected a finite number");
  return d;
}

double Node::number(std::string_view key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::optional<double> Node::maybe_number(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::int64_t Node::integer(std::string_view key) {
  const json& v = get(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15)
      return static_cast<std::int64_t>(d);
  }
  fail(key, "expected an integer");
}

std::int64_t Node::integer(std::string_view key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Node::unsigned_integer(std::string_view key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const json& v = get(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(key, "expected a nonnegative integer");
}

std::string Node::string(std::string_view key) {
  const json& v = get(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> Node::numbers(std::string_view key) {
  const json& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> Node::strings(std::string_view key) {
  const json& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) fail(key, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Node Node::child(std::string_view key) {
  const json& v = get(key);
  if (!v.is_object()) fail(key, "expected an object");
  return Node(v, path_of(key));
}

std::optional<Node> Node::optional_child(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return child(key);
}

std::vector<Node> Node::children(std::string_view key) {
  const json& v = get(key);
  if (!v.is_array()) fail(key, "expected an array of objects");
  std::vector<Node> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path_of(key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_object()) throw ConfigError(p + ": expected an object");
    out.emplace_back(v[i], p);
  }
  return out;
}

void Node::finish() const {
  for (const auto& [key, value] : value_->items()) {
    (void)value;
    if (std::find(used_.begin(), used_.end(), key) == used_.end())
      fail(key, "unknown field");
  }
}

double Axis::at(std::int64_t i) const {
  if (steps == 1) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

MarketParams read_market(Node& root) {
  Node n = root.child("market");
  MarketParams m{n.number("r"), n.number("c")};
  n.finish();
  checked(n.path(), [&] { validate(m); });
  return m;
}

SignalPolicy read_policy(Node& root) {
  Node n = root.child("policy");
  SignalPolicy p{n.number("alpha"), n.number("beta")};
  n.finish();
  checked(n.path(), [&] { validate(p); });
  return p;
}

CostModel read_cost(Node& root, bool kappa_elsewhere) {
  CostModel m;
  m.kappa = 0.0;
  if (kappa_elsewhere && !root.has("cost")) root.fail("cost", "missing required field");
  auto n = root.optional_child("cost");
  if (!n) return m;
  m.alpha0 = n->number("alpha0");
  m.beta0 = n->number("beta0");
  m.kappa = kappa_elsewhere ? n->number("kappa", 0.0) : n->number("kappa");
  m.p = n->number("p", m.p);
  m.q = n->number("q", m.q);
  n->finish();
  checked(n->path(), [&] { validate(m); });
  return m;
}

SellerDistribution read_shares(Node n) {
  SellerDistribution s{n.number("x_good"), n.number("x_bad"), n.number("x_inactive")};
  n.finish();
  checked(n.path(), [&] { validate(s); });
  return s;
}

Axis read_axis(Node n) {
  Axis a;
  a.name = n.string("name");
  a.min = n.number("min");
  a.max = n.number("max");
  a.steps = n.integer("steps");
  n.finish();
  if (a.steps < 1) n.fail("steps", "must be >= 1");
  if (a.max < a.min) n.fail("max", "must be >= min");
  return a;
}

}  // namespace trustmarket::cli
