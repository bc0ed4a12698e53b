#pragma once
// JSON experiment files: loading, dotted-path overrides, and typed field
// access that remembers which keys were read so leftovers can be rejected.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "trustmarket/abm.hpp"
#include "trustmarket/market.hpp"
#include "trustmarket/platform.hpp"

namespace trustmarket::cli {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_document(const std::string& path);

// "a.b.c=value". The value is parsed as JSON when possible, else taken as a
// string.
void apply_override(json& doc, std::string_view assignment);

class Node {
 public:
  Node(const json& value, std::string path);

  const std::string& path() const noexcept { return path_; }
  bool has(std::string_view key) const;

  double number(std::string_view key);
  double number(std::string_view key, double fallback);
  std::optional<double> maybe_number(std::string_view key);
  std::int64_t integer(std::string_view key);
  std::int64_t integer(std::string_view key, std::int64_t fallback);
  std::uint64_t unsigned_integer(std::string_view key, std::uint64_t fallback);
  std::string string(std::string_view key);
  std::vector<double> numbers(std::string_view key);
  std::vector<std::string> strings(std::string_view key);
  Node child(std::string_view key);
  std::optional<Node> optional_child(std::string_view key);
  std::vector<Node> children(std::string_view key);

  // Throws if any key was never read.
  void finish() const;

  [[noreturn]] void fail(std::string_view key, const std::string& message) const;

 private:
  const json& get(std::string_view key);
  std::string path_of(std::string_view key) const;

  const json* value_;
  std::string path_;
  std::vector<std::string> used_;
};

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::int64_t steps = 0;

  double at(std::int64_t i) const;
};

MarketParams read_market(Node& root);
SignalPolicy read_policy(Node& root);
// A missing block means no signaling cost at all. With `kappa_elsewhere`
// the block is mandatory but kappa may be omitted.
CostModel read_cost(Node& root, bool kappa_elsewhere = false);
SellerDistribution read_shares(Node node);
Axis read_axis(Node node);

// Runs `fn` and rewrites any ModelError it raises as a ConfigError naming
// `path`.
template <class Fn>
auto checked(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace trustmarket::cli
