#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fluxq {

enum class ComponentKind { Capacitor, Inductor };

const char* to_string(ComponentKind kind);

/// A two-terminal lumped element. `value` is in Farads for capacitors and
/// Henries for inductors. Orientation runs node_a -> node_b.
struct Component {
  std::string id;
  ComponentKind kind = ComponentKind::Capacitor;
  double value = 0.0;
  std::string node_a;
  std::string node_b;
  bool geometric = false;

  bool is_capacitor() const { return kind == ComponentKind::Capacitor; }
  bool is_inductor() const { return kind == ComponentKind::Inductor; }

  friend bool operator==(const Component&, const Component&) = default;
};

inline constexpr std::string_view kGround = "0";

/// Netlist graph plus initial conditions.
///
/// Node 0 is always ground and always sits at index 0; the remaining nodes
/// keep first-appearance order. Initial conditions are keyed by component id:
/// Volts for capacitors, Amperes for inductors.
class Circuit {
 public:
  Circuit();

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Component>& components() const { return components_; }
  const std::map<std::string, double>& initial_conditions() const { return ics_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t component_count() const { return components_.size(); }

  /// Index of `name` in nodes(), or nullopt. Accepts the GND alias.
  std::optional<std::size_t> find_node(std::string_view name) const;
  std::size_t node_index(std::string_view name) const;
  std::optional<std::size_t> find_component(std::string_view id) const;

  /// Registers a node; returns its index. GND maps to ground.
  std::size_t add_node(std::string_view name);
  /// Appends a component and registers its terminals. Does not validate.
  void add_component(Component c);
  void set_initial_condition(const std::string& id, double value);
  void clear_initial_conditions() { ics_.clear(); }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  std::vector<std::string> nodes_;
  std::vector<Component> components_;
  std::map<std::string, double> ics_;
};

/// Canonical spelling of a node name ("GND" becomes "0").
std::string canonical_node(std::string_view name);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

Circuit parse_netlist(std::string_view text);
Circuit load_netlist(const std::string& path);

/// Canonical text form: one component per line with full-precision SI values,
/// then `.ic` lines in component order. parse_netlist inverts it exactly.
std::string serialize_netlist(const Circuit& circuit);

/// Parses "2pF", "1.5e-9H", "0nA" ... `unit` is the required unit letter;
/// a missing unit is accepted (bare SI). Throws std::invalid_argument.
double parse_value(std::string_view token, char unit);

enum class ViolationKind {
  NonPositiveValue,
  SelfLoop,
  DuplicateId,
  MissingGround,
  UnknownNode,
  Disconnected,
  BadInitialCondition,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Empty iff every circuit invariant holds.
std::vector<Violation> validate_circuit(const Circuit& circuit);

}  // namespace fluxq
