#include "fluxq/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fluxq {

const char* to_string(ComponentKind kind) {
  return kind == ComponentKind::Capacitor ? "capacitor" : "inductor";
}

std::string canonical_node(std::string_view name) {
  if (name == "GND" || name == "gnd") return std::string(kGround);
  return std::string(name);
}

Circuit::Circuit() { nodes_.emplace_back(kGround); }

std::optional<std::size_t> Circuit::find_node(std::string_view name) const {
  const std::string key = canonical_node(name);
  auto it = std::find(nodes_.begin(), nodes_.end(), key);
  if (it == nodes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t Circuit::node_index(std::string_view name) const {
  auto idx = find_node(name);
  if (!idx) throw std::out_of_range("unknown node '" + std::string(name) + "'");
  return *idx;
}

std::optional<std::size_t> Circuit::find_component(std::string_view id) const {
  for (std::size_t i = 0; i < components_.size(); ++i)
    if (components_[i].id == id) return i;
  return std::nullopt;
}

std::size_t Circuit::add_node(std::string_view name) {
  if (auto idx = find_node(name)) return *idx;
  nodes_.push_back(canonical_node(name));
  return nodes_.size() - 1;
}

void Circuit::add_component(Component c) {
  c.node_a = canonical_node(c.node_a);
  c.node_b = canonical_node(c.node_b);
  add_node(c.node_a);
  add_node(c.node_b);
  components_.push_back(std::move(c));
}

void Circuit::set_initial_condition(const std::string& id, double value) { ics_[id] = value; }

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

namespace {

double prefix_scale(char c) {
  switch (c) {
    case 'a': return 1e-18;
    case 'f': return 1e-15;
    case 'p': return 1e-12;
    case 'n': return 1e-9;
    case 'u': return 1e-6;
    case 'm': return 1e-3;
    default: return 0.0;
  }
}

bool is_unit_letter(char c) { return c == 'F' || c == 'H' || c == 'V' || c == 'A'; }

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#')
      ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::optional<ComponentKind> kind_from_id(std::string_view id) {
  if (id.empty()) return std::nullopt;
  if (id[0] == 'C' || id[0] == 'c') return ComponentKind::Capacitor;
  if (id[0] == 'L' || id[0] == 'l') return ComponentKind::Inductor;
  return std::nullopt;
}

bool valid_node_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

double parse_value(std::string_view token, char unit) {
  std::string_view body = token;
  if (!body.empty() && is_unit_letter(body.back())) {
    if (body.back() != unit)
      throw std::invalid_argument("unit '" + std::string(1, body.back()) + "' where '" +
                                  std::string(1, unit) + "' is required");
    body.remove_suffix(1);
  }
  double scale = 1.0;
  if (!body.empty() && std::isalpha(static_cast<unsigned char>(body.back()))) {
    const char p = body.back();
    // A trailing 'e' would be a truncated exponent, not a prefix.
    scale = p == 'e' || p == 'E' ? 0.0 : prefix_scale(p);
    if (scale == 0.0) throw std::invalid_argument("unknown unit '" + std::string(1, p) + "'");
    body.remove_suffix(1);
  }
  if (body.empty()) throw std::invalid_argument("missing number");
  double number = 0.0;
  const char* first = body.data();
  const char* last = body.data() + body.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("malformed number '" + std::string(body) + "'");
  return number * scale;
}

Circuit parse_netlist(std::string_view text) {
  Circuit circuit;
  std::set<std::string> ids;
  struct PendingIc {
    std::string id;
    char unit;
    double value;
    std::size_t line;
    std::size_t column;
  };
  std::vector<PendingIc> pending_ics;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = end + 1;

    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }

    const Token& head = tokens[0];
    if (head.text[0] == '.') {
      if (head.text != ".ic" && head.text != ".IC")
        throw ParseError(line_no, head.column, "unknown directive '" + std::string(head.text) + "'");
      if (tokens.size() != 3)
        throw ParseError(line_no, head.column, ".ic expects: .ic <ID> <value>");
      const std::string_view raw = tokens[2].text;
      const char unit = raw.empty() ? '\0' : raw.back();
      if (unit != 'V' && unit != 'A')
        throw ParseError(line_no, tokens[2].column, "initial condition needs unit V or A");
      double value = 0.0;
      try {
        value = parse_value(raw, unit);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, tokens[2].column, e.what());
      }
      pending_ics.push_back({std::string(tokens[1].text), unit, value, line_no, tokens[1].column});
    } else {
      if (tokens.size() != 4)
        throw ParseError(line_no, head.column, "component expects: <ID> <node> <node> <value>");
      auto kind = kind_from_id(head.text);
      if (!kind)
        throw ParseError(line_no, head.column,
                         "component id must start with C or L: '" + std::string(head.text) + "'");
      const std::string id(head.text);
      if (!ids.insert(id).second)
        throw ParseError(line_no, head.column, "duplicate component id '" + id + "'");
      for (int k = 1; k <= 2; ++k)
        if (!valid_node_name(tokens[k].text))
          throw ParseError(line_no, tokens[k].column,
                           "bad node name '" + std::string(tokens[k].text) + "'");
      const std::string a = canonical_node(tokens[1].text);
      const std::string b = canonical_node(tokens[2].text);
      if (a == b)
        throw ParseError(line_no, tokens[2].column, "component '" + id + "' connects node " + a +
                                                        " to itself");
      double value = 0.0;
      try {
        value = parse_value(tokens[3].text, *kind == ComponentKind::Capacitor ? 'F' : 'H');
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, tokens[3].column, e.what());
      }
      if (!(value > 0.0) || !std::isfinite(value))
        throw ParseError(line_no, tokens[3].column,
                         "value of '" + id + "' must be positive and finite");
      circuit.add_component({id, *kind, value, a, b, false});
    }
    if (end == text.size()) break;
  }

  for (const auto& ic : pending_ics) {
    auto idx = circuit.find_component(ic.id);
    if (!idx)
      throw ParseError(ic.line, ic.column, ".ic references unknown component '" + ic.id + "'");
    const bool is_cap = circuit.components()[*idx].is_capacitor();
    if (is_cap && ic.unit != 'V')
      throw ParseError(ic.line, ic.column,
                       "capacitor '" + ic.id + "' takes a voltage (V) initial condition");
    if (!is_cap && ic.unit != 'A')
      throw ParseError(ic.line, ic.column,
                       "inductor '" + ic.id + "' takes a current (A) initial condition");
    circuit.set_initial_condition(ic.id, ic.value);
  }
  return circuit;
}

Circuit load_netlist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open netlist '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_netlist(buf.str());
}

namespace {

std::string format_si(double v, char unit) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf) + unit;
}

}  // namespace

std::string serialize_netlist(const Circuit& circuit) {
  std::ostringstream out;
  for (const auto& c : circuit.components()) {
    out << c.id << ' ' << c.node_a << ' ' << c.node_b << ' '
        << format_si(c.value, c.is_capacitor() ? 'F' : 'H') << '\n';
  }
  for (const auto& c : circuit.components()) {
    auto it = circuit.initial_conditions().find(c.id);
    if (it == circuit.initial_conditions().end()) continue;
    out << ".ic " << c.id << ' ' << format_si(it->second, c.is_capacitor() ? 'V' : 'A') << '\n';
  }
  return out.str();
}

std::vector<Violation> validate_circuit(const Circuit& circuit) {
  std::vector<Violation> out;
  const auto& nodes = circuit.nodes();
  const bool grounded = std::any_of(circuit.components().begin(), circuit.components().end(),
                                    [](const Component& c) { return c.node_a == kGround || c.node_b == kGround; });
  if (nodes.empty() || nodes.front() != kGround || (!grounded && circuit.component_count() > 0))
    out.push_back({ViolationKind::MissingGround, "no component connects to ground node 0"});

  std::set<std::string> seen;
  for (const auto& c : circuit.components()) {
    if (!seen.insert(c.id).second)
      out.push_back({ViolationKind::DuplicateId, "duplicate component id '" + c.id + "'"});
    if (!(c.value > 0.0) || !std::isfinite(c.value))
      out.push_back({ViolationKind::NonPositiveValue, c.id + ": value must be positive"});
    if (c.node_a == c.node_b)
      out.push_back({ViolationKind::SelfLoop, c.id + ": both terminals on node " + c.node_a});
    for (const auto* n : {&c.node_a, &c.node_b})
      if (!circuit.find_node(*n))
        out.push_back({ViolationKind::UnknownNode, c.id + ": unknown node " + *n});
  }

  // Union-find connectivity over nodes.
  std::vector<std::size_t> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : circuit.components()) {
    auto a = circuit.find_node(c.node_a);
    auto b = circuit.find_node(c.node_b);
    if (a && b) parent[find(*a)] = find(*b);
  }
  std::vector<std::string> stranded;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (find(i) != find(0)) stranded.push_back(nodes[i]);
  if (!stranded.empty()) {
    std::string msg = "circuit is not connected; unreachable from ground:";
    for (const auto& n : stranded) msg += " " + n;
    out.push_back({ViolationKind::Disconnected, msg});
  }

  for (const auto& [id, value] : circuit.initial_conditions()) {
    if (!circuit.find_component(id))
      out.push_back({ViolationKind::BadInitialCondition, "initial condition for unknown '" + id + "'"});
    else if (!std::isfinite(value))
      out.push_back({ViolationKind::BadInitialCondition, id + ": initial condition not finite"});
  }
  return out;
}

}  // namespace fluxq
