#pragma once

// Network text format, serializer, built-in example networks, content hash.
//
//   species: A, B            (optional; fixes species order)
//   A + 2B -> 3B ; k = 1
//   0 <-> A ; kf = 1, kr = 2
//
// '#' starts a comment. A missing rate clause means k = 1.

#include "crnldp/errors.hpp"
#include "crnldp/model.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace crnldp {

namespace detail {

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, pos_ + 1, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool consume(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  std::size_t pos() const { return pos_; }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string identifier() {
    skip_ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected species name");
    const auto start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::optional<long long> integer() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) return std::nullopt;
    long long v = 0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc()) {
      pos_ = start;
      fail("integer out of range");
    }
    return v;
  }

  double number() {
    skip_ws();
    const auto start = pos_;
    double v = 0;
    auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(p - s_.data());
    if (pos_ < s_.size() && ident_char(s_[pos_])) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  // Terms of a complex, as (species, coefficient, column) triples; empty for '0'.
  std::vector<std::tuple<std::string, long long, std::size_t>> complex() {
    std::vector<std::tuple<std::string, long long, std::size_t>> terms;
    skip_ws();
    const auto start = pos_;
    if (auto n = integer()) {
      if (*n == 0) {
        skip_ws();
        if (pos_ < s_.size() && ident_start(s_[pos_])) {
          pos_ = start;
          fail("zero coefficient");
        }
        return terms;
      }
      pos_ = start;
    }
    for (;;) {
      skip_ws();
      const auto col = pos_ + 1;
      long long coeff = 1;
      if (auto n = integer()) {
        if (*n == 0) {
          pos_ = col - 1;
          fail("zero coefficient");
        }
        coeff = *n;
      }
      terms.emplace_back(identifier(), coeff, col);
      if (!consume("+")) break;
    }
    return terms;
  }

 private:
  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses without checking network invariants (validate() reports those).
inline Network parse_network_unchecked(std::string_view text) {
  std::vector<std::string> species;
  std::map<std::string, std::size_t> index;
  bool fixed_species = false;
  struct RawReaction {
    std::vector<std::pair<std::size_t, long long>> in, out;
    double k;
  };
  std::vector<RawReaction> raw;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    auto end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    for (std::size_t i = 0; i < line.size(); ++i)
      if (static_cast<unsigned char>(line[i]) >= 0x80) throw ParseError(line_no, i + 1, "non-ASCII character");
    detail::LineParser p(line, line_no);
    if (p.at_end()) continue;

    if (p.consume("species:")) {
      if (!raw.empty() || fixed_species) p.fail("species header must precede all reactions and appear once");
      fixed_species = true;
      do {
        const auto col = p.pos();
        auto name = p.identifier();
        if (index.count(name)) throw ParseError(line_no, col + 1, "duplicate species '" + name + "'");
        index[name] = species.size();
        species.push_back(name);
      } while (p.consume(","));
      if (!p.at_end()) p.fail("unexpected token in species header");
      continue;
    }

    auto resolve = [&](const std::vector<std::tuple<std::string, long long, std::size_t>>& terms) {
      std::vector<std::pair<std::size_t, long long>> out;
      for (const auto& [name, coeff, col] : terms) {
        auto it = index.find(name);
        if (it == index.end()) {
          if (fixed_species) throw ParseError(line_no, col, "undeclared species '" + name + "'");
          it = index.emplace(name, species.size()).first;
          species.push_back(name);
        }
        out.emplace_back(it->second, coeff);
      }
      return out;
    };

    auto lhs = resolve(p.complex());
    bool reversible = false;
    if (p.consume("<->")) reversible = true;
    else if (!p.consume("->")) p.fail("expected '->' or '<->'");
    auto rhs = resolve(p.complex());

    double kf = 1, kr = 1;
    if (p.consume(";")) {
      if (reversible) {
        bool have_f = false, have_r = false;
        do {
          if (p.consume("kf")) {
            if (!p.consume("=")) p.fail("expected '='");
            kf = p.number();
            have_f = true;
          } else if (p.consume("kr")) {
            if (!p.consume("=")) p.fail("expected '='");
            kr = p.number();
            have_r = true;
          } else {
            p.fail("expected 'kf' or 'kr'");
          }
        } while (p.consume(","));
        if (!have_f || !have_r) p.fail("reversible reaction needs both kf and kr");
      } else {
        if (!p.consume("k")) p.fail("expected 'k'");
        if (!p.consume("=")) p.fail("expected '='");
        kf = p.number();
      }
    }
    if (!p.at_end()) p.fail("unexpected token");
    raw.push_back({lhs, rhs, kf});
    if (reversible) raw.push_back({rhs, lhs, kr});
  }

  const std::size_t d = species.size();
  std::vector<Reaction> reactions;
  for (const auto& r : raw) {
    auto build = [d](const std::vector<std::pair<std::size_t, long long>>& terms) {
      std::vector<int> c(d, 0);
      for (auto [i, n] : terms) c[i] += static_cast<int>(n);
      return Complex(std::move(c));
    };
    reactions.push_back({build(r.in), build(r.out), r.k});
  }
  return Network(std::move(species), std::move(reactions));
}

inline Network parse_network(std::string_view text) {
  auto net = parse_network_unchecked(text);
  if (auto report = validate(net); !report.ok()) throw ValidationError(report.describe());
  return net;
}

/// Shortest decimal that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string format_complex(const Network& net, const Complex& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!out.empty()) out += " + ";
    if (c[i] != 1) out += std::to_string(c[i]);
    out += net.species()[i];
  }
  return out.empty() ? "0" : out;
}

inline std::string format_reaction(const Network& net, const Reaction& r) {
  return format_complex(net, r.input) + " -> " + format_complex(net, r.output);
}

inline std::string serialize(const Network& net) {
  std::string out = "species: ";
  for (std::size_t i = 0; i < net.dimension(); ++i) {
    if (i) out += ", ";
    out += net.species()[i];
  }
  out += '\n';
  for (const auto& r : net.reactions()) out += format_reaction(net, r) + " ; k = " + format_double(r.rate_constant) + '\n';
  return out;
}

/// FNV-1a over the canonical serialization, as 16 hex digits.
inline std::string network_hash(const Network& net) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize(net)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Built-in networks

struct BuiltinNetwork {
  const char* name;
  const char* description;
  const char* text;
};

inline const std::vector<BuiltinNetwork>& builtin_networks() {
  static const std::vector<BuiltinNetwork> nets = {
      {"ex1", "A + 2B <-> 3B", "species: A, B\nA + 2B <-> 3B ; kf = 1, kr = 1\n"},
      {"ex2", "open triangle network, strongly endotactic with a = 1",
       "species: A, B\n0 -> A + 2B ; k = 1\nA + 2B -> 3B ; k = 1\n3B -> A ; k = 1\n"},
      {"ex13", "A -> 0 -> B -> 2A, needs a non-unit weight vector",
       "species: A, B\nA -> 0 ; k = 1\n0 -> B ; k = 1\nB -> 2A ; k = 1\n"},
      {"ex31", "ex2 plus 2A <-> A + 3B, not strongly endotactic",
       "species: A, B\n0 -> A + 2B ; k = 1\nA + 2B -> 3B ; k = 1\n3B -> A ; k = 1\n"
       "2A <-> A + 3B ; kf = 1, kr = 1\n"},
      {"ex32", "strongly endotactic with siphon {A}",
       "species: A, B\nA -> 2A ; k = 1\n2A -> 3A + 2B ; k = 1\n3A + 2B -> A ; k = 1\n"},
      {"tetra", "0 <-> A -> B -> C -> A",
       "species: A, B, C\n0 <-> A ; kf = 1, kr = 1\nA -> B ; k = 1\nB -> C ; k = 1\nC -> A ; k = 1\n"},
      {"ex410", "A -> 2A -> 0, strongly endotactic with siphon {A}",
       "species: A\nA -> 2A ; k = 1\n2A -> 0 ; k = 1\n"},
      {"schlogl", "Schloegl model with k = 2, 0.33, 0.001, 0.001",
       "species: W\n0 <-> W ; kf = 2, kr = 0.33\n2W <-> 3W ; kf = 0.001, kr = 0.001\n"},
      {"schlogl-bistable", "Schloegl model with equilibria 1 (stable), 2 (saddle), 3 (stable)",
       "species: W\n0 <-> W ; kf = 6, kr = 11\n2W <-> 3W ; kf = 6, kr = 1\n"},
      {"bz", "three-species chaotic oscillator",
       "species: X, Y, Z\n0 -> X ; k = 2.5\nX -> Y ; k = 0.0099\nY -> Z ; k = 1.9851\nZ -> 0 ; k = 0.4963\n"
       "Z -> X + Z ; k = 0.0769\nX + 2Y -> 3Y ; k = 0.6352\n"},
      {"bistable0", "oscillator coupled to Schloegl, without the stabilizing reactions",
       "species: X, Y, Z, W\n0 -> X ; k = 2.5\nX -> Y ; k = 0.0099\nY -> Z ; k = 1.9851\nZ -> 0 ; k = 0.4963\n"
       "Z -> X + Z ; k = 0.0769\nX + 2Y -> 3Y ; k = 0.6352\n"
       "0 <-> W ; kf = 2, kr = 0.33\n2W <-> 3W ; kf = 0.001, kr = 0.001\n"
       "W -> X + W ; k = 3\nZ + W -> X + Z + W ; k = 1e-9\n"},
      {"bistable", "oscillator coupled to Schloegl, with the stabilizing reactions",
       "species: X, Y, Z, W\n0 -> X ; k = 2.5\nX -> Y ; k = 0.0099\nY -> Z ; k = 1.9851\nZ -> 0 ; k = 0.4963\n"
       "Z -> X + Z ; k = 0.0769\nX + 2Y -> 3Y ; k = 0.6352\n"
       "0 <-> W ; kf = 2, kr = 0.33\n2W <-> 3W ; kf = 0.001, kr = 0.001\n"
       "W -> X + W ; k = 3\nZ + W -> X + Z + W ; k = 1e-9\n"
       "3Y -> 0 ; k = 0.01\nX + Z + W -> X ; k = 1e-9\n"},
  };
  return nets;
}

inline const BuiltinNetwork& builtin(std::string_view name) {
  for (const auto& b : builtin_networks())
    if (name == b.name) return b;
  throw InputError("unknown built-in network '" + std::string(name) + "'");
}

inline Network builtin_network(std::string_view name) { return parse_network(builtin(name).text); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Reads a network file, or a built-in when the path is "builtin:<name>".
inline std::string load_network_text(const std::string& path) {
  constexpr std::string_view prefix = "builtin:";
  if (path.rfind(prefix, 0) == 0) return builtin(path.substr(prefix.size())).text;
  return read_file(path);
}

inline Network load_network(const std::string& path) { return parse_network(load_network_text(path)); }

// ---------------------------------------------------------------------------
// Small numeric list helpers for the CLI

inline std::vector<double> parse_double_list(std::string_view csv) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    auto end = csv.find(',', begin);
    if (end == std::string_view::npos) end = csv.size();
    auto tok = csv.substr(begin, end - begin);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
      throw Error("invalid number '" + std::string(tok) + "'");
    out.push_back(v);
    begin = end + 1;
  }
  return out;
}

inline RationalVector parse_rational_list(std::string_view csv) {
  RationalVector out;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    auto end = csv.find(',', begin);
    if (end == std::string_view::npos) end = csv.size();
    out.push_back(parse_rational(csv.substr(begin, end - begin)));
    begin = end + 1;
  }
  return out;
}

}  // namespace crnldp
