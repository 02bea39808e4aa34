#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"

namespace corec {

// Schematic half of a signature: one operation symbol per arity, with names
// generated deterministically as stem + arity ("set3", "tup2"). An optional
// max arity bounds the family (used by the bounded power-set presentation).
struct AritySchema {
  std::string stem;
  std::optional<int> max_arity;

  std::string op_name(int arity) const { return stem + std::to_string(arity); }

  // Returns the arity if `name` is one of the generated names.
  std::optional<int> parse(const std::string& name) const {
    if (name.size() <= stem.size() || name.compare(0, stem.size(), stem) != 0) return std::nullopt;
    const std::string digits = name.substr(stem.size());
    for (char ch : digits)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
    if (digits.size() > 7) return std::nullopt;
    int n = std::stoi(digits);
    if (op_name(n) != name) return std::nullopt;  // rejects leading zeros
    if (max_arity && n > *max_arity) return std::nullopt;
    return n;
  }
};

// A ranked alphabet. Operation names are unique; arities are >= 0. Variables
// are not stored here: any identifier that is not an operation acts as a
// nullary symbol in a disjoint namespace.
class Signature {
 public:
  void add_op(const std::string& name, int arity) {
    if (arity < 0) fail(errc::bad_params, "negative arity for " + name);
    if (ops_.count(name)) fail(errc::duplicate_op, name);
    if (schema_ && schema_->parse(name)) fail(errc::duplicate_op, name + " collides with schema");
    ops_.emplace(name, arity);
  }

  void set_schema(AritySchema s) {
    for (const auto& [name, _] : ops_)
      if (s.parse(name)) fail(errc::duplicate_op, name + " collides with schema");
    schema_ = std::move(s);
  }

  bool has_op(const std::string& name) const {
    if (ops_.count(name)) return true;
    return schema_ && schema_->parse(name).has_value();
  }

  int arity(const std::string& name) const {
    auto it = ops_.find(name);
    if (it != ops_.end()) return it->second;
    if (schema_) {
      if (auto n = schema_->parse(name)) return *n;
    }
    fail(errc::unknown_op, name);
  }

  const std::map<std::string, int>& ops() const { return ops_; }
  const std::optional<AritySchema>& schema() const { return schema_; }

  std::vector<std::string> nullaries() const {
    std::vector<std::string> out;
    for (const auto& [name, ar] : ops_)
      if (ar == 0) out.push_back(name);
    if (schema_) out.push_back(schema_->op_name(0));
    return out;
  }

 private:
  std::map<std::string, int> ops_;
  std::optional<AritySchema> schema_;
};

// One functor layer: an operation applied to opaque, totally ordered argument
// keys, or a bare variable (which takes no arguments).
struct FlatTerm {
  bool is_var = false;
  std::string head;
  std::vector<int> args;
};

inline void validate_flat(const Signature& sig, const FlatTerm& t) {
  if (t.is_var) {
    if (!t.args.empty()) fail(errc::arity_mismatch, "variable " + t.head + " applied to arguments");
    if (sig.has_op(t.head)) fail(errc::duplicate_op, t.head + " is both op and variable");
    return;
  }
  if (!sig.has_op(t.head)) fail(errc::unknown_op, t.head);
  int ar = sig.arity(t.head);
  if (ar != static_cast<int>(t.args.size()))
    fail(errc::arity_mismatch, t.head + " expects " + std::to_string(ar) + " args, got " +
                                   std::to_string(t.args.size()));
}

// Line-oriented signature files: one `op NAME ARITY` per line. `#` starts a
// comment; blank lines are skipped.
inline Signature parse_signature(const std::string& text) {
  Signature sig;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string kw, name;
    long arity = -1;
    if (!(ls >> kw)) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";
    if (kw != "op") fail(errc::syntax_error, "expected `op`, got `" + kw + "`" + where);
    if (!(ls >> name >> arity) || arity < 0)
      fail(errc::syntax_error, "expected `op NAME ARITY`" + where);
    std::string rest;
    if (ls >> rest) fail(errc::syntax_error, "trailing `" + rest + "`" + where);
    sig.add_op(name, static_cast<int>(arity));
  }
  return sig;
}

inline std::string print_signature(const Signature& sig) {
  std::string out;
  for (const auto& [name, ar] : sig.ops()) out += "op " + name + " " + std::to_string(ar) + "\n";
  return out;
}

}  // namespace corec
