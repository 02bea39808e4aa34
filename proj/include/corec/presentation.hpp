#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cut.hpp"
#include "error.hpp"
#include "signature.hpp"
#include "tree.hpp"

namespace corec {

using KeyLess = std::function<bool(int, int)>;

// Normalizes one flat layer. Argument keys are opaque: the function may drop,
// permute or merge duplicate keys (never invent new ones), and uses the
// supplied order when it sorts. Throws CapacityExceeded for layers the functor
// cannot hold.
using Normalizer = std::function<FlatTerm(const FlatTerm&, const KeyLess&)>;

// All canonical flat layers over a given key set, for materializing chain
// stages. Throws CapExceeded when the layer outgrows `cap`.
using LayerEnumerator = std::function<std::vector<FlatTerm>(const std::vector<int>&, std::size_t)>;

// A flat equation pattern pair; args are slot indices shared across the two
// sides (rhs slots must occur in the lhs).
struct Equation {
  FlatTerm lhs, rhs;
};

// An eps-presentation of a finitary set functor: a signature plus the
// computational form of the quotient, a canonical-representative chooser on
// flat layers. The congruences on finite and rational trees are derived from
// it in nf_tree / nf_rational below.
struct Presentation {
  std::string name;
  Signature sig;
  int uid = 0;
  bool hereditary_exact = false;   // normal forms decide the congruence
  bool height_preserving = true;   // normalize never changes layer height
  bool orders_args = true;         // argument positions carry meaning
  bool set_sugar = false;          // print schematic ops as {..}
  std::optional<CutPoint> default_p;
  Normalizer normalize;
  LayerEnumerator enumerate_layer;                                          // optional
  std::vector<Equation> equations;                                          // bounded mode only
  std::function<std::pair<FlatTerm, FlatTerm>(std::mt19937_64&)> sample_merged;  // optional
};

namespace detail {

inline int next_presentation_uid() {
  static std::atomic<int> counter{0};
  return ++counter;
}

inline KeyLess structural_less() {
  return [](int a, int b) { return tree_compare(a, b) < 0; };
}

inline KeyLess int_less() {
  return [](int a, int b) { return a < b; };
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hereditary normal forms
// ---------------------------------------------------------------------------

namespace detail {

// nf results are content-addressed, so one global cache keyed by
// (presentation, tree) is sound across calls.
inline std::map<std::pair<int, int>, int>& nf_cache() {
  static std::map<std::pair<int, int>, int> cache;
  return cache;
}
inline std::mutex& nf_cache_mu() {
  static std::mutex mu;
  return mu;
}

}  // namespace detail

// Bottom-up normalization of a finite tree: children first, then the layer.
// The result is the chosen representative of the congruence class of t.
inline FiniteTree nf_tree(const Presentation& pres, FiniteTree t) {
  if (t.is_var()) {
    if (pres.sig.has_op(t.label())) fail(errc::duplicate_op, t.label() + " is both op and variable");
    return t;
  }
  {
    std::lock_guard lock(detail::nf_cache_mu());
    auto it = detail::nf_cache().find({pres.uid, t.id()});
    if (it != detail::nf_cache().end()) return FiniteTree(it->second);
  }
  std::vector<int> kids;
  kids.reserve(t.arity());
  for (int i = 0; i < t.arity(); ++i) kids.push_back(nf_tree(pres, t.child(i)).id());
  FlatTerm layer{false, t.label(), std::move(kids)};
  validate_flat(pres.sig, layer);
  FlatTerm nf = pres.normalize(layer, detail::structural_less());
  FiniteTree out = FiniteTree::op_ids(nf.head, nf.args);
  std::lock_guard lock(detail::nf_cache_mu());
  detail::nf_cache().emplace(std::make_pair(pres.uid, t.id()), out.id());
  return out;
}

inline Canon nf_canon(const Presentation& pres) {
  return [&pres](FiniteTree t) { return nf_tree(pres, t); };
}

// ---------------------------------------------------------------------------
// Bounded bidirectional rewriting (declarative equation sets)
// ---------------------------------------------------------------------------

namespace detail {

inline bool match_layer(const FlatTerm& pat, FiniteTree node, std::map<int, int>& binding) {
  if (node.is_var() || node.label() != pat.head) return false;
  if (node.arity() != static_cast<int>(pat.args.size())) return false;
  for (size_t i = 0; i < pat.args.size(); ++i) {
    auto [it, fresh] = binding.emplace(pat.args[i], node.child_ids()[i]);
    if (!fresh && it->second != node.child_ids()[i]) return false;
  }
  return true;
}

inline void rewrites_at(const std::vector<Equation>& eqs, FiniteTree node, std::vector<int>& out) {
  auto apply = [&](const FlatTerm& from, const FlatTerm& to) {
    std::map<int, int> binding;
    if (!match_layer(from, node, binding)) return;
    std::vector<int> kids;
    kids.reserve(to.args.size());
    for (int slot : to.args) kids.push_back(binding.at(slot));
    out.push_back(FiniteTree::op_ids(to.head, kids).id());
  };
  for (const Equation& eq : eqs) {
    apply(eq.lhs, eq.rhs);
    apply(eq.rhs, eq.lhs);
  }
}

// All trees reachable by one equation application at one node.
inline std::vector<int> rewrite_neighbors(const std::vector<Equation>& eqs, FiniteTree t) {
  std::vector<int> out;
  rewrites_at(eqs, t, out);
  for (int i = 0; i < t.arity(); ++i)
    for (int alt : rewrite_neighbors(eqs, t.child(i))) {
      std::vector<int> kids = t.child_ids();
      kids[i] = alt;
      out.push_back(FiniteTree::op_ids(t.label(), kids).id());
    }
  return out;
}

// Meet-in-the-middle search for a finite application of the equations joining
// s and sp. Sound when it answers true; a false answer only means "not found
// within the node budget".
inline bool bounded_equiv(const std::vector<Equation>& eqs, FiniteTree s, FiniteTree sp,
                          int budget) {
  if (s == sp) return true;
  std::set<int> seen_a{s.id()}, seen_b{sp.id()};
  std::vector<int> frontier_a{s.id()}, frontier_b{sp.id()};
  while (!frontier_a.empty() || !frontier_b.empty()) {
    bool expand_a = seen_a.size() <= seen_b.size() ? !frontier_a.empty() : frontier_a.empty();
    auto& frontier = expand_a ? frontier_a : frontier_b;
    auto& seen = expand_a ? seen_a : seen_b;
    auto& other = expand_a ? seen_b : seen_a;
    std::vector<int> next;
    for (int id : frontier)
      for (int nb : rewrite_neighbors(eqs, FiniteTree(id))) {
        if (!seen.insert(nb).second) continue;
        if (other.count(nb)) return true;
        next.push_back(nb);
        if (static_cast<int>(seen_a.size() + seen_b.size()) > budget) return false;
      }
    frontier = std::move(next);
  }
  return false;
}

}  // namespace detail

struct EquivOutcome {
  bool equal = false;
  bool exact = true;  // false: bounded semi-decision, may under-approximate
};

inline EquivOutcome equiv_finite_ex(const Presentation& pres, FiniteTree s, FiniteTree sp,
                                    int rewrite_budget = 2000) {
  if (pres.hereditary_exact) return {nf_tree(pres, s) == nf_tree(pres, sp), true};
  return {detail::bounded_equiv(pres.equations, nf_tree(pres, s), nf_tree(pres, sp), rewrite_budget),
          false};
}

inline bool equiv_finite(const Presentation& pres, FiniteTree s, FiniteTree sp) {
  return equiv_finite_ex(pres, s, sp).equal;
}

// ---------------------------------------------------------------------------
// Minimization: normal forms of rational trees
// ---------------------------------------------------------------------------

namespace detail {

using SigKey = std::tuple<int, bool, std::string, std::vector<int>>;

// Moore-style refinement: a state's round signature is its variable name or
// its normalized layer over the current block ids. Keys carry the previous
// block, so rounds only ever split.
inline std::vector<int> refine_states(const RationalTree& r, const Presentation& pres) {
  const int n = r.num_states();
  std::vector<int> block(n, 0);
  int blocks = 1;
  for (;;) {
    std::map<SigKey, int> ids;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      const RationalState& st = r.state(i);
      SigKey key;
      if (st.is_var) {
        key = SigKey{block[i], true, st.label, {}};
      } else {
        FlatTerm layer{false, st.label, {}};
        for (int s : st.succ) layer.args.push_back(block[s]);
        FlatTerm nf = pres.normalize(layer, int_less());
        key = SigKey{block[i], false, nf.head, nf.args};
      }
      auto [it, _] = ids.emplace(std::move(key), static_cast<int>(ids.size()));
      next[i] = it->second;
    }
    int nblocks = static_cast<int>(ids.size());
    block = std::move(next);
    if (nblocks == blocks) return block;
    blocks = nblocks;
  }
}

}  // namespace detail

// Quotients the state graph by the coarsest normalized bisimulation and puts
// states into a content-determined order, so bisimilar inputs come out as
// identical systems. Requires normal forms that decide the congruence.
inline RationalTree nf_rational(const Presentation& pres, const RationalTree& r) {
  if (!pres.hereditary_exact)
    fail(errc::not_exact, pres.name + " has no exact normal forms");
  for (const auto& st : r.states()) {
    FlatTerm layer{st.is_var, st.label, std::vector<int>(st.succ.begin(), st.succ.end())};
    validate_flat(pres.sig, layer);
  }

  std::vector<int> block = detail::refine_states(r, pres);
  int nb = 0;
  for (int b : block) nb = std::max(nb, b + 1);

  // one provisional state per block, labels normalized over block ids
  std::vector<RationalState> proto(nb);
  std::vector<bool> have(nb, false);
  for (int i = 0; i < r.num_states(); ++i) {
    int b = block[i];
    if (have[b]) continue;
    have[b] = true;
    const RationalState& st = r.state(i);
    if (st.is_var) {
      proto[b] = RationalState{true, st.label, {}};
    } else {
      FlatTerm layer{false, st.label, {}};
      for (int s : st.succ) layer.args.push_back(block[s]);
      FlatTerm nf = pres.normalize(layer, detail::int_less());
      proto[b] = RationalState{false, nf.head, nf.args};
    }
  }

  // content-only ranking of the (pairwise non-bisimilar) blocks: refine ranks
  // by (rank, label, successor ranks) until every block has its own rank
  std::vector<int> rank(nb, 0);
  for (int round = 0; round <= nb + 1; ++round) {
    using RankKey = std::tuple<int, bool, std::string, std::vector<int>>;
    std::vector<std::pair<RankKey, int>> keyed;
    keyed.reserve(nb);
    for (int b = 0; b < nb; ++b) {
      std::vector<int> succ_ranks;
      for (int s : proto[b].succ) succ_ranks.push_back(rank[s]);
      if (!pres.orders_args) std::sort(succ_ranks.begin(), succ_ranks.end());
      keyed.push_back({RankKey{rank[b], proto[b].is_var, proto[b].label, std::move(succ_ranks)}, b});
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> next(nb);
    int cur = 0;
    for (int i = 0; i < nb; ++i) {
      if (i > 0 && keyed[i].first != keyed[i - 1].first) ++cur;
      next[keyed[i].second] = cur;
    }
    if (next == rank) break;
    rank = std::move(next);
  }
  if (std::set<int>(rank.begin(), rank.end()).size() != static_cast<size_t>(nb))
    fail(errc::not_exact, pres.name + ": normalizer does not refine monotonely");

  std::vector<RationalState> final_states(nb);
  for (int b = 0; b < nb; ++b) {
    RationalState st = proto[b];
    for (int& s : st.succ) s = rank[s];
    if (!st.is_var) {
      FlatTerm layer{false, st.label, st.succ};
      FlatTerm nf = pres.normalize(layer, detail::int_less());
      st.label = nf.head;
      st.succ = nf.args;
    }
    final_states[rank[b]] = std::move(st);
  }
  return RationalTree(std::move(final_states), rank[block[r.root()]]);
}

// A value in hereditary normal form, tagged by its presentation. Acyclic
// systems are lowered to their finite representation, so equality of
// canonical values is plain structural equality.
struct CanonicalTree {
  AnyTree value;
  const Presentation* pres;

  bool is_finite() const { return value.is_finite(); }
};

inline CanonicalTree make_canonical(const Presentation& pres, const AnyTree& t) {
  if (t.is_finite()) return {AnyTree(nf_tree(pres, t.finite())), &pres};
  RationalTree nf = nf_rational(pres, t.rational());
  if (!nf.has_cycle()) return {AnyTree(nf_tree(pres, to_finite(nf))), &pres};
  return {AnyTree(std::move(nf)), &pres};
}

inline bool canonical_equal(const CanonicalTree& a, const CanonicalTree& b) {
  if (a.value.is_finite() != b.value.is_finite()) return false;
  if (a.value.is_finite()) return a.value.finite() == b.value.finite();
  return a.value.rational() == b.value.rational();
}

// ---------------------------------------------------------------------------
// Congruence on rational trees
// ---------------------------------------------------------------------------

// Exact mode decides r ~* r' by comparing minimized canonical systems. The
// bounded fallback checks the cuttings up to `depth` only, and says so.
inline EquivOutcome equiv_star(const Presentation& pres, const RationalTree& r,
                               const RationalTree& rp, std::optional<int> depth = std::nullopt,
                               std::optional<CutPoint> p = std::nullopt) {
  if (pres.hereditary_exact) return {nf_rational(pres, r) == nf_rational(pres, rp), true};
  if (!depth) fail(errc::depth_required, "bounded equivalence needs --depth");
  if (!p) p = pres.default_p;
  if (!p) fail(errc::depth_required, "bounded equivalence needs a cut point");
  for (int n = 0; n <= *depth; ++n)
    if (!equiv_finite(pres, cut(r, n, *p), cut(rp, n, *p))) return {false, false};
  return {true, false};
}

// ---------------------------------------------------------------------------
// Built-in presentations
// ---------------------------------------------------------------------------

namespace detail {

inline FlatTerm identity_normalizer(const FlatTerm& t, const KeyLess&) { return t; }

inline FlatTerm set_normalizer(const std::string& stem, std::optional<int> max_distinct,
                               const FlatTerm& t, const KeyLess& less) {
  std::vector<int> args = t.args;
  std::sort(args.begin(), args.end(), less);
  args.erase(std::unique(args.begin(), args.end()), args.end());
  if (max_distinct && static_cast<int>(args.size()) > *max_distinct)
    fail(errc::capacity_exceeded, stem + std::to_string(t.args.size()) + " holds more than " +
                                      std::to_string(*max_distinct) + " distinct children");
  return FlatTerm{false, stem + std::to_string(args.size()), std::move(args)};
}

inline void check_cap(std::size_t count, std::size_t cap, const std::string& what) {
  if (count > cap)
    fail(errc::cap_exceeded, what + " needs " + std::to_string(count) + " elements (cap " +
                                 std::to_string(cap) + ")");
}

inline LayerEnumerator subset_enumerator(const std::string& stem, std::optional<int> max_size) {
  return [stem, max_size](const std::vector<int>& keys, std::size_t cap) {
    const std::size_t n = keys.size();
    std::size_t count = 0;
    if (!max_size) {
      if (n >= 8 * sizeof(std::size_t) - 1) fail(errc::cap_exceeded, "power set too large");
      count = std::size_t{1} << n;
    } else {
      std::size_t c = 1, binom = 1;
      for (int i = 1; i <= *max_size && i <= static_cast<int>(n); ++i) {
        binom = binom * (n - i + 1) / i;
        c += binom;
      }
      count = c;
    }
    check_cap(count, cap, "power-set layer");
    std::vector<FlatTerm> out;
    out.reserve(count);
    std::vector<int> pick;
    auto rec = [&](auto&& self, std::size_t from) -> void {
      if (!max_size || static_cast<int>(pick.size()) <= *max_size)
        out.push_back(FlatTerm{false, stem + std::to_string(pick.size()), pick});
      if (max_size && static_cast<int>(pick.size()) == *max_size) return;
      for (std::size_t i = from; i < n; ++i) {
        pick.push_back(keys[i]);
        self(self, i + 1);
        pick.pop_back();
      }
    };
    rec(rec, 0);
    return out;
  };
}

inline LayerEnumerator unary_family_enumerator(std::vector<std::string> ops) {
  return [ops](const std::vector<int>& keys, std::size_t cap) {
    check_cap(ops.size() * keys.size(), cap, "unary layer");
    std::vector<FlatTerm> out;
    for (const auto& op : ops)
      for (int k : keys) out.push_back(FlatTerm{false, op, {k}});
    return out;
  };
}

inline LayerEnumerator tuple_family_enumerator(std::vector<std::string> ops, int arity) {
  return [ops, arity](const std::vector<int>& keys, std::size_t cap) {
    std::size_t count = ops.size();
    for (int i = 0; i < arity; ++i) {
      count *= keys.size();
      if (keys.empty()) break;
    }
    check_cap(keys.empty() && arity > 0 ? 0 : count, cap, "tuple layer");
    std::vector<FlatTerm> out;
    if (keys.empty() && arity > 0) return out;
    std::vector<std::size_t> odo(arity, 0);
    for (const auto& op : ops) {
      std::fill(odo.begin(), odo.end(), 0);
      for (;;) {
        FlatTerm t{false, op, {}};
        for (int i = 0; i < arity; ++i) t.args.push_back(keys[odo[i]]);
        out.push_back(std::move(t));
        int i = arity - 1;
        for (; i >= 0; --i) {
          if (++odo[i] < keys.size()) break;
          odo[i] = 0;
        }
        if (i < 0) break;
      }
    }
    return out;
  };
}

inline LayerEnumerator all_tuples_enumerator(const std::string& stem) {
  return [stem](const std::vector<int>& keys, std::size_t cap) {
    std::vector<FlatTerm> out;
    out.push_back(FlatTerm{false, stem + "0", {}});
    if (keys.empty()) return out;
    std::size_t count = 1;
    for (int arity = 1;; ++arity) {
      std::size_t layer = 1;
      for (int i = 0; i < arity; ++i) layer *= keys.size();
      count += layer;
      check_cap(count, cap, "tuple layers");
      std::vector<std::size_t> odo(arity, 0);
      for (;;) {
        FlatTerm t{false, stem + std::to_string(arity), {}};
        for (int i = 0; i < arity; ++i) t.args.push_back(keys[odo[i]]);
        out.push_back(std::move(t));
        int i = arity - 1;
        for (; i >= 0; --i) {
          if (++odo[i] < keys.size()) break;
          odo[i] = 0;
        }
        if (i < 0) break;
      }
    }
  };
}

}  // namespace detail

inline Presentation make_presentation(std::string name, Signature sig, Normalizer normalize) {
  Presentation p;
  p.name = std::move(name);
  p.sig = std::move(sig);
  p.uid = detail::next_presentation_uid();
  p.normalize = std::move(normalize);
  return p;
}

// The identity presentation of the signature's polynomial functor: no
// equations, every tree already normal.
inline Presentation from_signature(Signature sig, std::string name = "sig") {
  Presentation p = make_presentation(std::move(name), std::move(sig), detail::identity_normalizer);
  p.hereditary_exact = true;
  return p;
}

// Declarative flat equations: equivalence is decided by bounded bidirectional
// rewriting only, so the presentation is flagged non-exact.
inline Presentation from_signature_with_equations(Signature sig, std::vector<Equation> eqs,
                                                  std::string name = "sig+eqs") {
  for (const Equation& eq : eqs) {
    validate_flat(sig, eq.lhs);
    validate_flat(sig, eq.rhs);
    std::set<int> lhs_slots(eq.lhs.args.begin(), eq.lhs.args.end());
    for (int s : eq.rhs.args)
      if (!lhs_slots.count(s)) fail(errc::syntax_error, "equation rhs invents a variable");
  }
  Presentation p = make_presentation(std::move(name), std::move(sig), detail::identity_normalizer);
  p.hereditary_exact = false;
  p.height_preserving = false;  // not checkable for user equations
  p.equations = std::move(eqs);
  return p;
}

// Built-in presentations, by name with parameters:
//   id            one unary op `s`, no equations
//   product(a,b)  one unary op per label
//   list          one op per arity (tup0, tup1, ...), no equations
//   pf            finite power set: setN with sort-and-deduplicate
//   pk(k)         subsets of at most k elements
//   automata(n)   two n-ary ops `a`, `b`
//   am23          three binary ops s1,s2,s3 with si(x,x) = s1(x,x)
inline Presentation builtin(const std::string& name, const std::vector<std::string>& params = {}) {
  auto no_params = [&](const char* who) {
    if (!params.empty()) fail(errc::bad_params, std::string(who) + " takes no parameters");
  };
  if (name == "id") {
    no_params("id");
    Signature sig;
    sig.add_op("s", 1);
    Presentation p = from_signature(std::move(sig), "id");
    p.enumerate_layer = detail::unary_family_enumerator({"s"});
    p.sample_merged = [](std::mt19937_64&) {
      return std::pair{FlatTerm{false, "s", {0}}, FlatTerm{false, "s", {0}}};
    };
    return p;
  }
  if (name == "product") {
    if (params.empty()) fail(errc::bad_params, "product needs at least one label");
    Signature sig;
    for (const auto& a : params) sig.add_op(a, 1);
    Presentation p = from_signature(std::move(sig), "product(" + [&] {
                                      std::string s;
                                      for (const auto& a : params) s += (s.empty() ? "" : ",") + a;
                                      return s;
                                    }() + ")");
    p.enumerate_layer = detail::unary_family_enumerator(params);
    return p;
  }
  if (name == "list") {
    no_params("list");
    Signature sig;
    sig.set_schema(AritySchema{"tup", std::nullopt});
    Presentation p = from_signature(std::move(sig), "list");
    p.default_p = op_point("tup0");
    p.enumerate_layer = detail::all_tuples_enumerator("tup");
    return p;
  }
  if (name == "pf" || name == "pk") {
    std::optional<int> k;
    if (name == "pk") {
      if (params.size() != 1) fail(errc::bad_params, "pk needs one numeric parameter");
      try {
        k = std::stoi(params[0]);
      } catch (...) {
        fail(errc::bad_params, "pk parameter must be a number");
      }
      if (*k <= 0) fail(errc::bad_params, "pk needs k >= 1");
    } else {
      no_params("pf");
    }
    Signature sig;
    sig.set_schema(AritySchema{"set", k});
    Presentation p = make_presentation(k ? "pk(" + std::to_string(*k) + ")" : "pf", std::move(sig),
                                       [k](const FlatTerm& t, const KeyLess& less) {
                                         return detail::set_normalizer("set", k, t, less);
                                       });
    p.hereditary_exact = true;
    p.orders_args = false;
    p.set_sugar = true;
    p.default_p = op_point("set0");
    p.enumerate_layer = detail::subset_enumerator("set", k);
    p.sample_merged = [k](std::mt19937_64& g) {
      int distinct = 1 + static_cast<int>(g() % (k ? std::min(*k, 3) : 3));
      int len = distinct + static_cast<int>(g() % 3);
      auto draw = [&] { return static_cast<int>(g() % distinct); };
      FlatTerm a{false, "", {}}, b{false, "", {}};
      for (int i = 0; i < distinct; ++i) {
        a.args.push_back(i);
        b.args.push_back(i);
      }
      for (int i = distinct; i < len; ++i) {
        a.args.push_back(draw());
        b.args.push_back(draw());
      }
      std::shuffle(a.args.begin(), a.args.end(), g);
      std::shuffle(b.args.begin(), b.args.end(), g);
      a.head = "set" + std::to_string(a.args.size());
      b.head = "set" + std::to_string(b.args.size());
      return std::pair{a, b};
    };
    return p;
  }
  if (name == "automata") {
    if (params.size() != 1) fail(errc::bad_params, "automata needs the input-set size");
    int m = 0;
    try {
      m = std::stoi(params[0]);
    } catch (...) {
      fail(errc::bad_params, "automata parameter must be a number");
    }
    if (m < 1) fail(errc::bad_params, "automata needs at least one input");
    Signature sig;
    sig.add_op("a", m);
    sig.add_op("b", m);
    Presentation p = from_signature(std::move(sig), "automata(" + std::to_string(m) + ")");
    p.enumerate_layer = detail::tuple_family_enumerator({"a", "b"}, m);
    return p;
  }
  if (name == "am23") {
    no_params("am23");
    Signature sig;
    sig.add_op("s1", 2);
    sig.add_op("s2", 2);
    sig.add_op("s3", 2);
    Presentation p = make_presentation("am23", std::move(sig),
                                       [](const FlatTerm& t, const KeyLess&) {
                                         if (t.args.size() == 2 && t.args[0] == t.args[1])
                                           return FlatTerm{false, "s1", t.args};
                                         return t;
                                       });
    p.hereditary_exact = true;
    p.enumerate_layer = [](const std::vector<int>& keys, std::size_t cap) {
      detail::check_cap(keys.size() * (1 + 3 * (keys.size() ? keys.size() - 1 : 0)), cap,
                        "am23 layer");
      std::vector<FlatTerm> out;
      for (int x : keys) out.push_back(FlatTerm{false, "s1", {x, x}});
      for (const char* op : {"s1", "s2", "s3"})
        for (int x : keys)
          for (int y : keys)
            if (x != y) out.push_back(FlatTerm{false, op, {x, y}});
      return out;
    };
    p.sample_merged = [](std::mt19937_64& g) {
      auto op = [&] { return "s" + std::to_string(1 + g() % 3); };
      return std::pair{FlatTerm{false, op(), {0, 0}}, FlatTerm{false, op(), {0, 0}}};
    };
    return p;
  }
  fail(errc::unknown_builtin, name);
}

// Randomized check of the asserted kernel condition: flat pairs the functor is
// declared to merge must have equal normal forms over distinct leaves.
inline bool kernel_spot_check(const Presentation& pres, std::mt19937_64& rng, int cases) {
  if (!pres.sample_merged) return true;
  for (int i = 0; i < cases; ++i) {
    auto [a, b] = pres.sample_merged(rng);
    auto build = [](const FlatTerm& t) {
      std::vector<FiniteTree> kids;
      for (int slot : t.args) kids.push_back(FiniteTree::var("k" + std::to_string(slot)));
      return FiniteTree::op(t.head, kids);
    };
    if (nf_tree(pres, build(a)) != nf_tree(pres, build(b))) return false;
  }
  return true;
}

}  // namespace corec
