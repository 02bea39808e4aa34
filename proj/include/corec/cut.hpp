#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "tree.hpp"

namespace corec {

// The chosen leaf used to relabel cut frontiers: a nullary op or a variable.
struct CutPoint {
  bool is_var = true;
  std::string name;

  FiniteTree leaf() const { return is_var ? FiniteTree::var(name) : FiniteTree::op(name, {}); }

  friend bool operator==(const CutPoint& a, const CutPoint& b) {
    return a.is_var == b.is_var && a.name == b.name;
  }
};

inline CutPoint var_point(const std::string& name) { return CutPoint{true, name}; }
inline CutPoint op_point(const std::string& name) { return CutPoint{false, name}; }

// cut(t, n, p): keeps depths 0..n-1 intact, replaces every node at depth
// exactly n by the p-leaf. Trees of height < n come back unchanged.
inline FiniteTree cut(FiniteTree t, int n, const CutPoint& p) {
  const int pleaf = p.leaf().id();
  std::map<std::pair<int, int>, int> memo;
  auto rec = [&](auto&& self, int id, int m) -> int {
    FiniteTree u(id);
    if (m == 0) return pleaf;
    if (u.height() < m) return id;  // nothing at depth m below here
    auto key = std::make_pair(id, m);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<int> kids;
    kids.reserve(u.arity());
    for (int i = 0; i < u.arity(); ++i) kids.push_back(self(self, u.child_ids()[i], m - 1));
    int out = FiniteTree::op_ids(u.label(), kids).id();
    memo.emplace(key, out);
    return out;
  };
  if (n < 0) fail(errc::bad_params, "negative cut depth");
  return FiniteTree(rec(rec, t.id(), n));
}

inline FiniteTree cut(const RationalTree& r, int n, const CutPoint& p) {
  if (n < 0) fail(errc::bad_params, "negative cut depth");
  const int pleaf = p.leaf().id();
  std::map<std::pair<int, int>, int> memo;
  auto rec = [&](auto&& self, int s, int m) -> int {
    if (m == 0) return pleaf;
    auto key = std::make_pair(s, m);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const RationalState& st = r.state(s);
    int out;
    if (st.is_var) {
      out = FiniteTree::var(st.label).id();
    } else {
      std::vector<int> kids;
      kids.reserve(st.succ.size());
      for (int t : st.succ) kids.push_back(self(self, t, m - 1));
      out = FiniteTree::op_ids(st.label, kids).id();
    }
    memo.emplace(key, out);
    return out;
  };
  return FiniteTree(rec(rec, r.root(), n));
}

inline FiniteTree cut(const AnyTree& t, int n, const CutPoint& p) {
  return t.is_finite() ? cut(t.finite(), n, p) : cut(t.rational(), n, p);
}

// Order by cutting on raw trees: s <= s' iff s = s' or s is (finite and) some
// cutting of s'. When s differs from s', the only candidate level is
// height(s); we scan up to height(s)+1 anyway, which is still exact.
inline bool leq_cut(const AnyTree& s, const AnyTree& sp, const CutPoint& p) {
  if (tree_equal(s, sp)) return true;
  if (!s.presents_finite()) return false;
  FiniteTree fs = s.as_finite();
  for (int n = 0; n <= fs.height() + 1; ++n)
    if (cut(sp, n, p) == fs) return true;
  return false;
}

// Optional hook mapping trees to canonical representatives before comparing;
// identity when absent. The solver passes a presentation's normal form here so
// chains of canonical trees can be rejoined.
using Canon = std::function<FiniteTree(FiniteTree)>;

inline FiniteTree apply_canon(const Canon& canon, FiniteTree t) { return canon ? canon(t) : t; }

namespace detail {

// Node occurrences of a tree, deduplicated as (subtree, depth) pairs.
inline std::vector<std::pair<int, int>> positions(FiniteTree t) {
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> out;
  std::vector<std::pair<int, int>> stack{{t.id(), 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    if (!seen.insert({id, d}).second) continue;
    out.push_back({id, d});
    FiniteTree u(id);
    for (int i = 0; i < u.arity(); ++i) stack.push_back({u.child_ids()[i], d + 1});
  }
  return out;
}

inline int count_distinct_subtrees(const std::vector<FiniteTree>& chain) {
  std::set<int> ids;
  for (FiniteTree t : chain) {
    std::vector<int> stack{t.id()};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (!ids.insert(id).second) continue;
      for (int k : FiniteTree(id).child_ids()) stack.push_back(k);
    }
  }
  return static_cast<int>(ids.size());
}

}  // namespace detail

// Join of an increasing chain of finite trees. A stabilized chain returns its
// last element; a strictly increasing one is folded into a state system by
// searching for an eventually periodic closure whose cuttings reproduce every
// supplied level. The search identifies positions of the deepest tree whose
// observed futures agree to depth k, for k = 1, 2, ...; candidates are checked
// against the whole chain before being returned, so the result is always
// observation-consistent. Reconstruction is complete once the chain is
// observed at least twice as deep as the minimal system needs states.
inline RationalTree join_chain(const std::vector<FiniteTree>& chain, const CutPoint& p,
                               const Canon& canon = {}, int state_bound = -1) {
  if (chain.empty()) fail(errc::not_a_chain, "empty chain");
  std::vector<FiniteTree> cs;
  cs.reserve(chain.size());
  for (FiniteTree t : chain) cs.push_back(apply_canon(canon, t));
  for (size_t i = 0; i + 1 < cs.size(); ++i) {
    if (cs[i] == cs[i + 1]) continue;
    if (apply_canon(canon, cut(cs[i + 1], cs[i].height(), p)) != cs[i])
      fail(errc::not_a_chain,
           "element " + std::to_string(i) + " is not a cutting of its successor");
  }
  if (cs.size() == 1 || cs[cs.size() - 2] == cs.back()) return rational_of(chain.back());

  const FiniteTree t = cs.back();
  const int h = t.height();
  const auto pos = detail::positions(t);
  if (state_bound < 0) state_bound = detail::count_distinct_subtrees(cs);

  auto consistent = [&](const RationalTree& cand) {
    for (size_t i = 0; i < cs.size(); ++i)
      if (apply_canon(canon, cut(cand, cs[i].height(), p)) != cs[i]) return false;
    return true;
  };

  for (int k = 1; k <= std::min(state_bound, h - 1); ++k) {
    // Group deep positions (those observed to depth >= k) by their depth-k
    // observation; each group is a candidate state.
    std::map<int, std::vector<std::pair<int, int>>, TreeLess> classes;
    for (auto [id, d] : pos)
      if (d <= h - k) classes[apply_canon(canon, cut(FiniteTree(id), k, p)).id()].push_back({id, d});

    // Transitions are read off a representative seen one level deeper than k,
    // so its children are all still observable.
    bool readable = true;
    std::map<int, int> state_of;  // class key -> state index
    std::vector<std::pair<int, int>> rep;
    for (auto& [key, occ] : classes) {
      auto best = occ.front();
      for (auto& o : occ)
        if (o.second < best.second || (o.second == best.second && tree_compare(o.first, best.first) < 0))
          best = o;
      if (best.second > h - k - 1) {
        readable = false;
        break;
      }
      state_of.emplace(key, static_cast<int>(rep.size()));
      rep.push_back(best);
    }
    if (!readable) continue;

    std::vector<RationalState> states;
    bool ok = true;
    for (auto [id, d] : rep) {
      FiniteTree u(id);
      RationalState st;
      st.is_var = u.is_var();
      st.label = u.label();
      for (int i = 0; i < u.arity() && ok; ++i) {
        int key = apply_canon(canon, cut(u.child(i), k, p)).id();
        auto it = state_of.find(key);
        if (it == state_of.end()) ok = false;
        else st.succ.push_back(it->second);
      }
      states.push_back(std::move(st));
      if (!ok) break;
    }
    if (!ok) continue;
    int rootkey = apply_canon(canon, cut(t, k, p)).id();
    RationalTree cand(std::move(states), state_of.at(rootkey));
    if (consistent(cand)) return cand;
  }
  fail(errc::not_rational, "no periodic closure within state bound " + std::to_string(state_bound));
}

// Generator form: the chain (cut(r, n, p))_n already has r as its join; the
// first `levels` cuttings are checked for cut-compatibility before returning.
inline RationalTree join_chain(const RationalTree& r, int levels, const CutPoint& p,
                               const Canon& canon = {}) {
  for (int n = 0; n < levels; ++n) {
    FiniteTree deeper = cut(r, n + 1, p);
    if (apply_canon(canon, cut(deeper, n, p)) != apply_canon(canon, cut(r, n, p)))
      fail(errc::not_a_chain, "generator cuttings disagree at level " + std::to_string(n));
  }
  return r;
}

}  // namespace corec
