#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "error.hpp"
#include "signature.hpp"

namespace corec {

class FiniteTree;

namespace detail {

struct TreeNode {
  bool is_var;
  std::string label;
  std::vector<int> kids;
  int height;  // edges on the longest root path
};

// Global hash-consing pool. Ids are handed out only after the node is fully
// inserted, so readers holding an id never race the writer; insertion is
// serialized by the mutex and the deque keeps node addresses stable.
class TreePool {
 public:
  static TreePool& instance() {
    static TreePool pool;
    return pool;
  }

  int make(bool is_var, const std::string& label, const std::vector<int>& kids) {
    const std::string key = node_key(is_var, label, kids);
    {
      std::shared_lock lock(mu_);
      auto it = index_.find(key);
      if (it != index_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int h = 0;
    for (int k : kids) h = std::max(h, nodes_[k].height + 1);
    nodes_.push_back(TreeNode{is_var, label, kids, h});
    int id = static_cast<int>(nodes_.size()) - 1;
    index_.emplace(key, id);
    return id;
  }

  const TreeNode& node(int id) const { return nodes_[id]; }

 private:
  static std::string node_key(bool is_var, const std::string& label, const std::vector<int>& kids) {
    std::string key(is_var ? "v" : "o");
    key += label;
    for (int k : kids) {
      key += ',';
      key += std::to_string(k);
    }
    return key;
  }

  mutable std::shared_mutex mu_;
  std::deque<TreeNode> nodes_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace detail

// An interned, immutable finite tree over ops and variables. Content
// determines identity, so equality is id equality.
class FiniteTree {
 public:
  explicit FiniteTree(int id) : id_(id) {}

  static FiniteTree var(const std::string& name) {
    return FiniteTree(detail::TreePool::instance().make(true, name, {}));
  }
  static FiniteTree op(const std::string& name, const std::vector<FiniteTree>& kids) {
    std::vector<int> ids;
    ids.reserve(kids.size());
    for (const FiniteTree& k : kids) ids.push_back(k.id_);
    return FiniteTree(detail::TreePool::instance().make(false, name, ids));
  }
  static FiniteTree op_ids(const std::string& name, const std::vector<int>& kid_ids) {
    return FiniteTree(detail::TreePool::instance().make(false, name, kid_ids));
  }

  int id() const { return id_; }
  bool is_var() const { return node().is_var; }
  const std::string& label() const { return node().label; }
  int arity() const { return static_cast<int>(node().kids.size()); }
  FiniteTree child(int i) const { return FiniteTree(node().kids[i]); }
  const std::vector<int>& child_ids() const { return node().kids; }
  int height() const { return node().height; }

  friend bool operator==(FiniteTree a, FiniteTree b) { return a.id_ == b.id_; }
  friend bool operator!=(FiniteTree a, FiniteTree b) { return a.id_ != b.id_; }

 private:
  const detail::TreeNode& node() const { return detail::TreePool::instance().node(id_); }
  int id_;
};

// Structural total order, determined by content only (never by interning
// history): variables before ops, variables by name, ops by (arity, name),
// then children lexicographically.
inline int tree_compare(int a, int b) {
  if (a == b) return 0;
  const auto& pool = detail::TreePool::instance();
  const auto& na = pool.node(a);
  const auto& nb = pool.node(b);
  if (na.is_var != nb.is_var) return na.is_var ? -1 : 1;
  if (na.is_var) return na.label.compare(nb.label) < 0 ? -1 : 1;
  if (na.kids.size() != nb.kids.size()) return na.kids.size() < nb.kids.size() ? -1 : 1;
  if (int c = na.label.compare(nb.label); c != 0) return c < 0 ? -1 : 1;
  for (size_t i = 0; i < na.kids.size(); ++i)
    if (int c = tree_compare(na.kids[i], nb.kids[i]); c != 0) return c;
  return 0;
}

inline int tree_compare(FiniteTree a, FiniteTree b) { return tree_compare(a.id(), b.id()); }

struct TreeLess {
  bool operator()(FiniteTree a, FiniteTree b) const { return tree_compare(a, b) < 0; }
  bool operator()(int a, int b) const { return tree_compare(a, b) < 0; }
};

// A pointed finite state system presenting a (possibly infinite) regular tree.
// Every state is reachable from the root; the presented tree is infinite iff a
// cycle is reachable.
struct RationalState {
  bool is_var = false;
  std::string label;
  std::vector<int> succ;
};

class RationalTree {
 public:
  RationalTree(std::vector<RationalState> states, int root) {
    if (states.empty() || root < 0 || root >= static_cast<int>(states.size()))
      fail(errc::bad_params, "rational tree needs a valid root state");
    for (const auto& st : states) {
      if (st.is_var && !st.succ.empty()) fail(errc::arity_mismatch, "variable state with successors");
      for (int s : st.succ)
        if (s < 0 || s >= static_cast<int>(states.size()))
          fail(errc::bad_params, "dangling successor");
    }
    // garbage-collect unreachable states
    std::vector<int> remap(states.size(), -1);
    std::vector<int> order;
    order.push_back(root);
    remap[root] = 0;
    for (size_t i = 0; i < order.size(); ++i)
      for (int s : states[order[i]].succ)
        if (remap[s] < 0) {
          remap[s] = static_cast<int>(order.size());
          order.push_back(s);
        }
    states_.resize(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
      RationalState st = states[order[i]];
      for (int& s : st.succ) s = remap[s];
      states_[i] = std::move(st);
    }
    root_ = 0;
  }

  static RationalTree leaf(bool is_var, const std::string& name) {
    return RationalTree({RationalState{is_var, name, {}}}, 0);
  }

  int root() const { return root_; }
  int num_states() const { return static_cast<int>(states_.size()); }
  const RationalState& state(int i) const { return states_[i]; }
  const std::vector<RationalState>& states() const { return states_; }

  bool has_cycle() const {
    std::vector<int> color(states_.size(), 0);
    return cycle_from(root_, color);
  }

  friend bool operator==(const RationalTree& a, const RationalTree& b) {
    if (a.root_ != b.root_ || a.states_.size() != b.states_.size()) return false;
    for (size_t i = 0; i < a.states_.size(); ++i) {
      const auto& x = a.states_[i];
      const auto& y = b.states_[i];
      if (x.is_var != y.is_var || x.label != y.label || x.succ != y.succ) return false;
    }
    return true;
  }

 private:
  bool cycle_from(int s, std::vector<int>& color) const {
    color[s] = 1;
    for (int t : states_[s].succ) {
      if (color[t] == 1) return true;
      if (color[t] == 0 && cycle_from(t, color)) return true;
    }
    color[s] = 2;
    return false;
  }

  std::vector<RationalState> states_;
  int root_ = 0;
};

// The same tree as an inductive value; fails on a reachable cycle.
inline FiniteTree to_finite(const RationalTree& r) {
  std::vector<int> memo(r.num_states(), -1);
  std::vector<int> color(r.num_states(), 0);
  auto rec = [&](auto&& self, int s) -> int {
    if (memo[s] >= 0) return memo[s];
    if (color[s] == 1) fail(errc::infinite_tree, "cycle reachable from root");
    color[s] = 1;
    const RationalState& st = r.state(s);
    int id;
    if (st.is_var) {
      id = FiniteTree::var(st.label).id();
    } else {
      std::vector<int> kids;
      kids.reserve(st.succ.size());
      for (int t : st.succ) kids.push_back(self(self, t));
      id = FiniteTree::op_ids(st.label, kids).id();
    }
    color[s] = 2;
    memo[s] = id;
    return id;
  };
  return FiniteTree(rec(rec, r.root()));
}

// A finite tree viewed as a state system: one state per distinct subtree.
inline RationalTree rational_of(FiniteTree t) {
  std::map<int, int> index;  // tree id -> state
  std::vector<RationalState> states;
  auto rec = [&](auto&& self, FiniteTree u) -> int {
    auto it = index.find(u.id());
    if (it != index.end()) return it->second;
    int slot = static_cast<int>(states.size());
    index.emplace(u.id(), slot);
    states.push_back(RationalState{u.is_var(), u.label(), {}});
    std::vector<int> succ;
    for (int i = 0; i < u.arity(); ++i) succ.push_back(self(self, u.child(i)));
    states[slot].succ = std::move(succ);
    return slot;
  };
  int root = rec(rec, t);
  return RationalTree(std::move(states), root);
}

inline void validate_rational(const Signature& sig, const RationalTree& r) {
  for (const auto& st : r.states()) {
    FlatTerm layer{st.is_var, st.label, std::vector<int>(st.succ.begin(), st.succ.end())};
    validate_flat(sig, layer);
  }
}

// Raw bisimilarity of state systems (same unfolding), by partition refinement
// on the disjoint union. Labels and argument positions are compared as given.
inline bool bisimilar(const RationalTree& a, const RationalTree& b) {
  const int na = a.num_states();
  const int n = na + b.num_states();
  auto state = [&](int i) -> const RationalState& {
    return i < na ? a.state(i) : b.state(i - na);
  };
  auto succ_of = [&](int i, int j) {
    const auto& st = state(i);
    return i < na ? st.succ[j] : st.succ[j] + na;
  };
  std::vector<int> block(n, 0);
  int blocks = 1;
  for (;;) {
    using Key = std::tuple<bool, std::string, std::vector<int>>;
    std::map<Key, int> key_ids;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      const auto& st = state(i);
      std::vector<int> ks;
      ks.push_back(block[i]);
      for (size_t j = 0; j < st.succ.size(); ++j) ks.push_back(block[succ_of(i, static_cast<int>(j))]);
      Key key{st.is_var, st.label, std::move(ks)};
      auto [it, _] = key_ids.emplace(std::move(key), static_cast<int>(key_ids.size()));
      next[i] = it->second;
    }
    int nblocks = static_cast<int>(key_ids.size());
    block = std::move(next);
    if (nblocks == blocks) break;
    blocks = nblocks;
  }
  return block[a.root()] == block[b.root() + na];
}

// A finite or rational tree, for operations that accept either.
class AnyTree {
 public:
  AnyTree(FiniteTree t) : v_(t) {}
  AnyTree(RationalTree r) : v_(std::move(r)) {}

  bool is_finite() const { return std::holds_alternative<FiniteTree>(v_); }
  FiniteTree finite() const { return std::get<FiniteTree>(v_); }
  const RationalTree& rational() const { return std::get<RationalTree>(v_); }

  RationalTree rational_view() const {
    return is_finite() ? rational_of(finite()) : rational();
  }

  // Finite when acyclic, whichever representation was supplied.
  bool presents_finite() const { return is_finite() || !rational().has_cycle(); }
  FiniteTree as_finite() const { return is_finite() ? finite() : to_finite(rational()); }

 private:
  std::variant<FiniteTree, RationalTree> v_;
};

// Syntactic tree equality: id equality for finite values, bisimilarity for
// state systems.
inline bool tree_equal(const AnyTree& a, const AnyTree& b) {
  if (a.is_finite() && b.is_finite()) return a.finite() == b.finite();
  if (a.presents_finite() != b.presents_finite()) return false;
  if (a.presents_finite()) return a.as_finite() == b.as_finite();
  return bisimilar(a.rational(), b.rational());
}

}  // namespace corec
