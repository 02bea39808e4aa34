#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cut.hpp"
#include "error.hpp"
#include "presentation.hpp"
#include "tree.hpp"

namespace corec {

// A finite stage of the initial-algebra or terminal-coalgebra chain,
// materialized as canonical trees. Initial stage n holds the canonical trees
// of height < n without variables; terminal stage n holds the canonical trees
// of height <= n whose depth-n leaves are all the p-leaf.
struct StageSet {
  enum class Kind { initial, terminal };
  Kind kind;
  int n;
  const Presentation* pres;
  std::optional<CutPoint> p;              // terminal kind only
  std::vector<FiniteTree> elements;       // deduplicated, in structural order

  std::size_t size() const { return elements.size(); }
};

namespace detail {

inline std::vector<FiniteTree> next_layer(const Presentation& pres,
                                          const std::vector<FiniteTree>& stage, std::size_t cap) {
  std::vector<int> keys;
  keys.reserve(stage.size());
  for (FiniteTree t : stage) keys.push_back(t.id());
  std::vector<FlatTerm> shapes = pres.enumerate_layer(keys, cap);
  std::set<FiniteTree, TreeLess> out;
  for (const FlatTerm& s : shapes) out.insert(FiniteTree::op_ids(s.head, s.args));
  if (out.size() > cap) fail(errc::cap_exceeded, "stage exceeds cap");
  return {out.begin(), out.end()};
}

}  // namespace detail

// F^n 0 for the presented functor: stage 0 is empty, stage n+1 is all
// canonical flat layers over stage n read as trees.
inline StageSet enumerate_initial_stage(const Presentation& pres, int n, std::size_t cap = 100000) {
  if (!pres.enumerate_layer) fail(errc::no_enumerator, pres.name);
  if (n < 0) fail(errc::bad_params, "negative stage");
  std::vector<FiniteTree> stage;
  for (int i = 0; i < n; ++i) stage = detail::next_layer(pres, stage, cap);
  return StageSet{StageSet::Kind::initial, n, &pres, std::nullopt, std::move(stage)};
}

// F^n 1 with 1 = {p}: stage 0 is the p-leaf alone, stage n+1 is all canonical
// flat layers over stage n. Nullary symbols terminate branches early, so
// shallower trees reappear at every later stage.
inline StageSet enumerate_terminal_stage(const Presentation& pres, int n, const CutPoint& p,
                                         std::size_t cap = 100000) {
  if (!pres.enumerate_layer) fail(errc::no_enumerator, pres.name);
  if (n < 0) fail(errc::bad_params, "negative stage");
  if (!p.is_var && (!pres.sig.has_op(p.name) || pres.sig.arity(p.name) != 0))
    fail(errc::bad_params, "cut point " + p.name + " is not a nullary op");
  std::vector<FiniteTree> stage{p.leaf()};
  for (int i = 0; i < n; ++i) stage = detail::next_layer(pres, stage, cap);
  return StageSet{StageSet::Kind::terminal, n, &pres, p, std::move(stage)};
}

}  // namespace corec
