#pragma once

#include <stdexcept>
#include <string>

namespace corec {

// Failure codes shared across the library. The CLI prints the code name on a
// single diagnostic line, so names are stable API.
enum class errc {
  unknown_op,
  arity_mismatch,
  syntax_error,
  duplicate_op,
  infinite_tree,
  not_a_chain,
  not_rational,
  not_exact,
  depth_required,
  mixed_presentations,
  undecided,
  unknown_builtin,
  bad_params,
  capacity_exceeded,
  no_enumerator,
  cap_exceeded,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::unknown_op: return "UnknownOp";
    case errc::arity_mismatch: return "ArityMismatch";
    case errc::syntax_error: return "SyntaxError";
    case errc::duplicate_op: return "DuplicateOp";
    case errc::infinite_tree: return "InfiniteTree";
    case errc::not_a_chain: return "NotAChain";
    case errc::not_rational: return "NotRational";
    case errc::not_exact: return "NotExact";
    case errc::depth_required: return "DepthRequired";
    case errc::mixed_presentations: return "MixedPresentations";
    case errc::undecided: return "Undecided";
    case errc::unknown_builtin: return "UnknownBuiltin";
    case errc::bad_params: return "BadParams";
    case errc::capacity_exceeded: return "CapacityExceeded";
    case errc::no_enumerator: return "NoEnumerator";
    case errc::cap_exceeded: return "CapExceeded";
  }
  return "Error";
}

class error : public std::runtime_error {
 public:
  error(errc c, const std::string& msg)
      : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

}  // namespace corec
