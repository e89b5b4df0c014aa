#pragma once

#include "mlc/syntax.hpp"

#include <stdexcept>
#include <string>

namespace mlc {

/// The modal system, fixing which unbox levels (and offsets inside
/// substitutions and weakenings) are admissible.
enum class System { K, T, K4, S4 };

/// K: {1}, T: {0,1}, K4: n >= 1, S4: all of N.
bool ul_allowed(System sys, std::size_t n);

const char* system_name(System sys);

/// Parses "k" | "t" | "k4" | "s4"; throws std::invalid_argument otherwise.
System system_from_name(const std::string& name);

struct Span {
  int line = 0;
  int col = 0;
};

struct TypeError : std::runtime_error {
  enum class Kind {
    UnboundVar,
    NotAFunction,
    NotABox,
    UlViolation,
    StackTooShort,
    SubstMismatch,
    TypeMismatch,
    MissingAnnotation,
    UnsupportedFragment,
  };

  Kind kind;
  Span span;
  std::size_t level = 0; // offending unbox level for UlViolation
  System sys = System::S4;

  TypeError(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
};

const char* type_error_kind_name(TypeError::Kind k);

/// Synthesizes the unique type of t in stack g under the given system.
/// Lambdas must carry annotations. Throws TypeError.
TyPtr synth(System sys, const CtxStack& g, const TermPtr& t);

/// Checks s : g =>s d. Offsets are validated against ul_allowed and the stack
/// length; every term is checked by synth against its binding. Throws
/// TypeError on failure.
void check_semisub(System sys, const CtxStack& g, const SemiKSub& s, const CtxList& d);

} // namespace mlc
