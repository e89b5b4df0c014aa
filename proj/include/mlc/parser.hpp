#pragma once

#include "mlc/syntax.hpp"
#include "mlc/typing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlc {

struct ParseError : std::runtime_error {
  enum class Kind { Lex, Parse, Scope };
  Kind kind;
  Span span;

  ParseError(Kind k, Span s, const std::string& msg)
      : std::runtime_error(msg), kind(k), span(s) {}
};

const char* parse_error_kind_name(ParseError::Kind k);

struct Declaration {
  std::string name;
  CtxStack stack;
  TermPtr term;
  TyPtr expected; // may be null
  Span span;
};

struct SourceFile {
  System system = System::S4;
  std::vector<Declaration> declarations;
};

/// Parses a term closed except for the names bound by `scope`.
TermPtr parse_term(const std::string& src, const CtxStack& scope);
TermPtr parse_term(const std::string& src);

TyPtr parse_type(const std::string& src);

/// Parses a whole source file: a `system` header followed by `def`
/// declarations. `--` starts a line comment.
SourceFile parse_file(const std::string& src);

/// Pretty-printers. Binders get canonical fresh names (x0, x1, ...); free
/// variables print with the names declared in `scope`. The output re-parses
/// to an alpha-equal term under the same scope.
std::string pretty(const TermPtr& t, const CtxStack& scope);
std::string pretty(const TermPtr& t);
std::string pretty_ty(const TyPtr& ty);
std::string pretty_stack(const CtxStack& g);

} // namespace mlc
