#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mlc {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

struct Ty;
using TyPtr = std::shared_ptr<const Ty>;

/// One local typing context (one world). Bindings are listed oldest first;
/// variable index 0 refers to the newest binding.
struct LocalCtx {
  std::vector<std::pair<std::string, TyPtr>> bindings;

  std::size_t size() const { return bindings.size(); }
};

/// Possibly-empty list of contexts, as captured by a contextual type.
using CtxList = std::vector<LocalCtx>;

/// Non-empty stack of local contexts. contexts.front() is the deepest world,
/// contexts.back() the current one.
struct CtxStack {
  std::vector<LocalCtx> contexts;
};

struct Ty {
  enum class Kind { Base, Box, Arr, Ctx };
  Kind kind;
  TyPtr a;         // Box body; Arr domain; Ctx body
  TyPtr b;         // Arr codomain
  CtxList capture; // Ctx only
};

TyPtr ty_base();
TyPtr ty_box(TyPtr body);
TyPtr ty_arr(TyPtr dom, TyPtr cod);
TyPtr ty_ctx(CtxList capture, TyPtr body);

/// Structural type equality; binder names inside captured contexts are ignored.
bool ty_eq(const TyPtr& s, const TyPtr& t);

/// True if the type mentions a contextual type anywhere.
bool ty_is_contextual(const TyPtr& t);

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// A local substitution: one term per binding of the target context,
/// listed oldest first (mirroring LocalCtx).
struct LocalSub {
  std::vector<TermPtr> terms;

  std::size_t size() const { return terms.size(); }
};

/// A semi-K-substitution: a possibly-empty sequence of (offset, local
/// substitution) extensions, listed bottom (deepest) to top.
struct SemiKSub {
  std::vector<std::pair<std::size_t, LocalSub>> exts;

  bool empty() const { return exts.empty(); }
};

/// Sum of all offsets of a semi-K-substitution.
std::size_t semi_offset(const SemiKSub& s);

/// Nameless core terms. Var indices count from the newest binding of the
/// topmost context only; surface names live in the parser.
struct Term {
  enum class Kind { Var, Box, Unbox, Lam, App, CBox, CUnbox };
  Kind kind;
  std::size_t ix = 0; // Var index / Unbox level
  TermPtr a;          // Box/Unbox/Lam/CBox/CUnbox body; App function
  TermPtr b;          // App argument
  TyPtr ann;          // Lam annotation (may be null)
  CtxList capture;    // CBox
  SemiKSub sub;       // CUnbox
};

TermPtr tvar(std::size_t ix);
TermPtr tbox(TermPtr body);
TermPtr tunbox(std::size_t level, TermPtr body);
TermPtr tlam(TyPtr ann, TermPtr body); // ann may be null
TermPtr tapp(TermPtr fn, TermPtr arg);
TermPtr tcbox(CtxList capture, TermPtr body);
TermPtr tcunbox(TermPtr body, SemiKSub sub);

/// Number of term constructors, used for generator budgets and shrinking.
std::size_t term_size(const TermPtr& t);

/// True if the term mentions cbox/cunbox anywhere (including inside
/// semi-K-substitutions).
bool term_is_contextual(const TermPtr& t);

// Normal/neutral classification of the box/arrow fragment. Contextual
// constructors are outside the grammar and report false.
bool is_neutral(const TermPtr& t);
bool is_normal(const TermPtr& t);

/// Alpha-equivalence: structural identity of the nameless representation.
/// Lambda annotations are checking hints and are not compared.
bool alpha_eq(const TermPtr& t, const TermPtr& u);

// ---------------------------------------------------------------------------
// Context stacks
// ---------------------------------------------------------------------------

std::size_t stack_len(const CtxStack& g);

/// Drops the n topmost contexts. Throws std::out_of_range unless n < |g|.
CtxStack stack_truncate(const CtxStack& g, std::size_t n);

/// g with a fresh context pushed on top.
CtxStack stack_push(const CtxStack& g, LocalCtx ctx = {});

/// g with all contexts of d appended on top (the stack for a cbox body).
CtxStack stack_append(const CtxStack& g, const CtxList& d);

/// g with (name : ty) appended to the topmost context.
CtxStack stack_bind(const CtxStack& g, std::string name, TyPtr ty);

/// True if any binding anywhere in the stack has a contextual type.
bool stack_is_contextual(const CtxStack& g);

/// Context lengths of a stack, types erased. Non-empty for valid stacks.
struct StackShape {
  std::vector<std::size_t> sizes;

  std::size_t depth() const { return sizes.size(); }
  bool operator==(const StackShape& o) const { return sizes == o.sizes; }
};

StackShape shape_of(const CtxStack& g);
StackShape shape_truncate(const StackShape& s, std::size_t n);
StackShape shape_push(const StackShape& s, std::size_t size = 0);

} // namespace mlc
