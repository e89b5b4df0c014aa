#pragma once

#include "mlc/subst.hpp"
#include "mlc/syntax.hpp"
#include "mlc/typing.hpp"

#include <memory>

namespace mlc {

// ---------------------------------------------------------------------------
// Kripke-style weakenings
//
// A K-weakening g renames terms from its source stack to its destination
// stack: Eps is the identity on the initial stack; Q extends both topmost
// contexts by one binding; P adds a fresh newest binding on the destination
// side only; Ext opens a fresh empty source world that absorbs `offset`
// destination worlds. Nodes carry structure only; the stacks involved are
// threaded by the callers as StackShapes.
// ---------------------------------------------------------------------------

struct KWeakNode;
using KWeak = std::shared_ptr<const KWeakNode>;

struct KWeakNode {
  enum class Kind { Eps, Q, P, Ext };
  Kind kind;
  KWeak tail;
  std::size_t offset = 0; // Ext only
};

KWeak kweak_eps();
KWeak kweak_q(KWeak tail);
KWeak kweak_p(KWeak tail);
KWeak kweak_ext(KWeak tail, std::size_t offset);

KWeak kweak_id(const StackShape& shape);

/// compose(a, b) renames by a first and then by b.
KWeak kweak_compose(const KWeak& a, const KWeak& b);

/// Truncation and truncation offset, following the same algebra as the
/// K-substitution operations. n counts source worlds.
KWeak kweak_trunc(const KWeak& g, std::size_t n);
std::size_t kweak_trunc_offset(const KWeak& g, std::size_t n);

/// The action of a K-weakening on a term (a renaming).
TermPtr kweak_rename(const TermPtr& t, const KWeak& g);

/// The K-substitution a K-weakening encodes; kweak_rename agrees with
/// applying it.
KSub kweak_to_ksub(const KWeak& g);

bool kweak_eq(const KWeak& a, const KWeak& b);

// ---------------------------------------------------------------------------
// Semantic domain
// ---------------------------------------------------------------------------

struct Value;
using ValuePtr = std::shared_ptr<const Value>;

struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

/// Environments mirror the interpretation of context stacks: a spine of
/// (offset, locals) levels over a base level, each remembering the ambient
/// stack shape it lives at.
struct EnvNode {
  Env tail;              // null for the base level
  std::size_t offset = 0; // meaningful when tail is non-null
  std::vector<ValuePtr> locals; // oldest first
  StackShape shape;      // ambient stack of this level
};

Env env_top(std::vector<ValuePtr> locals, StackShape shape);
Env env_cons(std::size_t offset, Env tail, std::vector<ValuePtr> locals, StackShape shape);
Env env_extend(const Env& r, ValuePtr v);

Env env_trunc(const Env& r, std::size_t n);
std::size_t env_trunc_offset(const Env& r, std::size_t n);

/// Defunctionalized semantic values: reflected neutrals, closures and neutral
/// functions (the two presheaf-exponential inhabitants), and boxed values
/// living one world up.
struct Value {
  enum class Kind { Ne, Clos, NeFun, Box };
  Kind kind;
  TyPtr ty;          // Ne (the neutral's type), NeFun (an arrow type)
  TermPtr ne;        // Ne / NeFun neutral term
  StackShape shape;  // Ne / NeFun ambient stack
  Env env;           // Clos captured environment
  TermPtr body;      // Clos body
  ValuePtr inner;    // Box

  bool is_fun() const { return kind == Kind::Clos || kind == Kind::NeFun; }
};

ValuePtr vne(TyPtr ty, TermPtr ne, StackShape shape);
ValuePtr vclos(Env env, TermPtr body);
ValuePtr vnefun(TyPtr ty, TermPtr ne, StackShape shape);
ValuePtr vbox(ValuePtr inner);

/// Functorial action of the interpretations: dst is the shape the weakened
/// value (resp. environment) lives at.
ValuePtr weaken_value(const ValuePtr& v, const KWeak& g, const StackShape& dst);
Env weaken_env(const Env& r, const KWeak& g, const StackShape& dst);

// ---------------------------------------------------------------------------
// Evaluation, reification, reflection
// ---------------------------------------------------------------------------

ValuePtr eval(const TermPtr& t, const Env& r);

/// Applies a function value under a weakening; dst is the shape of the result.
ValuePtr apply_fun(const ValuePtr& f, const KWeak& g, const ValuePtr& a, const StackShape& dst);

ValuePtr reflect(const TyPtr& ty, const StackShape& shape, const TermPtr& neutral);
TermPtr reify(const TyPtr& ty, const StackShape& shape, const ValuePtr& v);

Env id_env(const CtxStack& g);

/// Evaluates a typed K-substitution to an environment: the resulting
/// environment interprets the codomain stack at the shape of `dom`.
Env env_of_ksub(const KSub& s, const CtxStack& dom);

/// Normalization by evaluation. Requires synth(sys, g, t) = ty and t in the
/// box/arrow fragment; throws TypeError otherwise.
TermPtr nbe(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t);

} // namespace mlc
