#pragma once

#include "mlc/rng.hpp"
#include "mlc/syntax.hpp"
#include "mlc/typing.hpp"

#include <optional>
#include <utility>

namespace mlc {

/// One leftmost-outermost beta step anywhere in the term, or nullopt when the
/// term is beta-normal. Covers the lambda, box and contextual redexes.
std::optional<TermPtr> beta_step(const CtxStack& g, const TermPtr& t);

/// True if the term contains any beta redex.
bool has_beta_redex(const TermPtr& t);

/// Reduces to beta-normal form by iterated leftmost-outermost steps. Throws
/// std::runtime_error after 10^6 steps, which signals a reducer bug rather
/// than an expected outcome.
TermPtr beta_normalize(System sys, const CtxStack& g, const TermPtr& t);

/// Type-directed eta-expansion of a beta-normal term into its eta-long form.
/// Contextual types are a fragment boundary and stay unexpanded.
TermPtr eta_expand(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t);

/// The reduction-based normalizer: eta_expand after beta_normalize. The
/// independent counterweight to the evaluation-based engine.
TermPtr oracle_normalize(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t);

// ---------------------------------------------------------------------------
// Random well-typed terms
// ---------------------------------------------------------------------------

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_size = 25;
  System system = System::S4;
  CtxStack stack;
  TyPtr goal;
  bool allow_contextual = false;
};

/// Type-directed generation of a term with synth(system, stack, t) = goal.
/// Deterministic in the seed; nullopt when the goal resists generation at
/// this size (the caller skips the instance).
std::optional<TermPtr> gen_term(const GenConfig& cfg);

/// A pair of terms related by `steps` random applications of the beta/eta
/// rules (forward or backward, at any position). Both components type-check
/// at the same type.
std::optional<std::pair<TermPtr, TermPtr>> gen_equiv_pair(const GenConfig& cfg,
                                                          std::size_t steps);

/// Random stack for the property corpora: depth 1..max_depth, every context
/// populated from a small type palette that keeps goals reachable.
CtxStack gen_stack(Rng& rng, std::size_t max_depth);

/// Every subterm together with the stack and type it has there. Used for
/// shrinking counterexamples.
struct TypedSite {
  CtxStack stack;
  TyPtr ty;
  TermPtr node;
};
std::vector<TypedSite> typed_subterms(System sys, const CtxStack& g, const TermPtr& t);

/// Random goal type from the palette; contextual goals only when allowed.
TyPtr gen_goal(Rng& rng, bool allow_contextual);

} // namespace mlc
