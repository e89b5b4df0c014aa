#pragma once

#include "mlc/syntax.hpp"

namespace mlc {

/// A Kripke-style substitution between context stacks: a base local
/// substitution for the deepest target context plus (offset, local
/// substitution) extensions listed bottom to top. The base carries no offset;
/// it absorbs whatever remains of the domain stack.
struct KSub {
  LocalSub base;
  std::vector<std::pair<std::size_t, LocalSub>> exts;

  /// Number of local substitutions, base included.
  std::size_t subs() const { return 1 + exts.size(); }
  const LocalSub& top() const { return exts.empty() ? base : exts.back().second; }
};

// ---------------------------------------------------------------------------
// Term-level operations
// ---------------------------------------------------------------------------

/// Shifts by `delta` the indices (>= cutoff) of variables living in the
/// topmost world of t. Worlds entered via box/unbox/cbox/cunbox are tracked so
/// that only occurrences referring back to the original topmost context move.
TermPtr shift_top(const TermPtr& t, long delta, std::size_t cutoff);

/// True if variable `ix` of the topmost context occurs free in t.
bool occurs_top(const TermPtr& t, std::size_t ix);

/// Capture-avoiding substitution of s for variable x of the topmost context.
TermPtr term_subst(const TermPtr& t, std::size_t x, const TermPtr& s);

/// Modal transformation t{n/l}: modal weakening for n >= 1, fusion for n = 0,
/// acting at position l of the context stack.
TermPtr mot_apply(const TermPtr& t, std::size_t n, std::size_t l);

// ---------------------------------------------------------------------------
// K-substitution algebra
// ---------------------------------------------------------------------------

/// Drops the n topmost local substitutions. Throws std::out_of_range unless
/// n < s.subs().
KSub trunc(const KSub& s, std::size_t n);

/// Sum of the n leading offsets. Same range requirement as trunc.
std::size_t trunc_offset(const KSub& s, std::size_t n);

/// Applies a K-substitution to a term.
TermPtr ksub_apply(const TermPtr& t, const KSub& s);

/// Applies a K-substitution to every term of a local substitution.
LocalSub local_sub_apply(const LocalSub& sub, const KSub& s);

/// Identity K-substitution for a stack (or for its shape alone).
KSub ksub_id(const CtxStack& g);
KSub ksub_id(const StackShape& shape);

/// Identity local substitution for a context of `size` bindings.
LocalSub local_id(std::size_t size);

/// compose(s, d) with s : G' => G'' and d : G => G' yields G => G''; applying
/// it equals applying s first and then d.
KSub compose(const KSub& s, const KSub& d);

/// The K-substitution encoding of the modal transformation {n/l} between the
/// given stacks: dom is the stack of t{n/l}, cod the stack of t. Throws
/// std::invalid_argument when the shapes are not related by {n/l}.
KSub mot_as_ksub(std::size_t n, std::size_t l, const CtxStack& dom, const CtxStack& cod);

/// Componentwise alpha-equality of K-substitutions.
bool ksub_alpha_eq(const KSub& a, const KSub& b);

// ---------------------------------------------------------------------------
// Semi-K-substitutions
// ---------------------------------------------------------------------------

/// Prepends the identity K-substitution of the ambient stack truncated by
/// semi_offset(s), turning s : G =>s D into a K-substitution
/// G => stack_truncate(G, semi_offset(s));D.
KSub semi_to_ksub(const SemiKSub& s, const CtxStack& ambient);
KSub semi_to_ksub(const SemiKSub& s, const StackShape& ambient);

/// Identity semi-K-substitution for a capture list: |d| identity local
/// substitutions, all offsets 1.
SemiKSub semi_id(const CtxList& d);

} // namespace mlc
