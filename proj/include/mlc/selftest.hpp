#pragma once

#include "mlc/nbe.hpp"
#include "mlc/oracle.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mlc {

struct SuiteResult {
  std::string suite;
  std::string system; // "-" for system-independent suites
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::string counterexample; // shrunk and pretty-printed; empty when green
  double seconds = 0.0;

  bool ok() const { return failed == 0; }
};

struct SelftestOptions {
  std::size_t n = 100;
  std::uint64_t seed = 42;
  std::size_t max_size = 25;
  std::size_t max_depth = 4;
  /// Test hook: perturbs the reduction oracle's output in the soundness
  /// suite, to demonstrate that mutations are caught.
  std::function<TermPtr(const TermPtr&)> perturb_oracle;
};

/// The three modal axioms against the four systems: 12 fixed cases.
SuiteResult run_axiom_matrix();

/// nbe agrees with the reduction-based normalizer on random well-typed terms.
SuiteResult run_soundness(System sys, const SelftestOptions& opt);

/// nbe output is a normal form, re-checks at the original type, and is a
/// fixed point of nbe.
SuiteResult run_normality(System sys, const SelftestOptions& opt);

/// Terms related by random beta/eta rewrites normalize to alpha-equal forms.
SuiteResult run_completeness(System sys, const SelftestOptions& opt);

/// Evaluation after weakening the environment equals weakening the evaluated
/// value, compared after reification.
SuiteResult run_naturality(System sys, const SelftestOptions& opt);

/// Identity and associativity of K-substitution composition, plus agreement
/// of t[s o d] with t[s][d] and typing preservation. Systems rotate.
SuiteResult run_category_laws(const SelftestOptions& opt);

/// Distributivity of addition and of composition for truncation and the
/// truncation offset, plus range preservation. Systems rotate.
SuiteResult run_distributivity(const SelftestOptions& opt);

/// mot_apply agrees with the K-substitution encoding of the same modal
/// transformation, covering fusion and weakening.
SuiteResult run_mot_agreement(const SelftestOptions& opt);

/// cunbox(cbox D t) s contracts to the K-substitution image of t and
/// type-checks at the original type.
SuiteResult run_contextual_beta(const SelftestOptions& opt);

/// All suites for the given systems, in a fixed order.
std::vector<SuiteResult> run_all_suites(const std::vector<System>& systems,
                                        const SelftestOptions& opt);

// ---------------------------------------------------------------------------
// Random instance builders shared with the test binaries
// ---------------------------------------------------------------------------

struct Instance {
  CtxStack stack;
  TyPtr goal;
  TermPtr term;
};

std::optional<Instance> gen_instance(std::uint64_t seed, System sys, bool allow_contextual,
                                     std::size_t max_size, std::size_t max_depth = 4);

struct TypedKSub {
  KSub sub;
  CtxStack dom;
  CtxStack cod;
};

/// Random typed K-substitution into `cod`; the domain stack is generated.
std::optional<TypedKSub> gen_ksub(Rng& rng, System sys, const CtxStack& cod);

struct ShapedKWeak {
  KWeak weak;
  StackShape src;
  StackShape dst;
};

/// Random K-weakening out of the given source shape.
ShapedKWeak gen_kweak(Rng& rng, System sys, const StackShape& src);

} // namespace mlc
