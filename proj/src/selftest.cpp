#include "mlc/selftest.hpp"

#include "mlc/parser.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace mlc {

namespace {

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> allowed_offsets(System sys) {
  std::vector<std::size_t> offs;
  for (std::size_t n = 0; n <= 2; ++n)
    if (ul_allowed(sys, n)) offs.push_back(n);
  return offs;
}

std::string format_instance(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
  std::ostringstream os;
  os << "system " << system_name(sys) << ", stack [" << pretty_stack(g) << " |- ], type "
     << pretty_ty(ty) << "\n  term: " << pretty(t, g);
  return os.str();
}

/// Greedy shrink: move to the smallest typed subterm that still fails.
template <typename Passes>
void shrink_instance(System sys, CtxStack& g, TyPtr& ty, TermPtr& t, Passes&& passes) {
  for (int guard = 0; guard < 40; ++guard) {
    auto sites = typed_subterms(sys, g, t);
    std::sort(sites.begin(), sites.end(), [](const TypedSite& a, const TypedSite& b) {
      return term_size(a.node) < term_size(b.node);
    });
    bool improved = false;
    for (const auto& s : sites) {
      if (term_size(s.node) >= term_size(t)) break;
      bool pass = true;
      try {
        pass = passes(s.stack, s.ty, s.node);
      } catch (...) {
        continue;
      }
      if (!pass) {
        g = s.stack;
        ty = s.ty;
        t = s.node;
        improved = true;
        break;
      }
    }
    if (!improved) return;
  }
}

/// Runs `check` on derived seeds until opt.n instances were checked; check
/// returns nullopt to skip an instance (generator gave up).
template <typename Check>
SuiteResult run_loop(std::string suite, std::string system, const SelftestOptions& opt,
                     Check&& check) {
  SuiteResult r;
  r.suite = std::move(suite);
  r.system = std::move(system);
  auto t0 = Clock::now();
  std::size_t maxAttempts = opt.n * 30 + 100;
  for (std::uint64_t i = 0; r.checked < opt.n && i < maxAttempts; ++i) {
    std::string cex;
    std::optional<bool> outcome = check(mix_seed(opt.seed, i), cex);
    if (!outcome) continue;
    ++r.checked;
    if (!*outcome) {
      ++r.failed;
      if (r.counterexample.empty()) r.counterexample = cex;
    }
  }
  r.seconds = secs_since(t0);
  return r;
}

LocalCtx aux_ctx(Rng& rng, int& counter) {
  LocalCtx c;
  c.bindings.emplace_back("w" + std::to_string(counter++), ty_box(ty_base()));
  if (rng.chance(50)) c.bindings.emplace_back("w" + std::to_string(counter++), ty_base());
  return c;
}

CtxStack stack_of_depth2(Rng& rng, std::size_t max_depth) {
  CtxStack g = gen_stack(rng, max_depth);
  if (stack_len(g) < 2) {
    int counter = 900;
    g = stack_push(g, aux_ctx(rng, counter));
  }
  return g;
}

} // namespace

std::optional<Instance> gen_instance(std::uint64_t seed, System sys, bool allow_contextual,
                                     std::size_t max_size, std::size_t max_depth) {
  Rng rng(seed);
  CtxStack g = gen_stack(rng, max_depth);
  TyPtr goal = gen_goal(rng, allow_contextual);
  GenConfig cfg;
  cfg.seed = rng.next();
  cfg.max_size = max_size;
  cfg.system = sys;
  cfg.stack = g;
  cfg.goal = goal;
  cfg.allow_contextual = allow_contextual;
  auto t = gen_term(cfg);
  if (!t) return std::nullopt;
  return Instance{std::move(g), std::move(goal), std::move(*t)};
}

std::optional<TypedKSub> gen_ksub(Rng& rng, System sys, const CtxStack& cod) {
  CtxStack cur = gen_stack(rng, 2);
  int counter = 0;
  KSub sub;
  auto fill = [&](LocalSub& ls, const LocalCtx& target) {
    for (const auto& [name, ty] : target.bindings) {
      (void)name;
      GenConfig cfg;
      cfg.seed = rng.next();
      cfg.max_size = 8;
      cfg.system = sys;
      cfg.stack = cur;
      cfg.goal = ty;
      auto t = gen_term(cfg);
      if (!t) return false;
      ls.terms.push_back(*t);
    }
    return true;
  };
  if (!fill(sub.base, cod.contexts[0])) return std::nullopt;
  std::vector<std::size_t> offs = allowed_offsets(sys);
  for (std::size_t i = 1; i < stack_len(cod); ++i) {
    std::size_t n = offs[rng.below(offs.size())];
    for (std::size_t k = 0; k < n; ++k) cur = stack_push(cur, aux_ctx(rng, counter));
    LocalSub ls;
    if (!fill(ls, cod.contexts[i])) return std::nullopt;
    sub.exts.emplace_back(n, std::move(ls));
  }
  return TypedKSub{std::move(sub), std::move(cur), cod};
}

ShapedKWeak gen_kweak(Rng& rng, System sys, const StackShape& src) {
  KWeak g = kweak_eps();
  std::vector<std::size_t> dst{0};
  auto addBindings = [&](std::size_t count) {
    for (std::size_t j = 0; j < count; ++j) {
      while (rng.chance(20)) {
        g = kweak_p(g);
        dst.back()++;
      }
      g = kweak_q(g);
      dst.back()++;
    }
    while (rng.chance(20)) {
      g = kweak_p(g);
      dst.back()++;
    }
  };
  std::vector<std::size_t> offs = allowed_offsets(sys);
  addBindings(src.sizes[0]);
  for (std::size_t i = 1; i < src.sizes.size(); ++i) {
    std::size_t n = offs[rng.below(offs.size())];
    g = kweak_ext(g, n);
    for (std::size_t k = 0; k < n; ++k) dst.push_back(k + 1 == n ? 0 : rng.below(3));
    addBindings(src.sizes[i]);
  }
  return ShapedKWeak{std::move(g), src, StackShape{std::move(dst)}};
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

SuiteResult run_axiom_matrix() {
  SuiteResult r;
  r.suite = "axiom-matrix";
  r.system = "-";
  auto t0 = Clock::now();
  TyPtr b = ty_base();
  // K f x = box ((unbox 1 f) (unbox 1 x))
  TermPtr axK = tlam(ty_box(ty_arr(b, b)),
                     tlam(ty_box(b), tbox(tapp(tunbox(1, tvar(1)), tunbox(1, tvar(0))))));
  TyPtr tyK = ty_arr(ty_box(ty_arr(b, b)), ty_arr(ty_box(b), ty_box(b)));
  // T x = unbox 0 x
  TermPtr axT = tlam(ty_box(b), tunbox(0, tvar(0)));
  TyPtr tyT = ty_arr(ty_box(b), b);
  // A4 x = box (box (unbox 2 x))
  TermPtr axA4 = tlam(ty_box(b), tbox(tbox(tunbox(2, tvar(0)))));
  TyPtr tyA4 = ty_arr(ty_box(b), ty_box(ty_box(b)));

  struct Case {
    const char* name;
    TermPtr term;
    TyPtr ty;
    bool expected[4]; // K, T, K4, S4
  };
  std::vector<Case> table = {
      {"K", axK, tyK, {true, true, true, true}},
      {"T", axT, tyT, {false, true, false, true}},
      {"A4", axA4, tyA4, {false, false, true, true}},
  };
  System systems[4] = {System::K, System::T, System::K4, System::S4};
  CtxStack g;
  g.contexts.emplace_back();
  for (const auto& c : table) {
    for (int i = 0; i < 4; ++i) {
      ++r.checked;
      bool accepted = false;
      try {
        accepted = ty_eq(synth(systems[i], g, c.term), c.ty);
      } catch (const TypeError&) {
        accepted = false;
      }
      if (accepted != c.expected[i]) {
        ++r.failed;
        if (r.counterexample.empty()) {
          std::ostringstream os;
          os << "axiom " << c.name << " under system " << system_name(systems[i])
             << ": expected " << (c.expected[i] ? "accept" : "reject") << ", got "
             << (accepted ? "accept" : "reject");
          r.counterexample = os.str();
        }
      }
    }
  }
  r.seconds = secs_since(t0);
  return r;
}

SuiteResult run_soundness(System sys, const SelftestOptions& opt) {
  auto passes = [&](const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
    TermPtr viaNbe = nbe(sys, g, ty, t);
    TermPtr viaOracle = oracle_normalize(sys, g, ty, t);
    if (opt.perturb_oracle) viaOracle = opt.perturb_oracle(viaOracle);
    return alpha_eq(viaNbe, viaOracle);
  };
  return run_loop("soundness", system_name(sys), opt,
                  [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
                    auto inst = gen_instance(seed, sys, false, opt.max_size, opt.max_depth);
                    if (!inst) return std::nullopt;
                    if (passes(inst->stack, inst->goal, inst->term)) return true;
                    CtxStack g = inst->stack;
                    TyPtr ty = inst->goal;
                    TermPtr t = inst->term;
                    shrink_instance(sys, g, ty, t, passes);
                    cex = format_instance(sys, g, ty, t);
                    return false;
                  });
}

SuiteResult run_normality(System sys, const SelftestOptions& opt) {
  auto passes = [&](const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
    TermPtr nf = nbe(sys, g, ty, t);
    if (!is_normal(nf)) return false;
    if (!ty_eq(synth(sys, g, nf), ty)) return false;
    return alpha_eq(nbe(sys, g, ty, nf), nf);
  };
  return run_loop("normality-idempotence", system_name(sys), opt,
                  [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
                    auto inst = gen_instance(seed, sys, false, opt.max_size, opt.max_depth);
                    if (!inst) return std::nullopt;
                    if (passes(inst->stack, inst->goal, inst->term)) return true;
                    CtxStack g = inst->stack;
                    TyPtr ty = inst->goal;
                    TermPtr t = inst->term;
                    shrink_instance(sys, g, ty, t, passes);
                    cex = format_instance(sys, g, ty, t);
                    return false;
                  });
}

SuiteResult run_completeness(System sys, const SelftestOptions& opt) {
  return run_loop(
      "completeness", system_name(sys), opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        CtxStack g = gen_stack(rng, opt.max_depth);
        TyPtr goal = gen_goal(rng, false);
        GenConfig cfg;
        cfg.seed = rng.next();
        cfg.max_size = opt.max_size;
        cfg.system = sys;
        cfg.stack = g;
        cfg.goal = goal;
        std::size_t steps = 1 + rng.below(5);
        auto pair = gen_equiv_pair(cfg, steps);
        if (!pair) return std::nullopt;
        const auto& [t1, t2] = *pair;
        TyPtr ty1 = synth(sys, g, t1);
        TyPtr ty2 = synth(sys, g, t2);
        if (!ty_eq(ty1, ty2)) {
          cex = "rewritten pair has diverging types:\n  " + pretty(t1, g) + "\n  " +
                pretty(t2, g);
          return false;
        }
        TermPtr n1 = nbe(sys, g, ty1, t1);
        TermPtr n2 = nbe(sys, g, ty2, t2);
        if (alpha_eq(n1, n2)) return true;
        std::ostringstream os;
        os << format_instance(sys, g, ty1, t1) << "\n  rewritten: " << pretty(t2, g)
           << "\n  nf lhs: " << pretty(n1, g) << "\n  nf rhs: " << pretty(n2, g);
        cex = os.str();
        return false;
      });
}

SuiteResult run_naturality(System sys, const SelftestOptions& opt) {
  return run_loop(
      "naturality", system_name(sys), opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        CtxStack g = gen_stack(rng, 3);
        TyPtr goal = gen_goal(rng, false);
        GenConfig cfg;
        cfg.seed = rng.next();
        cfg.max_size = 15;
        cfg.system = sys;
        cfg.stack = g;
        cfg.goal = goal;
        auto t = gen_term(cfg);
        if (!t) return std::nullopt;
        auto ks = gen_ksub(rng, sys, g);
        if (!ks) return std::nullopt;
        Env rho = env_of_ksub(ks->sub, ks->dom);
        ShapedKWeak w = gen_kweak(rng, sys, shape_of(ks->dom));
        TermPtr lhs = reify(goal, w.dst, eval(*t, weaken_env(rho, w.weak, w.dst)));
        TermPtr rhs = kweak_rename(reify(goal, w.src, eval(*t, rho)), w.weak);
        if (alpha_eq(lhs, rhs)) return true;
        std::ostringstream os;
        os << format_instance(sys, g, goal, *t) << "\n  eval-after-weaken: " << pretty(lhs)
           << "\n  weaken-after-eval: " << pretty(rhs);
        cex = os.str();
        return false;
      });
}

SuiteResult run_category_laws(const SelftestOptions& opt) {
  return run_loop(
      "category-laws", "-", opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        System sys = static_cast<System>(rng.below(4));
        CtxStack g = gen_stack(rng, 3);
        auto s1 = gen_ksub(rng, sys, g);
        if (!s1) return std::nullopt;
        auto s2 = gen_ksub(rng, sys, s1->dom);
        if (!s2) return std::nullopt;
        auto s3 = gen_ksub(rng, sys, s2->dom);
        if (!s3) return std::nullopt;
        TyPtr goal = gen_goal(rng, false);
        GenConfig cfg;
        cfg.seed = rng.next();
        cfg.max_size = 12;
        cfg.system = sys;
        cfg.stack = g;
        cfg.goal = goal;
        auto t = gen_term(cfg);
        if (!t) return std::nullopt;

        auto fail = [&](const char* what) {
          cex = std::string(what) + " (system " + system_name(sys) + ")\n  term: " +
                pretty(*t, g);
          return false;
        };
        if (!ksub_alpha_eq(compose(ksub_id(g), s1->sub), s1->sub))
          return fail("left identity law failed");
        if (!ksub_alpha_eq(compose(s1->sub, ksub_id(s1->dom)), s1->sub))
          return fail("right identity law failed");
        if (!ksub_alpha_eq(compose(compose(s1->sub, s2->sub), s3->sub),
                           compose(s1->sub, compose(s2->sub, s3->sub))))
          return fail("associativity failed");
        if (!alpha_eq(ksub_apply(*t, ksub_id(g)), *t))
          return fail("identity application law failed");
        if (!alpha_eq(ksub_apply(*t, compose(s1->sub, s2->sub)),
                      ksub_apply(ksub_apply(*t, s1->sub), s2->sub)))
          return fail("t[s o d] != t[s][d]");
        if (!ty_eq(synth(sys, s1->dom, ksub_apply(*t, s1->sub)), synth(sys, g, *t)))
          return fail("typing preservation failed");
        return true;
      });
}

SuiteResult run_distributivity(const SelftestOptions& opt) {
  return run_loop(
      "distributivity", "-", opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        System sys = static_cast<System>(rng.below(4));
        CtxStack g = stack_of_depth2(rng, opt.max_depth);
        auto s1 = gen_ksub(rng, sys, g);
        if (!s1) return std::nullopt;
        auto s2 = gen_ksub(rng, sys, s1->dom);
        if (!s2) return std::nullopt;
        std::size_t len = stack_len(g);
        std::size_t n = rng.below(len);
        std::size_t m = rng.below(len - n);
        auto fail = [&](const char* what) {
          cex = std::string(what) + " (system " + system_name(sys) + ", n=" +
                std::to_string(n) + ", m=" + std::to_string(m) + ")";
          return false;
        };
        if (!ksub_alpha_eq(trunc(s1->sub, n + m), trunc(trunc(s1->sub, n), m)))
          return fail("trunc addition distributivity failed");
        if (trunc_offset(s1->sub, n + m) !=
            trunc_offset(s1->sub, n) + trunc_offset(trunc(s1->sub, n), m))
          return fail("offset addition distributivity failed");
        KSub comp = compose(s1->sub, s2->sub);
        std::size_t k = rng.below(len);
        if (trunc_offset(comp, k) != trunc_offset(s2->sub, trunc_offset(s1->sub, k)))
          return fail("offset composition distributivity failed");
        if (!ksub_alpha_eq(trunc(comp, k),
                           compose(trunc(s1->sub, k), trunc(s2->sub, trunc_offset(s1->sub, k)))))
          return fail("trunc composition distributivity failed");
        if (trunc_offset(s1->sub, k) >= stack_len(s1->dom))
          return fail("range preservation failed");
        return true;
      });
}

SuiteResult run_mot_agreement(const SelftestOptions& opt) {
  return run_loop(
      "mot-agreement", "-", opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        System sys = static_cast<System>(rng.below(4));
        CtxStack cod = stack_of_depth2(rng, opt.max_depth);
        std::size_t len = stack_len(cod);
        std::size_t l = rng.below(len - 1);
        std::size_t n = rng.below(4);
        TyPtr goal = gen_goal(rng, false);
        GenConfig cfg;
        cfg.seed = rng.next();
        cfg.max_size = 15;
        cfg.system = sys;
        cfg.stack = cod;
        cfg.goal = goal;
        auto t = gen_term(cfg);
        if (!t) return std::nullopt;

        int counter = 500;
        CtxStack dom;
        if (n >= 1) {
          std::size_t gLen = len - 1 - l;
          for (std::size_t i = 0; i < gLen; ++i) dom.contexts.push_back(cod.contexts[i]);
          for (std::size_t k = 0; k + 1 < n; ++k) {
            LocalCtx fresh;
            std::size_t sz = rng.below(3);
            for (std::size_t j = 0; j < sz; ++j)
              fresh.bindings.emplace_back("m" + std::to_string(counter++), ty_base());
            dom.contexts.push_back(std::move(fresh));
          }
          LocalCtx fused;
          std::size_t sz = rng.below(3);
          for (std::size_t j = 0; j < sz; ++j)
            fused.bindings.emplace_back("m" + std::to_string(counter++), ty_base());
          for (const auto& b : cod.contexts[gLen].bindings) fused.bindings.push_back(b);
          dom.contexts.push_back(std::move(fused));
          for (std::size_t i = gLen + 1; i < len; ++i) dom.contexts.push_back(cod.contexts[i]);
        } else {
          std::size_t gLen = len - 2 - l;
          for (std::size_t i = 0; i < gLen; ++i) dom.contexts.push_back(cod.contexts[i]);
          LocalCtx fused = cod.contexts[gLen];
          for (const auto& b : cod.contexts[gLen + 1].bindings) fused.bindings.push_back(b);
          dom.contexts.push_back(std::move(fused));
          for (std::size_t i = gLen + 2; i < len; ++i) dom.contexts.push_back(cod.contexts[i]);
        }

        KSub enc = mot_as_ksub(n, l, dom, cod);
        TermPtr viaKsub = ksub_apply(*t, enc);
        TermPtr viaMot = mot_apply(*t, n, l);
        auto fail = [&](const std::string& what) {
          cex = what + " (n=" + std::to_string(n) + ", l=" + std::to_string(l) + ")\n  " +
                format_instance(sys, cod, goal, *t);
          return false;
        };
        if (!alpha_eq(viaKsub, viaMot)) return fail("mot/K-substitution disagreement");
        if (!ty_eq(synth(System::S4, dom, viaMot), synth(sys, cod, *t)))
          return fail("mot typing preservation failed");
        return true;
      });
}

SuiteResult run_contextual_beta(const SelftestOptions& opt) {
  return run_loop(
      "contextual-beta", "-", opt,
      [&](std::uint64_t seed, std::string& cex) -> std::optional<bool> {
        Rng rng(seed);
        System sys = static_cast<System>(rng.below(4));
        CtxStack g = gen_stack(rng, opt.max_depth);
        CtxList capture;
        std::size_t nCtx = rng.below(3);
        for (std::size_t i = 0; i < nCtx; ++i) {
          LocalCtx ctx;
          std::size_t k = rng.below(3);
          for (std::size_t j = 0; j < k; ++j)
            ctx.bindings.emplace_back("d" + std::to_string(i) + std::to_string(j),
                                      rng.chance(60) ? ty_base() : ty_box(ty_base()));
          capture.push_back(std::move(ctx));
        }
        // offsets chosen from the top so each respects the remaining depth
        std::vector<std::size_t> offsets(capture.size());
        std::vector<CtxStack> stacks(capture.size(), g);
        CtxStack cur = g;
        for (std::size_t i = capture.size(); i-- > 0;) {
          std::vector<std::size_t> offs;
          for (std::size_t o = 0; o <= 2 && o + 1 <= stack_len(cur); ++o)
            if (ul_allowed(sys, o) && o < stack_len(cur)) offs.push_back(o);
          if (offs.empty()) return std::nullopt;
          offsets[i] = offs[rng.below(offs.size())];
          stacks[i] = cur;
          cur = stack_truncate(cur, offsets[i]);
        }
        SemiKSub sub;
        sub.exts.resize(capture.size());
        for (std::size_t i = 0; i < capture.size(); ++i) {
          LocalSub ls;
          for (const auto& [name, bty] : capture[i].bindings) {
            (void)name;
            GenConfig cfg;
            cfg.seed = rng.next();
            cfg.max_size = 6;
            cfg.system = sys;
            cfg.stack = stacks[i];
            cfg.goal = bty;
            auto s = gen_term(cfg);
            if (!s) return std::nullopt;
            ls.terms.push_back(*s);
          }
          sub.exts[i] = {offsets[i], std::move(ls)};
        }
        TyPtr bodyGoal = gen_goal(rng, false);
        GenConfig cfg;
        cfg.seed = rng.next();
        cfg.max_size = 12;
        cfg.system = sys;
        cfg.stack = stack_append(cur, capture);
        cfg.goal = bodyGoal;
        cfg.allow_contextual = true;
        auto body = gen_term(cfg);
        if (!body) return std::nullopt;

        TermPtr redex = tcunbox(tcbox(capture, *body), sub);
        TyPtr before = synth(sys, g, redex);
        auto stepped = beta_step(g, redex);
        auto fail = [&](const std::string& what) {
          cex = what + "\n  " + format_instance(sys, g, before, redex);
          return false;
        };
        if (!stepped) return fail("contextual redex did not reduce");
        TermPtr expected = ksub_apply(*body, semi_to_ksub(sub, g));
        if (!alpha_eq(*stepped, expected))
          return fail("contextual beta step disagrees with the K-substitution image");
        TyPtr after = synth(sys, g, *stepped);
        if (!ty_eq(after, before)) return fail("contextual beta step changed the type");
        return true;
      });
}

std::vector<SuiteResult> run_all_suites(const std::vector<System>& systems,
                                        const SelftestOptions& opt) {
  std::vector<SuiteResult> out;
  out.push_back(run_axiom_matrix());
  for (System sys : systems) {
    out.push_back(run_soundness(sys, opt));
    out.push_back(run_completeness(sys, opt));
    out.push_back(run_normality(sys, opt));
    out.push_back(run_naturality(sys, opt));
  }
  out.push_back(run_category_laws(opt));
  out.push_back(run_distributivity(opt));
  out.push_back(run_mot_agreement(opt));
  out.push_back(run_contextual_beta(opt));
  return out;
}

} // namespace mlc
