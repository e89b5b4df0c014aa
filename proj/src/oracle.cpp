#include "mlc/oracle.hpp"

#include "mlc/subst.hpp"

#include <stdexcept>

namespace mlc {

// ---------------------------------------------------------------------------
// Beta reduction
// ---------------------------------------------------------------------------

namespace {

bool is_beta_redex(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::App: return t->a->kind == Term::Kind::Lam;
    case Term::Kind::Unbox: return t->a->kind == Term::Kind::Box;
    case Term::Kind::CUnbox: return t->a->kind == Term::Kind::CBox;
    default: return false;
  }
}

TermPtr contract(const StackShape& shape, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::App: return term_subst(t->a->a, 0, t->b);
    case Term::Kind::Unbox: return mot_apply(t->a->a, t->ix, 0);
    case Term::Kind::CUnbox: return ksub_apply(t->a->a, semi_to_ksub(t->sub, shape));
    default: throw std::logic_error("not a redex");
  }
}

std::optional<TermPtr> step_rec(const StackShape& shape, const TermPtr& t) {
  if (is_beta_redex(t)) return contract(shape, t);
  switch (t->kind) {
    case Term::Kind::Var: return std::nullopt;
    case Term::Kind::App: {
      if (auto f = step_rec(shape, t->a)) return tapp(*f, t->b);
      if (auto a = step_rec(shape, t->b)) return tapp(t->a, *a);
      return std::nullopt;
    }
    case Term::Kind::Lam: {
      StackShape s2 = shape;
      s2.sizes.back() += 1;
      if (auto b = step_rec(s2, t->a)) return tlam(t->ann, *b);
      return std::nullopt;
    }
    case Term::Kind::Box: {
      if (auto b = step_rec(shape_push(shape), t->a)) return tbox(*b);
      return std::nullopt;
    }
    case Term::Kind::Unbox: {
      if (auto b = step_rec(shape_truncate(shape, t->ix), t->a)) return tunbox(t->ix, *b);
      return std::nullopt;
    }
    case Term::Kind::CBox: {
      StackShape s2 = shape;
      for (const auto& ctx : t->capture) s2 = shape_push(s2, ctx.size());
      if (auto b = step_rec(s2, t->a)) return tcbox(t->capture, *b);
      return std::nullopt;
    }
    case Term::Kind::CUnbox: {
      std::size_t total = semi_offset(t->sub);
      if (auto b = step_rec(shape_truncate(shape, total), t->a)) return tcunbox(*b, t->sub);
      // substitution components, bottom to top, each under its own stack
      std::vector<std::size_t> above(t->sub.exts.size());
      {
        std::size_t acc = 0;
        for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
          above[i] = acc;
          acc += t->sub.exts[i].first;
        }
      }
      for (std::size_t i = 0; i < t->sub.exts.size(); ++i) {
        StackShape si = above[i] == 0 ? shape : shape_truncate(shape, above[i]);
        const auto& terms = t->sub.exts[i].second.terms;
        for (std::size_t j = 0; j < terms.size(); ++j) {
          if (auto s = step_rec(si, terms[j])) {
            SemiKSub sub2 = t->sub;
            sub2.exts[i].second.terms[j] = *s;
            return tcunbox(t->a, std::move(sub2));
          }
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

} // namespace

std::optional<TermPtr> beta_step(const CtxStack& g, const TermPtr& t) {
  return step_rec(shape_of(g), t);
}

bool has_beta_redex(const TermPtr& t) {
  if (is_beta_redex(t)) return true;
  switch (t->kind) {
    case Term::Kind::Var: return false;
    case Term::Kind::App: return has_beta_redex(t->a) || has_beta_redex(t->b);
    case Term::Kind::Lam:
    case Term::Kind::Box:
    case Term::Kind::Unbox:
    case Term::Kind::CBox: return has_beta_redex(t->a);
    case Term::Kind::CUnbox: {
      if (has_beta_redex(t->a)) return true;
      for (const auto& [off, sub] : t->sub.exts) {
        (void)off;
        for (const auto& s : sub.terms)
          if (has_beta_redex(s)) return true;
      }
      return false;
    }
  }
  return false;
}

TermPtr beta_normalize(System sys, const CtxStack& g, const TermPtr& t) {
  (void)sys; // reduction itself is system-independent
  StackShape shape = shape_of(g);
  TermPtr cur = t;
  for (std::size_t fuel = 0; fuel < 1000000; ++fuel) {
    auto next = step_rec(shape, cur);
    if (!next) return cur;
    cur = *next;
  }
  throw std::runtime_error("fuel exhausted during beta-normalization");
}

// ---------------------------------------------------------------------------
// Eta expansion
// ---------------------------------------------------------------------------

namespace {

std::pair<TermPtr, TyPtr> expand_neutral(System sys, const CtxStack& g, const TermPtr& v) {
  switch (v->kind) {
    case Term::Kind::Var: {
      const LocalCtx& top = g.contexts.back();
      if (v->ix >= top.size()) throw std::logic_error("eta expansion: unbound variable");
      return {v, top.bindings[top.size() - 1 - v->ix].second};
    }
    case Term::Kind::App: {
      auto [fn, fnTy] = expand_neutral(sys, g, v->a);
      if (fnTy->kind != Ty::Kind::Arr) throw std::logic_error("eta expansion: not a function");
      TermPtr arg = eta_expand(sys, g, fnTy->a, v->b);
      return {tapp(std::move(fn), std::move(arg)), fnTy->b};
    }
    case Term::Kind::Unbox: {
      auto [body, bodyTy] = expand_neutral(sys, stack_truncate(g, v->ix), v->a);
      if (bodyTy->kind != Ty::Kind::Box) throw std::logic_error("eta expansion: not a box");
      return {tunbox(v->ix, std::move(body)), bodyTy->a};
    }
    default: break;
  }
  // Contextual heads are a fragment boundary: typed but left as they are.
  return {v, synth(sys, g, v)};
}

} // namespace

TermPtr eta_expand(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
  switch (ty->kind) {
    case Ty::Kind::Arr: {
      CtxStack g2 = stack_bind(g, "", ty->a);
      if (t->kind == Term::Kind::Lam)
        return tlam(t->ann ? t->ann : ty->a, eta_expand(sys, g2, ty->b, t->a));
      return tlam(ty->a, eta_expand(sys, g2, ty->b, tapp(shift_top(t, 1, 0), tvar(0))));
    }
    case Ty::Kind::Box: {
      CtxStack g2 = stack_push(g);
      if (t->kind == Term::Kind::Box) return tbox(eta_expand(sys, g2, ty->a, t->a));
      return tbox(eta_expand(sys, g2, ty->a, tunbox(1, t)));
    }
    case Ty::Kind::Ctx: {
      if (t->kind == Term::Kind::CBox)
        return tcbox(t->capture, eta_expand(sys, stack_append(g, t->capture), ty->a, t->a));
      return t;
    }
    case Ty::Kind::Base: return expand_neutral(sys, g, t).first;
  }
  return t;
}

TermPtr oracle_normalize(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
  return eta_expand(sys, g, ty, beta_normalize(sys, g, t));
}

// ---------------------------------------------------------------------------
// Random well-typed terms
// ---------------------------------------------------------------------------

namespace {

std::vector<TyPtr> type_palette() {
  TyPtr b = ty_base();
  return {
      b,
      ty_box(b),
      ty_arr(b, b),
      ty_arr(ty_box(b), b),
      ty_box(ty_arr(b, b)),
      ty_box(ty_box(b)),
      ty_arr(b, ty_arr(b, b)),
  };
}

struct Gen {
  Rng rng;
  System sys;
  bool ctxOK;
  std::vector<TyPtr> palette = type_palette();

  // Admissible unbox levels / offsets at the given stack depth, capped small.
  std::vector<std::size_t> levels(std::size_t depth) const {
    std::vector<std::size_t> ns;
    for (std::size_t n = 0; n + 1 < depth + 1 && n <= 3; ++n)
      if (n < depth && ul_allowed(sys, n)) ns.push_back(n);
    return ns;
  }

  std::optional<std::size_t> find_var(const CtxStack& g, const TyPtr& ty) const {
    const LocalCtx& top = g.contexts.back();
    for (std::size_t i = 0; i < top.size(); ++i)
      if (ty_eq(top.bindings[top.size() - 1 - i].second, ty)) return i;
    return std::nullopt;
  }

  // Guaranteed-termination fallback; fuel caps the search.
  std::optional<TermPtr> bottom_out(const TyPtr& ty, const CtxStack& g, std::size_t fuel) {
    if (fuel == 0) return std::nullopt;
    if (auto ix = find_var(g, ty)) return tvar(*ix);
    switch (ty->kind) {
      case Ty::Kind::Arr: {
        auto body = bottom_out(ty->b, stack_bind(g, "", ty->a), fuel - 1);
        if (!body) return std::nullopt;
        return tlam(ty->a, *body);
      }
      case Ty::Kind::Box: {
        auto body = bottom_out(ty->a, stack_push(g), fuel - 1);
        if (!body) return std::nullopt;
        return tbox(*body);
      }
      case Ty::Kind::Ctx: {
        auto body = bottom_out(ty->a, stack_append(g, ty->capture), fuel - 1);
        if (!body) return std::nullopt;
        return tcbox(ty->capture, *body);
      }
      case Ty::Kind::Base: break;
    }
    // Base goal: fetch a boxed assumption from a reachable world.
    TyPtr boxed = ty_box(ty);
    for (std::size_t n : levels(stack_len(g))) {
      CtxStack below = stack_truncate(g, n);
      if (auto ix = find_var(below, boxed)) return tunbox(n, tvar(*ix));
    }
    TyPtr boxed2 = ty_box(boxed);
    for (std::size_t n1 : levels(stack_len(g)))
      for (std::size_t n2 : levels(stack_len(g) - n1)) {
        CtxStack below = stack_truncate(g, n1 + n2);
        if (auto ix = find_var(below, boxed2))
          return tunbox(n1, tunbox(n2, tvar(*ix)));
      }
    // An applicable function whose argument bottoms out.
    const LocalCtx& top = g.contexts.back();
    for (std::size_t i = 0; i < top.size(); ++i) {
      const TyPtr& vt = top.bindings[top.size() - 1 - i].second;
      if (vt->kind == Ty::Kind::Arr && ty_eq(vt->b, ty)) {
        if (auto arg = bottom_out(vt->a, g, fuel - 1)) return tapp(tvar(i), *arg);
      }
    }
    return std::nullopt;
  }

  std::optional<TermPtr> gen(const TyPtr& ty, const CtxStack& g, std::size_t budget,
                             std::size_t depth) {
    if (budget <= 1 || depth > 30) return bottom_out(ty, g, 8);
    std::size_t roll = rng.below(100);
    bool canIntro = ty->kind != Ty::Kind::Base;
    // 40% introduction, 40% variable/elimination, 20% redex injection
    int order[3];
    if (roll < 40 && canIntro) {
      order[0] = 0; order[1] = 1; order[2] = 2;
    } else if (roll < 80) {
      order[0] = 1; order[1] = 2; order[2] = 0;
    } else {
      order[0] = 2; order[1] = 1; order[2] = 0;
    }
    for (int which : order) {
      std::optional<TermPtr> r;
      if (which == 0 && canIntro) r = intro(ty, g, budget, depth);
      if (which == 1) r = elim(ty, g, budget, depth);
      if (which == 2) r = redex(ty, g, budget, depth);
      if (r) return r;
    }
    return bottom_out(ty, g, 8);
  }

  std::optional<TermPtr> intro(const TyPtr& ty, const CtxStack& g, std::size_t budget,
                               std::size_t depth) {
    switch (ty->kind) {
      case Ty::Kind::Arr: {
        auto body = gen(ty->b, stack_bind(g, "", ty->a), budget - 1, depth + 1);
        if (!body) return std::nullopt;
        return tlam(ty->a, *body);
      }
      case Ty::Kind::Box: {
        auto body = gen(ty->a, stack_push(g), budget - 1, depth + 1);
        if (!body) return std::nullopt;
        return tbox(*body);
      }
      case Ty::Kind::Ctx: {
        if (!ctxOK) return std::nullopt;
        auto body = gen(ty->a, stack_append(g, ty->capture), budget - 1, depth + 1);
        if (!body) return std::nullopt;
        return tcbox(ty->capture, *body);
      }
      case Ty::Kind::Base: return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<TermPtr> elim(const TyPtr& ty, const CtxStack& g, std::size_t budget,
                              std::size_t depth) {
    std::size_t choice = rng.below(ctxOK ? 4 : 3);
    switch (choice) {
      case 0: { // variable
        if (auto ix = find_var(g, ty)) return tvar(*ix);
        break;
      }
      case 1: { // unbox
        auto ns = levels(stack_len(g));
        if (ns.empty()) break;
        std::size_t n = ns[rng.below(ns.size())];
        auto body = gen(ty_box(ty), stack_truncate(g, n), budget - 1, depth + 1);
        if (!body) break;
        return tunbox(n, *body);
      }
      case 2: { // application
        TyPtr argTy = palette[rng.below(palette.size())];
        std::size_t half = budget / 2;
        auto fn = gen(ty_arr(argTy, ty), g, half > 1 ? half : 1, depth + 1);
        if (!fn) break;
        auto arg = gen(argTy, g, budget - half, depth + 1);
        if (!arg) break;
        return tapp(*fn, *arg);
      }
      case 3: { // cunbox
        auto r = gen_cunbox(ty, g, budget, depth);
        if (r) return r;
        break;
      }
    }
    // One fallback draw keeps the generator productive.
    if (auto ix = find_var(g, ty)) return tvar(*ix);
    return std::nullopt;
  }

  std::optional<TermPtr> gen_cunbox(const TyPtr& ty, const CtxStack& g, std::size_t budget,
                                    std::size_t depth) {
    CtxList capture = gen_capture();
    // Offsets are chosen from the top so each one respects the remaining
    // stack depth.
    std::vector<std::size_t> offsets(capture.size());
    CtxStack cur = g;
    std::vector<CtxStack> stacks(capture.size(), g);
    for (std::size_t i = capture.size(); i-- > 0;) {
      auto ns = levels(stack_len(cur));
      if (ns.empty()) return std::nullopt;
      offsets[i] = ns[rng.below(ns.size())];
      stacks[i] = cur;
      if (offsets[i] >= stack_len(cur)) return std::nullopt;
      cur = stack_truncate(cur, offsets[i]);
    }
    SemiKSub sub;
    sub.exts.resize(capture.size());
    std::size_t per = budget / (2 + capture.size());
    if (per < 2) per = 2;
    for (std::size_t i = 0; i < capture.size(); ++i) {
      LocalSub ls;
      for (const auto& [name, bty] : capture[i].bindings) {
        (void)name;
        auto s = gen(bty, stacks[i], per, depth + 1);
        if (!s) return std::nullopt;
        ls.terms.push_back(*s);
      }
      sub.exts[i] = {offsets[i], std::move(ls)};
    }
    auto body = gen(ty_ctx(capture, ty), cur, budget / 2 > 1 ? budget / 2 : 1, depth + 1);
    if (!body) return std::nullopt;
    return tcunbox(*body, std::move(sub));
  }

  CtxList gen_capture() {
    CtxList capture;
    std::size_t n = rng.below(3); // 0..2 contexts
    for (std::size_t i = 0; i < n; ++i) {
      LocalCtx ctx;
      std::size_t k = rng.below(3); // 0..2 bindings
      for (std::size_t j = 0; j < k; ++j)
        ctx.bindings.emplace_back("c" + std::to_string(i) + std::to_string(j),
                                  rng.chance(60) ? ty_base() : ty_box(ty_base()));
      capture.push_back(std::move(ctx));
    }
    return capture;
  }

  std::optional<TermPtr> redex(const TyPtr& ty, const CtxStack& g, std::size_t budget,
                               std::size_t depth) {
    if (rng.chance(50)) {
      TyPtr argTy = palette[rng.below(palette.size())];
      std::size_t half = budget / 2;
      auto body = gen(ty, stack_bind(g, "", argTy), half > 1 ? half : 1, depth + 1);
      if (body) {
        auto arg = gen(argTy, g, budget - half, depth + 1);
        if (arg) return tapp(tlam(argTy, *body), *arg);
      }
    }
    auto ns = levels(stack_len(g));
    if (ns.empty()) return std::nullopt;
    std::size_t n = ns[rng.below(ns.size())];
    auto body = gen(ty, stack_push(stack_truncate(g, n)), budget - 2, depth + 1);
    if (!body) return std::nullopt;
    return tunbox(n, tbox(*body));
  }
};

} // namespace

std::optional<TermPtr> gen_term(const GenConfig& cfg) {
  Gen gen{Rng(cfg.seed), cfg.system, cfg.allow_contextual, type_palette()};
  for (int attempt = 0; attempt < 4; ++attempt) {
    auto t = gen.gen(cfg.goal, cfg.stack, cfg.max_size, 0);
    if (t) return t;
  }
  return std::nullopt;
}

CtxStack gen_stack(Rng& rng, std::size_t max_depth) {
  TyPtr b = ty_base();
  std::vector<TyPtr> palette = type_palette();
  CtxStack g;
  std::size_t depth = rng.range(1, max_depth);
  int counter = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    LocalCtx ctx;
    if (i == 0) {
      ctx.bindings.emplace_back("v" + std::to_string(counter++), b);
      ctx.bindings.emplace_back("v" + std::to_string(counter++), ty_arr(b, b));
      ctx.bindings.emplace_back("v" + std::to_string(counter++), ty_box(b));
      ctx.bindings.emplace_back("v" + std::to_string(counter++), ty_box(ty_box(b)));
    } else if (!rng.chance(15)) {
      std::size_t k = rng.range(1, 3);
      ctx.bindings.emplace_back("v" + std::to_string(counter++), ty_box(b));
      for (std::size_t j = 1; j < k; ++j)
        ctx.bindings.emplace_back("v" + std::to_string(counter++),
                                  palette[rng.below(palette.size())]);
    }
    g.contexts.push_back(std::move(ctx));
  }
  return g;
}

TyPtr gen_goal(Rng& rng, bool allow_contextual) {
  TyPtr b = ty_base();
  std::size_t roll = rng.below(100);
  if (allow_contextual && roll >= 95) {
    CtxList capture;
    std::size_t n = rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
      LocalCtx ctx;
      std::size_t k = rng.below(3);
      for (std::size_t j = 0; j < k; ++j)
        ctx.bindings.emplace_back("g" + std::to_string(i) + std::to_string(j),
                                  rng.chance(60) ? b : ty_box(b));
      capture.push_back(std::move(ctx));
    }
    return ty_ctx(std::move(capture), rng.chance(50) ? b : ty_arr(b, b));
  }
  if (roll < 25) return b;
  if (roll < 40) return ty_box(b);
  if (roll < 55) return ty_arr(b, b);
  if (roll < 65) return ty_arr(ty_box(b), b);
  if (roll < 75) return ty_box(ty_arr(b, b));
  if (roll < 85) return ty_box(ty_box(b));
  return ty_arr(b, ty_arr(b, b));
}

// ---------------------------------------------------------------------------
// Equivalence pairs
// ---------------------------------------------------------------------------

namespace {

struct RwSite {
  std::vector<std::size_t> path; // child indices; 0 = a, 1 = b
  CtxStack stack;
  TyPtr ty;
  TermPtr node;
};

TyPtr collect_sites(System sys, const CtxStack& g, const TermPtr& t,
                    std::vector<std::size_t>& path, std::vector<RwSite>& out) {
  TyPtr ty;
  switch (t->kind) {
    case Term::Kind::Var: {
      const LocalCtx& top = g.contexts.back();
      ty = top.bindings[top.size() - 1 - t->ix].second;
      break;
    }
    case Term::Kind::Box: {
      path.push_back(0);
      ty = ty_box(collect_sites(sys, stack_push(g), t->a, path, out));
      path.pop_back();
      break;
    }
    case Term::Kind::Unbox: {
      path.push_back(0);
      TyPtr inner = collect_sites(sys, stack_truncate(g, t->ix), t->a, path, out);
      path.pop_back();
      ty = inner->a;
      break;
    }
    case Term::Kind::Lam: {
      path.push_back(0);
      TyPtr cod = collect_sites(sys, stack_bind(g, "", t->ann), t->a, path, out);
      path.pop_back();
      ty = ty_arr(t->ann, cod);
      break;
    }
    case Term::Kind::App: {
      path.push_back(0);
      TyPtr fn = collect_sites(sys, g, t->a, path, out);
      path.pop_back();
      path.push_back(1);
      collect_sites(sys, g, t->b, path, out);
      path.pop_back();
      ty = fn->b;
      break;
    }
    default:
      // Contextual nodes are typed by synth and offered as opaque sites.
      ty = synth(sys, g, t);
      break;
  }
  out.push_back(RwSite{path, g, ty, t});
  return ty;
}

TermPtr replace_at(const TermPtr& t, const std::vector<std::size_t>& path, std::size_t i,
                   const TermPtr& repl) {
  if (i == path.size()) return repl;
  Term copy = *t;
  if (path[i] == 0)
    copy.a = replace_at(t->a, path, i + 1, repl);
  else
    copy.b = replace_at(t->b, path, i + 1, repl);
  return std::make_shared<Term>(std::move(copy));
}

struct Rewrite {
  std::size_t site;
  int rule;
};

// rules: 0 fwd beta-lam, 1 fwd beta-box, 2 bwd beta-lam, 3 bwd beta-box,
//        4 fwd eta-box, 5 bwd eta-box, 6 fwd eta-lam, 7 bwd eta-lam

} // namespace

std::vector<TypedSite> typed_subterms(System sys, const CtxStack& g, const TermPtr& t) {
  std::vector<RwSite> sites;
  std::vector<std::size_t> path;
  collect_sites(sys, g, t, path, sites);
  std::vector<TypedSite> out;
  out.reserve(sites.size());
  for (auto& s : sites) out.push_back(TypedSite{std::move(s.stack), s.ty, s.node});
  return out;
}

std::optional<std::pair<TermPtr, TermPtr>> gen_equiv_pair(const GenConfig& cfg,
                                                          std::size_t steps) {
  auto start = gen_term(cfg);
  if (!start) return std::nullopt;
  Rng rng(mix_seed(cfg.seed, 0x5eed));
  TermPtr cur = *start;
  for (std::size_t step = 0; step < steps; ++step) {
    std::vector<RwSite> sites;
    std::vector<std::size_t> path;
    collect_sites(cfg.system, cfg.stack, cur, path, sites);
    std::vector<Rewrite> candidates;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const RwSite& s = sites[i];
      const TermPtr& u = s.node;
      if (u->kind == Term::Kind::App && u->a->kind == Term::Kind::Lam)
        candidates.push_back({i, 0});
      if (u->kind == Term::Kind::Unbox && u->a->kind == Term::Kind::Box)
        candidates.push_back({i, 1});
      candidates.push_back({i, 2});
      if (s.stack.contexts.back().size() == 0 && ul_allowed(cfg.system, 1) &&
          stack_len(s.stack) >= 2)
        candidates.push_back({i, 3});
      if (s.ty->kind == Ty::Kind::Box) candidates.push_back({i, 4});
      if (u->kind == Term::Kind::Box && u->a->kind == Term::Kind::Unbox && u->a->ix == 1)
        candidates.push_back({i, 5});
      if (s.ty->kind == Ty::Kind::Arr) candidates.push_back({i, 6});
      if (u->kind == Term::Kind::Lam && u->a->kind == Term::Kind::App &&
          u->a->b->kind == Term::Kind::Var && u->a->b->ix == 0 && !occurs_top(u->a->a, 0))
        candidates.push_back({i, 7});
    }
    if (candidates.empty()) break;
    // A few draws; backward beta may fail to find an argument.
    bool applied = false;
    for (int attempt = 0; attempt < 8 && !applied; ++attempt) {
      Rewrite rw = candidates[rng.below(candidates.size())];
      const RwSite& s = sites[rw.site];
      const TermPtr& u = s.node;
      TermPtr repl;
      switch (rw.rule) {
        case 0: repl = term_subst(u->a->a, 0, u->b); break;
        case 1: repl = mot_apply(u->a->a, u->ix, 0); break;
        case 2: {
          TyPtr argTy = rng.chance(60) ? ty_base() : ty_box(ty_base());
          GenConfig sub = cfg;
          sub.seed = rng.next();
          sub.stack = s.stack;
          sub.goal = argTy;
          sub.max_size = 4;
          sub.allow_contextual = false;
          auto arg = gen_term(sub);
          if (!arg) continue;
          repl = tapp(tlam(argTy, shift_top(u, 1, 0)), *arg);
          break;
        }
        case 3: repl = tunbox(1, tbox(u)); break;
        case 4: repl = tbox(tunbox(1, u)); break;
        case 5: repl = u->a->a; break;
        case 6: repl = tlam(s.ty->a, tapp(shift_top(u, 1, 0), tvar(0))); break;
        case 7: repl = shift_top(u->a->a, -1, 0); break;
        default: continue;
      }
      cur = replace_at(cur, s.path, 0, repl);
      applied = true;
    }
    if (!applied) break;
  }
  return std::make_pair(*start, cur);
}

} // namespace mlc
