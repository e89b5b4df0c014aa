#include "mlc/syntax.hpp"

#include <stdexcept>

namespace mlc {

// ---------------------------------------------------------------------------
// Type constructors
// ---------------------------------------------------------------------------

TyPtr ty_base() {
  static const TyPtr base = std::make_shared<Ty>(Ty{Ty::Kind::Base, nullptr, nullptr, {}});
  return base;
}

TyPtr ty_box(TyPtr body) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Box, std::move(body), nullptr, {}});
}

TyPtr ty_arr(TyPtr dom, TyPtr cod) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Arr, std::move(dom), std::move(cod), {}});
}

TyPtr ty_ctx(CtxList capture, TyPtr body) {
  return std::make_shared<Ty>(Ty{Ty::Kind::Ctx, std::move(body), nullptr, std::move(capture)});
}

static bool ctx_eq(const LocalCtx& c, const LocalCtx& d) {
  if (c.size() != d.size()) return false;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!ty_eq(c.bindings[i].second, d.bindings[i].second)) return false;
  return true;
}

bool ty_eq(const TyPtr& s, const TyPtr& t) {
  if (s.get() == t.get()) return true;
  if (!s || !t) return false;
  if (s->kind != t->kind) return false;
  switch (s->kind) {
    case Ty::Kind::Base: return true;
    case Ty::Kind::Box: return ty_eq(s->a, t->a);
    case Ty::Kind::Arr: return ty_eq(s->a, t->a) && ty_eq(s->b, t->b);
    case Ty::Kind::Ctx: {
      if (s->capture.size() != t->capture.size()) return false;
      for (std::size_t i = 0; i < s->capture.size(); ++i)
        if (!ctx_eq(s->capture[i], t->capture[i])) return false;
      return ty_eq(s->a, t->a);
    }
  }
  return false;
}

bool ty_is_contextual(const TyPtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Ty::Kind::Base: return false;
    case Ty::Kind::Box: return ty_is_contextual(t->a);
    case Ty::Kind::Arr: return ty_is_contextual(t->a) || ty_is_contextual(t->b);
    case Ty::Kind::Ctx: return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Term constructors
// ---------------------------------------------------------------------------

TermPtr tvar(std::size_t ix) {
  Term t{};
  t.kind = Term::Kind::Var;
  t.ix = ix;
  return std::make_shared<Term>(std::move(t));
}

TermPtr tbox(TermPtr body) {
  Term t{};
  t.kind = Term::Kind::Box;
  t.a = std::move(body);
  return std::make_shared<Term>(std::move(t));
}

TermPtr tunbox(std::size_t level, TermPtr body) {
  Term t{};
  t.kind = Term::Kind::Unbox;
  t.ix = level;
  t.a = std::move(body);
  return std::make_shared<Term>(std::move(t));
}

TermPtr tlam(TyPtr ann, TermPtr body) {
  Term t{};
  t.kind = Term::Kind::Lam;
  t.ann = std::move(ann);
  t.a = std::move(body);
  return std::make_shared<Term>(std::move(t));
}

TermPtr tapp(TermPtr fn, TermPtr arg) {
  Term t{};
  t.kind = Term::Kind::App;
  t.a = std::move(fn);
  t.b = std::move(arg);
  return std::make_shared<Term>(std::move(t));
}

TermPtr tcbox(CtxList capture, TermPtr body) {
  Term t{};
  t.kind = Term::Kind::CBox;
  t.capture = std::move(capture);
  t.a = std::move(body);
  return std::make_shared<Term>(std::move(t));
}

TermPtr tcunbox(TermPtr body, SemiKSub sub) {
  Term t{};
  t.kind = Term::Kind::CUnbox;
  t.a = std::move(body);
  t.sub = std::move(sub);
  return std::make_shared<Term>(std::move(t));
}

std::size_t term_size(const TermPtr& t) {
  if (!t) return 0;
  switch (t->kind) {
    case Term::Kind::Var: return 1;
    case Term::Kind::Box:
    case Term::Kind::Unbox:
    case Term::Kind::Lam:
    case Term::Kind::CBox: return 1 + term_size(t->a);
    case Term::Kind::App: return 1 + term_size(t->a) + term_size(t->b);
    case Term::Kind::CUnbox: {
      std::size_t n = 1 + term_size(t->a);
      for (const auto& [off, sub] : t->sub.exts) {
        (void)off;
        for (const auto& s : sub.terms) n += term_size(s);
      }
      return n;
    }
  }
  return 0;
}

bool term_is_contextual(const TermPtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Term::Kind::Var: return false;
    case Term::Kind::Box:
    case Term::Kind::Unbox:
    case Term::Kind::Lam: return term_is_contextual(t->a);
    case Term::Kind::App: return term_is_contextual(t->a) || term_is_contextual(t->b);
    case Term::Kind::CBox:
    case Term::Kind::CUnbox: return true;
  }
  return false;
}

bool is_neutral(const TermPtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Term::Kind::Var: return true;
    case Term::Kind::App: return is_neutral(t->a) && is_normal(t->b);
    case Term::Kind::Unbox: return is_neutral(t->a);
    default: return false;
  }
}

bool is_normal(const TermPtr& t) {
  if (!t) return false;
  switch (t->kind) {
    case Term::Kind::Box:
    case Term::Kind::Lam: return is_normal(t->a);
    default: return is_neutral(t);
  }
}

static bool local_sub_alpha_eq(const LocalSub& a, const LocalSub& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!alpha_eq(a.terms[i], b.terms[i])) return false;
  return true;
}

static bool ctx_list_eq(const CtxList& a, const CtxList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!ctx_eq(a[i], b[i])) return false;
  return true;
}

bool alpha_eq(const TermPtr& t, const TermPtr& u) {
  if (t.get() == u.get()) return true;
  if (!t || !u) return false;
  if (t->kind != u->kind) return false;
  switch (t->kind) {
    case Term::Kind::Var: return t->ix == u->ix;
    case Term::Kind::Box: return alpha_eq(t->a, u->a);
    case Term::Kind::Unbox: return t->ix == u->ix && alpha_eq(t->a, u->a);
    case Term::Kind::Lam: return alpha_eq(t->a, u->a);
    case Term::Kind::App: return alpha_eq(t->a, u->a) && alpha_eq(t->b, u->b);
    case Term::Kind::CBox: return ctx_list_eq(t->capture, u->capture) && alpha_eq(t->a, u->a);
    case Term::Kind::CUnbox: {
      if (t->sub.exts.size() != u->sub.exts.size()) return false;
      for (std::size_t i = 0; i < t->sub.exts.size(); ++i) {
        if (t->sub.exts[i].first != u->sub.exts[i].first) return false;
        if (!local_sub_alpha_eq(t->sub.exts[i].second, u->sub.exts[i].second)) return false;
      }
      return alpha_eq(t->a, u->a);
    }
  }
  return false;
}

std::size_t semi_offset(const SemiKSub& s) {
  std::size_t n = 0;
  for (const auto& [off, sub] : s.exts) {
    (void)sub;
    n += off;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Context stacks
// ---------------------------------------------------------------------------

std::size_t stack_len(const CtxStack& g) { return g.contexts.size(); }

CtxStack stack_truncate(const CtxStack& g, std::size_t n) {
  if (n >= stack_len(g)) throw std::out_of_range("truncation exceeds stack");
  CtxStack r;
  r.contexts.assign(g.contexts.begin(), g.contexts.end() - static_cast<std::ptrdiff_t>(n));
  return r;
}

CtxStack stack_push(const CtxStack& g, LocalCtx ctx) {
  CtxStack r = g;
  r.contexts.push_back(std::move(ctx));
  return r;
}

CtxStack stack_append(const CtxStack& g, const CtxList& d) {
  CtxStack r = g;
  r.contexts.insert(r.contexts.end(), d.begin(), d.end());
  return r;
}

CtxStack stack_bind(const CtxStack& g, std::string name, TyPtr ty) {
  CtxStack r = g;
  r.contexts.back().bindings.emplace_back(std::move(name), std::move(ty));
  return r;
}

bool stack_is_contextual(const CtxStack& g) {
  for (const auto& ctx : g.contexts)
    for (const auto& [name, ty] : ctx.bindings) {
      (void)name;
      if (ty_is_contextual(ty)) return true;
    }
  return false;
}

StackShape shape_of(const CtxStack& g) {
  StackShape s;
  s.sizes.reserve(g.contexts.size());
  for (const auto& ctx : g.contexts) s.sizes.push_back(ctx.size());
  return s;
}

StackShape shape_truncate(const StackShape& s, std::size_t n) {
  if (n >= s.sizes.size()) throw std::out_of_range("truncation exceeds stack");
  StackShape r;
  r.sizes.assign(s.sizes.begin(), s.sizes.end() - static_cast<std::ptrdiff_t>(n));
  return r;
}

StackShape shape_push(const StackShape& s, std::size_t size) {
  StackShape r = s;
  r.sizes.push_back(size);
  return r;
}

} // namespace mlc
