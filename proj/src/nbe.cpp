#include "mlc/nbe.hpp"

#include <stdexcept>

namespace mlc {

// ---------------------------------------------------------------------------
// K-weakenings
// ---------------------------------------------------------------------------

KWeak kweak_eps() {
  static const KWeak eps = std::make_shared<KWeakNode>(KWeakNode{KWeakNode::Kind::Eps, nullptr, 0});
  return eps;
}

KWeak kweak_q(KWeak tail) {
  return std::make_shared<KWeakNode>(KWeakNode{KWeakNode::Kind::Q, std::move(tail), 0});
}

KWeak kweak_p(KWeak tail) {
  return std::make_shared<KWeakNode>(KWeakNode{KWeakNode::Kind::P, std::move(tail), 0});
}

KWeak kweak_ext(KWeak tail, std::size_t offset) {
  return std::make_shared<KWeakNode>(KWeakNode{KWeakNode::Kind::Ext, std::move(tail), offset});
}

KWeak kweak_id(const StackShape& shape) {
  KWeak g = kweak_eps();
  for (std::size_t i = 0; i < shape.sizes.size(); ++i) {
    if (i > 0) g = kweak_ext(g, 1);
    for (std::size_t j = 0; j < shape.sizes[i]; ++j) g = kweak_q(g);
  }
  return g;
}

KWeak kweak_trunc(const KWeak& g, std::size_t n) {
  if (n == 0) return g;
  switch (g->kind) {
    case KWeakNode::Kind::Q:
    case KWeakNode::Kind::P: return kweak_trunc(g->tail, n);
    case KWeakNode::Kind::Ext: return kweak_trunc(g->tail, n - 1);
    case KWeakNode::Kind::Eps: throw std::out_of_range("truncation exceeds K-weakening");
  }
  throw std::logic_error("unreachable");
}

std::size_t kweak_trunc_offset(const KWeak& g, std::size_t n) {
  if (n == 0) return 0;
  switch (g->kind) {
    case KWeakNode::Kind::Q:
    case KWeakNode::Kind::P: return kweak_trunc_offset(g->tail, n);
    case KWeakNode::Kind::Ext: return g->offset + kweak_trunc_offset(g->tail, n - 1);
    case KWeakNode::Kind::Eps: throw std::out_of_range("truncation exceeds K-weakening");
  }
  throw std::logic_error("unreachable");
}

KWeak kweak_compose(const KWeak& a, const KWeak& b) {
  // The second renaming keeps adding destination bindings regardless of a.
  if (b->kind == KWeakNode::Kind::P) return kweak_p(kweak_compose(a, b->tail));
  switch (a->kind) {
    case KWeakNode::Kind::Eps: return b; // b is the identity Eps here
    case KWeakNode::Kind::Ext:
      return kweak_ext(kweak_compose(a->tail, kweak_trunc(b, a->offset)),
                       kweak_trunc_offset(b, a->offset));
    case KWeakNode::Kind::Q:
      if (b->kind != KWeakNode::Kind::Q)
        throw std::logic_error("K-weakening composition shape mismatch");
      return kweak_q(kweak_compose(a->tail, b->tail));
    case KWeakNode::Kind::P:
      if (b->kind != KWeakNode::Kind::Q)
        throw std::logic_error("K-weakening composition shape mismatch");
      return kweak_p(kweak_compose(a->tail, b->tail));
  }
  throw std::logic_error("unreachable");
}

namespace {

std::size_t rename_var(const KWeak& g, std::size_t i) {
  switch (g->kind) {
    case KWeakNode::Kind::Q: return i == 0 ? 0 : 1 + rename_var(g->tail, i - 1);
    case KWeakNode::Kind::P: return 1 + rename_var(g->tail, i);
    default: throw std::logic_error("K-weakening variable rename out of range");
  }
}

KWeak kweak_push_ctx(KWeak g, const LocalCtx& ctx) {
  g = kweak_ext(std::move(g), 1);
  for (std::size_t j = 0; j < ctx.size(); ++j) g = kweak_q(g);
  return g;
}

} // namespace

TermPtr kweak_rename(const TermPtr& t, const KWeak& g) {
  switch (t->kind) {
    case Term::Kind::Var: return tvar(rename_var(g, t->ix));
    case Term::Kind::Box: return tbox(kweak_rename(t->a, kweak_ext(g, 1)));
    case Term::Kind::Unbox:
      return tunbox(kweak_trunc_offset(g, t->ix), kweak_rename(t->a, kweak_trunc(g, t->ix)));
    case Term::Kind::Lam: return tlam(t->ann, kweak_rename(t->a, kweak_q(g)));
    case Term::Kind::App: return tapp(kweak_rename(t->a, g), kweak_rename(t->b, g));
    case Term::Kind::CBox: {
      KWeak g2 = g;
      for (const auto& ctx : t->capture) g2 = kweak_push_ctx(g2, ctx);
      return tcbox(t->capture, kweak_rename(t->a, g2));
    }
    case Term::Kind::CUnbox: {
      SemiKSub out;
      out.exts.resize(t->sub.exts.size());
      KWeak cur = g;
      for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
        const auto& [off, sub] = t->sub.exts[i];
        LocalSub mapped;
        mapped.terms.reserve(sub.terms.size());
        for (const auto& s : sub.terms) mapped.terms.push_back(kweak_rename(s, cur));
        out.exts[i] = {kweak_trunc_offset(cur, off), std::move(mapped)};
        cur = kweak_trunc(cur, off);
      }
      return tcunbox(kweak_rename(t->a, cur), std::move(out));
    }
  }
  return t;
}

KSub kweak_to_ksub(const KWeak& g) {
  switch (g->kind) {
    case KWeakNode::Kind::Eps: return KSub{LocalSub{}, {}};
    case KWeakNode::Kind::Q: {
      KSub s = kweak_to_ksub(g->tail);
      LocalSub& top = s.exts.empty() ? s.base : s.exts.back().second;
      LocalSub lifted;
      for (const auto& t : top.terms) lifted.terms.push_back(shift_top(t, 1, 0));
      lifted.terms.push_back(tvar(0));
      top = std::move(lifted);
      return s;
    }
    case KWeakNode::Kind::P: {
      KSub s = kweak_to_ksub(g->tail);
      LocalSub& top = s.exts.empty() ? s.base : s.exts.back().second;
      LocalSub shifted;
      for (const auto& t : top.terms) shifted.terms.push_back(shift_top(t, 1, 0));
      top = std::move(shifted);
      return s;
    }
    case KWeakNode::Kind::Ext: {
      KSub s = kweak_to_ksub(g->tail);
      s.exts.emplace_back(g->offset, LocalSub{});
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

bool kweak_eq(const KWeak& a, const KWeak& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kind == KWeakNode::Kind::Ext && a->offset != b->offset) return false;
  if (a->kind == KWeakNode::Kind::Eps) return true;
  return kweak_eq(a->tail, b->tail);
}

// ---------------------------------------------------------------------------
// Semantic domain
// ---------------------------------------------------------------------------

ValuePtr vne(TyPtr ty, TermPtr ne, StackShape shape) {
  Value v{};
  v.kind = Value::Kind::Ne;
  v.ty = std::move(ty);
  v.ne = std::move(ne);
  v.shape = std::move(shape);
  return std::make_shared<Value>(std::move(v));
}

ValuePtr vclos(Env env, TermPtr body) {
  Value v{};
  v.kind = Value::Kind::Clos;
  v.env = std::move(env);
  v.body = std::move(body);
  return std::make_shared<Value>(std::move(v));
}

ValuePtr vnefun(TyPtr ty, TermPtr ne, StackShape shape) {
  Value v{};
  v.kind = Value::Kind::NeFun;
  v.ty = std::move(ty);
  v.ne = std::move(ne);
  v.shape = std::move(shape);
  return std::make_shared<Value>(std::move(v));
}

ValuePtr vbox(ValuePtr inner) {
  Value v{};
  v.kind = Value::Kind::Box;
  v.inner = std::move(inner);
  return std::make_shared<Value>(std::move(v));
}

Env env_top(std::vector<ValuePtr> locals, StackShape shape) {
  return std::make_shared<EnvNode>(EnvNode{nullptr, 0, std::move(locals), std::move(shape)});
}

Env env_cons(std::size_t offset, Env tail, std::vector<ValuePtr> locals, StackShape shape) {
  return std::make_shared<EnvNode>(
      EnvNode{std::move(tail), offset, std::move(locals), std::move(shape)});
}

Env env_extend(const Env& r, ValuePtr v) {
  EnvNode n = *r;
  n.locals.push_back(std::move(v));
  return std::make_shared<EnvNode>(std::move(n));
}

Env env_trunc(const Env& r, std::size_t n) {
  if (n == 0) return r;
  if (!r->tail) throw std::out_of_range("truncation exceeds environment");
  return env_trunc(r->tail, n - 1);
}

std::size_t env_trunc_offset(const Env& r, std::size_t n) {
  if (n == 0) return 0;
  if (!r->tail) throw std::out_of_range("truncation exceeds environment");
  return r->offset + env_trunc_offset(r->tail, n - 1);
}

ValuePtr weaken_value(const ValuePtr& v, const KWeak& g, const StackShape& dst) {
  switch (v->kind) {
    case Value::Kind::Ne: return vne(v->ty, kweak_rename(v->ne, g), dst);
    case Value::Kind::NeFun: return vnefun(v->ty, kweak_rename(v->ne, g), dst);
    case Value::Kind::Clos: return vclos(weaken_env(v->env, g, dst), v->body);
    case Value::Kind::Box:
      return vbox(weaken_value(v->inner, kweak_ext(g, 1), shape_push(dst)));
  }
  throw std::logic_error("unreachable");
}

Env weaken_env(const Env& r, const KWeak& g, const StackShape& dst) {
  std::vector<ValuePtr> locals;
  locals.reserve(r->locals.size());
  for (const auto& v : r->locals) locals.push_back(weaken_value(v, g, dst));
  if (!r->tail) return env_top(std::move(locals), dst);
  std::size_t off = kweak_trunc_offset(g, r->offset);
  Env tail = weaken_env(r->tail, kweak_trunc(g, r->offset), shape_truncate(dst, off));
  return env_cons(off, std::move(tail), std::move(locals), dst);
}

// ---------------------------------------------------------------------------
// Evaluation, reification, reflection
// ---------------------------------------------------------------------------

ValuePtr eval(const TermPtr& t, const Env& r) {
  switch (t->kind) {
    case Term::Kind::Var: {
      if (t->ix >= r->locals.size())
        throw std::logic_error("evaluation variable lookup out of range");
      return r->locals[r->locals.size() - 1 - t->ix];
    }
    case Term::Kind::Box:
      return vbox(eval(t->a, env_cons(1, r, {}, shape_push(r->shape))));
    case Term::Kind::Unbox: {
      std::size_t m = env_trunc_offset(r, t->ix);
      Env r2 = env_trunc(r, t->ix);
      ValuePtr v = eval(t->a, r2);
      if (v->kind != Value::Kind::Box)
        throw std::logic_error("evaluation reached unbox of a non-box value");
      return weaken_value(v->inner, kweak_ext(kweak_id(r2->shape), m), r->shape);
    }
    case Term::Kind::Lam: return vclos(r, t->a);
    case Term::Kind::App:
      return apply_fun(eval(t->a, r), kweak_id(r->shape), eval(t->b, r), r->shape);
    case Term::Kind::CBox:
    case Term::Kind::CUnbox:
      throw TypeError(TypeError::Kind::UnsupportedFragment,
                      "evaluation covers only the box/arrow fragment");
  }
  throw std::logic_error("unreachable");
}

ValuePtr apply_fun(const ValuePtr& f, const KWeak& g, const ValuePtr& a, const StackShape& dst) {
  if (f->kind == Value::Kind::Clos)
    return eval(f->body, env_extend(weaken_env(f->env, g, dst), a));
  if (f->kind == Value::Kind::NeFun) {
    TermPtr fn = kweak_rename(f->ne, g);
    TermPtr arg = reify(f->ty->a, dst, a);
    return reflect(f->ty->b, dst, tapp(std::move(fn), std::move(arg)));
  }
  throw std::logic_error("application of a non-function value");
}

ValuePtr reflect(const TyPtr& ty, const StackShape& shape, const TermPtr& neutral) {
  switch (ty->kind) {
    case Ty::Kind::Base: return vne(ty, neutral, shape);
    case Ty::Kind::Box:
      return vbox(reflect(ty->a, shape_push(shape), tunbox(1, neutral)));
    case Ty::Kind::Arr: return vnefun(ty, neutral, shape);
    case Ty::Kind::Ctx:
      throw TypeError(TypeError::Kind::UnsupportedFragment,
                      "reflection covers only the box/arrow fragment");
  }
  throw std::logic_error("unreachable");
}

TermPtr reify(const TyPtr& ty, const StackShape& shape, const ValuePtr& v) {
  switch (ty->kind) {
    case Ty::Kind::Base:
      if (v->kind != Value::Kind::Ne) throw std::logic_error("reify: base type expects a neutral");
      return v->ne;
    case Ty::Kind::Box: {
      if (v->kind != Value::Kind::Box) throw std::logic_error("reify: box type expects a box value");
      return tbox(reify(ty->a, shape_push(shape), v->inner));
    }
    case Ty::Kind::Arr: {
      StackShape ext = shape;
      ext.sizes.back() += 1;
      ValuePtr arg = reflect(ty->a, ext, tvar(0));
      ValuePtr res = apply_fun(v, kweak_p(kweak_id(shape)), arg, ext);
      return tlam(ty->a, reify(ty->b, ext, res));
    }
    case Ty::Kind::Ctx:
      throw TypeError(TypeError::Kind::UnsupportedFragment,
                      "reification covers only the box/arrow fragment");
  }
  throw std::logic_error("unreachable");
}

Env id_env(const CtxStack& g) {
  Env r;
  for (std::size_t i = 0; i < g.contexts.size(); ++i) {
    if (i == 0)
      r = env_top({}, StackShape{{0}});
    else
      r = env_cons(1, r, {}, shape_push(r->shape));
    for (const auto& [name, ty] : g.contexts[i].bindings) {
      (void)name;
      StackShape cur = r->shape;
      StackShape ext = cur;
      ext.sizes.back() += 1;
      r = weaken_env(r, kweak_p(kweak_id(cur)), ext);
      r = env_extend(r, reflect(ty, ext, tvar(0)));
    }
  }
  return r;
}

Env env_of_ksub(const KSub& s, const CtxStack& dom) {
  auto level_env = [&](const LocalSub& sub, std::size_t above) {
    CtxStack d = above == 0 ? dom : stack_truncate(dom, above);
    Env base = id_env(d);
    std::vector<ValuePtr> locals;
    locals.reserve(sub.terms.size());
    for (const auto& t : sub.terms) locals.push_back(eval(t, base));
    return std::pair<std::vector<ValuePtr>, StackShape>{std::move(locals), shape_of(d)};
  };
  std::size_t total = trunc_offset(s, s.exts.size());
  auto [baseLocals, baseShape] = level_env(s.base, total);
  Env r = env_top(std::move(baseLocals), std::move(baseShape));
  for (std::size_t i = 0; i < s.exts.size(); ++i) {
    std::size_t above = trunc_offset(s, s.exts.size() - 1 - i);
    auto [locals, shape] = level_env(s.exts[i].second, above);
    r = env_cons(s.exts[i].first, r, std::move(locals), std::move(shape));
  }
  return r;
}

TermPtr nbe(System sys, const CtxStack& g, const TyPtr& ty, const TermPtr& t) {
  if (term_is_contextual(t) || ty_is_contextual(ty) || stack_is_contextual(g))
    throw TypeError(TypeError::Kind::UnsupportedFragment,
                    "normalization covers only the box/arrow fragment");
  TyPtr got = synth(sys, g, t);
  if (!ty_eq(got, ty))
    throw TypeError(TypeError::Kind::TypeMismatch, "term does not have the stated type");
  return reify(ty, shape_of(g), eval(t, id_env(g)));
}

} // namespace mlc
