#include "mlc/subst.hpp"

#include <stdexcept>

namespace mlc {

// ---------------------------------------------------------------------------
// World-indexed term traversals
//
// d tracks how many worlds above the target world the traversal currently is:
// box ascends, unbox n descends by n, cbox ascends by the capture length and
// the components of a cunbox live at the depths dictated by its offsets. Once
// d would go negative the target world has been truncated away and the
// subterm is returned unchanged.
// ---------------------------------------------------------------------------

namespace {

template <typename F>
TermPtr map_cunbox(const TermPtr& t, long d, F&& recurse) {
  SemiKSub out;
  out.exts.resize(t->sub.exts.size());
  long c = 0;
  for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
    const auto& [off, sub] = t->sub.exts[i];
    LocalSub mapped;
    mapped.terms.reserve(sub.terms.size());
    long depth = d - c;
    for (const auto& s : sub.terms)
      mapped.terms.push_back(depth < 0 ? s : recurse(s, depth));
    out.exts[i] = {off, std::move(mapped)};
    c += static_cast<long>(off);
  }
  long bodyDepth = d - c;
  TermPtr body = bodyDepth < 0 ? t->a : recurse(t->a, bodyDepth);
  return tcunbox(std::move(body), std::move(out));
}

TermPtr shift_rec(const TermPtr& t, long delta, std::size_t cutoff, long d) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (d == 0 && t->ix >= cutoff)
        return tvar(static_cast<std::size_t>(static_cast<long>(t->ix) + delta));
      return t;
    case Term::Kind::Box: return tbox(shift_rec(t->a, delta, cutoff, d + 1));
    case Term::Kind::Unbox: {
      long d2 = d - static_cast<long>(t->ix);
      return tunbox(t->ix, d2 < 0 ? t->a : shift_rec(t->a, delta, cutoff, d2));
    }
    case Term::Kind::Lam:
      return tlam(t->ann, shift_rec(t->a, delta, d == 0 ? cutoff + 1 : cutoff, d));
    case Term::Kind::App:
      return tapp(shift_rec(t->a, delta, cutoff, d), shift_rec(t->b, delta, cutoff, d));
    case Term::Kind::CBox:
      return tcbox(t->capture,
                   shift_rec(t->a, delta, cutoff, d + static_cast<long>(t->capture.size())));
    case Term::Kind::CUnbox:
      return map_cunbox(t, d, [&](const TermPtr& s, long depth) {
        return shift_rec(s, delta, cutoff, depth);
      });
  }
  return t;
}

TermPtr subst_rec(const TermPtr& t, const TermPtr& s, std::size_t x, long d) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (d != 0) return t;
      if (t->ix == x) return s;
      if (t->ix > x) return tvar(t->ix - 1);
      return t;
    case Term::Kind::Box: return tbox(subst_rec(t->a, s, x, d + 1));
    case Term::Kind::Unbox: {
      long d2 = d - static_cast<long>(t->ix);
      return tunbox(t->ix, d2 < 0 ? t->a : subst_rec(t->a, s, x, d2));
    }
    case Term::Kind::Lam:
      if (d == 0) return tlam(t->ann, subst_rec(t->a, shift_top(s, 1, 0), x + 1, 0));
      return tlam(t->ann, subst_rec(t->a, s, x, d));
    case Term::Kind::App:
      return tapp(subst_rec(t->a, s, x, d), subst_rec(t->b, s, x, d));
    case Term::Kind::CBox:
      return tcbox(t->capture, subst_rec(t->a, s, x, d + static_cast<long>(t->capture.size())));
    case Term::Kind::CUnbox:
      return map_cunbox(t, d, [&](const TermPtr& u, long depth) {
        return subst_rec(u, s, x, depth);
      });
  }
  return t;
}

bool occurs_rec(const TermPtr& t, std::size_t x, long d) {
  switch (t->kind) {
    case Term::Kind::Var: return d == 0 && t->ix == x;
    case Term::Kind::Box: return occurs_rec(t->a, x, d + 1);
    case Term::Kind::Unbox: {
      long d2 = d - static_cast<long>(t->ix);
      return d2 < 0 ? false : occurs_rec(t->a, x, d2);
    }
    case Term::Kind::Lam: return occurs_rec(t->a, x + (d == 0 ? 1 : 0), d);
    case Term::Kind::App: return occurs_rec(t->a, x, d) || occurs_rec(t->b, x, d);
    case Term::Kind::CBox: return occurs_rec(t->a, x, d + static_cast<long>(t->capture.size()));
    case Term::Kind::CUnbox: {
      long c = 0;
      for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
        const auto& [off, sub] = t->sub.exts[i];
        long depth = d - c;
        if (depth >= 0)
          for (const auto& s : sub.terms)
            if (occurs_rec(s, x, depth)) return true;
        c += static_cast<long>(off);
      }
      long bodyDepth = d - c;
      return bodyDepth < 0 ? false : occurs_rec(t->a, x, bodyDepth);
    }
  }
  return false;
}

} // namespace

TermPtr shift_top(const TermPtr& t, long delta, std::size_t cutoff) {
  if (delta == 0) return t;
  return shift_rec(t, delta, cutoff, 0);
}

bool occurs_top(const TermPtr& t, std::size_t ix) { return occurs_rec(t, ix, 0); }

TermPtr term_subst(const TermPtr& t, std::size_t x, const TermPtr& s) {
  return subst_rec(t, s, x, 0);
}

// ---------------------------------------------------------------------------
// Modal transformations
// ---------------------------------------------------------------------------

TermPtr mot_apply(const TermPtr& t, std::size_t n, std::size_t l) {
  switch (t->kind) {
    case Term::Kind::Var: return t;
    case Term::Kind::Box: return tbox(mot_apply(t->a, n, l + 1));
    case Term::Kind::Unbox: {
      std::size_t m = t->ix;
      if (m <= l) return tunbox(m, mot_apply(t->a, n, l - m));
      return tunbox(n + m - 1, t->a);
    }
    case Term::Kind::Lam: return tlam(t->ann, mot_apply(t->a, n, l));
    case Term::Kind::App: return tapp(mot_apply(t->a, n, l), mot_apply(t->b, n, l));
    case Term::Kind::CBox: return tcbox(t->capture, mot_apply(t->a, n, l + t->capture.size()));
    case Term::Kind::CUnbox: {
      // The cunbox offsets play the role of the unbox level, consumed from
      // the top. The offset spanning position l absorbs the transformation;
      // components below it are untouched.
      SemiKSub out;
      out.exts.resize(t->sub.exts.size());
      std::size_t c = 0;
      bool spanned = false;
      for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
        const auto& [off, sub] = t->sub.exts[i];
        if (spanned) {
          out.exts[i] = {off, sub};
          continue;
        }
        LocalSub mapped;
        mapped.terms.reserve(sub.terms.size());
        for (const auto& s : sub.terms) mapped.terms.push_back(mot_apply(s, n, l - c));
        if (c + off <= l) {
          out.exts[i] = {off, std::move(mapped)};
          c += off;
        } else {
          out.exts[i] = {off + n - 1, std::move(mapped)};
          spanned = true;
        }
      }
      TermPtr body = spanned ? t->a : mot_apply(t->a, n, l - c);
      return tcunbox(std::move(body), std::move(out));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// K-substitution algebra
// ---------------------------------------------------------------------------

KSub trunc(const KSub& s, std::size_t n) {
  if (n > s.exts.size()) throw std::out_of_range("truncation exceeds K-substitution");
  KSub r;
  r.base = s.base;
  r.exts.assign(s.exts.begin(), s.exts.end() - static_cast<std::ptrdiff_t>(n));
  return r;
}

std::size_t trunc_offset(const KSub& s, std::size_t n) {
  if (n > s.exts.size()) throw std::out_of_range("truncation exceeds K-substitution");
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) m += s.exts[s.exts.size() - 1 - i].first;
  return m;
}

LocalSub local_sub_apply(const LocalSub& sub, const KSub& s) {
  LocalSub r;
  r.terms.reserve(sub.terms.size());
  for (const auto& t : sub.terms) r.terms.push_back(ksub_apply(t, s));
  return r;
}

namespace {

// Pushes a K-substitution under a binder: existing terms move past the new
// binding and the binding maps to itself.
LocalSub lift_local(const LocalSub& sub) {
  LocalSub r;
  r.terms.reserve(sub.terms.size() + 1);
  for (const auto& t : sub.terms) r.terms.push_back(shift_top(t, 1, 0));
  r.terms.push_back(tvar(0));
  return r;
}

} // namespace

LocalSub local_id(std::size_t size) {
  LocalSub r;
  r.terms.reserve(size);
  for (std::size_t j = 0; j < size; ++j) r.terms.push_back(tvar(size - 1 - j));
  return r;
}

TermPtr ksub_apply(const TermPtr& t, const KSub& s) {
  switch (t->kind) {
    case Term::Kind::Var: {
      const LocalSub& top = s.top();
      if (t->ix >= top.size())
        throw std::logic_error("K-substitution variable lookup out of range");
      return top.terms[top.size() - 1 - t->ix];
    }
    case Term::Kind::Box: {
      KSub s2 = s;
      s2.exts.emplace_back(1, LocalSub{});
      return tbox(ksub_apply(t->a, s2));
    }
    case Term::Kind::Unbox:
      return tunbox(trunc_offset(s, t->ix), ksub_apply(t->a, trunc(s, t->ix)));
    case Term::Kind::Lam: {
      KSub s2 = s;
      if (s2.exts.empty())
        s2.base = lift_local(s2.base);
      else
        s2.exts.back().second = lift_local(s2.exts.back().second);
      return tlam(t->ann, ksub_apply(t->a, s2));
    }
    case Term::Kind::App: return tapp(ksub_apply(t->a, s), ksub_apply(t->b, s));
    case Term::Kind::CBox: {
      KSub s2 = s;
      for (const auto& ctx : t->capture) s2.exts.emplace_back(1, local_id(ctx.size()));
      return tcbox(t->capture, ksub_apply(t->a, s2));
    }
    case Term::Kind::CUnbox: {
      SemiKSub out;
      out.exts.resize(t->sub.exts.size());
      KSub cur = s;
      for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
        const auto& [off, sub] = t->sub.exts[i];
        out.exts[i] = {trunc_offset(cur, off), local_sub_apply(sub, cur)};
        cur = trunc(cur, off);
      }
      return tcunbox(ksub_apply(t->a, cur), std::move(out));
    }
  }
  return t;
}

KSub ksub_id(const StackShape& shape) {
  KSub r;
  r.base = local_id(shape.sizes.front());
  for (std::size_t i = 1; i < shape.sizes.size(); ++i)
    r.exts.emplace_back(1, local_id(shape.sizes[i]));
  return r;
}

KSub ksub_id(const CtxStack& g) { return ksub_id(shape_of(g)); }

KSub compose(const KSub& s, const KSub& d) {
  KSub r;
  r.exts.resize(s.exts.size());
  KSub cur = d;
  for (std::size_t i = s.exts.size(); i-- > 0;) {
    const auto& [off, sub] = s.exts[i];
    r.exts[i] = {trunc_offset(cur, off), local_sub_apply(sub, cur)};
    cur = trunc(cur, off);
  }
  r.base = local_sub_apply(s.base, cur);
  return r;
}

KSub mot_as_ksub(std::size_t n, std::size_t l, const CtxStack& dom, const CtxStack& cod) {
  const std::size_t c = stack_len(cod);
  const std::size_t dlen = stack_len(dom);
  auto fail = []() -> void { throw std::invalid_argument("mot_as_ksub: incompatible shapes"); };
  if (c < l + 2) fail();
  if (dlen + 1 != c + n) fail();
  auto sz = [](const CtxStack& g, std::size_t i) { return g.contexts[i].size(); };

  KSub r;
  if (n >= 1) {
    // cod = G; D0; D1..Dl    dom = G; C1; ..; (Cn, D0); D1..Dl
    const std::size_t gLen = c - 1 - l;
    const std::size_t d0 = sz(cod, gLen);
    for (std::size_t i = 0; i < gLen; ++i)
      if (sz(dom, i) != sz(cod, i)) fail();
    if (sz(dom, gLen + n - 1) < d0) fail();
    for (std::size_t i = 0; i < l; ++i)
      if (sz(dom, gLen + n + i) != sz(cod, gLen + 1 + i)) fail();

    LocalSub wk;
    for (std::size_t j = 0; j < d0; ++j) wk.terms.push_back(tvar(d0 - 1 - j));

    r.base = local_id(sz(cod, 0));
    for (std::size_t i = 1; i < gLen; ++i) r.exts.emplace_back(1, local_id(sz(cod, i)));
    r.exts.emplace_back(n, std::move(wk));
    for (std::size_t i = gLen + 1; i < c; ++i) r.exts.emplace_back(1, local_id(sz(cod, i)));
  } else {
    // cod = G; C1; C2; D1..Dl    dom = G; (C1, C2); D1..Dl
    const std::size_t gLen = c - 2 - l;
    const std::size_t c1 = sz(cod, gLen);
    const std::size_t c2 = sz(cod, gLen + 1);
    const std::size_t fused = c1 + c2;
    for (std::size_t i = 0; i < gLen; ++i)
      if (sz(dom, i) != sz(cod, i)) fail();
    if (sz(dom, gLen) != fused) fail();
    for (std::size_t i = 0; i < l; ++i)
      if (sz(dom, gLen + 1 + i) != sz(cod, gLen + 2 + i)) fail();

    LocalSub wk1, wk2;
    for (std::size_t j = 0; j < c1; ++j) wk1.terms.push_back(tvar(fused - 1 - j));
    for (std::size_t j = 0; j < c2; ++j) wk2.terms.push_back(tvar(c2 - 1 - j));

    if (gLen == 0) {
      r.base = std::move(wk1);
    } else {
      r.base = local_id(sz(cod, 0));
      for (std::size_t i = 1; i < gLen; ++i) r.exts.emplace_back(1, local_id(sz(cod, i)));
      r.exts.emplace_back(1, std::move(wk1));
    }
    r.exts.emplace_back(0, std::move(wk2));
    for (std::size_t i = gLen + 2; i < c; ++i) r.exts.emplace_back(1, local_id(sz(cod, i)));
  }
  return r;
}

static bool local_sub_aeq(const LocalSub& a, const LocalSub& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!alpha_eq(a.terms[i], b.terms[i])) return false;
  return true;
}

bool ksub_alpha_eq(const KSub& a, const KSub& b) {
  if (!local_sub_aeq(a.base, b.base)) return false;
  if (a.exts.size() != b.exts.size()) return false;
  for (std::size_t i = 0; i < a.exts.size(); ++i) {
    if (a.exts[i].first != b.exts[i].first) return false;
    if (!local_sub_aeq(a.exts[i].second, b.exts[i].second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Semi-K-substitutions
// ---------------------------------------------------------------------------

KSub semi_to_ksub(const SemiKSub& s, const StackShape& ambient) {
  KSub r = ksub_id(shape_truncate(ambient, semi_offset(s)));
  r.exts.insert(r.exts.end(), s.exts.begin(), s.exts.end());
  return r;
}

KSub semi_to_ksub(const SemiKSub& s, const CtxStack& ambient) {
  return semi_to_ksub(s, shape_of(ambient));
}

SemiKSub semi_id(const CtxList& d) {
  SemiKSub r;
  r.exts.reserve(d.size());
  for (const auto& ctx : d) r.exts.emplace_back(1, local_id(ctx.size()));
  return r;
}

} // namespace mlc
