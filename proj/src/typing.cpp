#include "mlc/typing.hpp"

#include <sstream>

namespace mlc {

bool ul_allowed(System sys, std::size_t n) {
  switch (sys) {
    case System::K: return n == 1;
    case System::T: return n <= 1;
    case System::K4: return n >= 1;
    case System::S4: return true;
  }
  return false;
}

const char* system_name(System sys) {
  switch (sys) {
    case System::K: return "k";
    case System::T: return "t";
    case System::K4: return "k4";
    case System::S4: return "s4";
  }
  return "?";
}

System system_from_name(const std::string& name) {
  if (name == "k" || name == "K") return System::K;
  if (name == "t" || name == "T") return System::T;
  if (name == "k4" || name == "K4") return System::K4;
  if (name == "s4" || name == "S4") return System::S4;
  throw std::invalid_argument("unknown system: " + name);
}

const char* type_error_kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVar: return "unbound variable";
    case TypeError::Kind::NotAFunction: return "not a function";
    case TypeError::Kind::NotABox: return "not a box";
    case TypeError::Kind::UlViolation: return "UL violation";
    case TypeError::Kind::StackTooShort: return "stack too short";
    case TypeError::Kind::SubstMismatch: return "substitution mismatch";
    case TypeError::Kind::TypeMismatch: return "type mismatch";
    case TypeError::Kind::MissingAnnotation: return "missing annotation";
    case TypeError::Kind::UnsupportedFragment: return "unsupported fragment";
  }
  return "?";
}

namespace {

[[noreturn]] void fail(TypeError::Kind k, const std::string& msg) { throw TypeError(k, msg); }

[[noreturn]] void fail_ul(System sys, std::size_t level, const std::string& what) {
  std::ostringstream os;
  os << what << " " << level << " is not admissible in system " << system_name(sys);
  TypeError e(TypeError::Kind::UlViolation, os.str());
  e.level = level;
  e.sys = sys;
  throw e;
}

void check_offset(System sys, const CtxStack& g, std::size_t n, const char* what) {
  if (!ul_allowed(sys, n)) fail_ul(sys, n, what);
  if (n >= stack_len(g))
    fail(TypeError::Kind::StackTooShort,
         std::string(what) + " " + std::to_string(n) + " exceeds context stack of depth " +
             std::to_string(stack_len(g)));
}

} // namespace

TyPtr synth(System sys, const CtxStack& g, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: {
      const LocalCtx& top = g.contexts.back();
      if (t->ix >= top.size())
        fail(TypeError::Kind::UnboundVar,
             "variable index " + std::to_string(t->ix) + " exceeds the current world");
      return top.bindings[top.size() - 1 - t->ix].second;
    }
    case Term::Kind::Box: return ty_box(synth(sys, stack_push(g), t->a));
    case Term::Kind::Unbox: {
      check_offset(sys, g, t->ix, "unbox level");
      TyPtr ty = synth(sys, stack_truncate(g, t->ix), t->a);
      if (ty->kind != Ty::Kind::Box)
        fail(TypeError::Kind::NotABox, "unbox expects a boxed term");
      return ty->a;
    }
    case Term::Kind::Lam: {
      if (!t->ann)
        fail(TypeError::Kind::MissingAnnotation, "lambda binder requires a type annotation");
      TyPtr cod = synth(sys, stack_bind(g, "", t->ann), t->a);
      return ty_arr(t->ann, cod);
    }
    case Term::Kind::App: {
      TyPtr fn = synth(sys, g, t->a);
      if (fn->kind != Ty::Kind::Arr)
        fail(TypeError::Kind::NotAFunction, "application head is not a function");
      TyPtr arg = synth(sys, g, t->b);
      if (!ty_eq(fn->a, arg))
        fail(TypeError::Kind::TypeMismatch, "argument type does not match the function domain");
      return fn->b;
    }
    case Term::Kind::CBox:
      return ty_ctx(t->capture, synth(sys, stack_append(g, t->capture), t->a));
    case Term::Kind::CUnbox: {
      std::size_t off = semi_offset(t->sub);
      if (off >= stack_len(g))
        fail(TypeError::Kind::StackTooShort,
             "semi-K-substitution offset " + std::to_string(off) +
                 " exceeds context stack of depth " + std::to_string(stack_len(g)));
      TyPtr ty = synth(sys, stack_truncate(g, off), t->a);
      if (ty->kind != Ty::Kind::Ctx)
        fail(TypeError::Kind::NotABox, "cunbox expects a term of contextual type");
      check_semisub(sys, g, t->sub, ty->capture);
      return ty->a;
    }
  }
  fail(TypeError::Kind::TypeMismatch, "malformed term");
}

void check_semisub(System sys, const CtxStack& g, const SemiKSub& s, const CtxList& d) {
  if (s.exts.size() != d.size())
    fail(TypeError::Kind::SubstMismatch,
         "semi-K-substitution provides " + std::to_string(s.exts.size()) +
             " local substitutions for " + std::to_string(d.size()) + " captured contexts");
  // Process extensions from the top; each offset truncates the ambient stack
  // for everything beneath it.
  CtxStack cur = g;
  for (std::size_t i = s.exts.size(); i-- > 0;) {
    const auto& [off, sub] = s.exts[i];
    const LocalCtx& target = d[i];
    if (sub.size() != target.size())
      fail(TypeError::Kind::SubstMismatch,
           "local substitution length " + std::to_string(sub.size()) +
               " does not match context of size " + std::to_string(target.size()));
    for (std::size_t j = 0; j < sub.size(); ++j) {
      TyPtr got = synth(sys, cur, sub.terms[j]);
      if (!ty_eq(got, target.bindings[j].second))
        fail(TypeError::Kind::SubstMismatch,
             "substituted term does not match the type of its binding");
    }
    check_offset(sys, cur, off, "semi-K-substitution offset");
    cur = stack_truncate(cur, off);
  }
}

} // namespace mlc
