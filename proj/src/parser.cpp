#include "mlc/parser.hpp"

#include <cctype>
#include <memory>
#include <set>
#include <sstream>

namespace mlc {

const char* parse_error_kind_name(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::Lex: return "lexical error";
    case ParseError::Kind::Parse: return "parse error";
    case ParseError::Kind::Scope: return "scope error";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident, Nat, Lambda, Dot, Colon, Semi, Comma, Caret,
  LParen, RParen, LBrack, RBrack, LBrace, RBrace,
  Arrow, Turnstile,
  KwB, KwBox, KwUnbox, KwCBox, KwCUnbox, KwWith, KwSystem, KwDef,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t nat = 0;
  Span span;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Nat: return "number";
    case Tok::Lambda: return "'\\'";
    case Tok::Dot: return "'.'";
    case Tok::Colon: return "':'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Caret: return "'^'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Arrow: return "'->'";
    case Tok::Turnstile: return "'|-'";
    case Tok::KwB: return "'B'";
    case Tok::KwBox: return "'box'";
    case Tok::KwUnbox: return "'unbox'";
    case Tok::KwCBox: return "'cbox'";
    case Tok::KwCUnbox: return "'cunbox'";
    case Tok::KwWith: return "'with'";
    case Tok::KwSystem: return "'system'";
    case Tok::KwDef: return "'def'";
    case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, Span sp, std::size_t nat = 0) {
    out.push_back(Token{k, std::move(text), nat, sp});
  };
  while (i < src.size()) {
    char c = src[i];
    Span sp{line, col};
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::Arrow, "->", sp);
      i += 2;
      col += 2;
      continue;
    }
    if (c == '|' && i + 1 < src.size() && src[i + 1] == '-') {
      push(Tok::Turnstile, "|-", sp);
      i += 2;
      col += 2;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string text = src.substr(i, j - i);
      push(Tok::Nat, text, sp, static_cast<std::size_t>(std::stoull(text)));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_' || src[j] == '\''))
        ++j;
      std::string text = src.substr(i, j - i);
      Tok k = Tok::Ident;
      if (text == "B") k = Tok::KwB;
      else if (text == "box") k = Tok::KwBox;
      else if (text == "unbox") k = Tok::KwUnbox;
      else if (text == "cbox") k = Tok::KwCBox;
      else if (text == "cunbox") k = Tok::KwCUnbox;
      else if (text == "with") k = Tok::KwWith;
      else if (text == "system") k = Tok::KwSystem;
      else if (text == "def") k = Tok::KwDef;
      push(k, std::move(text), sp);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::Lambda; break;
      case '.': k = Tok::Dot; break;
      case ':': k = Tok::Colon; break;
      case ';': k = Tok::Semi; break;
      case ',': k = Tok::Comma; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      default:
        throw ParseError(ParseError::Kind::Lex, sp,
                         std::string("unexpected character '") + c + "'");
    }
    push(k, std::string(1, c), sp);
    ++i;
    ++col;
  }
  out.push_back(Token{Tok::End, "", 0, Span{line, col}});
  return out;
}

// ---------------------------------------------------------------------------
// Surface syntax
// ---------------------------------------------------------------------------

struct STerm;
using SPtr = std::shared_ptr<const STerm>;

struct SExt {
  std::vector<SPtr> terms;
  std::size_t offset = 0;
  Span span;
};

struct STerm {
  enum class K { Var, Box, Unbox, Lam, App, CBox, CUnbox };
  K k;
  Span span;
  std::string name;  // Var / Lam binder
  std::size_t nat = 0;
  SPtr a, b;
  TyPtr ann;
  CtxList capture;
  std::vector<SExt> sub; // bottom to top
};

SPtr mkS(STerm&& t) { return std::make_shared<STerm>(std::move(t)); }

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;

  const Token& peek() const { return toks[pos]; }
  const Token& next() { return toks[pos++]; }
  bool at(Tok k) const { return peek().kind == k; }

  [[noreturn]] void err(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Parse, peek().span, msg);
  }

  Token expect(Tok k) {
    if (!at(k)) err(std::string("expected ") + tok_name(k) + ", found " + tok_name(peek().kind));
    return next();
  }

  // -- types ----------------------------------------------------------------

  TyPtr parseType() {
    TyPtr lhs = parseTypePrefix();
    if (at(Tok::Arrow)) {
      next();
      return ty_arr(lhs, parseType());
    }
    return lhs;
  }

  TyPtr parseTypePrefix() {
    if (at(Tok::LBrack) && toks[pos + 1].kind == Tok::RBrack) {
      next();
      next();
      return ty_box(parseTypePrefix());
    }
    return parseTypeAtom();
  }

  TyPtr parseTypeAtom() {
    if (at(Tok::KwB)) {
      next();
      return ty_base();
    }
    if (at(Tok::LParen)) {
      next();
      TyPtr t = parseType();
      expect(Tok::RParen);
      return t;
    }
    if (at(Tok::LBrack)) {
      next();
      CtxList ctxs = parseCtxList(true);
      expect(Tok::Turnstile);
      TyPtr body = parseType();
      expect(Tok::RBrack);
      return ty_ctx(std::move(ctxs), std::move(body));
    }
    err("expected a type");
  }

  // allowEmpty: a contextual capture may list zero contexts.
  CtxList parseCtxList(bool allowEmpty) {
    CtxList ctxs;
    if (at(Tok::Turnstile)) {
      if (!allowEmpty) err("context stack must list at least one context ('.' for empty)");
      return ctxs;
    }
    ctxs.push_back(parseCtx());
    while (at(Tok::Semi)) {
      next();
      ctxs.push_back(parseCtx());
    }
    return ctxs;
  }

  LocalCtx parseCtx() {
    LocalCtx ctx;
    if (at(Tok::Dot)) {
      next();
      return ctx;
    }
    while (true) {
      Token name = expect(Tok::Ident);
      expect(Tok::Colon);
      TyPtr ty = parseType();
      for (const auto& [n, t] : ctx.bindings) {
        (void)t;
        if (n == name.text)
          throw ParseError(ParseError::Kind::Parse, name.span,
                           "duplicate name '" + name.text + "' in one context");
      }
      ctx.bindings.emplace_back(name.text, std::move(ty));
      if (!at(Tok::Comma)) break;
      next();
    }
    return ctx;
  }

  // -- terms ----------------------------------------------------------------

  SPtr parseTerm() {
    if (at(Tok::Lambda)) {
      Span sp = peek().span;
      next();
      Token name = expect(Tok::Ident);
      TyPtr ann;
      if (at(Tok::Colon)) {
        next();
        ann = parseType();
      }
      expect(Tok::Dot);
      SPtr body = parseTerm();
      STerm t{};
      t.k = STerm::K::Lam;
      t.span = sp;
      t.name = name.text;
      t.ann = std::move(ann);
      t.a = std::move(body);
      return mkS(std::move(t));
    }
    SPtr head = parseAtom();
    while (startsAtom()) {
      SPtr arg = parseAtom();
      STerm t{};
      t.k = STerm::K::App;
      t.span = head->span;
      t.a = std::move(head);
      t.b = std::move(arg);
      head = mkS(std::move(t));
    }
    return head;
  }

  bool startsAtom() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::KwBox:
      case Tok::KwUnbox:
      case Tok::KwCBox:
      case Tok::KwCUnbox:
      case Tok::LParen: return true;
      default: return false;
    }
  }

  SPtr parseAtom() {
    Span sp = peek().span;
    switch (peek().kind) {
      case Tok::Ident: {
        STerm t{};
        t.k = STerm::K::Var;
        t.span = sp;
        t.name = next().text;
        return mkS(std::move(t));
      }
      case Tok::KwBox: {
        next();
        STerm t{};
        t.k = STerm::K::Box;
        t.span = sp;
        t.a = parseAtom();
        return mkS(std::move(t));
      }
      case Tok::KwUnbox: {
        next();
        Token lvl = expect(Tok::Nat);
        STerm t{};
        t.k = STerm::K::Unbox;
        t.span = sp;
        t.nat = lvl.nat;
        t.a = parseAtom();
        return mkS(std::move(t));
      }
      case Tok::LParen: {
        next();
        SPtr t = parseTerm();
        expect(Tok::RParen);
        return t;
      }
      case Tok::KwCBox: {
        next();
        expect(Tok::LBrace);
        CtxList capture;
        if (!at(Tok::RBrace)) {
          capture.push_back(parseCtx());
          while (at(Tok::Semi)) {
            next();
            capture.push_back(parseCtx());
          }
        }
        expect(Tok::RBrace);
        STerm t{};
        t.k = STerm::K::CBox;
        t.span = sp;
        t.capture = std::move(capture);
        t.a = parseAtom();
        return mkS(std::move(t));
      }
      case Tok::KwCUnbox: {
        next();
        SPtr body = parseAtom();
        expect(Tok::KwWith);
        expect(Tok::LParen);
        std::vector<SExt> exts;
        if (!at(Tok::RParen)) {
          exts.push_back(parseSExt());
          while (at(Tok::Semi)) {
            next();
            exts.push_back(parseSExt());
          }
        }
        expect(Tok::RParen);
        STerm t{};
        t.k = STerm::K::CUnbox;
        t.span = sp;
        t.a = std::move(body);
        t.sub = std::move(exts);
        return mkS(std::move(t));
      }
      default: err("expected a term");
    }
  }

  SExt parseSExt() {
    SExt ext;
    ext.span = peek().span;
    if (!at(Tok::Caret)) {
      ext.terms.push_back(parseTerm());
      while (at(Tok::Comma)) {
        next();
        ext.terms.push_back(parseTerm());
      }
    }
    expect(Tok::Caret);
    ext.offset = expect(Tok::Nat).nat;
    return ext;
  }
};

// ---------------------------------------------------------------------------
// Scope resolution: named surface terms to nameless core terms
// ---------------------------------------------------------------------------

using Scopes = std::vector<std::vector<std::string>>; // names per world, oldest first

Scopes scopes_of(const CtxStack& g) {
  Scopes sc;
  sc.reserve(g.contexts.size());
  for (const auto& ctx : g.contexts) {
    std::vector<std::string> names;
    names.reserve(ctx.size());
    for (const auto& [n, t] : ctx.bindings) {
      (void)t;
      names.push_back(n);
    }
    sc.push_back(std::move(names));
  }
  return sc;
}

TermPtr resolve(const SPtr& t, const Scopes& sc) {
  switch (t->k) {
    case STerm::K::Var: {
      const auto& top = sc.back();
      for (std::size_t i = 0; i < top.size(); ++i)
        if (top[top.size() - 1 - i] == t->name) return tvar(i);
      for (std::size_t w = sc.size() - 1; w-- > 0;)
        for (const auto& n : sc[w])
          if (n == t->name)
            throw ParseError(ParseError::Kind::Scope, t->span,
                             "variable '" + t->name + "' is not in the current world");
      throw ParseError(ParseError::Kind::Scope, t->span, "unbound variable '" + t->name + "'");
    }
    case STerm::K::Box: {
      Scopes sc2 = sc;
      sc2.emplace_back();
      return tbox(resolve(t->a, sc2));
    }
    case STerm::K::Unbox: {
      if (t->nat >= sc.size())
        throw ParseError(ParseError::Kind::Scope, t->span,
                         "unbox level " + std::to_string(t->nat) +
                             " exceeds the context stack");
      Scopes sc2(sc.begin(), sc.end() - static_cast<std::ptrdiff_t>(t->nat));
      return tunbox(t->nat, resolve(t->a, sc2));
    }
    case STerm::K::Lam: {
      Scopes sc2 = sc;
      sc2.back().push_back(t->name);
      return tlam(t->ann, resolve(t->a, sc2));
    }
    case STerm::K::App: return tapp(resolve(t->a, sc), resolve(t->b, sc));
    case STerm::K::CBox: {
      Scopes sc2 = sc;
      for (const auto& ctx : t->capture) {
        std::vector<std::string> names;
        for (const auto& [n, ty] : ctx.bindings) {
          (void)ty;
          names.push_back(n);
        }
        sc2.push_back(std::move(names));
      }
      return tcbox(t->capture, resolve(t->a, sc2));
    }
    case STerm::K::CUnbox: {
      std::size_t total = 0;
      for (const auto& e : t->sub) total += e.offset;
      if (total >= sc.size())
        throw ParseError(ParseError::Kind::Scope, t->span,
                         "semi-K-substitution offsets exceed the context stack");
      SemiKSub sub;
      sub.exts.resize(t->sub.size());
      std::size_t depth = sc.size();
      for (std::size_t i = t->sub.size(); i-- > 0;) {
        const SExt& e = t->sub[i];
        Scopes cur(sc.begin(), sc.begin() + static_cast<std::ptrdiff_t>(depth));
        LocalSub ls;
        ls.terms.reserve(e.terms.size());
        for (const auto& s : e.terms) ls.terms.push_back(resolve(s, cur));
        sub.exts[i] = {e.offset, std::move(ls)};
        if (e.offset >= depth)
          throw ParseError(ParseError::Kind::Scope, e.span,
                           "semi-K-substitution offsets exceed the context stack");
        depth -= e.offset;
      }
      Scopes body(sc.begin(), sc.begin() + static_cast<std::ptrdiff_t>(depth));
      return tcunbox(resolve(t->a, body), std::move(sub));
    }
  }
  throw ParseError(ParseError::Kind::Parse, t->span, "malformed term");
}

} // namespace

// ---------------------------------------------------------------------------
// Public parsing entry points
// ---------------------------------------------------------------------------

TermPtr parse_term(const std::string& src, const CtxStack& scope) {
  Parser p{lex(src)};
  SPtr s = p.parseTerm();
  if (!p.at(Tok::End)) p.err("trailing input after term");
  return resolve(s, scopes_of(scope));
}

TermPtr parse_term(const std::string& src) {
  CtxStack g;
  g.contexts.emplace_back();
  return parse_term(src, g);
}

TyPtr parse_type(const std::string& src) {
  Parser p{lex(src)};
  TyPtr t = p.parseType();
  if (!p.at(Tok::End)) p.err("trailing input after type");
  return t;
}

SourceFile parse_file(const std::string& src) {
  Parser p{lex(src)};
  SourceFile file;
  Token kw = p.expect(Tok::KwSystem);
  Token sysName = p.expect(Tok::Ident);
  try {
    file.system = system_from_name(sysName.text);
  } catch (const std::invalid_argument&) {
    throw ParseError(ParseError::Kind::Parse, sysName.span,
                     "unknown system '" + sysName.text + "' (expected k, t, k4 or s4)");
  }
  (void)kw;
  while (!p.at(Tok::End)) {
    Span sp = p.peek().span;
    p.expect(Tok::KwDef);
    Token name = p.expect(Tok::Ident);
    p.expect(Tok::LBrack);
    CtxList ctxs = p.parseCtxList(false);
    p.expect(Tok::Turnstile);
    p.expect(Tok::RBrack);
    SPtr body = p.parseTerm();
    TyPtr expected;
    if (p.at(Tok::Colon)) {
      p.next();
      expected = p.parseType();
    }
    Declaration decl;
    decl.name = name.text;
    decl.stack.contexts = std::move(ctxs);
    decl.span = sp;
    decl.expected = std::move(expected);
    decl.term = resolve(body, scopes_of(decl.stack));
    file.declarations.push_back(std::move(decl));
  }
  return file;
}

// ---------------------------------------------------------------------------
// Pretty-printing
// ---------------------------------------------------------------------------

namespace {

void print_ty(std::ostringstream& os, const TyPtr& t, int prec);

void print_ctx(std::ostringstream& os, const LocalCtx& ctx) {
  if (ctx.bindings.empty()) {
    os << ".";
    return;
  }
  bool first = true;
  for (const auto& [n, ty] : ctx.bindings) {
    if (!first) os << ", ";
    first = false;
    os << n << " : ";
    print_ty(os, ty, 0);
  }
}

void print_ctx_list(std::ostringstream& os, const CtxList& ctxs) {
  bool first = true;
  for (const auto& ctx : ctxs) {
    if (!first) os << " ; ";
    first = false;
    print_ctx(os, ctx);
  }
}

void print_ty(std::ostringstream& os, const TyPtr& t, int prec) {
  switch (t->kind) {
    case Ty::Kind::Base: os << "B"; return;
    case Ty::Kind::Box:
      os << "[]";
      print_ty(os, t->a, 1);
      return;
    case Ty::Kind::Arr: {
      if (prec > 0) os << "(";
      print_ty(os, t->a, 1);
      os << " -> ";
      print_ty(os, t->b, 0);
      if (prec > 0) os << ")";
      return;
    }
    case Ty::Kind::Ctx: {
      os << "[";
      if (!t->capture.empty()) {
        os << " ";
        print_ctx_list(os, t->capture);
      }
      os << " |- ";
      print_ty(os, t->a, 0);
      os << " ]";
      return;
    }
  }
}

struct TermPrinter {
  Scopes scopes;
  std::set<std::string> used;
  int counter = 0;

  std::string freshName() {
    while (true) {
      std::string n = "x" + std::to_string(counter++);
      if (used.insert(n).second) return n;
    }
  }

  std::string varName(std::size_t ix) const {
    const auto& top = scopes.back();
    if (ix < top.size()) return top[top.size() - 1 - ix];
    return "#" + std::to_string(ix); // ill-scoped input
  }

  // prec 0: any term; prec 1: application operand chain; prec 2: atom
  void print(std::ostringstream& os, const TermPtr& t, int prec) {
    switch (t->kind) {
      case Term::Kind::Var: os << varName(t->ix); return;
      case Term::Kind::Lam: {
        if (prec > 0) os << "(";
        std::string n = freshName();
        os << "\\" << n;
        if (t->ann) {
          os << " : ";
          print_ty(os, t->ann, 0);
        }
        os << ". ";
        scopes.back().push_back(n);
        print(os, t->a, 0);
        scopes.back().pop_back();
        if (prec > 0) os << ")";
        return;
      }
      case Term::Kind::App: {
        if (prec > 1) os << "(";
        print(os, t->a, 1);
        os << " ";
        print(os, t->b, 2);
        if (prec > 1) os << ")";
        return;
      }
      case Term::Kind::Box: {
        os << "box ";
        scopes.emplace_back();
        print(os, t->a, 2);
        scopes.pop_back();
        return;
      }
      case Term::Kind::Unbox: {
        os << "unbox " << t->ix << " ";
        std::size_t n = t->ix < scopes.size() ? t->ix : 0;
        Scopes saved(scopes.end() - static_cast<std::ptrdiff_t>(n), scopes.end());
        scopes.resize(scopes.size() - n);
        print(os, t->a, 2);
        scopes.insert(scopes.end(), saved.begin(), saved.end());
        return;
      }
      case Term::Kind::CBox: {
        os << "cbox { ";
        print_ctx_list(os, t->capture);
        os << " } ";
        std::size_t pushed = 0;
        for (const auto& ctx : t->capture) {
          std::vector<std::string> names;
          for (const auto& [n, ty] : ctx.bindings) {
            (void)ty;
            names.push_back(n);
            used.insert(n);
          }
          scopes.push_back(std::move(names));
          ++pushed;
        }
        print(os, t->a, 2);
        scopes.resize(scopes.size() - pushed);
        return;
      }
      case Term::Kind::CUnbox: {
        std::size_t total = semi_offset(t->sub);
        std::size_t depth = scopes.size();
        os << "cunbox ";
        {
          std::size_t n = total < depth ? total : depth - 1;
          Scopes saved(scopes.end() - static_cast<std::ptrdiff_t>(n), scopes.end());
          scopes.resize(scopes.size() - n);
          print(os, t->a, 2);
          scopes.insert(scopes.end(), saved.begin(), saved.end());
        }
        os << " with (";
        // Extensions print bottom to top; each one sees the stack truncated
        // by the offsets above it.
        std::vector<std::size_t> depths(t->sub.exts.size());
        {
          std::size_t d = depth;
          for (std::size_t i = t->sub.exts.size(); i-- > 0;) {
            depths[i] = d;
            std::size_t off = t->sub.exts[i].first;
            d = off < d ? d - off : 1;
          }
        }
        for (std::size_t i = 0; i < t->sub.exts.size(); ++i) {
          if (i > 0) os << " ; ";
          const auto& [off, sub] = t->sub.exts[i];
          std::size_t n = depth - depths[i];
          Scopes saved(scopes.end() - static_cast<std::ptrdiff_t>(n), scopes.end());
          scopes.resize(scopes.size() - n);
          for (std::size_t j = 0; j < sub.terms.size(); ++j) {
            if (j > 0) os << ", ";
            print(os, sub.terms[j], 0);
          }
          scopes.insert(scopes.end(), saved.begin(), saved.end());
          if (!sub.terms.empty()) os << " ";
          os << "^ " << off;
        }
        os << ")";
        return;
      }
    }
  }
};

} // namespace

std::string pretty(const TermPtr& t, const CtxStack& scope) {
  TermPrinter pr;
  pr.scopes = scopes_of(scope);
  for (const auto& world : pr.scopes)
    for (const auto& n : world) pr.used.insert(n);
  std::ostringstream os;
  pr.print(os, t, 0);
  return os.str();
}

std::string pretty(const TermPtr& t) {
  CtxStack g;
  g.contexts.emplace_back();
  return pretty(t, g);
}

std::string pretty_ty(const TyPtr& ty) {
  std::ostringstream os;
  print_ty(os, ty, 0);
  return os.str();
}

std::string pretty_stack(const CtxStack& g) {
  std::ostringstream os;
  print_ctx_list(os, g.contexts);
  return os.str();
}

} // namespace mlc
