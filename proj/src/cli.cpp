#include "mlc/cli.hpp"

#include "mlc/nbe.hpp"
#include "mlc/oracle.hpp"
#include "mlc/parser.hpp"
#include "mlc/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace mlc {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitTypeError = 1;
constexpr int kExitParseError = 2;
constexpr int kExitFragment = 3;
constexpr int kExitNotEquiv = 4;
constexpr int kExitProperty = 5;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream os;
    os << std::cin.rdbuf();
    return os.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json diag_json(const std::string& kind, Span span, const std::string& msg) {
  return json{{"kind", kind}, {"span", {{"line", span.line}, {"col", span.col}}},
              {"message", msg}};
}

struct Options {
  std::string system; // "", "k", "t", "k4", "s4", "all"
  bool jsonOut = false;
  bool oracleCheck = false;
  std::size_t n = 100;
  std::uint64_t seed = 42;
  std::vector<std::string> files;
};

System pick_system(const Options& opt, System header, std::ostream& err) {
  if (opt.system.empty()) return header;
  System flag = system_from_name(opt.system);
  if (flag != header)
    err << "warning: --system " << opt.system << " overrides file header 'system "
        << system_name(header) << "'\n";
  return flag;
}

int worse(int a, int b) { return a > b ? a : b; }

int cmd_check(const Options& opt, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  json results = json::array();
  json diags = json::array();
  for (const auto& path : opt.files) {
    SourceFile file;
    try {
      file = parse_file(read_input(path));
    } catch (const ParseError& e) {
      code = worse(code, kExitParseError);
      if (opt.jsonOut)
        diags.push_back(diag_json(parse_error_kind_name(e.kind), e.span, e.what()));
      else
        err << path << ":" << e.span.line << ":" << e.span.col << ": "
            << parse_error_kind_name(e.kind) << ": " << e.what() << "\n";
      continue;
    }
    System sys = pick_system(opt, file.system, err);
    for (const auto& decl : file.declarations) {
      try {
        TyPtr ty = synth(sys, decl.stack, decl.term);
        if (decl.expected && !ty_eq(ty, decl.expected))
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "synthesized type " + pretty_ty(ty) + " differs from declared type " +
                              pretty_ty(decl.expected));
        if (opt.jsonOut)
          results.push_back(json{{"name", decl.name}, {"type", pretty_ty(ty)}});
        else
          out << decl.name << " : " << pretty_ty(ty) << "\n";
      } catch (const TypeError& e) {
        code = worse(code, kExitTypeError);
        if (opt.jsonOut)
          diags.push_back(diag_json(type_error_kind_name(e.kind), decl.span,
                                    decl.name + ": " + e.what()));
        else
          err << path << ":" << decl.span.line << ":" << decl.span.col << ": "
              << type_error_kind_name(e.kind) << ": " << decl.name << ": " << e.what() << "\n";
      }
    }
  }
  if (opt.jsonOut) out << json{{"declarations", results}, {"diagnostics", diags}}.dump(2) << "\n";
  return code;
}

int cmd_normalize(const Options& opt, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  json results = json::array();
  json diags = json::array();
  for (const auto& path : opt.files) {
    SourceFile file;
    try {
      file = parse_file(read_input(path));
    } catch (const ParseError& e) {
      code = worse(code, kExitParseError);
      err << path << ":" << e.span.line << ":" << e.span.col << ": "
          << parse_error_kind_name(e.kind) << ": " << e.what() << "\n";
      continue;
    }
    System sys = pick_system(opt, file.system, err);
    for (const auto& decl : file.declarations) {
      try {
        TyPtr ty = synth(sys, decl.stack, decl.term);
        if (decl.expected && !ty_eq(ty, decl.expected))
          throw TypeError(TypeError::Kind::TypeMismatch,
                          "synthesized type " + pretty_ty(ty) + " differs from declared type " +
                              pretty_ty(decl.expected));
        TermPtr nf = nbe(sys, decl.stack, ty, decl.term);
        if (opt.oracleCheck) {
          TermPtr ref = oracle_normalize(sys, decl.stack, ty, decl.term);
          if (!alpha_eq(nf, ref)) {
            code = worse(code, kExitProperty);
            err << decl.name << ": normalizer disagreement\n  nbe:    " << pretty(nf, decl.stack)
                << "\n  oracle: " << pretty(ref, decl.stack) << "\n";
            continue;
          }
        }
        if (opt.jsonOut)
          results.push_back(json{{"name", decl.name},
                                 {"type", pretty_ty(ty)},
                                 {"normal_form", pretty(nf, decl.stack)},
                                 {"steps", nullptr}});
        else
          out << decl.name << " = " << pretty(nf, decl.stack) << "\n";
      } catch (const TypeError& e) {
        bool fragment = e.kind == TypeError::Kind::UnsupportedFragment;
        code = worse(code, fragment ? kExitFragment : kExitTypeError);
        if (opt.jsonOut)
          diags.push_back(diag_json(type_error_kind_name(e.kind), decl.span,
                                    decl.name + ": " + e.what()));
        else
          err << path << ":" << decl.span.line << ":" << decl.span.col << ": "
              << type_error_kind_name(e.kind) << ": " << decl.name << ": " << e.what() << "\n";
      }
    }
  }
  if (opt.jsonOut) out << json{{"declarations", results}, {"diagnostics", diags}}.dump(2) << "\n";
  return code;
}

bool stacks_agree(const CtxStack& a, const CtxStack& b) {
  if (stack_len(a) != stack_len(b)) return false;
  for (std::size_t i = 0; i < stack_len(a); ++i) {
    if (a.contexts[i].size() != b.contexts[i].size()) return false;
    for (std::size_t j = 0; j < a.contexts[i].size(); ++j)
      if (!ty_eq(a.contexts[i].bindings[j].second, b.contexts[i].bindings[j].second))
        return false;
  }
  return true;
}

int cmd_equiv(const Options& opt, std::ostream& out, std::ostream& err) {
  SourceFile file;
  try {
    file = parse_file(read_input(opt.files.front()));
  } catch (const ParseError& e) {
    err << opt.files.front() << ":" << e.span.line << ":" << e.span.col << ": "
        << parse_error_kind_name(e.kind) << ": " << e.what() << "\n";
    return kExitParseError;
  }
  if (file.declarations.size() != 2) {
    err << "equiv expects a file with exactly two declarations, found "
        << file.declarations.size() << "\n";
    return kExitParseError;
  }
  System sys = pick_system(opt, file.system, err);
  const Declaration& d1 = file.declarations[0];
  const Declaration& d2 = file.declarations[1];
  try {
    if (!stacks_agree(d1.stack, d2.stack))
      throw TypeError(TypeError::Kind::TypeMismatch,
                      "the two declarations use different context stacks");
    TyPtr ty1 = synth(sys, d1.stack, d1.term);
    TyPtr ty2 = synth(sys, d2.stack, d2.term);
    if (!ty_eq(ty1, ty2))
      throw TypeError(TypeError::Kind::TypeMismatch,
                      "types differ: " + pretty_ty(ty1) + " vs " + pretty_ty(ty2));
    TermPtr n1 = nbe(sys, d1.stack, ty1, d1.term);
    TermPtr n2 = nbe(sys, d2.stack, ty2, d2.term);
    if (alpha_eq(n1, n2)) {
      out << "equivalent: " << pretty(n1, d1.stack) << "\n";
      return kExitOk;
    }
    out << "not equivalent:\n  " << d1.name << " = " << pretty(n1, d1.stack) << "\n  "
        << d2.name << " = " << pretty(n2, d2.stack) << "\n";
    return kExitNotEquiv;
  } catch (const TypeError& e) {
    bool fragment = e.kind == TypeError::Kind::UnsupportedFragment;
    err << type_error_kind_name(e.kind) << ": " << e.what() << "\n";
    return fragment ? kExitFragment : kExitTypeError;
  }
}

int cmd_selftest(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.n == 0) {
    err << "warning: --n 0 runs no property instances\n";
    return kExitOk;
  }
  std::vector<System> systems;
  if (opt.system.empty() || opt.system == "all")
    systems = {System::K, System::T, System::K4, System::S4};
  else
    systems = {system_from_name(opt.system)};
  SelftestOptions options;
  options.n = opt.n;
  options.seed = opt.seed;
  std::vector<SuiteResult> results = run_all_suites(systems, options);
  bool anyFailed = false;
  json report = json::array();
  for (const auto& r : results) {
    if (opt.jsonOut) {
      report.push_back(json{{"suite", r.suite},
                            {"system", r.system},
                            {"checked", r.checked},
                            {"failed", r.failed},
                            {"seconds", r.seconds}});
    } else {
      std::ostringstream line;
      line << r.suite;
      if (r.system != "-") line << "(" << r.system << ")";
      line << ": checked " << r.checked << ", failed " << r.failed;
      out << line.str() << "\n";
    }
    if (!r.ok()) {
      anyFailed = true;
      err << "FAILED " << r.suite << (r.system != "-" ? " (" + r.system + ")" : "")
          << "\n  counterexample: " << r.counterexample << "\n";
    }
  }
  if (opt.jsonOut) out << report.dump(2) << "\n";
  return anyFailed ? kExitProperty : kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mlc - type checker and normalizer for a Kripke-style modal lambda-calculus"};
  app.require_subcommand(1);

  Options opt;
  auto addSystem = [&](CLI::App* cmd, bool allowAll) {
    auto values = allowAll ? std::vector<std::string>{"k", "t", "k4", "s4", "all"}
                           : std::vector<std::string>{"k", "t", "k4", "s4"};
    cmd->add_option("--system", opt.system, "modal system")->check(CLI::IsMember(values));
  };

  CLI::App* check = app.add_subcommand("check", "type-check declarations");
  check->add_option("files", opt.files, "input files ('-' for stdin)")->required();
  addSystem(check, false);
  check->add_flag("--json", opt.jsonOut, "JSON output");

  CLI::App* normalize = app.add_subcommand("normalize", "print beta-eta normal forms");
  normalize->add_option("files", opt.files, "input files ('-' for stdin)")->required();
  addSystem(normalize, false);
  normalize->add_flag("--json", opt.jsonOut, "JSON output");
  normalize->add_flag("--oracle", opt.oracleCheck,
                      "cross-check against the reduction-based normalizer");

  CLI::App* equiv = app.add_subcommand("equiv", "decide equivalence of two declarations");
  equiv->add_option("file", opt.files, "input file with exactly two declarations")
      ->required()
      ->expected(1);
  addSystem(equiv, false);

  CLI::App* selftest = app.add_subcommand("selftest", "run the seeded property suites");
  addSystem(selftest, true);
  selftest->add_option("--n", opt.n, "instances per suite");
  selftest->add_option("--seed", opt.seed, "base seed");
  selftest->add_flag("--json", opt.jsonOut, "JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitParseError;
  }

  try {
    if (check->parsed()) return cmd_check(opt, out, err);
    if (normalize->parsed()) return cmd_normalize(opt, out, err);
    if (equiv->parsed()) return cmd_equiv(opt, out, err);
    if (selftest->parsed()) return cmd_selftest(opt, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}

} // namespace mlc
