// nfbisim: evaluate, verify, prove and distinguish terms of the three calculi.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nfbisim/corpus.hpp"
#include "nfbisim/syntax.hpp"

using namespace nfbisim;

namespace {

constexpr int kUsage = 3;

struct Flags {
  std::string calculus = "lambda";
  std::size_t fuel = 1000;
  std::size_t depth = 6;
  std::size_t max_pairs = 32;
  std::string techniques;
  std::string strong;
  std::string unsafe;
  std::string format = "text";
  std::string filter;
  std::string corpus_dir;
  std::string witness_out;
  bool divergence_is_distinct = false;
  bool no_unfold = false;
};

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Calculus calc_flag(Flags const& f) {
  auto c = calculus_from_name(f.calculus);
  if (!c) throw Usage("unknown calculus '" + f.calculus + "' (lambda, shiftreset, callcc)");
  return *c;
}

EngineOptions engine_options(Flags const& f) {
  EngineOptions o;
  o.fuel = f.fuel;
  o.depth = f.depth;
  o.max_pairs = f.max_pairs;
  o.divergence_is_distinct = f.divergence_is_distinct;
  o.unfold = !f.no_unfold;
  return o;
}

// --techniques narrows the full set, --strong narrows the strong set; only
// --unsafe may add to the strong set.
TechniqueSet technique_flags(Flags const& f, Calculus calc) {
  TechniqueSet ts = TechniqueSet::defaults(calc);
  try {
    if (!f.techniques.empty()) {
      ts.full = parse_techniques(f.techniques, calc);
      Techniques kept;
      for (auto t : ts.strong) {
        if (ts.full.contains(t)) kept.insert(t);
      }
      ts.strong = kept;
    }
    if (!f.strong.empty()) {
      auto wanted = parse_techniques(f.strong, calc);
      for (auto t : wanted) {
        if (!ts.strong.contains(t)) {
          throw Usage("--strong may only shrink the strong set; '" + std::string(technique_name(t)) +
                      "' needs --unsafe strong+=" + std::string(technique_name(t)));
        }
      }
      ts.strong = wanted;
    }
    if (!f.unsafe.empty()) apply_unsafe(ts, f.unsafe, calc);
  } catch (std::invalid_argument const& e) {
    throw Usage(e.what());
  }
  return ts;
}

TermPtr term_arg(std::string const& text, Calculus calc) {
  try {
    return parse_term(text, calc);
  } catch (std::exception const& e) {
    throw Usage(std::string("cannot parse '") + text + "': " + e.what());
  }
}

void emit_verdict(Verdict const& v, Flags const& f) {
  if (f.format == "trace") {
    std::cout << print_sexpr(verdict_sexpr(v), 0) << "\n";
  } else {
    std::cout << render_verdict(v);
  }
}

int cmd_eval(Flags const& f, std::string const& text) {
  Calculus calc = calc_flag(f);
  auto rep = eval_report(term_arg(text, calc), calc, f.fuel);
  if (f.format == "trace") {
    std::cout << print_sexpr(rep.sexpr, 0) << "\n";
  } else {
    std::cout << rep.text;
  }
  return rep.result.finished ? 0 : 2;
}

int cmd_verify(Flags const& f, std::string const& file) {
  Relation rel;
  try {
    rel = load_relation(file);
  } catch (RelationError const& e) {
    throw Usage(file + ": " + e.what());
  }
  auto ts = technique_flags(f, rel.calc);
  auto v = verify_bisimulation_up_to(rel, ts, engine_options(f));
  emit_verdict(v, f);
  return exit_code(v);
}

int cmd_prove(Flags const& f, std::string const& lhs, std::string const& rhs) {
  Calculus calc = calc_flag(f);
  auto ts = technique_flags(f, calc);
  auto v = auto_prove(term_arg(lhs, calc), term_arg(rhs, calc), calc, ts, engine_options(f));
  emit_verdict(v, f);
  if (v.kind == Verdict::Kind::Verified) {
    std::string text = print_relation(v.witness);
    if (f.format != "trace") std::cout << "witness:\n" << text;
    if (!f.witness_out.empty()) {
      std::ofstream out(f.witness_out);
      if (!out) throw Usage("cannot write " + f.witness_out);
      out << text;
    }
  }
  return exit_code(v);
}

int cmd_distinguish(Flags const& f, std::string const& lhs, std::string const& rhs) {
  Calculus calc = calc_flag(f);
  auto v = distinguish(term_arg(lhs, calc), term_arg(rhs, calc), calc, engine_options(f));
  emit_verdict(v, f);
  return exit_code(v);
}

int cmd_corpus(Flags const& f) {
  std::filesystem::path dir = f.corpus_dir.empty() ? std::filesystem::path(NFBISIM_CORPUS_DIR) : std::filesystem::path(f.corpus_dir);
  auto start = std::chrono::steady_clock::now();
  std::vector<CorpusResult> results;
  try {
    results = run_corpus(dir, f.filter, engine_options(f));
  } catch (CorpusError const& e) {
    throw Usage(e.what());
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t failed = 0;
  for (auto const& r : results) {
    if (!r.pass) ++failed;
    if (f.format == "trace") {
      std::vector<SExpr> items{SExpr::atom("entry"), SExpr::atom(r.entry.name), SExpr::atom(r.pass ? "pass" : "fail"),
                               SExpr::atom(r.outcome)};
      if (r.verdict) items.push_back(verdict_sexpr(*r.verdict));
      std::cout << print_sexpr(SExpr::list(std::move(items)), 0) << "\n";
      continue;
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3fs", r.seconds);
    std::cout << (r.pass ? "pass " : "FAIL ") << r.entry.name << "  " << r.outcome << "  (" << secs << ")";
    if (!r.pass || !r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << "\n";
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.3fs", wall);
  std::cerr << results.size() - failed << "/" << results.size() << " entries pass, wall " << secs << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal-form bisimulation checker for lambda, shift/reset and callcc/abort"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub, bool search) {
    sub->add_option("--calculus", f.calculus, "lambda, shiftreset or callcc")->capture_default_str();
    sub->add_option("--fuel", f.fuel, "reduction steps per evaluation")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--format", f.format, "text or trace")->capture_default_str()->check(CLI::IsMember({"text", "trace"}));
    if (!search) return;
    sub->add_option("--depth", f.depth, "search depth")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--techniques", f.techniques, "comma-separated technique names (ctx expands)");
    sub->add_option("--strong", f.strong, "restrict the strong subset");
    sub->add_option("--unsafe", f.unsafe, "strong+=NAMES: enlarge the strong subset (watermarked)");
    sub->add_option("--max-pairs", f.max_pairs, "pair budget for unfolding")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--no-unfold", f.no_unfold, "never add pairs to the candidate");
    sub->add_flag("--divergence-is-distinct", f.divergence_is_distinct,
                  "treat termination on one side only as a clash");
  };

  std::string term, file, lhs, rhs;
  auto* eval = app.add_subcommand("eval", "print the reduction trace of a term");
  common(eval, false);
  eval->add_option("term", term)->required();

  auto* verify = app.add_subcommand("verify", "check a candidate relation file");
  common(verify, true);
  verify->add_option("file", file)->required();

  auto* prove = app.add_subcommand("prove", "search for a bisimulation relating two terms");
  common(prove, true);
  prove->add_option("lhs", lhs)->required();
  prove->add_option("rhs", rhs)->required();
  prove->add_option("--witness", f.witness_out, "write the witness relation here");

  auto* dist = app.add_subcommand("distinguish", "look for a clash between two terms");
  common(dist, true);
  dist->add_option("lhs", lhs)->required();
  dist->add_option("rhs", rhs)->required();

  auto* corpus = app.add_subcommand("corpus", "run the example corpus");
  corpus->add_option("--filter", f.filter, "entry name, command, calculus or tag");
  corpus->add_option("--dir", f.corpus_dir, "corpus directory");
  corpus->add_option("--format", f.format, "text or trace")->check(CLI::IsMember({"text", "trace"}));
  corpus->add_option("--fuel", f.fuel)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*eval) return cmd_eval(f, term);
    if (*verify) return cmd_verify(f, file);
    if (*prove) return cmd_prove(f, lhs, rhs);
    if (*dist) return cmd_distinguish(f, lhs, rhs);
    return cmd_corpus(f);
  } catch (Usage const& e) {
    std::cerr << "nfbisim: " << e.what() << "\n";
    return kUsage;
  }
}
