#include "nfbisim/corpus.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "nfbisim/syntax.hpp"

namespace nfbisim {

namespace {

[[noreturn]] void fail(SExpr const& at, std::string const& msg) {
  throw CorpusError("manifest line " + std::to_string(at.line) + ": " + msg);
}

std::string text_of(SExpr const& e) {
  if (e.kind == SExpr::Kind::List) fail(e, "expected an atom or string");
  return e.text;
}

std::size_t number_of(SExpr const& e) {
  try {
    return static_cast<std::size_t>(std::stoul(text_of(e)));
  } catch (std::logic_error const&) {
    fail(e, "expected a number");
  }
}

Calculus calc_of(SExpr const& e) {
  auto c = calculus_from_name(text_of(e));
  if (!c) fail(e, "unknown calculus '" + e.text + "'");
  return *c;
}

CorpusEntry parse_entry(SExpr const& e, std::filesystem::path const& dir) {
  if (!e.is_form("entry") || e.items.size() < 3) fail(e, "expected (entry NAME (COMMAND ...) ...)");
  CorpusEntry out;
  out.name = text_of(e.items[1]);
  auto const& cmd = e.items[2];
  if (cmd.kind != SExpr::Kind::List || cmd.items.empty()) fail(cmd, "expected a command form");
  out.command = text_of(cmd.items[0]);
  if (out.command == "verify") {
    if (cmd.items.size() != 2) fail(cmd, "expected (verify \"file\")");
    out.file = text_of(cmd.items[1]);
    try {
      out.calc = load_relation(dir / out.file).calc;
    } catch (RelationError const& err) {
      fail(cmd, out.file + ": " + err.what());
    }
  } else if (out.command == "prove" || out.command == "distinguish") {
    if (cmd.items.size() != 4) fail(cmd, "expected (" + out.command + " CALCULUS \"lhs\" \"rhs\")");
    out.calc = calc_of(cmd.items[1]);
    out.lhs = text_of(cmd.items[2]);
    out.rhs = text_of(cmd.items[3]);
  } else if (out.command == "eval") {
    if (cmd.items.size() != 3) fail(cmd, "expected (eval CALCULUS \"term\")");
    out.calc = calc_of(cmd.items[1]);
    out.term = text_of(cmd.items[2]);
  } else {
    fail(cmd, "unknown command '" + out.command + "'");
  }
  for (std::size_t i = 3; i < e.items.size(); ++i) {
    auto const& f = e.items[i];
    if (f.kind != SExpr::Kind::List || f.items.size() < 2) fail(f, "expected (key value ...)");
    std::string key = text_of(f.items[0]);
    if (key == "techniques") {
      out.techniques = text_of(f.items[1]);
    } else if (key == "unsafe") {
      out.unsafe = text_of(f.items[1]);
    } else if (key == "depth") {
      out.depth = number_of(f.items[1]);
    } else if (key == "fuel") {
      out.fuel = number_of(f.items[1]);
    } else if (key == "expect") {
      out.expect = text_of(f.items[1]);
    } else if (key == "value") {
      out.expect_value = text_of(f.items[1]);
    } else if (key == "head") {
      out.expect_head = text_of(f.items[1]);
    } else if (key == "steps") {
      out.expect_steps = number_of(f.items[1]);
    } else if (key == "rules") {
      for (std::size_t j = 1; j < f.items.size(); ++j) out.expect_rules.push_back(text_of(f.items[j]));
    } else if (key == "tags") {
      for (std::size_t j = 1; j < f.items.size(); ++j) out.tags.push_back(text_of(f.items[j]));
    } else {
      fail(f, "unknown key '" + key + "'");
    }
  }
  if (out.expect.empty()) fail(e, "entry " + out.name + " has no (expect ...)");
  return out;
}

EngineOptions options_for(CorpusEntry const& e, EngineOptions opt) {
  if (e.depth) opt.depth = *e.depth;
  if (e.fuel) opt.fuel = *e.fuel;
  return opt;
}

void run_eval(CorpusEntry const& e, EngineOptions const& opt, CorpusResult& res) {
  auto t = parse_term(e.term, e.calc);
  auto rep = eval_report(t, e.calc, opt.fuel);
  std::vector<std::string> problems;
  res.outcome = rep.result.finished ? std::string(kind_name(rep.result.normal.kind)) : "fuel-exhausted";
  if (res.outcome != e.expect) problems.push_back("ended " + res.outcome + ", expected " + e.expect);
  if (e.expect_steps && rep.result.steps != *e.expect_steps) {
    problems.push_back(std::to_string(rep.result.steps) + " steps, expected " + std::to_string(*e.expect_steps));
  }
  if (!e.expect_rules.empty()) {
    std::vector<std::string> rules;
    for (auto const& s : rep.result.trace) rules.emplace_back(redex_name(s.kind));
    if (rules != e.expect_rules) problems.push_back("step rules differ");
  }
  if (rep.result.finished && e.expect_value) {
    auto const& nf = rep.result.normal;
    // a context-stuck program is compared by the value it hands to its context
    auto got = nf.kind == NormalForm::Kind::ContextStuck ? nf.value : nf.term();
    if (!alpha_eq(got, parse_term(*e.expect_value, e.calc))) {
      problems.push_back("final term " + print_term(got) + ", expected " + *e.expect_value);
    }
  }
  if (rep.result.finished && e.expect_head && rep.result.normal.head != *e.expect_head) {
    problems.push_back("stuck at " + rep.result.normal.head + ", expected " + *e.expect_head);
  }
  res.pass = problems.empty();
  res.detail = std::to_string(rep.result.steps) + " steps";
  for (auto const& p : problems) res.detail += "; " + p;
}

}  // namespace

void apply_unsafe(TechniqueSet& ts, std::string const& widening, Calculus calc) {
  constexpr std::string_view prefix = "strong+=";
  if (widening.rfind(prefix, 0) != 0) throw std::invalid_argument("--unsafe expects strong+=TECHNIQUES");
  auto extra = parse_techniques(widening.substr(prefix.size()), calc);
  for (auto t : extra) {
    ts.strong.insert(t);
    ts.full.insert(t);
  }
}

TechniqueSet entry_techniques(CorpusEntry const& e) {
  TechniqueSet ts = TechniqueSet::defaults(e.calc);
  if (e.techniques) {
    ts.full = parse_techniques(*e.techniques, e.calc);
    Techniques strong;
    for (auto t : ts.strong) {
      if (ts.full.contains(t)) strong.insert(t);
    }
    ts.strong = strong;
  }
  if (e.unsafe) apply_unsafe(ts, *e.unsafe, e.calc);
  return ts;
}

std::vector<CorpusEntry> load_manifest(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<SExpr> top;
  try {
    top = parse_sexprs(buf.str());
  } catch (SExprError const& e) {
    throw CorpusError(std::string("manifest: ") + e.what());
  }
  if (top.size() != 1 || !top[0].is_form("corpus")) throw CorpusError("manifest: expected a single (corpus ...) form");
  std::vector<CorpusEntry> out;
  for (std::size_t i = 1; i < top[0].items.size(); ++i) out.push_back(parse_entry(top[0].items[i], path.parent_path()));
  return out;
}

bool entry_selected(CorpusEntry const& e, std::string const& filter) {
  if (filter.empty() || filter == e.name || filter == e.command || filter == calculus_name(e.calc)) return true;
  for (auto const& t : e.tags) {
    if (t == filter) return true;
  }
  return false;
}

CorpusResult run_entry(CorpusEntry const& e, std::filesystem::path const& dir, EngineOptions const& base) {
  CorpusResult res;
  res.entry = e;
  auto start = std::chrono::steady_clock::now();
  EngineOptions opt = options_for(e, base);
  try {
    res.techniques = entry_techniques(e);
    if (e.command == "eval") {
      run_eval(e, opt, res);
    } else if (e.command == "verify") {
      auto rel = load_relation(dir / e.file);
      auto v = verify_bisimulation_up_to(rel, res.techniques, opt);
      res.outcome = verdict_label(v);
      res.pass = res.outcome == e.expect;
      res.detail = v.reason;
      res.verdict = std::move(v);
      res.relation = std::move(rel);
    } else if (e.command == "prove") {
      auto v = auto_prove(parse_term(e.lhs, e.calc), parse_term(e.rhs, e.calc), e.calc, res.techniques, opt);
      res.outcome = verdict_label(v);
      res.pass = res.outcome == e.expect;
      res.detail = v.reason;
      if (v.kind == Verdict::Kind::Verified) {
        // the witness must stand on its own
        auto again = verify_bisimulation_up_to(parse_relation(print_relation(v.witness)), res.techniques, opt);
        if (again.kind != Verdict::Kind::Verified) {
          res.pass = false;
          res.detail += "; witness did not re-verify: " + again.reason;
        }
        res.detail += "; witness of " + std::to_string(v.witness.pairs.size()) + " pairs";
        res.relation = v.witness;
      }
      res.verdict = std::move(v);
    } else {
      auto v = distinguish(parse_term(e.lhs, e.calc), parse_term(e.rhs, e.calc), e.calc, opt);
      res.outcome = verdict_label(v);
      res.pass = res.outcome == e.expect;
      res.detail = v.reason;
      if (v.evidence && !replay_evidence(e.calc, *v.evidence, opt.fuel)) {
        res.pass = false;
        res.detail += "; evidence does not replay";
      }
      res.verdict = std::move(v);
    }
    if (!res.pass && res.outcome != e.expect && e.command != "eval") {
      res.detail = "got " + res.outcome + ", expected " + e.expect + ": " + res.detail;
    }
  } catch (std::exception const& ex) {
    res.pass = false;
    res.outcome = "ERROR";
    res.detail = ex.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<CorpusResult> run_corpus(std::filesystem::path const& dir, std::string const& filter,
                                     EngineOptions const& base) {
  auto entries = load_manifest(dir / "manifest.sexp");
  std::vector<CorpusEntry> chosen;
  for (auto const& e : entries) {
    if (entry_selected(e, filter)) chosen.push_back(e);
  }
  std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  std::vector<CorpusResult> out(chosen.size());
  for (std::size_t start = 0; start < chosen.size(); start += width) {
    std::vector<std::future<CorpusResult>> batch;
    for (std::size_t i = start; i < chosen.size() && i < start + width; ++i) {
      batch.push_back(std::async(std::launch::async, run_entry, chosen[i], dir, base));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
  }
  return out;
}

}  // namespace nfbisim
