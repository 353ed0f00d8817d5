#include "nfbisim/prover.hpp"

#include <deque>

#include "nfbisim/callcc.hpp"
#include "nfbisim/syntax.hpp"

namespace nfbisim {

namespace {

std::string pair_text(TermPtr const& l, TermPtr const& r) { return print_term(l) + "  ~  " + print_term(r); }

SExpr str(std::string s) { return SExpr::string(std::move(s)); }
SExpr atom(std::string s) { return SExpr::atom(std::move(s)); }
SExpr form(std::string head, std::vector<SExpr> rest) {
  rest.insert(rest.begin(), atom(std::move(head)));
  return SExpr::list(std::move(rest));
}

std::string_view polarity_name(Polarity p) { return p == Polarity::Passive ? "passive" : "active"; }

NameSet names_of(TermPtr const& l, TermPtr const& r) {
  NameSet out;
  collect_names(l, out);
  collect_names(r, out);
  return out;
}

std::vector<std::string> generated_in(TermPtr const& l, TermPtr const& r) {
  std::vector<std::string> out;
  for (auto const& n : names_of(l, r)) {
    if (is_generated_name(n)) out.push_back(n);
  }
  return out;
}

SExpr relation_sexpr(Relation const& rel) {
  std::vector<SExpr> items{form("calculus", {atom(std::string(calculus_name(rel.calc)))})};
  for (auto const& p : rel.pairs) {
    std::vector<SExpr> pair;
    if (!p.fresh.empty()) {
      std::vector<SExpr> fresh;
      for (auto const& f : p.fresh) fresh.push_back(atom(f));
      pair.push_back(form("fresh", std::move(fresh)));
    }
    pair.push_back(str(print_term(p.lhs)));
    pair.push_back(str(print_term(p.rhs)));
    items.push_back(form("pair", std::move(pair)));
  }
  return form("relation", std::move(items));
}

}  // namespace

std::string render_derivation(Derivation const& d, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::string out = pad;
  switch (d.kind) {
    case Derivation::Kind::Check:
      out += "check " + d.label + ": " + pair_text(d.lhs, d.rhs);
      if (!d.detail.empty()) out += "\n" + pad + "  (" + d.detail + ")";
      break;
    case Derivation::Kind::Obligation:
      out += std::string(polarity_name(d.polarity)) + " " + d.label + ": " + pair_text(d.lhs, d.rhs);
      break;
    case Derivation::Kind::Technique:
      out += d.label;
      if (!d.detail.empty()) out += " [" + d.detail + "]";
      out += ": " + pair_text(d.lhs, d.rhs);
      break;
    case Derivation::Kind::Member:
      out += "member of " + d.label;
      if (!d.detail.empty()) out += " {" + d.detail + "}";
      break;
    case Derivation::Kind::Unfold: out += "unfold as " + d.label; break;
  }
  out += "\n";
  for (auto const& c : d.children) out += render_derivation(c, indent + 1);
  return out;
}

SExpr derivation_sexpr(Derivation const& d) {
  std::vector<SExpr> items;
  switch (d.kind) {
    case Derivation::Kind::Check:
      items = {str(d.label), str(print_term(d.lhs)), str(print_term(d.rhs))};
      if (!d.detail.empty()) items.push_back(form("eval", {str(d.detail)}));
      for (auto const& c : d.children) items.push_back(derivation_sexpr(c));
      return form("check", std::move(items));
    case Derivation::Kind::Obligation:
      items = {atom(d.label), atom(std::string(polarity_name(d.polarity))), str(print_term(d.lhs)),
               str(print_term(d.rhs))};
      for (auto const& c : d.children) items.push_back(derivation_sexpr(c));
      return form("obligation", std::move(items));
    case Derivation::Kind::Technique:
      items = {atom(d.label), str(print_term(d.lhs)), str(print_term(d.rhs))};
      if (!d.detail.empty()) items.push_back(form("detail", {str(d.detail)}));
      for (auto const& c : d.children) items.push_back(derivation_sexpr(c));
      return form("technique", std::move(items));
    case Derivation::Kind::Member:
      items = {str(d.label), str(print_term(d.lhs)), str(print_term(d.rhs))};
      if (!d.detail.empty()) items.push_back(form("renaming", {str(d.detail)}));
      return form("member", std::move(items));
    case Derivation::Kind::Unfold:
      items = {str(d.label), str(print_term(d.lhs)), str(print_term(d.rhs))};
      for (auto const& c : d.children) items.push_back(derivation_sexpr(c));
      return form("unfold", std::move(items));
  }
  return SExpr::list({});
}

SExpr evidence_sexpr(Evidence const& e) {
  std::vector<SExpr> items{form("reason", {str(e.reason)})};
  for (auto const& s : e.chain) items.push_back(form("step", {str(s.via), str(print_term(s.lhs)), str(print_term(s.rhs))}));
  return form("evidence", std::move(items));
}

SExpr verdict_sexpr(Verdict const& v) {
  std::vector<SExpr> items{atom(verdict_label(v)), form("reason", {str(v.reason)})};
  if (v.pair) items.push_back(form("pair", {atom(std::to_string(*v.pair))}));
  if (!v.path.empty()) {
    std::vector<SExpr> path;
    for (auto const& p : v.path) path.push_back(str(p));
    items.push_back(form("path", std::move(path)));
  }
  if (v.evidence) items.push_back(evidence_sexpr(*v.evidence));
  if (!v.trace.empty()) {
    std::vector<SExpr> trace;
    for (auto const& d : v.trace) trace.push_back(derivation_sexpr(d));
    items.push_back(form("trace", std::move(trace)));
  }
  if (v.kind == Verdict::Kind::Verified && !v.witness.pairs.empty()) {
    items.push_back(form("witness", {relation_sexpr(legalize(v.witness))}));
  }
  return form("verdict", std::move(items));
}

std::string render_verdict(Verdict const& v) {
  std::string out = verdict_label(v) + ": " + v.reason + "\n";
  if (v.pair) out += "pair: " + std::to_string(*v.pair) + "\n";
  if (!v.path.empty()) {
    out += "obligation path:";
    for (auto const& p : v.path) out += " > " + p;
    out += "\n";
  }
  if (v.evidence) {
    out += "distinguishing chain:\n";
    for (auto const& s : v.evidence->chain) out += "  [" + s.via + "] " + pair_text(s.lhs, s.rhs) + "\n";
    out += "  clash: " + v.evidence->reason + "\n";
  }
  for (auto const& d : v.trace) out += render_derivation(d, 0);
  return out;
}

EvalReport eval_report(TermPtr const& t, Calculus calc, std::size_t fuel) {
  EvalReport rep;
  rep.result = evaluate(t, calc, fuel, true);
  std::vector<SExpr> items{form("calculus", {atom(std::string(calculus_name(calc)))}), form("term", {str(print_term(t))})};
  std::size_t i = 0;
  for (auto const& s : rep.result.trace) {
    ++i;
    rep.text += std::to_string(i) + ". " + std::string(redex_name(s.kind)) + ": " + print_term(s.result) + "\n";
    items.push_back(form("step", {atom(std::to_string(i)), atom(std::string(redex_name(s.kind))), str(print_term(s.result))}));
  }
  if (rep.result.finished) {
    rep.text += describe(rep.result.normal) + "\n";
    std::vector<SExpr> res{atom(std::string(kind_name(rep.result.normal.kind)))};
    if (!rep.result.normal.head.empty()) res.push_back(form("head", {atom(rep.result.normal.head)}));
    res.push_back(str(print_term(rep.result.normal.value)));
    items.push_back(form("result", std::move(res)));
  } else {
    rep.text += "fuel exhausted after " + std::to_string(rep.result.steps) + " steps\n";
    items.push_back(form("result", {atom("fuel-exhausted")}));
  }
  rep.sexpr = form("eval", std::move(items));
  return rep;
}

std::pair<TermPtr, TermPtr> goal_pair(TermPtr const& lhs, TermPtr const& rhs, Calculus calc) {
  if (calc != Calculus::CallccAbort) return {lhs, rhs};
  if (lhs->kind() == Term::Kind::CtxApp && rhs->kind() == Term::Kind::CtxApp) return {lhs, rhs};
  NameSet avoid = names_of(lhs, rhs);
  return {callcc::lift_to_program(lhs, avoid), callcc::lift_to_program(rhs, avoid)};
}

Verdict auto_prove(TermPtr const& lhs, TermPtr const& rhs, Calculus calc, TechniqueSet const& ts,
                   EngineOptions const& opt) {
  auto [l, r] = goal_pair(lhs, rhs, calc);
  Relation rel;
  rel.calc = calc;
  NameSet names = names_of(l, r);
  rel.pairs.push_back({l, r, std::vector<std::string>(names.begin(), names.end())});
  Verdict v = verify_bisimulation_up_to(rel, ts, opt);
  switch (v.kind) {
    case Verdict::Kind::Verified: v.witness = legalize(v.witness); break;
    case Verdict::Kind::Failed: v.kind = Verdict::Kind::NotBisimilar; break;
    default: break;
  }
  return v;
}

Verdict distinguish(TermPtr const& lhs, TermPtr const& rhs, Calculus calc, EngineOptions const& opt) {
  struct Item {
    TermPtr l;
    TermPtr r;
    std::size_t depth;
    std::size_t parent;
    std::string via;
  };
  auto [l0, r0] = goal_pair(lhs, rhs, calc);
  std::vector<Item> seen{{l0, r0, 0, 0, "goal"}};
  std::deque<std::size_t> queue{0};
  bool cut = false;
  bool diverged = false;
  auto chain_to = [&](std::size_t i) {
    std::vector<EvidenceStep> chain;
    for (;;) {
      chain.insert(chain.begin(), {seen[i].l, seen[i].r, seen[i].via});
      if (i == 0) break;
      i = seen[i].parent;
    }
    return chain;
  };
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    Item const it = seen[i];
    if (alpha_eq(it.l, it.r)) continue;
    auto el = evaluate(it.l, calc, opt.fuel);
    auto er = evaluate(it.r, calc, opt.fuel);
    if (!el.finished || !er.finished) {
      if (opt.divergence_is_distinct && el.finished != er.finished) {
        Verdict v;
        v.kind = Verdict::Kind::NotBisimilar;
        v.evidence = Evidence{chain_to(i), std::string(el.finished ? "right" : "left") + " side does not terminate"};
        v.reason = v.evidence->reason;
        return v;
      }
      diverged = true;
      continue;
    }
    auto obs = obligations(calc, el.normal, er.normal, names_of(it.l, it.r));
    if (auto* m = std::get_if<Mismatch>(&obs)) {
      Verdict v;
      v.kind = Verdict::Kind::NotBisimilar;
      v.evidence = Evidence{chain_to(i), m->reason};
      v.reason = m->reason + " after " + std::to_string(it.depth) + " expansions";
      return v;
    }
    if (it.depth >= opt.depth) {
      cut = true;
      continue;
    }
    for (auto const& ob : std::get<std::vector<Obligation>>(obs)) {
      if (alpha_eq(ob.lhs, ob.rhs)) continue;
      bool known = false;
      for (auto const& s : seen) {
        RelPair schematic{s.l, s.r, generated_in(s.l, s.r)};
        if (match_modulo_fresh(ob.lhs, ob.rhs, schematic)) {
          known = true;
          break;
        }
      }
      if (known) continue;
      seen.push_back({ob.lhs, ob.rhs, it.depth + 1, i, ob.rule});
      queue.push_back(seen.size() - 1);
    }
  }
  Verdict v;
  v.kind = Verdict::Kind::Inconclusive;
  if (cut) {
    v.reason = "no clash within " + std::to_string(opt.depth) + " expansions";
  } else if (diverged) {
    v.reason = "no clash found; some evaluations ran out of fuel";
  } else {
    v.reason = "expansion closed without a clash";
  }
  return v;
}

}  // namespace nfbisim
