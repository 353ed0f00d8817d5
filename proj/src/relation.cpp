#include "nfbisim/relation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nfbisim/sexpr.hpp"
#include "nfbisim/syntax.hpp"

namespace nfbisim {

namespace {

struct NamedTechnique {
  Technique technique;
  std::string_view name;
};

constexpr NamedTechnique kNames[] = {
    {Technique::Refl, "refl"},     {Technique::Red, "red"},           {Technique::Lam, "lam"},
    {Technique::Subst, "subst"},   {Technique::Ectx, "ectx"},         {Technique::Pctx, "pctx"},
    {Technique::PctxRst, "pctxrst"}, {Technique::EctxPure, "ectxpure"}, {Technique::Result, "result"},
    {Technique::Abort, "abort"},   {Technique::SubstV, "substv"},     {Technique::SubstC, "substc"},
};

Techniques ctx_macro(Calculus calc) {
  switch (calc) {
    case Calculus::Lambda: return {Technique::Refl, Technique::Lam, Technique::Ectx};
    case Calculus::ShiftReset:
      return {Technique::Refl, Technique::Lam, Technique::Pctx, Technique::PctxRst, Technique::EctxPure};
    case Calculus::CallccAbort: return {Technique::Refl, Technique::Lam, Technique::SubstC};
  }
  return {};
}

bool identifier(std::string_view s) {
  if (s.empty() || s.front() < 'a' || s.front() > 'z') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

[[noreturn]] void fail(SExpr const& at, std::string const& msg) {
  throw RelationError("line " + std::to_string(at.line) + ": " + msg);
}

TermPtr term_of(SExpr const& e, Calculus calc, std::vector<std::pair<std::string, TermPtr>> const& defs) {
  if (e.kind != SExpr::Kind::String) fail(e, "expected a quoted term");
  TermPtr t;
  try {
    t = parse_term(e.text, calc);
  } catch (SyntaxError const& err) {
    fail(e, std::string("in \"") + e.text + "\": " + err.what());
  } catch (ValidityError const& err) {
    fail(e, std::string("in \"") + e.text + "\": " + err.what());
  }
  for (auto const& [name, value] : defs) t = subst_value(t, name, value);
  return t;
}

}  // namespace

std::string_view technique_name(Technique t) {
  for (auto const& n : kNames) {
    if (n.technique == t) return n.name;
  }
  return "?";
}

std::optional<Technique> technique_from_name(std::string_view name) {
  for (auto const& n : kNames) {
    if (n.name == name) return n.technique;
  }
  return std::nullopt;
}

std::vector<Technique> calculus_techniques(Calculus calc) {
  using T = Technique;
  switch (calc) {
    case Calculus::Lambda: return {T::Refl, T::Red, T::Lam, T::Subst, T::Ectx};
    case Calculus::ShiftReset: return {T::Refl, T::Red, T::Lam, T::Subst, T::Pctx, T::PctxRst, T::EctxPure};
    case Calculus::CallccAbort: return {T::Refl, T::Result, T::Abort, T::Lam, T::SubstV, T::SubstC, T::Red};
  }
  return {};
}

Techniques default_strong(Calculus calc) {
  auto all = calculus_techniques(calc);
  Techniques out(all.begin(), all.end());
  switch (calc) {
    case Calculus::Lambda: out.erase(Technique::Ectx); break;
    case Calculus::ShiftReset:
      out.erase(Technique::Pctx);
      out.erase(Technique::PctxRst);
      out.erase(Technique::EctxPure);
      break;
    case Calculus::CallccAbort: out.erase(Technique::SubstC); break;
  }
  return out;
}

TechniqueSet TechniqueSet::defaults(Calculus calc) {
  auto all = calculus_techniques(calc);
  return {Techniques(all.begin(), all.end()), default_strong(calc)};
}

Techniques parse_techniques(std::string_view list, Calculus calc) {
  auto allowed = calculus_techniques(calc);
  Techniques out;
  std::string item;
  std::stringstream in{std::string(list)};
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](char c) { return c == ' '; }), item.end());
    if (item.empty()) continue;
    if (item == "ctx") {
      auto m = ctx_macro(calc);
      out.insert(m.begin(), m.end());
      continue;
    }
    auto t = technique_from_name(item);
    if (!t) throw std::invalid_argument("unknown technique '" + item + "'");
    if (std::find(allowed.begin(), allowed.end(), *t) == allowed.end()) {
      throw std::invalid_argument("technique '" + item + "' does not exist in the " +
                                  std::string(calculus_name(calc)) + " calculus");
    }
    out.insert(*t);
  }
  return out;
}

std::string format_techniques(Techniques const& ts) {
  std::string out;
  for (auto t : ts) {
    if (!out.empty()) out += ",";
    out += technique_name(t);
  }
  return out;
}

void check_pair(RelPair const& p, Calculus calc) {
  try {
    check_valid(p.lhs, calc);
    check_valid(p.rhs, calc);
  } catch (ValidityError const& e) {
    throw RelationError(e.what());
  }
  NameSet names;
  collect_names(p.lhs, names);
  collect_names(p.rhs, names);
  NameSet seen;
  for (auto const& f : p.fresh) {
    if (!names.contains(f)) throw RelationError("fresh name '" + f + "' does not occur in the pair");
    if (!seen.insert(f).second) throw RelationError("fresh name '" + f + "' declared twice");
  }
}

Relation parse_relation(std::string_view text) {
  std::vector<SExpr> top;
  try {
    top = parse_sexprs(text);
  } catch (SExprError const& e) {
    throw RelationError(e.what());
  }
  if (top.size() != 1 || !top[0].is_form("relation")) {
    throw RelationError("expected a single (relation ...) form");
  }
  auto const& items = top[0].items;
  if (items.size() < 2 || !items[1].is_form("calculus") || items[1].items.size() != 2 ||
      items[1].items[1].kind != SExpr::Kind::Atom) {
    fail(top[0], "the relation must start with (calculus lambda|shiftreset|callcc)");
  }
  auto calc = calculus_from_name(items[1].items[1].text);
  if (!calc) fail(items[1], "unknown calculus '" + items[1].items[1].text + "'");

  Relation rel;
  rel.calc = *calc;
  std::vector<std::pair<std::string, TermPtr>> defs;
  for (std::size_t i = 2; i < items.size(); ++i) {
    auto const& it = items[i];
    if (it.is_form("define")) {
      if (it.items.size() != 3 || it.items[1].kind != SExpr::Kind::Atom || !identifier(it.items[1].text)) {
        fail(it, "expected (define name \"value\")");
      }
      TermPtr v = term_of(it.items[2], rel.calc, defs);
      if (!v->is_value() || !free_vars(v).empty() || !free_ctx_vars(v).empty()) {
        fail(it, "definition of '" + it.items[1].text + "' must be a closed value");
      }
      defs.emplace_back(it.items[1].text, v);
      continue;
    }
    if (!it.is_form("pair")) fail(it, "expected (pair ...) or (define ...)");
    RelPair p;
    std::size_t k = 1;
    if (k < it.items.size() && it.items[k].is_form("fresh")) {
      for (std::size_t j = 1; j < it.items[k].items.size(); ++j) {
        auto const& f = it.items[k].items[j];
        if (f.kind != SExpr::Kind::Atom || !identifier(f.text)) fail(f, "bad fresh name");
        for (auto const& d : defs) {
          if (d.first == f.text) fail(f, "'" + f.text + "' is both defined and fresh");
        }
        p.fresh.push_back(f.text);
      }
      ++k;
    }
    if (it.items.size() != k + 2) fail(it, "expected (pair (fresh ...) \"lhs\" \"rhs\")");
    p.lhs = term_of(it.items[k], rel.calc, defs);
    p.rhs = term_of(it.items[k + 1], rel.calc, defs);
    try {
      check_pair(p, rel.calc);
    } catch (RelationError const& e) {
      fail(it, e.what());
    }
    rel.pairs.push_back(std::move(p));
  }
  return rel;
}

Relation load_relation(std::filesystem::path const& path) {
  std::ifstream in(path);
  if (!in) throw RelationError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_relation(buf.str());
}

std::string print_relation(Relation const& rel) {
  std::string out = "(relation (calculus " + std::string(calculus_name(rel.calc)) + ")";
  for (auto const& p : rel.pairs) {
    out += "\n  (pair ";
    if (!p.fresh.empty()) {
      out += "(fresh";
      for (auto const& f : p.fresh) out += " " + f;
      out += ") ";
    }
    out += "\"" + print_term(p.lhs) + "\" \"" + print_term(p.rhs) + "\")";
  }
  out += ")\n";
  return out;
}

}  // namespace nfbisim
