#include <algorithm>
#include <map>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "nfbisim/corpus.hpp"
#include "nfbisim/syntax.hpp"

using namespace nfbisim;

namespace {

constexpr auto L = Calculus::Lambda;
constexpr auto SR = Calculus::ShiftReset;
constexpr auto CC = Calculus::CallccAbort;

TermPtr P(char const* s, Calculus c = L) { return parse_term(s, c); }

EngineOptions small() {
  EngineOptions o;
  o.fuel = 200;
  o.depth = 3;
  o.max_pairs = 6;
  o.node_budget = 20000;
  return o;
}

std::vector<std::string> names_in(TermPtr const& l, TermPtr const& r) {
  NameSet s;
  collect_names(l, s);
  collect_names(r, s);
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("relation files: parse, print, reparse") {
  auto rel = parse_relation(R"((relation (calculus callcc)
    (define i "\x. x")
    (pair (fresh k g) "k[K (\x. x (g x))]" "k[i (K g)]")))");
  REQUIRE(rel.pairs.size() == 1);
  CHECK(rel.calc == CC);
  CHECK(rel.pairs[0].fresh == std::vector<std::string>{"k", "g"});
  CHECK(alpha_eq(rel.pairs[0].rhs, P("k[(\\x. x) (K g)]", CC)));

  auto again = parse_relation(print_relation(rel));
  REQUIRE(again.pairs.size() == 1);
  CHECK(alpha_eq(again.pairs[0].lhs, rel.pairs[0].lhs));
  CHECK(alpha_eq(again.pairs[0].rhs, rel.pairs[0].rhs));
  CHECK(again.pairs[0].fresh == rel.pairs[0].fresh);

  CHECK_THROWS_AS(parse_relation("(relation (calculus nope))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (pair \"x\"))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (pair (fresh q) \"x\" \"x\"))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (pair (fresh x x) \"x\" \"x\"))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (pair \"S x\" \"x\"))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (define v \"x\") (pair \"v\" \"v\"))"), RelationError);
  CHECK_THROWS_AS(parse_relation("(relation (calculus lambda) (pair \"(x\" \"x\")"), RelationError);
}

TEST_CASE("technique lists") {
  CHECK(parse_techniques("refl,red", L) == Techniques{Technique::Refl, Technique::Red});
  CHECK(parse_techniques("ctx", L) == Techniques{Technique::Refl, Technique::Lam, Technique::Ectx});
  CHECK(parse_techniques("ctx", CC).contains(Technique::SubstC));
  CHECK(parse_techniques("ctx", SR).contains(Technique::PctxRst));
  CHECK_THROWS_AS(parse_techniques("pctx", L), std::invalid_argument);
  CHECK_THROWS_AS(parse_techniques("bogus", SR), std::invalid_argument);

  for (auto c : {L, SR, CC}) {
    auto d = TechniqueSet::defaults(c);
    CHECK(std::includes(d.full.begin(), d.full.end(), d.strong.begin(), d.strong.end()));
    CHECK(d.strong.contains(Technique::Red));
    CHECK(d.strong.contains(Technique::Refl));
  }
  CHECK_FALSE(default_strong(L).contains(Technique::Ectx));
  CHECK_FALSE(default_strong(SR).contains(Technique::Pctx));
  CHECK_FALSE(default_strong(SR).contains(Technique::PctxRst));
  CHECK_FALSE(default_strong(SR).contains(Technique::EctxPure));
  CHECK_FALSE(default_strong(CC).contains(Technique::SubstC));

  auto ts = TechniqueSet::defaults(L);
  apply_unsafe(ts, "strong+=ectx", L);
  CHECK(ts.strong.contains(Technique::Ectx));
  CHECK_THROWS_AS(apply_unsafe(ts, "ectx", L), std::invalid_argument);
}

TEST_CASE("auto_prove") {
  SUBCASE("identity against its eta expansion") {
    auto v = auto_prove(P("\\x. x"), P("\\x. \\y. x y"), L, TechniqueSet::defaults(L), {});
    REQUIRE(v.kind == Verdict::Kind::Verified);
    CHECK(v.witness.pairs.size() == 2);
    // the hand-built witness checks on its own first
    auto hand = parse_relation(R"((relation (calculus lambda)
      (pair "\x. x" "\x. \y. x y") (pair (fresh z) "z" "\y. z y")))");
    CHECK(verify_bisimulation_up_to(hand, TechniqueSet::defaults(L), {}).kind == Verdict::Kind::Verified);
    auto again = verify_bisimulation_up_to(parse_relation(print_relation(v.witness)), TechniqueSet::defaults(L), {});
    CHECK(again.kind == Verdict::Kind::Verified);
  }
  SUBCASE("eta_v for callcc") {
    auto v = auto_prove(P("\\x. K (\\y. x y)", CC), P("K", CC), CC, TechniqueSet::defaults(CC), {});
    CHECK(v.kind == Verdict::Kind::Verified);
  }
  SUBCASE("identity against self-application") {
    auto v = auto_prove(P("\\x. x"), P("\\x. x x"), L, TechniqueSet::defaults(L), {});
    CHECK(v.kind == Verdict::Kind::NotBisimilar);
    REQUIRE(v.evidence.has_value());
    CHECK(replay_evidence(L, *v.evidence));
    CHECK(exit_code(v) == 1);
  }
  SUBCASE("reset of a value") {
    auto v = auto_prove(P("\\x. <x>", SR), P("\\x. x", SR), SR, TechniqueSet::defaults(SR), {});
    CHECK(v.kind == Verdict::Kind::Verified);
  }
}

TEST_CASE("distinguish") {
  auto inc = distinguish(P("\\x. x (\\z. z)", CC), P("\\x. (\\y. x (\\z. z)) (x (\\z. z))", CC), CC,
                         [] {
                           EngineOptions o;
                           o.depth = 4;
                           return o;
                         }());
  REQUIRE(inc.kind == Verdict::Kind::NotBisimilar);
  REQUIRE(inc.evidence.has_value());
  CHECK(inc.evidence->chain.size() == 3);  // goal and two expansions
  CHECK(inc.evidence->reason.find("context-stuck vs open-stuck") != std::string::npos);
  CHECK(replay_evidence(CC, *inc.evidence));
  // one expansion is not enough
  EngineOptions one;
  one.depth = 1;
  CHECK(distinguish(P("\\x. x (\\z. z)", CC), P("\\x. (\\y. x (\\z. z)) (x (\\z. z))", CC), CC, one).kind ==
        Verdict::Kind::Inconclusive);

  auto vars = distinguish(P("y"), P("z"), L, {});
  CHECK(vars.kind == Verdict::Kind::NotBisimilar);
  auto same = distinguish(P("\\x. x"), P("\\x. \\y. x y"), L, {});
  CHECK(same.kind == Verdict::Kind::Inconclusive);
  CHECK(exit_code(same) == 2);

  EngineOptions div;
  div.fuel = 50;
  auto omega = P("(\\x. x x) (\\x. x x)");
  CHECK(distinguish(omega, P("y"), L, div).kind == Verdict::Kind::Inconclusive);
  div.divergence_is_distinct = true;
  CHECK(distinguish(omega, P("y"), L, div).kind == Verdict::Kind::NotBisimilar);
}

TEST_CASE("prove and distinguish never both succeed") {
  std::size_t proved = 0, split = 0;
  for (auto calc : {L, SR, CC}) {
    testing::TermGen gen(calc, 7000 + static_cast<std::uint32_t>(calc));
    for (int i = 0; i < 150; ++i) {
      auto l = gen.value(6);
      auto r = gen.coin(3) ? l : gen.value(6);
      if (gen.coin(4)) r = Term::lam("x", Term::app(r, Term::bound(0)));
      auto p = auto_prove(l, r, calc, TechniqueSet::defaults(calc), small());
      auto d = distinguish(l, r, calc, small());
      INFO(print_term(l), "  vs  ", print_term(r));
      CHECK_FALSE((p.kind == Verdict::Kind::Verified && d.kind == Verdict::Kind::NotBisimilar));
      if (p.kind == Verdict::Kind::Verified) {
        ++proved;
        auto again = verify_bisimulation_up_to(parse_relation(print_relation(p.witness)),
                                               TechniqueSet::defaults(calc), small());
        CHECK(again.kind == Verdict::Kind::Verified);
      }
      if (d.kind == Verdict::Kind::NotBisimilar) {
        ++split;
        CHECK(replay_evidence(calc, *d.evidence, small().fuel));
      }
    }
  }
  MESSAGE("proved ", proved, ", distinguished ", split, " of 450");
  CHECK(proved > 50);
  CHECK(split > 50);
}

// Renames every free and context name injectively and reverses or rotates
// the pairs; the verdict kind must not move.
TEST_CASE("verdicts are invariant under renaming and permutation") {
  std::size_t counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    auto calc = std::array{L, SR, CC}[static_cast<std::size_t>(i % 3)];
    testing::TermGen gen(calc, 90000 + static_cast<std::uint32_t>(i));
    Relation rel{calc, {}};
    std::size_t n = gen.pick(1, 3);
    for (std::size_t k = 0; k < n; ++k) {
      auto l = gen.program(12);
      TermPtr r;
      switch (gen.pick(0, 2)) {
        case 0: r = l; break;
        case 1: r = gen.program(12); break;
        default: r = calc == CC && l->kind() == Term::Kind::CtxApp ? l : Term::app(Term::lam("u", Term::bound(0)), l);
      }
      if (calc == CC && (l->kind() == Term::Kind::CtxApp) != (r->kind() == Term::Kind::CtxApp)) r = l;
      RelPair p{l, r, {}};
      for (auto const& name : names_in(l, r)) {
        if (gen.coin(2)) p.fresh.push_back(name);
      }
      rel.pairs.push_back(p);
    }

    std::map<std::string, std::string> ren;
    int next = 0;
    auto f = [&](std::string const& name, bool ctx) -> std::optional<std::string> {
      auto it = ren.find(name);
      if (it == ren.end()) it = ren.emplace(name, (ctx ? "q" : "n") + std::to_string(next++)).first;
      return it->second;
    };
    Relation moved{calc, {}};
    for (auto const& p : rel.pairs) {
      RelPair q{rename_free(p.lhs, f), rename_free(p.rhs, f), {}};
      for (auto const& x : p.fresh) q.fresh.push_back(*f(x, false));
      moved.pairs.push_back(q);
    }
    if (i % 2) {
      std::reverse(moved.pairs.begin(), moved.pairs.end());
    } else {
      std::rotate(moved.pairs.begin(), moved.pairs.begin() + 1, moved.pairs.end());
    }

    auto a = verify_bisimulation_up_to(rel, TechniqueSet::defaults(calc), small());
    auto b = verify_bisimulation_up_to(moved, TechniqueSet::defaults(calc), small());
    INFO(print_relation(rel));
    CHECK(verdict_label(a) == verdict_label(b));
    ++counts[static_cast<int>(a.kind)];
  }
  MESSAGE("verified ", counts[0], ", failed ", counts[1], ", inconclusive ", counts[2]);
  CHECK(counts[0] > 100);
  CHECK(counts[1] > 100);
}

TEST_CASE("corpus manifest") {
  auto dir = std::filesystem::path(NFBISIM_CORPUS_DIR);
  auto entries = load_manifest(dir / "manifest.sexp");
  CHECK(entries.size() >= 20);
  std::vector<std::string> axioms;
  for (auto const& e : entries) {
    if (entry_selected(e, "axioms")) axioms.push_back(e.name);
    if (entry_selected(e, "shiftreset")) CHECK(e.calc == SR);
  }
  CHECK(axioms == std::vector<std::string>{"eta-v2", "c-current", "c-tail"});

  auto results = run_corpus(dir, "", {});
  REQUIRE(results.size() == entries.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].entry.name == entries[i].name);
    INFO(results[i].entry.name, ": ", results[i].detail);
    CHECK(results[i].pass);
  }

  auto bad = entries.front();
  bad.expect = "FAILED";
  CHECK_FALSE(run_entry(bad, dir, {}).pass);
}

// distinguish and the test-side unrolling are written independently; at the
// same depth they must find the same clashes.
TEST_CASE("distinguish agrees with the unrolling oracle") {
  EngineOptions opt;
  opt.depth = 3;
  opt.fuel = 300;
  std::size_t clashes = 0;
  for (auto calc : {L, SR, CC}) {
    testing::TermGen gen(calc, 3100u + static_cast<unsigned>(calc));
    for (int i = 0; i < 400; ++i) {
      auto l = gen.program(10);
      auto r = gen.coin(3) ? Term::app(Term::lam("u", Term::bound(0)), l) : gen.program(10);
      if (calc == CC && (l->kind() == Term::Kind::CtxApp) != (r->kind() == Term::Kind::CtxApp)) continue;
      auto [gl, gr] = goal_pair(l, r, calc);
      auto d = distinguish(l, r, calc, opt);
      auto u = testing::unroll_oracle(gl, gr, calc, opt.depth, opt.fuel);
      INFO(print_term(gl), "  vs  ", print_term(gr), "  oracle: ", u.mismatch.value_or("none"));
      CHECK((d.kind == Verdict::Kind::NotBisimilar) == u.mismatch.has_value());
      clashes += u.mismatch ? 1 : 0;
    }
  }
  MESSAGE(clashes, " clashes");
  CHECK(clashes > 300);
}

TEST_CASE("enlarging the technique set keeps corpus relations verified") {
  auto dir = std::filesystem::path(NFBISIM_CORPUS_DIR);
  for (auto const& e : load_manifest(dir / "manifest.sexp")) {
    if (e.command != "verify" || e.expect != "VERIFIED") continue;
    auto rel = load_relation(dir / e.file);
    auto v = verify_bisimulation_up_to(rel, TechniqueSet::defaults(rel.calc), {});
    INFO(e.name, ": ", v.reason);
    CHECK(v.kind == Verdict::Kind::Verified);
    // and with a repeated pair
    auto w = verify_bisimulation_up_to(rel, entry_techniques(e), {});
    REQUIRE(w.kind == Verdict::Kind::Verified);
    auto bigger = rel;
    bigger.pairs.push_back(rel.pairs.front());
    CHECK(verify_bisimulation_up_to(bigger, entry_techniques(e), {}).kind == Verdict::Kind::Verified);
  }
}
