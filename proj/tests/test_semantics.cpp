#include <variant>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"
#include "nfbisim/callcc.hpp"
#include "nfbisim/lambda.hpp"
#include "nfbisim/shift_reset.hpp"
#include "nfbisim/syntax.hpp"

using namespace nfbisim;
using testing::oracle_redexes;
using testing::pure_path_to_shift;

namespace {

constexpr auto L = Calculus::Lambda;
constexpr auto SR = Calculus::ShiftReset;
constexpr auto CC = Calculus::CallccAbort;

TermPtr P(char const* s, Calculus c = L) { return parse_term(s, c, {true}); }

// Wadsworth's combinator, spelled out: fix (\f x y. x (f y)) with
// fix v = \x. theta theta v x and theta = \z x. x (\y. z z x y).
constexpr char const* kTheta = "(\\z x. x (\\y. z z x y))";
std::string const kJ = std::string("(\\q. ") + kTheta + " " + kTheta + " (\\f x y. x (f y)) q)";

TermPtr J() { return P(kJ.c_str()); }

NormalForm nf_of(TermPtr const& t, Calculus c) {
  auto r = evaluate(t, c, 1000);
  REQUIRE(r.finished);
  return r.normal;
}

}  // namespace

TEST_CASE("decompose_l") {
  auto d = lambda::decompose(P("(\\x. x) y"));
  REQUIRE(std::holds_alternative<Redex>(d));
  CHECK(std::get<Redex>(d).ctx.inner.empty());

  d = lambda::decompose(P("y ((\\x. x) z)"));
  REQUIRE(std::holds_alternative<Redex>(d));
  auto const& r = std::get<Redex>(d);
  REQUIRE(r.ctx.inner.frames.size() == 1);
  CHECK(r.ctx.inner.frames[0].kind == Frame::Kind::AppR);
  CHECK(alpha_eq(r.ctx.inner.frames[0].term, P("y")));
  CHECK(alpha_eq(r.redex, P("(\\x. x) z")));

  d = lambda::decompose(P("x v w"));
  REQUIRE(std::holds_alternative<NormalForm>(d));
  auto const& nf = std::get<NormalForm>(d);
  CHECK(nf.kind == NormalForm::Kind::OpenStuck);
  CHECK(nf.head == "x");
  CHECK(alpha_eq(nf.value, P("v")));
  CHECK(ctx_alpha_eq(nf.ctx.inner, EvalCtx{{Frame::app_left(P("w"))}}));
}

TEST_CASE("step_l and eval_l") {
  CHECK(alpha_eq(*lambda::step(P("(\\x. x) z")), P("z")));
  CHECK_FALSE(lambda::step(P("y z")).has_value());

  // J y reduces to \x. y (J x).
  auto r = lambda::eval(Term::app(J(), P("y")));
  REQUIRE(r.finished);
  CHECK(r.normal.kind == NormalForm::Kind::Value);
  CHECK(alpha_eq(r.normal.value, P(("\\x. y (" + kJ + " x)").c_str())));

  auto id = lambda::eval(P("(\\x. x) (\\y. y)"), 10);
  REQUIRE(id.finished);
  CHECK(id.steps == 1);
  CHECK(alpha_eq(id.normal.value, P("\\y. y")));

  auto omega = lambda::eval(P("(\\x. x x) (\\x. x x)"), 1000);
  CHECK_FALSE(omega.finished);
  CHECK(omega.steps == 1000);

  auto stuck = lambda::eval(P(("(\\x. y (" + kJ + " x)) z").c_str()));
  REQUIRE(stuck.finished);
  CHECK(stuck.normal.kind == NormalForm::Kind::OpenStuck);
  CHECK(stuck.normal.head == "y");
  CHECK(stuck.normal.ctx.inner.empty());
  CHECK(alpha_eq(stuck.normal.value, P(("\\x. z (" + kJ + " x)").c_str())));
}

TEST_CASE("obligations_l") {
  auto ob = lambda::obligations(nf_of(P("\\x. x"), L), nf_of(J(), L), {});
  REQUIRE(std::holds_alternative<std::vector<Obligation>>(ob));
  auto const& v = std::get<std::vector<Obligation>>(ob);
  REQUIRE(v.size() == 1);
  CHECK(v[0].polarity == Polarity::Passive);
  CHECK(alpha_eq(v[0].lhs, P("(\\x. x) #v0")));
  CHECK(alpha_eq(v[0].rhs, Term::app(J(), P("#v0"))));

  auto os = lambda::obligations(nf_of(P("y v"), L), nf_of(P("y w"), L), {});
  REQUIRE(std::holds_alternative<std::vector<Obligation>>(os));
  auto const& o = std::get<std::vector<Obligation>>(os);
  REQUIRE(o.size() == 2);
  CHECK(o[0].polarity == Polarity::Active);
  CHECK(alpha_eq(o[0].lhs, P("#v0")));
  CHECK(alpha_eq(o[0].rhs, P("#v0")));
  CHECK(o[1].polarity == Polarity::Passive);
  CHECK(alpha_eq(o[1].lhs, P("v #v1")));
  CHECK(alpha_eq(o[1].rhs, P("w #v1")));

  CHECK(std::holds_alternative<Mismatch>(lambda::obligations(nf_of(P("y"), L), nf_of(P("y v"), L), {})));
  CHECK(std::holds_alternative<Mismatch>(lambda::obligations(nf_of(P("y v"), L), nf_of(P("y"), L), {})));
  CHECK(std::holds_alternative<Mismatch>(lambda::obligations(nf_of(P("y v"), L), nf_of(P("z v"), L), {})));
  // fresh names avoid what they are told to avoid
  auto avoided = lambda::obligations(nf_of(P("a"), L), nf_of(P("b"), L), {"#v0"});
  CHECK(std::get<std::vector<Obligation>>(avoided)[0].fresh == std::vector<std::string>{"#v1"});
}

TEST_CASE("decompose_sr and split_at_reset") {
  auto d = shift_reset::decompose(P("<v>", SR));
  REQUIRE(std::holds_alternative<Redex>(d));
  CHECK(std::get<Redex>(d).kind == RedexKind::ResetValue);

  d = shift_reset::decompose(P("<S v w>", SR));
  REQUIRE(std::holds_alternative<Redex>(d));
  CHECK(std::get<Redex>(d).kind == RedexKind::Capture);

  d = shift_reset::decompose(P("S v w", SR));
  REQUIRE(std::holds_alternative<NormalForm>(d));
  CHECK(std::get<NormalForm>(d).kind == NormalForm::Kind::ControlStuck);

  EvalCtx pure{{Frame::app_left(P("w"))}};
  CHECK(split_at_reset(pure).pure);

  EvalCtx f{{Frame::app_right(P("v")), Frame::reset(), Frame::app_left(P("w"))}};
  auto s = split_at_reset(f);
  REQUIRE_FALSE(s.pure);
  CHECK(ctx_alpha_eq(s.outer, EvalCtx{{Frame::app_right(P("v"))}}));
  CHECK(ctx_alpha_eq(s.inner, EvalCtx{{Frame::app_left(P("w"))}}));
  // replug oracle: F'[<E'[.]>] = F
  auto replug = s.outer;
  replug.frames.push_back(Frame::reset());
  for (auto const& fr : s.inner.frames) replug.frames.push_back(fr);
  CHECK(ctx_alpha_eq(replug, f));

  EvalCtx nested{{Frame::reset(), Frame::reset()}};
  auto n = split_at_reset(nested);
  REQUIRE_FALSE(n.pure);
  CHECK(ctx_alpha_eq(n.outer, EvalCtx{{Frame::reset()}}));
  CHECK(n.inner.empty());
}

TEST_CASE("two captures under one reset: eight labelled steps") {
  auto t = P("<S (\\k. (\\x. x) (k (\\x. x))) (S (\\k. \\x. x x)) ((\\x. x x) (\\x. x x))>", SR);
  auto r = evaluate(t, SR, 100, true);
  REQUIRE(r.finished);
  CHECK(r.steps == 8);
  std::vector<RedexKind> const expected{RedexKind::Capture,    RedexKind::Beta, RedexKind::Beta,
                                        RedexKind::Capture,    RedexKind::Beta, RedexKind::ResetValue,
                                        RedexKind::Beta,       RedexKind::ResetValue};
  REQUIRE(r.trace.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(r.trace[i].kind == expected[i]);
  CHECK(alpha_eq(r.trace[0].result,
                 P("<(\\k. (\\x. x) (k (\\x. x))) (\\x. <x (S (\\k. \\x. x x)) ((\\x. x x) (\\x. x x))>)>", SR)));
  CHECK(alpha_eq(r.trace[3].result,
                 P("<(\\x. x) <(\\k. \\x. x x) (\\x. <(\\x. x) x ((\\x. x x) (\\x. x x))>)>>", SR)));
  CHECK(r.normal.kind == NormalForm::Kind::Value);
  CHECK(alpha_eq(r.normal.value, P("\\x. x x")));
}

TEST_CASE("shift passed to shift") {
  auto r = evaluate(P("<S S>", SR), SR, 100, true);
  REQUIRE(r.finished);
  REQUIRE(r.trace.size() == 5);
  CHECK(alpha_eq(r.trace[0].result, P("<S (\\x. <x>)>", SR)));
  CHECK(alpha_eq(r.trace[1].result, P("<(\\x. <x>) (\\x. <x>)>", SR)));
  CHECK(alpha_eq(r.trace[2].result, P("<<\\x. <x>>>", SR)));
  CHECK(alpha_eq(r.normal.value, P("\\x. <x>", SR)));

  auto stuck = evaluate(P("S v", SR), SR, 10);
  REQUIRE(stuck.finished);
  CHECK(stuck.steps == 0);
  CHECK(stuck.normal.kind == NormalForm::Kind::ControlStuck);
  CHECK(stuck.normal.ctx.inner.empty());
}

TEST_CASE("double shift: applied pair reduces to the open-stuck pair") {
  auto l = nf_of(P("<S z>", SR), SR);
  auto r = nf_of(P("<(\\k. k (\\x. x)) z>", SR), SR);
  CHECK(alpha_eq(l.term(), P("<z (\\x. <x>)>", SR)));
  CHECK(alpha_eq(r.term(), P("<z (\\x. x)>", SR)));
}

TEST_CASE("obligations_sr") {
  auto a = nf_of(P("S S", SR), SR);
  auto b = nf_of(P("S (\\k. k (\\x. x))", SR), SR);
  auto ob = shift_reset::obligations(a, b, {});
  REQUIRE(std::holds_alternative<std::vector<Obligation>>(ob));
  auto const& v = std::get<std::vector<Obligation>>(ob);
  REQUIRE(v.size() == 2);
  CHECK(v[0].polarity == Polarity::Active);
  CHECK(alpha_eq(v[0].lhs, P("#v0")));
  CHECK(alpha_eq(v[0].rhs, P("#v0")));
  CHECK(v[1].rule == "testctrl");
  CHECK(v[1].polarity == Polarity::Active);
  CHECK(alpha_eq(v[1].lhs, P("<S #v1>", SR)));
  CHECK(alpha_eq(v[1].rhs, P("<(\\k. k (\\x. x)) #v1>", SR)));

  auto vv = shift_reset::obligations(nf_of(P("S", SR), SR), nf_of(P("S", SR), SR), {});
  auto const& vo = std::get<std::vector<Obligation>>(vv);
  REQUIRE(vo.size() == 1);
  CHECK(vo[0].polarity == Polarity::Passive);
  CHECK(alpha_eq(vo[0].lhs, P("S #v0", SR)));

  CHECK(std::holds_alternative<Mismatch>(
      shift_reset::obligations(nf_of(P("x v w", SR), SR), nf_of(P("<x v w>", SR), SR), {})));

  // the open-stuck pair of the double-shift relation: one split on each side
  auto p3 = shift_reset::obligations(nf_of(P("<z (\\x. <x>)>", SR), SR), nf_of(P("<z (\\x. x)>", SR), SR), {});
  auto const& o3 = std::get<std::vector<Obligation>>(p3);
  REQUIRE(o3.size() == 3);
  CHECK(alpha_eq(o3[0].lhs, P("<#v0>", SR)));
  CHECK(alpha_eq(o3[1].lhs, P("#v0")));
  CHECK(o3[2].polarity == Polarity::Passive);
  CHECK(alpha_eq(o3[2].lhs, P("(\\x. <x>) #v1", SR)));
  CHECK(alpha_eq(o3[2].rhs, P("(\\x. x) #v1", SR)));
}

TEST_CASE("step_cc") {
  CHECK(alpha_eq(*callcc::step(P("k[K v]", CC)), P("k[v (\\y. A(k[y]))]", CC)));

  // capture then abort: F1 = k[f []], F2 = [] w, v = b
  auto r = evaluate(P("k[f (K (\\x. x b w))]", CC), CC, 20, true);
  REQUIRE(r.finished);
  REQUIRE(r.trace.size() == 4);
  CHECK(alpha_eq(r.trace[0].result, P("k[f ((\\x. x b w) (\\y. A(k[f y])))]", CC)));
  CHECK(alpha_eq(r.trace[1].result, P("k[f ((\\y. A(k[f y])) b w)]", CC)));
  CHECK(alpha_eq(r.trace[2].result, P("k[f (A(k[f b]) w)]", CC)));
  CHECK(alpha_eq(r.trace[3].result, P("k[f b]", CC)));

  // callcc applied to itself, inside k[] and at the bare root
  auto e = evaluate(P("k[K K]", CC), CC, 20, true);
  REQUIRE(e.finished);
  REQUIRE(e.trace.size() == 4);
  CHECK(alpha_eq(e.trace[0].result, P("k[K (\\x. A(k[x]))]", CC)));
  CHECK(alpha_eq(e.trace[1].result, P("k[(\\x. A(k[x])) (\\x. A(k[x]))]", CC)));
  CHECK(alpha_eq(e.trace[2].result, P("k[A(k[\\x. A(k[x])])]", CC)));
  CHECK(e.normal.kind == NormalForm::Kind::ContextStuck);
  CHECK(alpha_eq(e.normal.value, P("\\x. A(k[x])", CC)));
  auto bare = evaluate(P("K K", CC), CC, 20);
  CHECK(alpha_eq(bare.normal.value, P("\\x. A(x)", CC)));
}

TEST_CASE("eval_cc") {
  auto eta1 = callcc::eval(P("k[(\\x. K (\\y. x y)) z]", CC));
  auto eta2 = callcc::eval(P("k[K z]", CC));
  REQUIRE(eta1.finished);
  REQUIRE(eta2.finished);
  CHECK(alpha_eq(eta1.last, P("k[z (\\x. A(k[x]))]", CC)));
  CHECK(alpha_eq(eta2.last, P("k[z (\\x. A(k[x]))]", CC)));

  auto ab = callcc::eval(P("f (A(\\y. y)) w", CC));
  REQUIRE(ab.finished);
  CHECK(ab.steps == 1);
  CHECK(ab.normal.kind == NormalForm::Kind::Value);

  auto cs = callcc::eval(P("k[\\y. y]", CC));
  CHECK(cs.steps == 0);
  CHECK(cs.normal.kind == NormalForm::Kind::ContextStuck);
  CHECK(cs.normal.head == "k");
}

TEST_CASE("ctx_subst") {
  ProgCtx f{"w", EvalCtx{{Frame::app_right(P("g"))}}};
  CHECK(alpha_eq(callcc::ctx_subst(P("k[x]", CC), "k", f), P("w[g x]", CC)));
  CHECK(alpha_eq(callcc::ctx_subst(P("w[x]", CC), "k", f), P("w[x]", CC)));
  CHECK(alpha_eq(callcc::ctx_subst(P("k[A(k[x])]", CC), "k", f), P("w[g (A(w[g x]))]", CC)));
  CHECK(alpha_eq(callcc::ctx_subst(P("k[\\y. A(k[y])]", CC), "k", f), P("w[g (\\y. A(w[g y]))]", CC)));
}

TEST_CASE("obligations_cc") {
  auto vv = callcc::obligations(nf_of(P("\\x. x", CC), CC), nf_of(P("w", CC), CC), {});
  CHECK(std::get<std::vector<Obligation>>(vv).empty());
  CHECK(std::holds_alternative<Mismatch>(
      callcc::obligations(nf_of(P("k[v]", CC), CC), nf_of(P("w[v]", CC), CC), {})));
  auto cs = callcc::obligations(nf_of(P("k[v]", CC), CC), nf_of(P("k[u]", CC), CC), {});
  auto const& o = std::get<std::vector<Obligation>>(cs);
  REQUIRE(o.size() == 1);
  CHECK(o[0].polarity == Polarity::Passive);
  CHECK(alpha_eq(o[0].lhs, P("#k0[v #v0]", CC)));
  CHECK(alpha_eq(o[0].rhs, P("#k0[u #v0]", CC)));
  auto os = callcc::obligations(nf_of(P("k[f (x a)]", CC), CC), nf_of(P("k[x b]", CC), CC), {});
  auto const& oo = std::get<std::vector<Obligation>>(os);
  REQUIRE(oo.size() == 2);
  CHECK(alpha_eq(oo[0].lhs, P("k[f #v0]", CC)));
  CHECK(alpha_eq(oo[0].rhs, P("k[#v0]", CC)));
  CHECK(alpha_eq(oo[1].lhs, P("#k0[a #v1]", CC)));
}

TEST_CASE("unique decomposition against the brute-force oracle") {
  for (auto calc : {L, SR, CC}) {
    testing::TermGen gen(calc, 77u + static_cast<unsigned>(calc));
    for (int i = 0; i < 3000; ++i) {
      auto t = gen.program(12);
      CAPTURE(print_term(t));
      auto hits = oracle_redexes(t);
      REQUIRE(hits.size() <= 1);
      auto d = decompose(t, calc);
      if (hits.empty()) {
        REQUIRE(std::holds_alternative<NormalForm>(d));
        CHECK(alpha_eq(std::get<NormalForm>(d).term(), t));
        CHECK_FALSE(step(t, calc).has_value());
      } else {
        REQUIRE(std::holds_alternative<Redex>(d));
        auto const& r = std::get<Redex>(d);
        CHECK(r.kind == hits[0].kind);
        if (r.kind == RedexKind::Capture) {
          // decompose reports S v itself; the oracle reports the delimiting reset
          CHECK(r.redex->left()->kind() == Term::Kind::Shift);
          CHECK(pure_path_to_shift(hits[0].redex->body()));
        } else {
          CHECK(r.redex == hits[0].redex);
        }
        CHECK(alpha_eq(r.ctx.plug(r.redex), t));
        auto next = step(t, calc);
        REQUIRE(next.has_value());
        // reduction is deterministic and preserves validity and free names
        CHECK(alpha_eq(next->result, step(t, calc)->result));
        CHECK_NOTHROW(check_valid(next->result, calc));
        auto fv = free_vars(t);
        for (auto const& n : free_vars(next->result)) CHECK(fv.contains(n));
        if (r.kind == RedexKind::Capture) CHECK(split_at_reset(r.ctx.inner).inner.pure());
      }
    }
  }
}

TEST_CASE("pure terms never become control-stuck") {
  testing::TermGen gen(SR, 99u);
  for (int i = 0; i < 1000; ++i) {
    auto t = Term::reset(gen.term(11, 0));
    auto r = evaluate(t, SR, 200);
    if (r.finished) CHECK(r.normal.kind != NormalForm::Kind::ControlStuck);
  }
}

TEST_CASE("context substitution preserves reduction") {
  testing::TermGen gen(CC, 5150u);
  int checked = 0;
  for (int i = 0; i < 4000 && checked < 1000; ++i) {
    auto p = gen.program(12);
    auto q = callcc::step(p);
    if (!q) continue;
    std::string k = gen.ctx_name();
    ProgCtx f;
    if (gen.coin(2)) f.head = gen.coin(2) ? "k" : "m";
    for (std::size_t n = gen.pick(0, 2); n > 0; --n) {
      if (gen.coin(2)) {
        f.inner.frames.push_back(Frame::app_left(gen.term(3, 0)));
      } else {
        f.inner.frames.push_back(Frame::app_right(gen.value(3)));
      }
    }
    auto lhs = callcc::step(callcc::ctx_subst(p, k, f));
    CAPTURE(print_term(p));
    REQUIRE(lhs.has_value());
    CHECK(alpha_eq(*lhs, callcc::ctx_subst(*q, k, f)));
    ++checked;
  }
  CHECK(checked == 1000);
}
