#ifndef NFBISIM_PROVER_HPP
#define NFBISIM_PROVER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nfbisim/engine.hpp"
#include "nfbisim/sexpr.hpp"

namespace nfbisim {

// Trace rendering. The s-expression forms are replayable: every term is
// printed in full and every reduction step names its rule.
std::string render_derivation(Derivation const& d, int indent = 0);
std::string render_verdict(Verdict const& v);
SExpr derivation_sexpr(Derivation const& d);
SExpr verdict_sexpr(Verdict const& v);
SExpr evidence_sexpr(Evidence const& e);

struct EvalReport {
  EvalResult result;
  std::string text;
  SExpr sexpr;
};

EvalReport eval_report(TermPtr const& t, Calculus calc, std::size_t fuel);

// Bounded saturation from the single pair (lhs, rhs). In the callcc
// calculus terms are compared inside a fresh context variable. On success
// the witness is a loadable relation.
Verdict auto_prove(TermPtr const& lhs, TermPtr const& rhs, Calculus calc, TechniqueSet const& ts,
                   EngineOptions const& opt);

// Breadth-first expansion of test obligations with concrete fresh names and
// no up-to techniques, looking for a clash of normal forms. `opt.depth`
// bounds the number of expansions along a chain.
Verdict distinguish(TermPtr const& lhs, TermPtr const& rhs, Calculus calc, EngineOptions const& opt);

// The pair proved or distinguished for terms of `calc`: callcc terms are
// lifted into a shared fresh context variable.
std::pair<TermPtr, TermPtr> goal_pair(TermPtr const& lhs, TermPtr const& rhs, Calculus calc);

}  // namespace nfbisim

#endif
