#ifndef NFBISIM_CALLCC_HPP
#define NFBISIM_CALLCC_HPP

#include <string>

#include "nfbisim/semantics.hpp"

// Lambda calculus with callcc (K) and abort (A(p)) over programs, extended
// with context variables k[t].
namespace nfbisim::callcc {

inline std::optional<TermPtr> step(TermPtr const& p) {
  if (auto s = nfbisim::step(p, Calculus::CallccAbort)) return s->result;
  return std::nullopt;
}

inline EvalResult eval(TermPtr const& p, std::size_t fuel = kDefaultFuel) {
  return evaluate(p, Calculus::CallccAbort, fuel);
}

inline ObligationResult obligations(NormalForm const& a, NormalForm const& b, NameSet const& avoid) {
  return nfbisim::obligations(Calculus::CallccAbort, a, b, avoid);
}

// Context substitution p{F/k}: (k[t]){F/k} = F[t{F/k}], (w[t]){F/k} =
// w[t{F/k}] for w != k, structurally elsewhere.
TermPtr ctx_subst(TermPtr const& p, std::string const& k, ProgCtx const& f);

// Lifts a term to a program in an abstract context: t becomes #k[t] with a
// fresh context variable. Programs already rooted at a context variable are
// returned unchanged.
TermPtr lift_to_program(TermPtr const& t, NameSet const& avoid);

}  // namespace nfbisim::callcc

#endif
