#ifndef NFBISIM_LAMBDA_HPP
#define NFBISIM_LAMBDA_HPP

#include "nfbisim/semantics.hpp"

// Call-by-value lambda calculus: E[(\x.t) v] -> E[t{v/x}].
namespace nfbisim::lambda {

inline Decomposition decompose(TermPtr const& t) { return nfbisim::decompose(t, Calculus::Lambda); }

inline std::optional<TermPtr> step(TermPtr const& t) {
  if (auto s = nfbisim::step(t, Calculus::Lambda)) return s->result;
  return std::nullopt;
}

inline EvalResult eval(TermPtr const& t, std::size_t fuel = kDefaultFuel) {
  return evaluate(t, Calculus::Lambda, fuel);
}

inline ObligationResult obligations(NormalForm const& a, NormalForm const& b, NameSet const& avoid) {
  return nfbisim::obligations(Calculus::Lambda, a, b, avoid);
}

}  // namespace nfbisim::lambda

#endif
