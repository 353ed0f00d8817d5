#ifndef NFBISIM_SHIFT_RESET_HPP
#define NFBISIM_SHIFT_RESET_HPP

#include "nfbisim/semantics.hpp"

// Lambda calculus with shift (S) and reset (<t>), without an implicit
// top-level reset: E[S v] with no enclosing delimiter is a normal form.
namespace nfbisim::shift_reset {

inline Decomposition decompose(TermPtr const& t) { return nfbisim::decompose(t, Calculus::ShiftReset); }

inline std::optional<TermPtr> step(TermPtr const& t) {
  if (auto s = nfbisim::step(t, Calculus::ShiftReset)) return s->result;
  return std::nullopt;
}

inline EvalResult eval(TermPtr const& t, std::size_t fuel = kDefaultFuel) {
  return evaluate(t, Calculus::ShiftReset, fuel);
}

inline ObligationResult obligations(NormalForm const& a, NormalForm const& b, NameSet const& avoid) {
  return nfbisim::obligations(Calculus::ShiftReset, a, b, avoid);
}

// Pure terms: values and delimited terms <t>.
inline bool is_pure(TermPtr const& t) { return t->is_value() || t->kind() == Term::Kind::Reset; }

}  // namespace nfbisim::shift_reset

#endif
