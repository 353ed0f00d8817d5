#ifndef NFBISIM_SEMANTICS_HPP
#define NFBISIM_SEMANTICS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nfbisim/context.hpp"
#include "nfbisim/term.hpp"

namespace nfbisim {

// Eager normal form of an irreducible term or program.
struct NormalForm {
  enum class Kind { Value, OpenStuck, ControlStuck, ContextStuck };
  Kind kind = Kind::Value;
  // OpenStuck: F (with head context variable in the callcc calculus).
  // ControlStuck: the pure context around S v.
  ProgCtx ctx;
  // OpenStuck: the stuck variable. ContextStuck: the context variable.
  std::string head;
  // Value: the value. OpenStuck/ControlStuck: the argument. ContextStuck: k[v]'s v.
  TermPtr value;

  TermPtr term() const;
};

std::string_view kind_name(NormalForm::Kind kind);

enum class RedexKind { Beta, Capture, ResetValue, CallccCapture, Abort };

std::string_view redex_name(RedexKind kind);

struct Redex {
  RedexKind kind;
  ProgCtx ctx;
  TermPtr redex;
};

using Decomposition = std::variant<Redex, NormalForm>;

// Unique decomposition into a redex in an evaluation (program) context, or a
// normal form. Total on calculus-valid input.
Decomposition decompose(TermPtr const& t, Calculus calc);

struct Step {
  RedexKind kind;
  TermPtr result;
};

std::optional<Step> step(TermPtr const& t, Calculus calc);
// Contracts an already located redex.
TermPtr contract(Redex const& r);

struct EvalResult {
  bool finished = false;  // false: fuel ran out
  NormalForm normal;      // valid when finished
  TermPtr last;           // final (or last reached) term
  std::size_t steps = 0;
  std::vector<Step> trace;  // filled when requested
};

inline constexpr std::size_t kDefaultFuel = 1000;

EvalResult evaluate(TermPtr const& t, Calculus calc, std::size_t fuel = kDefaultFuel, bool record = false);

enum class Polarity { Passive, Active };

struct Obligation {
  Polarity polarity;
  std::string rule;  // testval, testevctx, testevctx-rst, testctrl, testtm
  TermPtr lhs;
  TermPtr rhs;
  std::vector<std::string> fresh;  // names introduced by the rule instance
};

struct Mismatch {
  std::string reason;
};

using ObligationResult = std::variant<std::vector<Obligation>, Mismatch>;

// Test obligations that the normal forms a and b must meet to be related.
// Fresh names avoid `avoid` and each other.
ObligationResult obligations(Calculus calc, NormalForm const& a, NormalForm const& b, NameSet const& avoid);

// Context test for two evaluation contexts of the shift/reset calculus,
// following the reset-splitting rule. Appends to out; returns false on a
// pure/non-pure clash.
bool context_obligations_sr(EvalCtx const& a, EvalCtx const& b, NameSet& avoid, std::vector<Obligation>& out);

std::string describe(NormalForm const& nf);

}  // namespace nfbisim

#endif
