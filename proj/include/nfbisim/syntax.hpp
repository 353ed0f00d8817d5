#ifndef NFBISIM_SYNTAX_HPP
#define NFBISIM_SYNTAX_HPP

#include <string>
#include <string_view>

#include "nfbisim/term.hpp"

namespace nfbisim {

struct ParseOptions {
  // Accept generator names (#v0, #k3); only traces and tests need this.
  bool allow_generated = false;
};

// Concrete grammar:
//   term ::= atom+                       application, left-associative
//   atom ::= var | '\' var+ '.' term | 'S' | 'K' | '<' term '>'
//          | 'A' '(' term ')' | ctxvar '[' term ']' | '(' term ')'
// A lambda body extends as far right as possible. The result is checked
// against `calc` with check_valid.
TermPtr parse_term(std::string_view text, Calculus calc, ParseOptions options = {});

std::string print_term(TermPtr const& t);

// Rejects constructs foreign to `calc`, and context applications anywhere
// other than a program root or the body of an abort.
void check_valid(TermPtr const& t, Calculus calc);

}  // namespace nfbisim

#endif
