#ifndef NFBISIM_SEXPR_HPP
#define NFBISIM_SEXPR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nfbisim {

// Minimal s-expressions: atoms, raw double-quoted strings (no escapes; terms
// never contain quotes) and lists. ';' starts a line comment.
struct SExpr {
  enum class Kind { Atom, String, List };
  Kind kind = Kind::List;
  std::string text;
  std::vector<SExpr> items;
  std::size_t line = 1;

  bool is_atom(std::string_view a) const { return kind == Kind::Atom && text == a; }
  // A list whose first item is the atom `head`.
  bool is_form(std::string_view head) const {
    return kind == Kind::List && !items.empty() && items.front().is_atom(head);
  }

  static SExpr atom(std::string a) { return {Kind::Atom, std::move(a), {}, 1}; }
  static SExpr string(std::string s) { return {Kind::String, std::move(s), {}, 1}; }
  static SExpr list(std::vector<SExpr> xs) { return {Kind::List, {}, std::move(xs), 1}; }
};

class SExprError : public std::runtime_error {
public:
  SExprError(std::string const& msg, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

// Parses a sequence of top-level expressions.
std::vector<SExpr> parse_sexprs(std::string_view text);

// Renders on one line, or indented when `indent` is non-negative and the
// expression does not fit in a short line.
std::string print_sexpr(SExpr const& e, int indent = -1);

}  // namespace nfbisim

#endif
