#ifndef NFBISIM_TERM_HPP
#define NFBISIM_TERM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nfbisim {

enum class Calculus { Lambda, ShiftReset, CallccAbort };

std::string_view calculus_name(Calculus calc);
std::optional<Calculus> calculus_from_name(std::string_view name);

class Term;
using TermPtr = std::shared_ptr<Term const>;
using NameSet = std::set<std::string>;

// Locally nameless terms: bound variables are de Bruijn indices, free
// variables and context variables carry names. Lam keeps its source binder
// name only as a printing hint; it takes no part in equality.
//
// Programs of the callcc calculus share this representation: a program is
// either an ordinary term or a CtxApp node at the root.
class Term {
public:
  enum class Kind : std::uint8_t { Var, Bound, Lam, App, Shift, Reset, CallCC, Abort, CtxApp };

  static TermPtr var(std::string name);
  static TermPtr bound(std::uint32_t index);
  static TermPtr lam(std::string hint, TermPtr body);
  static TermPtr app(TermPtr fn, TermPtr arg);
  static TermPtr shift();
  static TermPtr reset(TermPtr body);
  static TermPtr callcc();
  static TermPtr abort(TermPtr program);
  static TermPtr ctx_app(std::string ctx_var, TermPtr body);

  Kind kind() const { return kind_; }
  // Var: variable name. Lam: binder hint. CtxApp: context variable.
  std::string const& name() const { return name_; }
  std::uint32_t index() const { return index_; }
  // App: function. Lam/Reset/Abort/CtxApp: the single child.
  TermPtr const& left() const { return left_; }
  TermPtr const& right() const { return right_; }
  TermPtr const& body() const { return left_; }
  std::size_t size() const { return size_; }
  std::size_t hash() const { return hash_; }

  bool is_value() const {
    return kind_ == Kind::Var || kind_ == Kind::Lam || kind_ == Kind::Shift || kind_ == Kind::CallCC;
  }

  Term(Kind kind, std::string name, std::uint32_t index, TermPtr left, TermPtr right);

private:
  Kind kind_;
  std::string name_;
  std::uint32_t index_ = 0;
  TermPtr left_;
  TermPtr right_;
  std::size_t size_ = 1;
  std::size_t hash_ = 0;
};

class SyntaxError : public std::runtime_error {
public:
  SyntaxError(std::string const& message, std::size_t position)
      : std::runtime_error(message + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class ValidityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Generated names start with '#'; the parser rejects them in user input.
inline bool is_generated_name(std::string_view name) { return !name.empty() && name.front() == '#'; }

bool alpha_eq(TermPtr const& a, TermPtr const& b);

NameSet free_vars(TermPtr const& t);
NameSet free_ctx_vars(TermPtr const& t);
// Free variables and context variables of t, in one set.
void collect_names(TermPtr const& t, NameSet& out);

// Lowest-index generator name #v<i> / #k<i> not in avoid.
std::string fresh_var(NameSet const& avoid);
std::string fresh_ctx_var(NameSet const& avoid);

// True when t has no dangling de Bruijn index.
bool locally_closed(TermPtr const& t);

// Replaces the outermost dangling index of a Lam body by `with` (which must be
// locally closed).
TermPtr open_body(TermPtr const& body, TermPtr const& with);
// Abstracts the free variable `name`, producing a Lam body.
TermPtr close_body(TermPtr const& t, std::string const& name);

// Capture-avoiding value substitution t{v/x}. Throws std::invalid_argument
// when v is not a value.
TermPtr subst_value(TermPtr const& t, std::string const& x, TermPtr const& v);

// Renames free variables and context variables (simultaneously).
TermPtr rename_free(TermPtr const& t, std::function<std::optional<std::string>(std::string const&, bool ctx)> const& f);

}  // namespace nfbisim

#endif
