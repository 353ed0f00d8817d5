#include "nfbisim/syntax.hpp"

#include <cctype>
#include <vector>

namespace nfbisim {

namespace {

bool ident_start(char c) { return c >= 'a' && c <= 'z'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Parser {
public:
  Parser(std::string_view text, ParseOptions options) : text_(text), options_(options) {}

  TermPtr parse_all() {
    auto t = parse_seq();
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return t;
  }

private:
  std::string_view text_;
  ParseOptions options_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;

  [[noreturn]] void fail(std::string const& message) const { throw SyntaxError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool at_atom_start() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return ident_start(c) || c == '#' || c == '\\' || c == '<' || c == '(' || c == 'S' || c == 'K' ||
           c == 'A';
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '#') {
      if (!options_.allow_generated) fail("generated names (#...) are reserved");
      ++pos_;
      if (pos_ >= text_.size() || (text_[pos_] != 'v' && text_[pos_] != 'k')) fail("malformed generated name");
      ++pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("malformed generated name");
      }
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return std::string(text_.substr(start, pos_ - start));
    }
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected a variable");
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  // Uppercase keywords must not run into identifier characters (e.g. "Sx").
  bool keyword(char k) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != k) return false;
    if (pos_ + 1 < text_.size() && ident_char(text_[pos_ + 1])) fail(std::string("unknown keyword starting with ") + k);
    ++pos_;
    return true;
  }

  TermPtr resolve(std::string const& name) {
    for (std::size_t i = scope_.size(); i-- > 0;) {
      if (scope_[i] == name) return Term::bound(static_cast<std::uint32_t>(scope_.size() - 1 - i));
    }
    return Term::var(name);
  }

  TermPtr parse_seq() {
    if (!at_atom_start()) fail("expected a term");
    TermPtr acc = parse_atom();
    while (at_atom_start()) acc = Term::app(acc, parse_atom());
    return acc;
  }

  TermPtr parse_lambda() {
    std::vector<std::string> binders;
    while (!peek('.')) binders.push_back(identifier());
    if (binders.empty()) fail("lambda without binder");
    expect('.');
    for (auto const& b : binders) scope_.push_back(b);
    TermPtr body = parse_seq();
    for (std::size_t i = binders.size(); i-- > 0;) {
      scope_.pop_back();
      body = Term::lam(binders[i], body);
    }
    return body;
  }

  TermPtr parse_atom() {
    skip_ws();
    char c = text_[pos_];
    if (c == '\\') {
      ++pos_;
      return parse_lambda();
    }
    if (c == '(') {
      ++pos_;
      auto t = parse_seq();
      expect(')');
      return t;
    }
    if (c == '<') {
      ++pos_;
      auto t = parse_seq();
      expect('>');
      return Term::reset(t);
    }
    if (keyword('S')) return Term::shift();
    if (keyword('K')) return Term::callcc();
    if (keyword('A')) {
      expect('(');
      auto t = parse_seq();
      expect(')');
      return Term::abort(t);
    }
    std::string name = identifier();
    if (peek('[')) {
      ++pos_;
      auto t = parse_seq();
      expect(']');
      return Term::ctx_app(name, t);
    }
    return resolve(name);
  }
};

enum class Position { Root, AbortBody, Inner };

void validate(TermPtr const& t, Calculus calc, Position pos) {
  auto reject = [&](char const* what) {
    throw ValidityError(std::string(what) + " is not part of the " + std::string(calculus_name(calc)) + " calculus");
  };
  switch (t->kind()) {
    case Term::Kind::Var:
    case Term::Kind::Bound: return;
    case Term::Kind::Shift:
      if (calc != Calculus::ShiftReset) reject("shift (S)");
      return;
    case Term::Kind::CallCC:
      if (calc != Calculus::CallccAbort) reject("callcc (K)");
      return;
    case Term::Kind::Reset:
      if (calc != Calculus::ShiftReset) reject("reset (<...>)");
      validate(t->body(), calc, Position::Inner);
      return;
    case Term::Kind::Abort:
      if (calc != Calculus::CallccAbort) reject("abort (A)");
      validate(t->body(), calc, Position::AbortBody);
      return;
    case Term::Kind::CtxApp:
      if (calc != Calculus::CallccAbort) reject("context application");
      if (pos == Position::Inner) {
        throw ValidityError("context application " + t->name() +
                            "[...] may only occur as a whole program or the body of an abort");
      }
      validate(t->body(), calc, Position::Inner);
      return;
    case Term::Kind::App:
      validate(t->left(), calc, Position::Inner);
      validate(t->right(), calc, Position::Inner);
      return;
    case Term::Kind::Lam: validate(t->body(), calc, Position::Inner); return;
  }
}

class Printer {
public:
  explicit Printer(TermPtr const& root) { collect_names(root, taken_); }

  std::string print(TermPtr const& t) {
    std::string out;
    emit(t, Level::Top, out);
    return out;
  }

private:
  enum class Level { Top, Fun, Arg };
  NameSet taken_;
  std::vector<std::string> scope_;

  std::string choose(std::string const& hint) {
    std::string base = hint.empty() || is_generated_name(hint) ? "x" : hint;
    for (std::size_t i = 0;; ++i) {
      std::string name = i == 0 ? base : base + std::to_string(i);
      if (!clashes(name)) return name;
    }
  }

  bool clashes(std::string const& name) const {
    if (taken_.contains(name)) return true;
    for (auto const& s : scope_) {
      if (s == name) return true;
    }
    return false;
  }

  void emit(TermPtr const& t, Level level, std::string& out) {
    switch (t->kind()) {
      case Term::Kind::Var: out += t->name(); return;
      case Term::Kind::Bound:
        if (t->index() >= scope_.size()) {
          out += "?" + std::to_string(t->index());
        } else {
          out += scope_[scope_.size() - 1 - t->index()];
        }
        return;
      case Term::Kind::Shift: out += "S"; return;
      case Term::Kind::CallCC: out += "K"; return;
      case Term::Kind::Reset:
        out += "<";
        emit(t->body(), Level::Top, out);
        out += ">";
        return;
      case Term::Kind::Abort:
        out += "A(";
        emit(t->body(), Level::Top, out);
        out += ")";
        return;
      case Term::Kind::CtxApp:
        out += t->name() + "[";
        emit(t->body(), Level::Top, out);
        out += "]";
        return;
      case Term::Kind::App: {
        bool parens = level == Level::Arg;
        if (parens) out += "(";
        emit(t->left(), Level::Fun, out);
        out += " ";
        emit(t->right(), Level::Arg, out);
        if (parens) out += ")";
        return;
      }
      case Term::Kind::Lam: {
        bool parens = level != Level::Top;
        if (parens) out += "(";
        out += "\\";
        std::size_t pushed = 0;
        TermPtr cur = t;
        while (cur->kind() == Term::Kind::Lam) {
          std::string name = choose(cur->name());
          if (pushed > 0) out += " ";
          out += name;
          scope_.push_back(name);
          ++pushed;
          cur = cur->body();
        }
        out += ". ";
        emit(cur, Level::Top, out);
        scope_.resize(scope_.size() - pushed);
        if (parens) out += ")";
        return;
      }
    }
  }
};

}  // namespace

TermPtr parse_term(std::string_view text, Calculus calc, ParseOptions options) {
  Parser parser(text, options);
  TermPtr t = parser.parse_all();
  check_valid(t, calc);
  return t;
}

void check_valid(TermPtr const& t, Calculus calc) {
  validate(t, calc, Position::Root);
}

std::string print_term(TermPtr const& t) {
  Printer printer(t);
  return printer.print(t);
}

}  // namespace nfbisim
