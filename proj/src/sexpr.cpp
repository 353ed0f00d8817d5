#include "nfbisim/sexpr.hpp"

#include <cctype>

namespace nfbisim {

namespace {

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    for (skip(); pos_ < text_.size(); skip()) out.push_back(read());
    return out;
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        return;
      }
    }
  }

  SExpr read() {
    std::size_t line = line_;
    char c = text_[pos_];
    if (c == ')') throw SExprError("unexpected ')'", line);
    if (c == '(') {
      ++pos_;
      SExpr e = SExpr::list({});
      e.line = line;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw SExprError("unterminated list", line);
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == '"') {
      std::size_t end = text_.find('"', pos_ + 1);
      if (end == std::string_view::npos) throw SExprError("unterminated string", line);
      SExpr e = SExpr::string(std::string(text_.substr(pos_ + 1, end - pos_ - 1)));
      for (std::size_t i = pos_; i < end; ++i) {
        if (text_[i] == '\n') ++line_;
      }
      e.line = line;
      pos_ = end + 1;
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '"' || d == ';') break;
      ++pos_;
    }
    SExpr e = SExpr::atom(std::string(text_.substr(start, pos_ - start)));
    e.line = line;
    return e;
  }
};

void flat(SExpr const& e, std::string& out) {
  switch (e.kind) {
    case SExpr::Kind::Atom: out += e.text; return;
    case SExpr::Kind::String:
      out += '"';
      out += e.text;
      out += '"';
      return;
    case SExpr::Kind::List:
      out += '(';
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        flat(e.items[i], out);
      }
      out += ')';
      return;
  }
}

void pretty(SExpr const& e, int indent, std::string& out) {
  std::string one;
  flat(e, one);
  if (e.kind != SExpr::Kind::List || one.size() + static_cast<std::size_t>(indent) <= 100 || e.items.empty()) {
    out += one;
    return;
  }
  out += '(';
  // keep short leading atoms on the opening line
  std::size_t i = 0;
  for (; i < e.items.size() && e.items[i].kind != SExpr::Kind::List && i < 3; ++i) {
    if (i) out += ' ';
    flat(e.items[i], out);
  }
  for (; i < e.items.size(); ++i) {
    out += '\n';
    out += std::string(static_cast<std::size_t>(indent + 2), ' ');
    pretty(e.items[i], indent + 2, out);
  }
  out += ')';
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).all(); }

std::string print_sexpr(SExpr const& e, int indent) {
  std::string out;
  if (indent < 0) {
    flat(e, out);
  } else {
    pretty(e, indent, out);
  }
  return out;
}

}  // namespace nfbisim
