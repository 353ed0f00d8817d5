#include "nfbisim/term.hpp"

#include <functional>

namespace nfbisim {

std::string_view calculus_name(Calculus calc) {
  switch (calc) {
    case Calculus::Lambda: return "lambda";
    case Calculus::ShiftReset: return "shiftreset";
    case Calculus::CallccAbort: return "callcc";
  }
  return "?";
}

std::optional<Calculus> calculus_from_name(std::string_view name) {
  if (name == "lambda") return Calculus::Lambda;
  if (name == "shiftreset") return Calculus::ShiftReset;
  if (name == "callcc") return Calculus::CallccAbort;
  return std::nullopt;
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Term::Term(Kind kind, std::string name, std::uint32_t index, TermPtr left, TermPtr right)
    : kind_(kind), name_(std::move(name)), index_(index), left_(std::move(left)), right_(std::move(right)) {
  hash_ = static_cast<std::size_t>(kind_) * 1315423911u;
  if (kind_ == Kind::Var || kind_ == Kind::CtxApp) hash_ = mix(hash_, std::hash<std::string>{}(name_));
  if (kind_ == Kind::Bound) hash_ = mix(hash_, index_);
  if (left_) {
    size_ += left_->size_;
    hash_ = mix(hash_, left_->hash_);
  }
  if (right_) {
    size_ += right_->size_;
    hash_ = mix(hash_, right_->hash_);
  }
}

TermPtr Term::var(std::string name) { return std::make_shared<Term const>(Kind::Var, std::move(name), 0, nullptr, nullptr); }
TermPtr Term::bound(std::uint32_t index) { return std::make_shared<Term const>(Kind::Bound, "", index, nullptr, nullptr); }
TermPtr Term::lam(std::string hint, TermPtr body) {
  return std::make_shared<Term const>(Kind::Lam, std::move(hint), 0, std::move(body), nullptr);
}
TermPtr Term::app(TermPtr fn, TermPtr arg) {
  return std::make_shared<Term const>(Kind::App, "", 0, std::move(fn), std::move(arg));
}
TermPtr Term::shift() {
  static TermPtr const s = std::make_shared<Term const>(Kind::Shift, "", 0, nullptr, nullptr);
  return s;
}
TermPtr Term::reset(TermPtr body) { return std::make_shared<Term const>(Kind::Reset, "", 0, std::move(body), nullptr); }
TermPtr Term::callcc() {
  static TermPtr const k = std::make_shared<Term const>(Kind::CallCC, "", 0, nullptr, nullptr);
  return k;
}
TermPtr Term::abort(TermPtr program) {
  return std::make_shared<Term const>(Kind::Abort, "", 0, std::move(program), nullptr);
}
TermPtr Term::ctx_app(std::string ctx_var, TermPtr body) {
  return std::make_shared<Term const>(Kind::CtxApp, std::move(ctx_var), 0, std::move(body), nullptr);
}

bool alpha_eq(TermPtr const& a, TermPtr const& b) {
  if (a == b) return true;
  if (a->hash() != b->hash() || a->size() != b->size() || a->kind() != b->kind()) return false;
  switch (a->kind()) {
    case Term::Kind::Var: return a->name() == b->name();
    case Term::Kind::Bound: return a->index() == b->index();
    case Term::Kind::Shift:
    case Term::Kind::CallCC: return true;
    case Term::Kind::App: return alpha_eq(a->left(), b->left()) && alpha_eq(a->right(), b->right());
    case Term::Kind::CtxApp: return a->name() == b->name() && alpha_eq(a->body(), b->body());
    case Term::Kind::Lam:
    case Term::Kind::Reset:
    case Term::Kind::Abort: return alpha_eq(a->body(), b->body());
  }
  return false;
}

namespace {

void walk_free(TermPtr const& t, NameSet* vars, NameSet* ctxs) {
  switch (t->kind()) {
    case Term::Kind::Var:
      if (vars) vars->insert(t->name());
      return;
    case Term::Kind::CtxApp:
      if (ctxs) ctxs->insert(t->name());
      walk_free(t->body(), vars, ctxs);
      return;
    case Term::Kind::Bound:
    case Term::Kind::Shift:
    case Term::Kind::CallCC: return;
    case Term::Kind::App:
      walk_free(t->left(), vars, ctxs);
      walk_free(t->right(), vars, ctxs);
      return;
    case Term::Kind::Lam:
    case Term::Kind::Reset:
    case Term::Kind::Abort: walk_free(t->body(), vars, ctxs); return;
  }
}

std::string fresh_with_prefix(std::string const& prefix, NameSet const& avoid) {
  for (std::size_t i = 0;; ++i) {
    std::string candidate = prefix + std::to_string(i);
    if (!avoid.contains(candidate)) return candidate;
  }
}

}  // namespace

NameSet free_vars(TermPtr const& t) {
  NameSet out;
  walk_free(t, &out, nullptr);
  return out;
}

NameSet free_ctx_vars(TermPtr const& t) {
  NameSet out;
  walk_free(t, nullptr, &out);
  return out;
}

void collect_names(TermPtr const& t, NameSet& out) {
  walk_free(t, &out, &out);
}

std::string fresh_var(NameSet const& avoid) { return fresh_with_prefix("#v", avoid); }
std::string fresh_ctx_var(NameSet const& avoid) { return fresh_with_prefix("#k", avoid); }

namespace {

bool closed_above(TermPtr const& t, std::uint32_t depth) {
  switch (t->kind()) {
    case Term::Kind::Bound: return t->index() < depth;
    case Term::Kind::Var:
    case Term::Kind::Shift:
    case Term::Kind::CallCC: return true;
    case Term::Kind::App: return closed_above(t->left(), depth) && closed_above(t->right(), depth);
    case Term::Kind::Lam: return closed_above(t->body(), depth + 1);
    case Term::Kind::Reset:
    case Term::Kind::Abort:
    case Term::Kind::CtxApp: return closed_above(t->body(), depth);
  }
  return false;
}

// Generic structural rebuild; `leaf` may replace Var/Bound/CtxApp-name nodes.
template <typename F>
TermPtr rebuild(TermPtr const& t, std::uint32_t depth, F const& leaf) {
  if (auto replaced = leaf(t, depth)) return *replaced;
  switch (t->kind()) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
    case Term::Kind::Shift:
    case Term::Kind::CallCC: return t;
    case Term::Kind::App: {
      auto l = rebuild(t->left(), depth, leaf);
      auto r = rebuild(t->right(), depth, leaf);
      if (l == t->left() && r == t->right()) return t;
      return Term::app(std::move(l), std::move(r));
    }
    case Term::Kind::Lam: {
      auto b = rebuild(t->body(), depth + 1, leaf);
      return b == t->body() ? t : Term::lam(t->name(), std::move(b));
    }
    case Term::Kind::Reset: {
      auto b = rebuild(t->body(), depth, leaf);
      return b == t->body() ? t : Term::reset(std::move(b));
    }
    case Term::Kind::Abort: {
      auto b = rebuild(t->body(), depth, leaf);
      return b == t->body() ? t : Term::abort(std::move(b));
    }
    case Term::Kind::CtxApp: {
      auto b = rebuild(t->body(), depth, leaf);
      return b == t->body() ? t : Term::ctx_app(t->name(), std::move(b));
    }
  }
  return t;
}

}  // namespace

bool locally_closed(TermPtr const& t) { return closed_above(t, 0); }

TermPtr open_body(TermPtr const& body, TermPtr const& with) {
  return rebuild(body, 0, [&](TermPtr const& n, std::uint32_t depth) -> std::optional<TermPtr> {
    if (n->kind() == Term::Kind::Bound && n->index() == depth) return with;
    return std::nullopt;
  });
}

TermPtr close_body(TermPtr const& t, std::string const& name) {
  return rebuild(t, 0, [&](TermPtr const& n, std::uint32_t depth) -> std::optional<TermPtr> {
    if (n->kind() == Term::Kind::Var && n->name() == name) return Term::bound(depth);
    return std::nullopt;
  });
}

TermPtr subst_value(TermPtr const& t, std::string const& x, TermPtr const& v) {
  if (!v->is_value()) throw std::invalid_argument("subst_value: substituted term is not a value");
  if (!locally_closed(v)) throw std::invalid_argument("subst_value: substituted value has dangling indices");
  return rebuild(t, 0, [&](TermPtr const& n, std::uint32_t) -> std::optional<TermPtr> {
    if (n->kind() == Term::Kind::Var && n->name() == x) return v;
    return std::nullopt;
  });
}

TermPtr rename_free(TermPtr const& t,
                    std::function<std::optional<std::string>(std::string const&, bool ctx)> const& f) {
  return rebuild(t, 0, [&](TermPtr const& n, std::uint32_t) -> std::optional<TermPtr> {
    if (n->kind() == Term::Kind::Var) {
      if (auto to = f(n->name(), false)) return Term::var(*to);
    } else if (n->kind() == Term::Kind::CtxApp) {
      auto to = f(n->name(), true);
      auto body = rename_free(n->body(), f);
      if (to) return Term::ctx_app(*to, body);
      if (body != n->body()) return Term::ctx_app(n->name(), body);
      return n;
    }
    return std::nullopt;
  });
}

}  // namespace nfbisim
