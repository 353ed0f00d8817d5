#include "nfbisim/callcc.hpp"

namespace nfbisim::callcc {

TermPtr ctx_subst(TermPtr const& p, std::string const& k, ProgCtx const& f) {
  switch (p->kind()) {
    case Term::Kind::Var:
    case Term::Kind::Bound:
    case Term::Kind::Shift:
    case Term::Kind::CallCC: return p;
    case Term::Kind::App: {
      auto l = ctx_subst(p->left(), k, f);
      auto r = ctx_subst(p->right(), k, f);
      if (l == p->left() && r == p->right()) return p;
      return Term::app(l, r);
    }
    case Term::Kind::Lam: {
      auto b = ctx_subst(p->body(), k, f);
      return b == p->body() ? p : Term::lam(p->name(), b);
    }
    case Term::Kind::Reset: {
      auto b = ctx_subst(p->body(), k, f);
      return b == p->body() ? p : Term::reset(b);
    }
    case Term::Kind::Abort: {
      auto b = ctx_subst(p->body(), k, f);
      return b == p->body() ? p : Term::abort(b);
    }
    case Term::Kind::CtxApp: {
      auto b = ctx_subst(p->body(), k, f);
      if (p->name() == k) return f.plug(b);
      return b == p->body() ? p : Term::ctx_app(p->name(), b);
    }
  }
  return p;
}

TermPtr lift_to_program(TermPtr const& t, NameSet const& avoid) {
  if (t->kind() == Term::Kind::CtxApp) return t;
  NameSet all = avoid;
  collect_names(t, all);
  return Term::ctx_app(fresh_ctx_var(all), t);
}

}  // namespace nfbisim::callcc
