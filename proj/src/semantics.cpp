#include "nfbisim/semantics.hpp"

#include <stdexcept>

#include "nfbisim/syntax.hpp"

namespace nfbisim {

TermPtr NormalForm::term() const {
  switch (kind) {
    case Kind::Value: return value;
    case Kind::OpenStuck: return ctx.plug(Term::app(Term::var(head), value));
    case Kind::ControlStuck: return ctx.plug(Term::app(Term::shift(), value));
    case Kind::ContextStuck: return Term::ctx_app(head, value);
  }
  return value;
}

std::string_view kind_name(NormalForm::Kind kind) {
  switch (kind) {
    case NormalForm::Kind::Value: return "value";
    case NormalForm::Kind::OpenStuck: return "open-stuck";
    case NormalForm::Kind::ControlStuck: return "control-stuck";
    case NormalForm::Kind::ContextStuck: return "context-stuck";
  }
  return "?";
}

std::string_view redex_name(RedexKind kind) {
  switch (kind) {
    case RedexKind::Beta: return "beta";
    case RedexKind::Capture: return "capture";
    case RedexKind::ResetValue: return "reset-value";
    case RedexKind::CallccCapture: return "callcc-capture";
    case RedexKind::Abort: return "abort";
  }
  return "?";
}

Decomposition decompose(TermPtr const& t, Calculus calc) {
  ProgCtx ctx;
  TermPtr cur = t;
  if (cur->kind() == Term::Kind::CtxApp) {
    if (calc != Calculus::CallccAbort) throw ValidityError("context application outside the callcc calculus");
    ctx.head = cur->name();
    cur = cur->body();
  }
  auto& frames = ctx.inner.frames;
  for (;;) {
    switch (cur->kind()) {
      case Term::Kind::App: {
        TermPtr const& fn = cur->left();
        TermPtr const& arg = cur->right();
        if (!fn->is_value()) {
          frames.push_back(Frame::app_left(arg));
          cur = fn;
          continue;
        }
        if (!arg->is_value()) {
          frames.push_back(Frame::app_right(fn));
          cur = arg;
          continue;
        }
        switch (fn->kind()) {
          case Term::Kind::Lam: return Redex{RedexKind::Beta, std::move(ctx), cur};
          case Term::Kind::Var: {
            NormalForm nf;
            nf.kind = NormalForm::Kind::OpenStuck;
            nf.head = fn->name();
            nf.value = arg;
            nf.ctx = std::move(ctx);
            return nf;
          }
          case Term::Kind::Shift: {
            if (ctx.inner.pure()) {
              NormalForm nf;
              nf.kind = NormalForm::Kind::ControlStuck;
              nf.value = arg;
              nf.ctx = std::move(ctx);
              return nf;
            }
            return Redex{RedexKind::Capture, std::move(ctx), cur};
          }
          case Term::Kind::CallCC: return Redex{RedexKind::CallccCapture, std::move(ctx), cur};
          default: throw std::logic_error("decompose: malformed application (dangling index)");
        }
      }
      case Term::Kind::Reset:
        if (cur->body()->is_value()) return Redex{RedexKind::ResetValue, std::move(ctx), cur};
        frames.push_back(Frame::reset());
        cur = cur->body();
        continue;
      case Term::Kind::Abort: return Redex{RedexKind::Abort, std::move(ctx), cur};
      case Term::Kind::CtxApp:
        throw ValidityError("context application " + cur->name() + "[...] in evaluation position");
      case Term::Kind::Bound: throw std::logic_error("decompose: dangling de Bruijn index");
      case Term::Kind::Var:
      case Term::Kind::Lam:
      case Term::Kind::Shift:
      case Term::Kind::CallCC: {
        // Only reachable at the root: evaluation never descends into values.
        NormalForm nf;
        nf.value = cur;
        if (ctx.head) {
          nf.kind = NormalForm::Kind::ContextStuck;
          nf.head = *ctx.head;
        } else {
          nf.kind = NormalForm::Kind::Value;
        }
        return nf;
      }
    }
  }
}

TermPtr contract(Redex const& r) {
  switch (r.kind) {
    case RedexKind::Beta: return r.ctx.plug(open_body(r.redex->left()->body(), r.redex->right()));
    case RedexKind::ResetValue: return r.ctx.plug(r.redex->body());
    case RedexKind::Abort: return r.redex->body();
    case RedexKind::Capture: {
      // F[<E[S v]>] -> F[<v (\x.<E[x]>)>]
      ResetSplit split = split_at_reset(r.ctx.inner);
      TermPtr captured = Term::lam("x", Term::reset(split.inner.plug(Term::bound(0))));
      ProgCtx outer{r.ctx.head, split.outer};
      return outer.plug(Term::reset(Term::app(r.redex->right(), captured)));
    }
    case RedexKind::CallccCapture: {
      // F[K v] -> F[v (\y.A(F[y]))]
      TermPtr reified = Term::lam("y", Term::abort(r.ctx.plug(Term::bound(0))));
      return r.ctx.plug(Term::app(r.redex->right(), reified));
    }
  }
  throw std::logic_error("contract: unknown redex");
}

std::optional<Step> step(TermPtr const& t, Calculus calc) {
  auto d = decompose(t, calc);
  if (auto* r = std::get_if<Redex>(&d)) return Step{r->kind, contract(*r)};
  return std::nullopt;
}

EvalResult evaluate(TermPtr const& t, Calculus calc, std::size_t fuel, bool record) {
  EvalResult out;
  out.last = t;
  for (;;) {
    auto d = decompose(out.last, calc);
    if (auto* nf = std::get_if<NormalForm>(&d)) {
      out.finished = true;
      out.normal = std::move(*nf);
      return out;
    }
    if (out.steps >= fuel) return out;
    auto const& r = std::get<Redex>(d);
    out.last = contract(r);
    ++out.steps;
    if (record) out.trace.push_back({r.kind, out.last});
  }
}

namespace {

std::string take_var(NameSet& avoid) {
  auto n = fresh_var(avoid);
  avoid.insert(n);
  return n;
}

std::string take_ctx(NameSet& avoid) {
  auto n = fresh_ctx_var(avoid);
  avoid.insert(n);
  return n;
}

Obligation value_test(Calculus calc, TermPtr const& v, TermPtr const& w, NameSet& avoid) {
  std::string x = take_var(avoid);
  auto arg = Term::var(x);
  if (calc == Calculus::CallccAbort) {
    std::string k = take_ctx(avoid);
    return {Polarity::Passive, "testval", Term::ctx_app(k, Term::app(v, arg)), Term::ctx_app(k, Term::app(w, arg)),
            {k, x}};
  }
  return {Polarity::Passive, "testval", Term::app(v, arg), Term::app(w, arg), {x}};
}

}  // namespace

bool context_obligations_sr(EvalCtx const& a, EvalCtx const& b, NameSet& avoid, std::vector<Obligation>& out) {
  ResetSplit sa = split_at_reset(a);
  ResetSplit sb = split_at_reset(b);
  if (sa.pure != sb.pure) return false;
  std::string x = take_var(avoid);
  auto hole = Term::var(x);
  if (sa.pure) {
    out.push_back({Polarity::Active, "testevctx", a.plug(hole), b.plug(hole), {x}});
    return true;
  }
  out.push_back({Polarity::Active, "testevctx-rst", Term::reset(sa.inner.plug(hole)), Term::reset(sb.inner.plug(hole)),
                 {x}});
  out.push_back({Polarity::Active, "testevctx-rst", sa.outer.plug(hole), sb.outer.plug(hole), {x}});
  return true;
}

ObligationResult obligations(Calculus calc, NormalForm const& a, NormalForm const& b, NameSet const& avoid_in) {
  using K = NormalForm::Kind;
  NameSet avoid = avoid_in;
  collect_names(a.term(), avoid);
  collect_names(b.term(), avoid);
  std::vector<Obligation> out;
  if (a.kind != b.kind) {
    return Mismatch{std::string("normal-form kinds differ: ") + std::string(kind_name(a.kind)) + " vs " +
                    std::string(kind_name(b.kind))};
  }
  switch (a.kind) {
    case K::Value:
      // Programs that end in a bare value have aborted their context.
      if (calc == Calculus::CallccAbort) return out;
      out.push_back(value_test(calc, a.value, b.value, avoid));
      return out;
    case K::ContextStuck:
      if (a.head != b.head) return Mismatch{"context variables differ: " + a.head + " vs " + b.head};
      out.push_back(value_test(calc, a.value, b.value, avoid));
      return out;
    case K::OpenStuck: {
      if (a.head != b.head) return Mismatch{"stuck on different variables: " + a.head + " vs " + b.head};
      if (calc == Calculus::ShiftReset) {
        if (!context_obligations_sr(a.ctx.inner, b.ctx.inner, avoid, out)) {
          return Mismatch{"open-stuck contexts differ in purity"};
        }
      } else {
        std::string x = take_var(avoid);
        auto hole = Term::var(x);
        out.push_back({Polarity::Active, "testevctx", a.ctx.plug(hole), b.ctx.plug(hole), {x}});
      }
      out.push_back(value_test(calc, a.value, b.value, avoid));
      return out;
    }
    case K::ControlStuck: {
      if (!context_obligations_sr(a.ctx.inner, b.ctx.inner, avoid, out)) {
        return Mismatch{"control-stuck contexts differ in purity"};
      }
      std::string x = take_var(avoid);
      auto arg = Term::var(x);
      out.push_back({Polarity::Active, "testctrl", Term::reset(Term::app(a.value, arg)),
                     Term::reset(Term::app(b.value, arg)), {x}});
      return out;
    }
  }
  return out;
}

std::string describe(NormalForm const& nf) {
  switch (nf.kind) {
    case NormalForm::Kind::Value: return "value: " + print_term(nf.value);
    case NormalForm::Kind::OpenStuck: return "open-stuck on " + nf.head + ": " + print_term(nf.term());
    case NormalForm::Kind::ControlStuck: return "control-stuck: " + print_term(nf.term());
    case NormalForm::Kind::ContextStuck:
      return "context-stuck at " + nf.head + " with value " + print_term(nf.value);
  }
  return "?";
}

}  // namespace nfbisim
