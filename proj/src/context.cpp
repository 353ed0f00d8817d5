#include "nfbisim/context.hpp"

namespace nfbisim {

bool EvalCtx::pure() const {
  for (auto const& f : frames) {
    if (f.kind == Frame::Kind::Reset) return false;
  }
  return true;
}

TermPtr EvalCtx::plug(TermPtr t) const {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    switch (it->kind) {
      case Frame::Kind::AppL: t = Term::app(t, it->term); break;
      case Frame::Kind::AppR: t = Term::app(it->term, t); break;
      case Frame::Kind::Reset: t = Term::reset(t); break;
    }
  }
  return t;
}

bool ctx_alpha_eq(EvalCtx const& a, EvalCtx const& b) {
  if (a.frames.size() != b.frames.size()) return false;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    if (a.frames[i].kind != b.frames[i].kind) return false;
    if (a.frames[i].term && !alpha_eq(a.frames[i].term, b.frames[i].term)) return false;
  }
  return true;
}

TermPtr ProgCtx::plug(TermPtr t) const {
  t = inner.plug(std::move(t));
  if (head) return Term::ctx_app(*head, t);
  return t;
}

ResetSplit split_at_reset(EvalCtx const& ctx) {
  ResetSplit out;
  for (std::size_t i = ctx.frames.size(); i-- > 0;) {
    if (ctx.frames[i].kind == Frame::Kind::Reset) {
      out.pure = false;
      out.outer.frames.assign(ctx.frames.begin(), ctx.frames.begin() + static_cast<std::ptrdiff_t>(i));
      out.inner.frames.assign(ctx.frames.begin() + static_cast<std::ptrdiff_t>(i) + 1, ctx.frames.end());
      return out;
    }
  }
  out.inner = ctx;
  return out;
}

std::vector<CtxSplit> eval_splits(TermPtr const& t, bool through_reset) {
  std::vector<CtxSplit> out;
  EvalCtx ctx;
  TermPtr cur = t;
  // Walk down every evaluation position. At an application whose function
  // is a value both the function ([] a) and the argument (v []) are
  // positions, so branch there.
  struct Item {
    EvalCtx ctx;
    TermPtr focus;
  };
  std::vector<Item> work{{ctx, cur}};
  while (!work.empty()) {
    Item item = std::move(work.back());
    work.pop_back();
    out.push_back({item.ctx, item.focus});
    TermPtr const& f = item.focus;
    if (f->kind() == Term::Kind::App) {
      if (f->left()->is_value()) {
        EvalCtx c = item.ctx;
        c.frames.push_back(Frame::app_right(f->left()));
        work.push_back({std::move(c), f->right()});
      }
      EvalCtx c = item.ctx;
      c.frames.push_back(Frame::app_left(f->right()));
      work.push_back({std::move(c), f->left()});
    } else if (f->kind() == Term::Kind::Reset && through_reset) {
      EvalCtx c = item.ctx;
      c.frames.push_back(Frame::reset());
      work.push_back({std::move(c), f->body()});
    }
  }
  return out;
}

}  // namespace nfbisim
