#ifndef NFBISIM_CONTEXT_HPP
#define NFBISIM_CONTEXT_HPP

#include <optional>
#include <string>
#include <vector>

#include "nfbisim/term.hpp"

namespace nfbisim {

// One evaluation frame. AppL holds the pending argument ([] t), AppR the
// evaluated function (v []), Reset a delimiter (<[]>).
struct Frame {
  enum class Kind { AppL, AppR, Reset };
  Kind kind;
  TermPtr term;  // null for Reset

  static Frame app_left(TermPtr arg) { return {Kind::AppL, std::move(arg)}; }
  static Frame app_right(TermPtr fn) { return {Kind::AppR, std::move(fn)}; }
  static Frame reset() { return {Kind::Reset, nullptr}; }
};

// Frames listed outside-in: frames.front() is the outermost.
struct EvalCtx {
  std::vector<Frame> frames;

  bool empty() const { return frames.empty(); }
  bool pure() const;
  TermPtr plug(TermPtr t) const;
};

bool ctx_alpha_eq(EvalCtx const& a, EvalCtx const& b);

// Program context of the callcc calculus: k[E] when head is set, otherwise a
// bare evaluation context at the program root.
struct ProgCtx {
  std::optional<std::string> head;
  EvalCtx inner;

  TermPtr plug(TermPtr t) const;
};

// Result of split_at_reset: F is pure, or F = outer[<inner>] where inner is
// the pure part below the innermost delimiter.
struct ResetSplit {
  bool pure = true;
  EvalCtx outer;
  EvalCtx inner;
};

ResetSplit split_at_reset(EvalCtx const& ctx);

// Every decomposition of t as E[s] with E an evaluation context (the hole
// follows the call-by-value spine). The first entry is ([], t).
struct CtxSplit {
  EvalCtx ctx;
  TermPtr focus;
};
std::vector<CtxSplit> eval_splits(TermPtr const& t, bool through_reset);

}  // namespace nfbisim

#endif
