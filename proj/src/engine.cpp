#include "nfbisim/engine.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "nfbisim/callcc.hpp"
#include "nfbisim/syntax.hpp"

namespace nfbisim {

namespace {

NameSet names_of(TermPtr const& l, TermPtr const& r) {
  NameSet out;
  collect_names(l, out);
  collect_names(r, out);
  return out;
}

std::vector<std::string> generated_in(TermPtr const& l, TermPtr const& r) {
  std::vector<std::string> out;
  for (auto const& n : names_of(l, r)) {
    if (is_generated_name(n)) out.push_back(n);
  }
  return out;
}

std::string show_pair(TermPtr const& l, TermPtr const& r) { return print_term(l) + "  ~  " + print_term(r); }

// Structural matcher of a pair pattern against a goal. Names in `schematic`
// rename injectively; `subst_var`, when set, binds to one locally closed
// value per side.
struct Matcher {
  NameSet const& schematic;
  NameSet const& constants;
  NameSet const* forbidden = nullptr;
  std::string subst_var;
  Renaming ren;
  NameSet targets;
  TermPtr value;

  bool bind(std::string const& key, std::string const& target) {
    auto it = ren.find(key);
    if (it != ren.end()) return it->second == target;
    std::string tkey = key.front() == '@' ? "@" + target : target;
    if (targets.contains(tkey) || constants.contains(target)) return false;
    if (forbidden && forbidden->contains(target)) return false;
    ren.emplace(key, target);
    targets.insert(tkey);
    return true;
  }

  bool go(TermPtr const& p, TermPtr const& t) {
    if (p->kind() == Term::Kind::Var && !subst_var.empty() && p->name() == subst_var) {
      if (!t->is_value() || !locally_closed(t)) return false;
      if (!value) {
        value = t;
        return true;
      }
      return alpha_eq(value, t);
    }
    if (p->kind() != t->kind()) return false;
    switch (p->kind()) {
      case Term::Kind::Var:
        if (schematic.contains(p->name())) return bind(p->name(), t->name());
        return p->name() == t->name();
      case Term::Kind::CtxApp:
        if (schematic.contains(p->name())) {
          if (!bind("@" + p->name(), t->name())) return false;
        } else if (p->name() != t->name()) {
          return false;
        }
        return go(p->body(), t->body());
      case Term::Kind::Bound: return p->index() == t->index();
      case Term::Kind::Lam:
      case Term::Kind::Reset:
      case Term::Kind::Abort: return go(p->body(), t->body());
      case Term::Kind::App: return go(p->left(), t->left()) && go(p->right(), t->right());
      case Term::Kind::Shift:
      case Term::Kind::CallCC: return true;
    }
    return false;
  }
};

NameSet constants_of(RelPair const& p) {
  NameSet out = names_of(p.lhs, p.rhs);
  for (auto const& f : p.fresh) out.erase(f);
  return out;
}

Derivation node(Derivation::Kind kind, std::string label, TermPtr l, TermPtr r) {
  Derivation d;
  d.kind = kind;
  d.label = std::move(label);
  d.lhs = std::move(l);
  d.rhs = std::move(r);
  return d;
}

Derivation tech_node(Technique t, TermPtr l, TermPtr r, std::vector<Derivation> premises = {}) {
  Derivation d = node(Derivation::Kind::Technique, std::string(technique_name(t)), std::move(l), std::move(r));
  d.technique = t;
  d.children = std::move(premises);
  return d;
}

std::string format_renaming(Renaming const& ren) {
  std::string out;
  for (auto const& [k, v] : ren) {
    if (!out.empty()) out += ", ";
    out += (k.front() == '@' ? k.substr(1) : k) + "->" + v;
  }
  return out;
}

bool is_pure_term(TermPtr const& t) { return t->is_value() || t->kind() == Term::Kind::Reset; }

enum class Status { Found, NotFound, Refuted, Limit };

struct Outcome {
  Status status = Status::NotFound;
  Derivation proof;
  Evidence evidence;
  std::string reason;
  std::vector<std::string> path;
};

int rank(Status s) {
  switch (s) {
    case Status::Found: return 3;
    case Status::Refuted: return 2;
    case Status::Limit: return 1;
    case Status::NotFound: return 0;
  }
  return 0;
}

struct GoalKey {
  TermPtr l;
  TermPtr r;
  unsigned mask;
  std::size_t depth;
  bool normalized;

  bool operator==(GoalKey const& o) const {
    return mask == o.mask && depth == o.depth && normalized == o.normalized && alpha_eq(l, o.l) && alpha_eq(r, o.r);
  }
};

struct GoalKeyHash {
  std::size_t operator()(GoalKey const& k) const {
    return k.l->hash() * 1000003u ^ k.r->hash() ^ (static_cast<std::size_t>(k.mask) << 8) ^ (k.depth << 3) ^
           (k.normalized ? 1u : 0u);
  }
};

unsigned mask_of(Techniques const& ts) {
  unsigned m = 0;
  for (auto t : ts) m |= 1u << static_cast<unsigned>(t);
  return m;
}

class Engine {
public:
  Engine(Relation const& r, TechniqueSet ts, EngineOptions opt)
      : calc_(r.calc), base_(r.pairs), ts_(std::move(ts)), opt_(opt) {
    for (auto const& p : base_) {
      auto c = constants_of(p);
      forbidden_.insert(c.begin(), c.end());
    }
    auto strong_default = default_strong(calc_);
    unsafe_ = !std::includes(strong_default.begin(), strong_default.end(), ts_.strong.begin(), ts_.strong.end());
  }

  bool unsafe() const { return unsafe_; }
  std::vector<RelPair> const& aux() const { return aux_; }

  // Instance of a pair with its schematic names replaced by generated ones.
  std::pair<TermPtr, TermPtr> instantiate(RelPair const& p) const {
    NameSet avoid = names_of(p.lhs, p.rhs);
    NameSet ctx = free_ctx_vars(p.lhs);
    for (auto const& k : free_ctx_vars(p.rhs)) ctx.insert(k);
    std::map<std::string, std::string> var_map, ctx_map;
    for (auto const& f : p.fresh) {
      if (ctx.contains(f)) {
        auto n = fresh_ctx_var(avoid);
        avoid.insert(n);
        ctx_map[f] = n;
      }
      NameSet vars = free_vars(p.lhs);
      for (auto const& v : free_vars(p.rhs)) vars.insert(v);
      if (vars.contains(f) || !ctx.contains(f)) {
        auto n = fresh_var(avoid);
        avoid.insert(n);
        var_map[f] = n;
      }
    }
    auto rn = [&](std::string const& name, bool is_ctx) -> std::optional<std::string> {
      auto const& m = is_ctx ? ctx_map : var_map;
      auto it = m.find(name);
      if (it == m.end()) return std::nullopt;
      return it->second;
    };
    return {rename_free(p.lhs, rn), rename_free(p.rhs, rn)};
  }

  Outcome check_pair(TermPtr const& l, TermPtr const& r, std::string const& label, std::size_t depth) {
    Outcome out;
    Derivation check = node(Derivation::Kind::Check, label, l, r);
    if (alpha_eq(l, r)) {
      check.detail = "identical";
      out.status = Status::Found;
      out.proof = std::move(check);
      return out;
    }
    auto el = evaluate(l, calc_, opt_.fuel);
    auto er = evaluate(r, calc_, opt_.fuel);
    if (!el.finished || !er.finished) {
      out.path = {label};
      if (opt_.divergence_is_distinct && el.finished != er.finished) {
        out.status = Status::Refuted;
        out.evidence.chain.push_back({l, r, label});
        out.evidence.reason = std::string(el.finished ? "right" : "left") + " side does not terminate within " +
                              std::to_string(opt_.fuel) + " steps";
        return out;
      }
      out.status = Status::Limit;
      out.reason = "fuel exhausted evaluating " + show_pair(l, r);
      return out;
    }
    check.detail = "lhs " + describe(el.normal) + " after " + std::to_string(el.steps) + " steps; rhs " +
                   describe(er.normal) + " after " + std::to_string(er.steps) + " steps";
    std::size_t aux_mark = aux_.size();

    if (el.steps > 0 && er.steps > 0) {
      TermPtr nl = el.normal.term();
      TermPtr nr = er.normal.term();
      Outcome sub = prove(nl, nr, ts_.full, depth, true, true);
      Derivation ob = node(Derivation::Kind::Obligation, "reduction", nl, nr);
      ob.polarity = Polarity::Active;
      if (sub.status != Status::Found) return fail_obligation(std::move(sub), l, r, label, "reduction", aux_mark);
      ob.children.push_back(std::move(sub.proof));
      check.children.push_back(std::move(ob));
      out.status = Status::Found;
      out.proof = std::move(check);
      return out;
    }
    if (el.steps > 0 || er.steps > 0) {
      TermPtr nl = el.normal.term();
      TermPtr nr = er.normal.term();
      push_aux(nl, nr);
      check.detail += "; added the normal forms as aux " + std::to_string(aux_.size() - 1);
    }

    auto obs = obligations(calc_, el.normal, er.normal, names_of(l, r));
    if (auto* m = std::get_if<Mismatch>(&obs)) {
      truncate_aux(aux_mark);
      out.status = Status::Refuted;
      out.path = {label};
      out.evidence.chain.push_back({l, r, label});
      out.evidence.reason = m->reason;
      return out;
    }
    for (auto const& ob : std::get<std::vector<Obligation>>(obs)) {
      Techniques const& allowed = ob.polarity == Polarity::Passive ? ts_.strong : ts_.full;
      Outcome sub = prove(ob.lhs, ob.rhs, allowed, depth, true, false);
      if (sub.status != Status::Found) return fail_obligation(std::move(sub), l, r, label, ob.rule, aux_mark);
      Derivation d = node(Derivation::Kind::Obligation, ob.rule, ob.lhs, ob.rhs);
      d.polarity = ob.polarity;
      d.children.push_back(std::move(sub.proof));
      check.children.push_back(std::move(d));
    }
    out.status = Status::Found;
    out.proof = std::move(check);
    return out;
  }

  Outcome prove(TermPtr const& l, TermPtr const& r, Techniques const& allowed, std::size_t depth, bool necessary,
                bool normalized) {
    Outcome best;
    if (++nodes_ > opt_.node_budget) {
      best.status = Status::Limit;
      best.reason = "search node budget exhausted";
      return best;
    }
    if (allowed.contains(Technique::Refl) && alpha_eq(l, r)) return found(tech_node(Technique::Refl, l, r));
    if (auto m = member(l, r)) return found(std::move(*m));
    if (allowed.contains(Technique::Result) && l->kind() != Term::Kind::CtxApp && l->is_value() &&
        r->kind() != Term::Kind::CtxApp && r->is_value()) {
      return found(tech_node(Technique::Result, l, r));
    }

    std::optional<GoalKey> key;
    if (!necessary) {
      key = GoalKey{l, r, mask_of(allowed), depth, normalized};
      auto it = cache_.find(*key);
      if (it != cache_.end()) return it->second;
    }

    auto consider = [&](Outcome o) {
      if (rank(o.status) > rank(best.status)) best = std::move(o);
    };
    auto settled = [&] {
      return best.status == Status::Found || (best.status == Status::Refuted && !unsafe_);
    };

    bool red_changed = false;
    if (allowed.contains(Technique::Red) && !normalized) {
      auto o = try_red(l, r, allowed, depth, necessary, red_changed);
      consider(std::move(o));
    }
    if (!settled() && depth > 0) structural(l, r, allowed, depth, consider, settled);
    if (!settled() && necessary && !red_changed) {
      if (!opt_.unfold) {
        consider(not_found(l, r));
      } else if (depth == 0) {
        Outcome o;
        o.status = Status::Limit;
        o.reason = "depth bound reached at " + show_pair(l, r);
        consider(std::move(o));
      } else if (base_.size() + aux_.size() >= opt_.max_pairs) {
        Outcome o;
        o.status = Status::Limit;
        o.reason = "pair bound " + std::to_string(opt_.max_pairs) + " reached at " + show_pair(l, r);
        consider(std::move(o));
      } else {
        consider(unfold(l, r, depth));
      }
    }
    if (best.status == Status::NotFound && best.reason.empty()) best = not_found(l, r);
    if (key && best.status != Status::Refuted) cache_.emplace(*key, best);
    return best;
  }

private:
  Calculus calc_;
  std::vector<RelPair> base_;
  std::vector<RelPair> aux_;
  TechniqueSet ts_;
  EngineOptions opt_;
  NameSet forbidden_;
  bool unsafe_ = false;
  std::size_t nodes_ = 0;
  std::unordered_map<GoalKey, Outcome, GoalKeyHash> cache_;

  static Outcome found(Derivation d) {
    Outcome o;
    o.status = Status::Found;
    o.proof = std::move(d);
    return o;
  }

  static Outcome not_found(TermPtr const& l, TermPtr const& r) {
    Outcome o;
    o.status = Status::NotFound;
    o.reason = "not in the closure: " + show_pair(l, r);
    return o;
  }

  void push_aux(TermPtr const& l, TermPtr const& r) {
    aux_.push_back({l, r, generated_in(l, r)});
    cache_.clear();
  }

  void truncate_aux(std::size_t mark) {
    if (aux_.size() > mark) {
      aux_.resize(mark);
      cache_.clear();
    }
  }

  Outcome fail_obligation(Outcome sub, TermPtr const& l, TermPtr const& r, std::string const& label,
                          std::string const& rule, std::size_t aux_mark) {
    truncate_aux(aux_mark);
    sub.path.insert(sub.path.begin(), {label, "obligation " + rule});
    if (sub.status == Status::Refuted) {
      if (!sub.evidence.chain.empty()) sub.evidence.chain.front().via = rule;
      if (rule == "reduction") {
        // the reduct pair has the same normal forms as the pair itself
        sub.evidence.chain.front() = {l, r, label};
      } else {
        sub.evidence.chain.insert(sub.evidence.chain.begin(), {l, r, label});
      }
    }
    return sub;
  }

  std::optional<Derivation> member(TermPtr const& l, TermPtr const& r) const {
    for (std::size_t i = 0; i < base_.size() + aux_.size(); ++i) {
      bool is_base = i < base_.size();
      RelPair const& p = is_base ? base_[i] : aux_[i - base_.size()];
      if (auto ren = match_modulo_fresh(l, r, p, &forbidden_)) {
        Derivation d = node(Derivation::Kind::Member,
                            (is_base ? "pair " + std::to_string(i) : "aux " + std::to_string(i - base_.size())), l, r);
        d.detail = format_renaming(*ren);
        return d;
      }
    }
    return std::nullopt;
  }

  Outcome try_red(TermPtr const& l, TermPtr const& r, Techniques const& allowed, std::size_t depth, bool necessary,
                  bool& changed) {
    constexpr std::size_t kPrefix = 12;
    auto el = evaluate(l, calc_, opt_.fuel, true);
    auto er = evaluate(r, calc_, opt_.fuel, true);
    if (!el.finished || !er.finished) {
      Outcome o;
      o.status = Status::Limit;
      o.reason = "fuel exhausted evaluating " + show_pair(l, r);
      return o;
    }
    if (el.steps == 0 && er.steps == 0) return not_found(l, r);
    changed = true;
    // any pair of reducts may already be related
    std::vector<TermPtr> ls{l}, rs{r};
    for (std::size_t i = 0; i < el.trace.size() && i < kPrefix; ++i) ls.push_back(el.trace[i].result);
    for (std::size_t i = 0; i < er.trace.size() && i < kPrefix; ++i) rs.push_back(er.trace[i].result);
    for (std::size_t i = 0; i < ls.size(); ++i) {
      for (std::size_t j = 0; j < rs.size(); ++j) {
        if (i == 0 && j == 0) continue;
        if (auto m = member(ls[i], rs[j])) {
          Derivation d = tech_node(Technique::Red, l, r, {std::move(*m)});
          d.detail = std::to_string(i) + "+" + std::to_string(j) + " steps";
          return found(std::move(d));
        }
      }
    }
    TermPtr nl = el.normal.term();
    TermPtr nr = er.normal.term();
    Outcome sub = prove(nl, nr, allowed, depth, necessary, true);
    if (sub.status == Status::Found) {
      Derivation d = tech_node(Technique::Red, l, r, {std::move(sub.proof)});
      d.detail = std::to_string(el.steps) + "+" + std::to_string(er.steps) + " steps";
      return found(std::move(d));
    }
    if (sub.status == Status::Refuted) {
      sub.evidence.chain.front().lhs = l;
      sub.evidence.chain.front().rhs = r;
    }
    sub.path.insert(sub.path.begin(), "red");
    return sub;
  }

  Outcome unfold(TermPtr const& l, TermPtr const& r, std::size_t depth) {
    std::size_t mark = aux_.size();
    push_aux(l, r);
    std::string label = "aux " + std::to_string(mark);
    Outcome o = check_pair(l, r, label, depth - 1);
    if (o.status != Status::Found) {
      truncate_aux(mark);
      o.path.insert(o.path.begin(), "unfold");
      return o;
    }
    Derivation d = node(Derivation::Kind::Unfold, label, l, r);
    d.children.push_back(std::move(o.proof));
    return found(std::move(d));
  }

  // Tries one rule instance whose premises are searched speculatively.
  template <class Consider>
  bool instance(Technique t, TermPtr const& l, TermPtr const& r, std::vector<std::pair<TermPtr, TermPtr>> const& premises,
                Techniques const& allowed, std::size_t depth, Consider& consider, std::string detail = {}) {
    std::vector<Derivation> proofs;
    for (auto const& [pl, pr] : premises) {
      Outcome o = prove(pl, pr, allowed, depth - 1, false, false);
      if (o.status == Status::Limit) {
        consider(std::move(o));
        return false;
      }
      if (o.status != Status::Found) return false;
      proofs.push_back(std::move(o.proof));
    }
    Derivation d = tech_node(t, l, r, std::move(proofs));
    d.detail = std::move(detail);
    consider(found(std::move(d)));
    return true;
  }

  template <class Consider, class Settled>
  void structural(TermPtr const& l, TermPtr const& r, Techniques const& allowed, std::size_t depth, Consider& consider,
                  Settled& settled) {
    NameSet avoid = names_of(l, r);
    std::string x = fresh_var(avoid);
    TermPtr hole = Term::var(x);
    for (Technique t : calculus_techniques(calc_)) {
      if (settled()) return;
      if (!allowed.contains(t)) continue;
      switch (t) {
        case Technique::Lam:
          if (calc_ != Calculus::CallccAbort) {
            if (l->kind() == Term::Kind::Lam && r->kind() == Term::Kind::Lam) {
              instance(t, l, r, {{open_body(l->body(), hole), open_body(r->body(), hole)}}, allowed, depth, consider);
            }
          } else if (l->kind() == Term::Kind::CtxApp && r->kind() == Term::Kind::CtxApp && l->name() == r->name() &&
                     l->body()->kind() == Term::Kind::Lam && r->body()->kind() == Term::Kind::Lam) {
            std::string k = fresh_ctx_var(avoid);
            instance(t, l, r,
                     {{Term::ctx_app(k, open_body(l->body()->body(), hole)),
                       Term::ctx_app(k, open_body(r->body()->body(), hole))}},
                     allowed, depth, consider);
          }
          break;
        case Technique::Abort:
          if (l->kind() == Term::Kind::CtxApp && r->kind() == Term::Kind::CtxApp && l->name() == r->name() &&
              l->body()->kind() == Term::Kind::Abort && r->body()->kind() == Term::Kind::Abort) {
            instance(t, l, r, {{l->body()->body(), r->body()->body()}}, allowed, depth, consider);
          }
          break;
        case Technique::Subst:
        case Technique::SubstV: subst(t, l, r, allowed, depth, consider, settled); break;
        case Technique::Ectx:
        case Technique::Pctx: context_rule(t, l, r, false, allowed, depth, consider, settled, hole); break;
        case Technique::EctxPure: context_rule(t, l, r, true, allowed, depth, consider, settled, hole); break;
        case Technique::PctxRst:
          if (l->kind() == Term::Kind::Reset && r->kind() == Term::Kind::Reset) {
            auto sl = eval_splits(l->body(), false);
            auto sr = eval_splits(r->body(), false);
            for (auto const& a : sl) {
              for (auto const& b : sr) {
                if (settled()) return;
                instance(t, l, r,
                         {{a.focus, b.focus}, {Term::reset(a.ctx.plug(hole)), Term::reset(b.ctx.plug(hole))}},
                         allowed, depth, consider);
              }
            }
          }
          break;
        case Technique::SubstC: substc(l, r, allowed, depth, consider, settled, avoid, hole); break;
        default: break;
      }
    }
  }

  template <class Consider, class Settled>
  void context_rule(Technique t, TermPtr const& l, TermPtr const& r, bool pure_focus, Techniques const& allowed,
                    std::size_t depth, Consider& consider, Settled& settled, TermPtr const& hole) {
    bool through = t == Technique::EctxPure;
    auto sl = eval_splits(l, through);
    auto sr = eval_splits(r, through);
    for (auto const& a : sl) {
      for (auto const& b : sr) {
        if (settled()) return;
        if (a.ctx.empty() && b.ctx.empty()) continue;
        if (pure_focus && !(is_pure_term(a.focus) && is_pure_term(b.focus))) continue;
        instance(t, l, r, {{a.focus, b.focus}, {a.ctx.plug(hole), b.ctx.plug(hole)}}, allowed, depth, consider);
      }
    }
  }

  template <class Consider, class Settled>
  void substc(TermPtr const& l, TermPtr const& r, Techniques const& allowed, std::size_t depth, Consider& consider,
              Settled& settled, NameSet const& avoid, TermPtr const& hole) {
    auto splits = [](TermPtr const& p) {
      std::vector<std::pair<ProgCtx, TermPtr>> out;
      std::optional<std::string> head;
      TermPtr body = p;
      if (p->kind() == Term::Kind::CtxApp) {
        head = p->name();
        body = p->body();
      }
      for (auto& s : eval_splits(body, false)) out.push_back({ProgCtx{head, std::move(s.ctx)}, s.focus});
      return out;
    };
    std::string w = fresh_ctx_var(avoid);
    for (auto const& [fl, tl] : splits(l)) {
      for (auto const& [fr, tr] : splits(r)) {
        if (settled()) return;
        if (fl.inner.empty() && fr.inner.empty()) continue;
        instance(Technique::SubstC, l, r,
                 {{Term::ctx_app(w, tl), Term::ctx_app(w, tr)}, {fl.plug(hole), fr.plug(hole)}}, allowed, depth,
                 consider, "factored " + w);
      }
    }
  }

  template <class Consider, class Settled>
  void subst(Technique t, TermPtr const& l, TermPtr const& r, Techniques const& allowed, std::size_t depth,
             Consider& consider, Settled& settled) {
    for (std::size_t i = 0; i < base_.size() + aux_.size(); ++i) {
      // copy: premises may grow aux_
      RelPair p = i < base_.size() ? base_[i] : aux_[i - base_.size()];
      NameSet ctx = free_ctx_vars(p.lhs);
      for (auto const& k : free_ctx_vars(p.rhs)) ctx.insert(k);
      NameSet constants = constants_of(p);
      for (auto const& x : p.fresh) {
        if (settled()) return;
        if (ctx.contains(x)) continue;
        NameSet schematic(p.fresh.begin(), p.fresh.end());
        schematic.erase(x);
        Matcher m{schematic, constants, &forbidden_, x, {}, {}, nullptr};
        if (!m.go(p.lhs, l)) continue;
        TermPtr v = m.value;
        m.value = nullptr;
        if (!m.go(p.rhs, r)) continue;
        TermPtr w = m.value;
        if (!v && !w) continue;
        if (!v) v = w;
        if (!w) w = v;
        NameSet avoid = names_of(l, r);
        collect_names(v, avoid);
        collect_names(w, avoid);
        TermPtr z = Term::var(fresh_var(avoid));
        TermPtr pl = Term::app(v, z);
        TermPtr pr = Term::app(w, z);
        if (calc_ == Calculus::CallccAbort) {
          std::string k = fresh_ctx_var(avoid);
          pl = Term::ctx_app(k, pl);
          pr = Term::ctx_app(k, pr);
        }
        std::string label = i < base_.size() ? "pair " + std::to_string(i) : "aux " + std::to_string(i - base_.size());
        std::string detail = label + " with " + x + ":=" + print_term(v) + "/" + print_term(w);
        if (!m.ren.empty()) detail += ", " + format_renaming(m.ren);
        instance(t, l, r, {{pl, pr}}, allowed, depth, consider, detail);
      }
    }
  }
};

Verdict from_failure(Outcome const& o, std::size_t index) {
  Verdict v;
  v.pair = index;
  v.path = o.path;
  switch (o.status) {
    case Status::Refuted:
      v.kind = Verdict::Kind::Failed;
      v.evidence = o.evidence;
      v.reason = "not bisimilar: " + o.evidence.reason;
      break;
    case Status::Limit:
      v.kind = Verdict::Kind::Inconclusive;
      v.reason = o.reason;
      break;
    default:
      v.kind = Verdict::Kind::Inconclusive;
      v.reason = o.reason.empty() ? "obligation not discharged" : o.reason;
      break;
  }
  return v;
}

// Each pair is checked by its own engine, so neither the verdict nor the
// witness depends on the order of R. Failed outranks Inconclusive.
Verdict run(Relation const& r, TechniqueSet const& ts, EngineOptions const& opt, std::optional<std::size_t> only) {
  Verdict verdict;
  verdict.witness.calc = r.calc;
  verdict.witness.pairs = r.pairs;
  std::optional<Verdict> worst;
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    if (only && *only != i) continue;
    Engine engine(r, ts, opt);
    verdict.unsafe = engine.unsafe();
    auto [l, rr] = engine.instantiate(r.pairs[i]);
    Outcome o = engine.check_pair(l, rr, "pair " + std::to_string(i), opt.depth);
    if (o.status != Status::Found) {
      Verdict f = from_failure(o, i);
      f.unsafe = engine.unsafe();
      if (!worst || (worst->kind != Verdict::Kind::Failed && f.kind == Verdict::Kind::Failed)) worst = std::move(f);
      continue;
    }
    verdict.trace.push_back(std::move(o.proof));
    for (auto const& a : engine.aux()) verdict.witness.pairs.push_back(a);
  }
  if (worst) {
    worst->trace = std::move(verdict.trace);
    return std::move(*worst);
  }
  verdict.kind = Verdict::Kind::Verified;
  verdict.reason = "every obligation discharged";
  return verdict;
}

// Renames generated names to #c0, #c1, ... in order of first occurrence.
std::pair<TermPtr, TermPtr> canonical(TermPtr const& l, TermPtr const& r) {
  std::map<std::string, std::string> seen;
  auto rn = [&](std::string const& name, bool) -> std::optional<std::string> {
    if (!is_generated_name(name)) return std::nullopt;
    auto it = seen.find(name);
    if (it != seen.end()) return it->second;
    std::string fresh = std::string(name.substr(0, 2)) + "c" + std::to_string(seen.size());
    seen.emplace(name, fresh);
    return fresh;
  };
  TermPtr a = rename_free(l, rn);
  TermPtr b = rename_free(r, rn);
  return {a, b};
}

void audit(Derivation const& d, bool restricted, Techniques const& strong, std::string const& where,
           std::vector<std::string>& out) {
  switch (d.kind) {
    case Derivation::Kind::Check:
      for (auto const& c : d.children) audit(c, false, strong, d.label, out);
      return;
    case Derivation::Kind::Obligation:
      for (auto const& c : d.children) {
        audit(c, d.polarity == Polarity::Passive, strong, where + " / " + d.label, out);
      }
      return;
    case Derivation::Kind::Technique:
      if (restricted && d.technique && !strong.contains(*d.technique)) {
        out.push_back(std::string(technique_name(*d.technique)) + " under a passive obligation at " + where + ": " +
                      show_pair(d.lhs, d.rhs));
      }
      for (auto const& c : d.children) audit(c, restricted, strong, where, out);
      return;
    case Derivation::Kind::Unfold:
      for (auto const& c : d.children) audit(c, false, strong, where, out);
      return;
    case Derivation::Kind::Member: return;
  }
}

}  // namespace

std::optional<Renaming> match_modulo_fresh(TermPtr const& lhs, TermPtr const& rhs, RelPair const& r,
                                           NameSet const* forbidden) {
  NameSet schematic(r.fresh.begin(), r.fresh.end());
  NameSet constants = constants_of(r);
  Matcher m{schematic, constants, forbidden, {}, {}, {}, nullptr};
  if (!m.go(r.lhs, lhs) || !m.go(r.rhs, rhs)) return std::nullopt;
  return m.ren;
}

std::string verdict_label(Verdict const& v) {
  switch (v.kind) {
    case Verdict::Kind::Verified: return v.unsafe ? "UNSAFE-VERIFIED" : "VERIFIED";
    case Verdict::Kind::Failed: return "FAILED";
    case Verdict::Kind::Inconclusive: return "INCONCLUSIVE";
    case Verdict::Kind::NotBisimilar: return "NOT-BISIMILAR";
  }
  return "?";
}

int exit_code(Verdict const& v) {
  switch (v.kind) {
    case Verdict::Kind::Verified: return 0;
    case Verdict::Kind::Failed:
    case Verdict::Kind::NotBisimilar: return 1;
    case Verdict::Kind::Inconclusive: return 2;
  }
  return 2;
}

std::optional<Derivation> closure_member(TermPtr const& lhs, TermPtr const& rhs, Relation const& r,
                                         Techniques const& allowed, std::size_t depth, std::size_t fuel) {
  EngineOptions opt;
  opt.fuel = fuel;
  opt.unfold = false;
  Engine engine(r, TechniqueSet{allowed, allowed}, opt);
  Outcome o = engine.prove(lhs, rhs, allowed, depth, false, false);
  if (o.status != Status::Found) return std::nullopt;
  return o.proof;
}

Verdict progress_check_pair(std::size_t index, Relation const& r, TechniqueSet const& ts, EngineOptions const& opt) {
  return run(r, ts, opt, index);
}

Verdict verify_bisimulation_up_to(Relation const& r, TechniqueSet const& ts, EngineOptions const& opt) {
  return run(r, ts, opt, std::nullopt);
}

std::vector<std::string> audit_passive(Derivation const& root, Techniques const& strong) {
  std::vector<std::string> out;
  audit(root, false, strong, root.label, out);
  return out;
}

bool replay_evidence(Calculus calc, Evidence const& ev, std::size_t fuel) {
  if (ev.chain.empty()) return false;
  for (std::size_t i = 0; i < ev.chain.size(); ++i) {
    auto const& st = ev.chain[i];
    auto el = evaluate(st.lhs, calc, fuel);
    auto er = evaluate(st.rhs, calc, fuel);
    bool last = i + 1 == ev.chain.size();
    if (!el.finished || !er.finished) {
      // only a final divergence claim may involve an unfinished side
      return last && el.finished != er.finished;
    }
    auto obs = obligations(calc, el.normal, er.normal, names_of(st.lhs, st.rhs));
    if (last) return std::holds_alternative<Mismatch>(obs);
    if (std::holds_alternative<Mismatch>(obs)) return false;
    auto [nl, nr] = canonical(ev.chain[i + 1].lhs, ev.chain[i + 1].rhs);
    bool ok = false;
    for (auto const& ob : std::get<std::vector<Obligation>>(obs)) {
      auto [ol, orr] = canonical(ob.lhs, ob.rhs);
      if (alpha_eq(ol, nl) && alpha_eq(orr, nr)) ok = true;
    }
    if (!ok) return false;
  }
  return false;
}

Relation legalize(Relation const& r) {
  Relation out;
  out.calc = r.calc;
  NameSet global;
  for (auto const& p : r.pairs) {
    collect_names(p.lhs, global);
    collect_names(p.rhs, global);
  }
  for (auto const& p : r.pairs) {
    NameSet taken = global;
    std::map<std::string, std::string> ren;
    std::size_t nv = 0, nk = 0;
    auto pick = [&](std::string const& stem, std::size_t& counter) {
      for (;; ++counter) {
        std::string name = stem + std::to_string(counter);
        if (!taken.contains(name)) {
          taken.insert(name);
          ++counter;
          return name;
        }
      }
    };
    auto rn = [&](std::string const& name, bool is_ctx) -> std::optional<std::string> {
      if (!is_generated_name(name)) return std::nullopt;
      auto it = ren.find(name);
      if (it != ren.end()) return it->second;
      std::string fresh = is_ctx ? pick("k", nk) : pick("g", nv);
      ren.emplace(name, fresh);
      return fresh;
    };
    RelPair q;
    q.lhs = rename_free(p.lhs, rn);
    q.rhs = rename_free(p.rhs, rn);
    for (auto const& f : p.fresh) {
      auto it = ren.find(f);
      q.fresh.push_back(it != ren.end() ? it->second : f);
    }
    out.pairs.push_back(std::move(q));
  }
  return out;
}

}  // namespace nfbisim
