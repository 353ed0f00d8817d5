#ifndef NFBISIM_ENGINE_HPP
#define NFBISIM_ENGINE_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nfbisim/relation.hpp"
#include "nfbisim/semantics.hpp"

namespace nfbisim {

// Maps schematic names of a pair to the names of an instance. Context
// variables are keyed with a leading '@'.
using Renaming = std::map<std::string, std::string>;

// Injective renaming of r.fresh under which r is alpha-equal to the goal.
// Targets never collide with the pair's own non-fresh names, nor with
// `forbidden` when given.
std::optional<Renaming> match_modulo_fresh(TermPtr const& lhs, TermPtr const& rhs, RelPair const& r,
                                           NameSet const* forbidden = nullptr);

// Proof and progress trace. Check nodes are pair progress checks, whose
// children are Obligation nodes; an Obligation's child is the proof of its
// goal, built from Technique, Member and Unfold nodes. An Unfold adds its
// goal to the relation and carries the Check of that new pair.
struct Derivation {
  enum class Kind { Check, Obligation, Technique, Member, Unfold };
  Kind kind = Kind::Technique;
  std::string label;
  std::optional<Technique> technique;
  Polarity polarity = Polarity::Active;
  TermPtr lhs;
  TermPtr rhs;
  std::string detail;
  std::vector<Derivation> children;
};

// A chain of pairs, each one a test obligation of the normal forms of the
// previous, ending in pairs whose normal forms clash.
struct EvidenceStep {
  TermPtr lhs;
  TermPtr rhs;
  std::string via;
};

struct Evidence {
  std::vector<EvidenceStep> chain;
  std::string reason;
};

// Re-evaluates every step of the chain and re-derives the final clash.
bool replay_evidence(Calculus calc, Evidence const& ev, std::size_t fuel = kDefaultFuel);

struct EngineOptions {
  std::size_t fuel = kDefaultFuel;
  std::size_t depth = 6;
  std::size_t max_pairs = 32;
  // Adds undischarged necessary goals to the relation and checks them.
  bool unfold = true;
  // Reports a pair where exactly one side runs out of fuel as distinct.
  bool divergence_is_distinct = false;
  std::size_t node_budget = 400000;
};

struct Verdict {
  enum class Kind { Verified, Failed, Inconclusive, NotBisimilar };
  Kind kind = Kind::Inconclusive;
  // Set when the strong set exceeded the calculus default.
  bool unsafe = false;
  std::string reason;
  std::optional<std::size_t> pair;
  std::vector<std::string> path;
  std::optional<Evidence> evidence;
  std::vector<Derivation> trace;
  // The checked relation together with every pair added by unfolding.
  Relation witness;
};

std::string verdict_label(Verdict const& v);
int exit_code(Verdict const& v);

// Closure membership without unfolding. `fuel` bounds each evaluation.
std::optional<Derivation> closure_member(TermPtr const& lhs, TermPtr const& rhs, Relation const& r,
                                         Techniques const& allowed, std::size_t depth, std::size_t fuel);

// Progress check of r.pairs[index] against r, reported as a verdict on that
// pair alone.
Verdict progress_check_pair(std::size_t index, Relation const& r, TechniqueSet const& ts, EngineOptions const& opt);

Verdict verify_bisimulation_up_to(Relation const& r, TechniqueSet const& ts, EngineOptions const& opt);

// Descriptions of proof nodes below Passive obligations that use a technique
// outside `strong`. Unfolded pairs restart the discipline at their own
// obligations.
std::vector<std::string> audit_passive(Derivation const& root, Techniques const& strong);

// Renames generated names of the witness to legal identifiers, so the
// relation prints as a loadable file.
Relation legalize(Relation const& r);

}  // namespace nfbisim

#endif
