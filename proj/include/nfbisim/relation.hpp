#ifndef NFBISIM_RELATION_HPP
#define NFBISIM_RELATION_HPP

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nfbisim/term.hpp"

namespace nfbisim {

// A related pair. Names in `fresh` are schematic: the pair stands for all of
// its instances under injective renamings of those names.
struct RelPair {
  TermPtr lhs;
  TermPtr rhs;
  std::vector<std::string> fresh;
};

struct Relation {
  Calculus calc = Calculus::Lambda;
  std::vector<RelPair> pairs;
};

enum class Technique { Refl, Red, Lam, Subst, Ectx, Pctx, PctxRst, EctxPure, Result, Abort, SubstV, SubstC };

std::string_view technique_name(Technique t);
std::optional<Technique> technique_from_name(std::string_view name);

// The techniques of a calculus, in search order.
std::vector<Technique> calculus_techniques(Calculus calc);

using Techniques = std::set<Technique>;

struct TechniqueSet {
  Techniques full;
  Techniques strong;

  static TechniqueSet defaults(Calculus calc);
};

// Default strong subset restricted to `full`.
Techniques default_strong(Calculus calc);

// Parses "refl,red,ctx". `ctx` expands to the calculus's context closure.
// Throws std::invalid_argument on unknown names or names foreign to calc.
Techniques parse_techniques(std::string_view list, Calculus calc);
std::string format_techniques(Techniques const& ts);

class RelationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// (relation (calculus NAME) (define NAME "value") ... (pair (fresh x ...) "lhs" "rhs") ...)
// Definitions are closed values substituted for free occurrences of their
// name in later definitions and pairs.
Relation parse_relation(std::string_view text);
Relation load_relation(std::filesystem::path const& path);
std::string print_relation(Relation const& rel);

// Throws RelationError when a pair breaks the relation invariants.
void check_pair(RelPair const& p, Calculus calc);

}  // namespace nfbisim

#endif
