#ifndef NFBISIM_CORPUS_HPP
#define NFBISIM_CORPUS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nfbisim/prover.hpp"

namespace nfbisim {

// One manifest entry. `command` is verify, prove, distinguish or eval.
struct CorpusEntry {
  std::string name;
  std::string command;
  Calculus calc = Calculus::Lambda;
  std::string file;  // verify
  std::string lhs;   // prove, distinguish
  std::string rhs;
  std::string term;  // eval
  std::optional<std::string> techniques;
  std::optional<std::string> unsafe;  // e.g. "strong+=ectx"
  std::optional<std::size_t> depth;
  std::optional<std::size_t> fuel;
  std::vector<std::string> tags;

  std::string expect;  // verdict label, or normal-form kind for eval
  std::optional<std::string> expect_value;
  std::optional<std::string> expect_head;
  std::optional<std::size_t> expect_steps;
  std::vector<std::string> expect_rules;
};

struct CorpusResult {
  CorpusEntry entry;
  bool pass = false;
  std::string outcome;
  std::string detail;
  double seconds = 0;
  std::optional<Verdict> verdict;
  std::optional<Relation> relation;  // the checked relation, for verify entries
  TechniqueSet techniques;
};

class CorpusError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<CorpusEntry> load_manifest(std::filesystem::path const& path);

// A filter selects entries by name, command, calculus or tag; empty
// selects all.
bool entry_selected(CorpusEntry const& e, std::string const& filter);

// Technique set of an entry: the listed techniques (default: all of the
// calculus), with the default strong subset, widened by `unsafe`.
TechniqueSet entry_techniques(CorpusEntry const& e);

// Parses "strong+=a,b" and adds the techniques to ts.strong (and ts.full).
void apply_unsafe(TechniqueSet& ts, std::string const& widening, Calculus calc);

CorpusResult run_entry(CorpusEntry const& e, std::filesystem::path const& dir, EngineOptions const& base);

// Runs the selected entries concurrently; results keep manifest order.
std::vector<CorpusResult> run_corpus(std::filesystem::path const& dir, std::string const& filter,
                                     EngineOptions const& base);

}  // namespace nfbisim

#endif
