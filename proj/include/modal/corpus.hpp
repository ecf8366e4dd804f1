// Declarative problem files and their verifier.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modal/formula.hpp"
#include "modal/kernel.hpp"
#include "modal/kripke.hpp"
#include "modal/prover.hpp"

namespace modal {

enum class Expect { Provable, Refutable, DerivationPasses, DerivationFailsAt, Definition };

std::string_view to_string(Expect e);

struct Certificate {
  enum class Kind { Proof, Model, Search, S5Decision };
  Kind kind = Kind::Proof;
  ProofTermPtr term;                  // Proof
  std::optional<KripkeModel> model;   // Model
  SearchLimits limits;                // Search on a provable goal
  std::optional<FrameClass> frame;    // Search on a refutable goal
  std::size_t max_worlds = 3;
  std::string text;
};

std::string_view to_string(Certificate::Kind k);

struct Problem {
  std::string name;
  std::string file;
  std::size_t line = 0;
  std::string logic = "K";
  LogicSystem system;
  std::vector<AxiomSchema> extra_schemas;
  std::vector<Premise> premises;
  // Several goals mean several claims under the same premises (for example
  // both directions of an equivalence).
  std::vector<Formula> goals;
  Expect expect = Expect::Provable;
  std::vector<std::string> fail_labels;
  std::vector<Certificate> certificates;
  // Derivation problems.
  std::optional<Derivation> derivation;
  bool strict_reading = false;
  // Frame class for countermodels and derivation checks. Defaults to the
  // frame of the named logic (S5 for derivations).
  std::optional<FrameClass> frame;
  std::size_t max_worlds = 3;
  // Prover run expected to come back empty on a refutable claim.
  std::optional<SearchLimits> exhaust;
  std::string annotation;

  FrameClass frame_class() const;
};

class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::string file, std::size_t line, const std::string& msg);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// "hn(): M N q -> N q". Letters listed in the parentheses are schema
// variables.
AxiomSchema parse_schema_declaration(std::string_view text);

// `name` is only used in error messages.
std::vector<Problem> load_text(std::string_view text, const std::string& name = "<input>");
std::vector<Problem> load(const std::string& path);

struct Report {
  std::string name;
  bool pass = false;
  std::vector<std::string> evidence;
  double time_ms = 0;
};

Report verify(const Problem& p);

// Verifies every problem (in parallel when `threads` > 1) and returns the
// reports in input order.
std::vector<Report> verify_all(const std::vector<Problem>& problems, unsigned threads = 1);

std::vector<Problem> builtin_corpus();

std::vector<ModalPremise> modal_premises(const std::vector<Premise>& premises);

}  // namespace modal

namespace modal::detail {
const std::vector<std::pair<std::string, std::string>>& builtin_corpus_files();
}
