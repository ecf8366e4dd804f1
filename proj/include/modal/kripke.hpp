// Finite Kripke semantics: evaluation, frame properties, bounded
// countermodel search, an exact S5 decision procedure and a checker for
// annotated derivations.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modal/formula.hpp"
#include "modal/kernel.hpp"

namespace modal {

struct KripkeModel {
  std::size_t n_worlds = 1;
  std::set<std::pair<std::size_t, std::size_t>> relation;
  // Atom name -> worlds where it is true. Atoms missing here are false
  // everywhere.
  std::map<std::string, std::set<std::size_t>> valuation;
  std::size_t designated = 0;

  // Throws std::invalid_argument if indices are out of range.
  void validate() const;
  bool operator==(const KripkeModel& o) const = default;
};

// `model worlds=2 designated=0 rel={(0,1)} val={q:[1]}`
std::string render(const KripkeModel& m);
KripkeModel parse_model(std::string_view text);

bool eval(const KripkeModel& m, std::size_t world, const Formula& f);

enum class FrameProperty : std::uint8_t { Reflexive, Symmetric, Transitive, Euclidean, Serial, Universal };

std::string_view to_string(FrameProperty p);
std::set<FrameProperty> frame_properties(const KripkeModel& m);

enum class FrameClass { K, T, KB, S4, S5, Universal };

std::string_view to_string(FrameClass c);
std::optional<FrameClass> parse_frame_class(std::string_view name);
std::set<FrameProperty> required_properties(FrameClass c);
bool in_frame_class(const KripkeModel& m, FrameClass c);

struct ModalPremise {
  Formula formula;
  PremiseMode mode = PremiseMode::Local;
};

struct Verdict {
  enum class Kind { Valid, Countermodel, NoCountermodelUpTo };
  Kind kind = Kind::NoCountermodelUpTo;
  std::optional<KripkeModel> model;
  // World bound searched (countermodel search) or small-model bound (S5).
  std::size_t bound = 0;
  std::size_t models_checked = 0;
};

std::string describe(const Verdict& v);

// Premises hold per their modes in `m` and the goal fails at the designated
// world.
bool refutes(const KripkeModel& m, const std::vector<ModalPremise>& premises, const Formula& goal);

// Canonical enumeration: worlds 1..max_worlds, designated 0, relations as
// ascending bitmasks (bit i*n+j for (i,j)) filtered by frame class,
// valuations as ascending bitmasks (bit k*n+w for the k-th atom in sorted
// order at world w). Returns the first countermodel.
Verdict find_countermodel(const std::vector<ModalPremise>& premises, const Formula& goal, FrameClass frame,
                          std::size_t max_worlds);

// Exact S5 decision over universal models. At most 4 distinct atoms.
Verdict decide_s5(const std::vector<ModalPremise>& premises, const Formula& goal);

class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {{{ Derivations

struct DerivationLine {
  enum class Kind { Premise, Axiom, From };
  std::string label;
  Formula formula;
  Kind kind = Kind::Premise;
  std::vector<std::string> cites;
};

struct Derivation {
  std::vector<DerivationLine> lines;
  PremiseMode premise_mode = PremiseMode::Local;

  // Cited labels exist and occur strictly earlier; labels are unique.
  void validate() const;
};

struct LineReport {
  enum class Status { Premise, Pass, NoCountermodelUpTo, Refuted };
  std::string label;
  Status status = Status::Pass;
  std::optional<KripkeModel> model;
  std::size_t bound = 0;
  bool ok() const { return status != Status::Refuted; }
};

struct DerivationReport {
  std::vector<LineReport> lines;
  bool exact = false;
  bool passed() const;
  std::vector<std::string> failing() const;
};

// Exact for S5/Universal; refutation-only (bounded by max_worlds) otherwise.
DerivationReport check_derivation(const Derivation& d, FrameClass frame, std::size_t max_worlds = 3);

// }}}

}  // namespace modal
