// Trusted proof checker for Hilbert systems with condensed detachment (D)
// and necessitation (Nec).
//
// A judgement is a derived formula together with a taint bit recording
// whether a local premise was used to obtain it. Necessitation of a tainted
// judgement is rejected: a fact assumed only at the actual world must not be
// generalized to all worlds.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "modal/formula.hpp"

namespace modal {

struct AxiomSchema {
  std::string name;
  std::vector<std::string> variables;
  Formula body;

  // Parses `body_text` with `variables` as schema letters.
  static AxiomSchema make(std::string name, std::vector<std::string> variables,
                          std::string_view body_text);
};

enum class SchemaGroup { Propositional, Lemma, Modal, Extra };

class LogicSystem {
 public:
  LogicSystem() = default;
  LogicSystem(std::string name, std::vector<AxiomSchema> schemas, bool nec_enabled = true);

  // Named systems K, T, KB, S4, S5.
  static LogicSystem named(std::string_view name);
  static bool is_named(std::string_view name);
  static std::vector<std::string> names();

  const std::string& name() const { return name_; }
  const std::vector<AxiomSchema>& schemas() const { return schemas_; }
  bool nec_enabled() const { return nec_enabled_; }
  const AxiomSchema* find(std::string_view schema) const;

  // Returns a copy extended with `s`. Throws on duplicate names or schemas
  // using the reserved variable namespace.
  LogicSystem with(AxiomSchema s) const;
  LogicSystem without_nec() const;

 private:
  std::string name_;
  std::vector<AxiomSchema> schemas_;
  bool nec_enabled_ = true;
};

// Catalog lookup by schema name (propositional basis, lemma library and all
// modal schemas, including ones not part of any named system such as becker).
const AxiomSchema* catalog_schema(std::string_view name);
const std::vector<AxiomSchema>& catalog();
SchemaGroup catalog_group(std::string_view name);

enum class PremiseMode { Local, Global };

std::string_view to_string(PremiseMode m);

struct Premise {
  std::string name;
  Formula formula;
  PremiseMode mode = PremiseMode::Global;
};

// Parses "global ap: N(q -> N q)" / "local ip: M q". The mode defaults to
// global when omitted.
Premise parse_premise(std::string_view text);

class ProofTerm;
using ProofTermPtr = std::shared_ptr<const ProofTerm>;

class ProofTerm {
 public:
  enum class Kind { Ref, D, Nec };

  static ProofTermPtr ref(std::string name);
  static ProofTermPtr d(ProofTermPtr major, ProofTermPtr minor);
  static ProofTermPtr nec(ProofTermPtr sub);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const ProofTermPtr& major() const { return a_; }
  const ProofTermPtr& minor() const { return b_; }
  const ProofTermPtr& sub() const { return a_; }
  // Number of D and Nec nodes.
  std::size_t size() const { return size_; }

  ProofTerm(Kind k, std::string name, ProofTermPtr a, ProofTermPtr b);

 private:
  Kind kind_;
  std::string name_;
  ProofTermPtr a_, b_;
  std::size_t size_;
};

bool operator==(const ProofTerm& a, const ProofTerm& b);

ProofTermPtr parse_proof_term(std::string_view text);
std::string render(const ProofTerm& t);

struct Judgement {
  Formula formula;
  bool local_taint = false;
};

class ProofError : public std::runtime_error {
 public:
  enum class Kind { NotImplication, UnificationFailure, TaintViolation, RuleDisabled, UnresolvedRef };
  ProofError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Renames variables to v0, v1, ... in first-occurrence (preorder) order.
Formula canonical(const Formula& f);
bool is_reserved_variable(std::string_view name);

Judgement condensed_detach(const Judgement& major, const Judgement& minor);
Judgement necessitate(const Judgement& j, bool nec_enabled = true);

struct TraceLine {
  std::size_t depth;
  std::string term;
  Judgement judgement;
};

// Evaluates `t` bottom-up. When `trace` is given, one line per subterm is
// appended in post-order.
Judgement check_proof(const ProofTerm& t, const LogicSystem& system,
                      const std::vector<Premise>& premises,
                      std::vector<TraceLine>* trace = nullptr);

// One-sided matching: σ over `general`'s variables with
// substitute(general, σ) == specific.
std::optional<Substitution> instance_of(const Formula& specific, const Formula& general);

// Treats modal subformulas as atoms and checks all assignments.
bool is_propositional_tautology(const Formula& f);

}  // namespace modal
