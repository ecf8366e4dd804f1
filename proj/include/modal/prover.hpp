// Proof search over condensed detachment and necessitation.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "modal/formula.hpp"
#include "modal/kernel.hpp"

namespace modal {

struct SearchLimits {
  // Maximal number of D/Nec nodes in a proof term.
  std::size_t max_term_size = 8;
  // Node cap on every derived formula.
  std::size_t max_formula_size = 40;
  // Cap on theorems retained by forward saturation.
  std::size_t max_theorems = 20000;
  // Levels of the forward theorem table used by goal-directed search.
  std::size_t table_depth = 1;
  // Drop derived theorems that are instances of retained ones.
  bool subsumption = true;
};

struct SearchResult {
  bool found = false;
  ProofTermPtr term;
  Formula theorem = Formula::constant("_");
  // Which limit ended an unsuccessful search.
  std::string limit;
  // Search statistics.
  std::size_t table_size = 0;
  std::size_t nodes = 0;
};

// Iterative deepening on proof-term size, searching backwards from the goal
// along the leftmost leaf of each detachment chain. A Found term has the
// minimal number of D/Nec nodes among the proofs this enumeration covers
// and has been re-checked by the kernel; its theorem has `goal` as an
// instance. Ties go to Nec before D, then leaves in name order with fewer
// detachments first. Chains that detach a leaf twice or more and end in a
// bare schema variable are not searched.
SearchResult prove(const LogicSystem& system, const std::vector<Premise>& premises, const Formula& goal,
                   const SearchLimits& limits = {});

struct SaturationResult {
  std::vector<Judgement> theorems;
  std::vector<ProofTermPtr> terms;
  // True when some level was cut short by max_theorems.
  bool truncated = false;
};

// Forward closure under D and (relevant) Nec up to max_term_size levels,
// keeping only most general theorems.
SaturationResult saturate(const LogicSystem& system, const std::vector<Premise>& premises,
                          const SearchLimits& limits = {});

}  // namespace modal
