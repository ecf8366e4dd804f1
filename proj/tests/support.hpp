// Reference implementations used as oracles by the tests. They are written
// for clarity, not speed, and share no code with the library beyond the
// Formula type.
#pragma once

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "modal/formula.hpp"
#include "modal/kernel.hpp"
#include "modal/kripke.hpp"

namespace oracle {

using modal::Formula;
using modal::Op;

// Explicit model: adjacency matrix and per-atom truth vectors.
struct Model {
  std::size_t n = 1;
  std::vector<std::vector<bool>> r;
  std::map<std::string, std::vector<bool>> v;
  std::size_t designated = 0;

  modal::KripkeModel to_kripke() const {
    modal::KripkeModel m;
    m.n_worlds = n;
    m.designated = designated;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][j]) m.relation.insert({i, j});
    for (const auto& [a, bits] : v) {
      std::set<std::size_t> ws;
      for (std::size_t w = 0; w < n; ++w)
        if (bits[w]) ws.insert(w);
      if (!ws.empty()) m.valuation[a] = ws;
    }
    return m;
  }
};

inline bool eval(const Model& m, std::size_t w, const Formula& f) {
  switch (f.op()) {
    case Op::Const:
    case Op::Var: {
      auto it = m.v.find(f.name());
      return it != m.v.end() && it->second[w];
    }
    case Op::Not:
      return !eval(m, w, f.lhs());
    case Op::And:
      return eval(m, w, f.lhs()) && eval(m, w, f.rhs());
    case Op::Or:
      return eval(m, w, f.lhs()) || eval(m, w, f.rhs());
    case Op::Imp:
      return !eval(m, w, f.lhs()) || eval(m, w, f.rhs());
    case Op::Iff:
      return eval(m, w, f.lhs()) == eval(m, w, f.rhs());
    case Op::Box:
      for (std::size_t u = 0; u < m.n; ++u)
        if (m.r[w][u] && !eval(m, u, f.lhs())) return false;
      return true;
    case Op::Dia:
      for (std::size_t u = 0; u < m.n; ++u)
        if (m.r[w][u] && eval(m, u, f.lhs())) return true;
      return false;
    case Op::Strict:
      for (std::size_t u = 0; u < m.n; ++u)
        if (m.r[w][u] && eval(m, u, f.lhs()) && !eval(m, u, f.rhs())) return false;
      return true;
  }
  return false;
}

inline bool reflexive(const Model& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    if (!m.r[i][i]) return false;
  return true;
}
inline bool symmetric(const Model& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (m.r[i][j] != m.r[j][i]) return false;
  return true;
}
inline bool transitive(const Model& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      for (std::size_t k = 0; k < m.n; ++k)
        if (m.r[i][j] && m.r[j][k] && !m.r[i][k]) return false;
  return true;
}
inline bool euclidean(const Model& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      for (std::size_t k = 0; k < m.n; ++k)
        if (m.r[i][j] && m.r[i][k] && !m.r[j][k]) return false;
  return true;
}
inline bool universal(const Model& m) {
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      if (!m.r[i][j]) return false;
  return true;
}

inline bool in_class(const Model& m, modal::FrameClass c) {
  using modal::FrameClass;
  switch (c) {
    case FrameClass::K:
      return true;
    case FrameClass::T:
      return reflexive(m);
    case FrameClass::KB:
      return symmetric(m);
    case FrameClass::S4:
      return reflexive(m) && transitive(m);
    case FrameClass::S5:
      return reflexive(m) && symmetric(m) && transitive(m);
    case FrameClass::Universal:
      return universal(m);
  }
  return false;
}

// Calls `f` on every model with exactly `n` worlds over `atoms`, designated
// world 0. Stops early when `f` returns false.
inline bool for_each_model(std::size_t n, const std::vector<std::string>& atoms,
                           const std::function<bool(const Model&)>& f) {
  const std::size_t rel_bits = n * n, val_bits = n * atoms.size();
  Model m;
  m.n = n;
  m.r.assign(n, std::vector<bool>(n));
  for (std::size_t rel = 0; rel < (std::size_t{1} << rel_bits); ++rel) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.r[i][j] = (rel >> (i * n + j)) & 1;
    for (std::size_t val = 0; val < (std::size_t{1} << val_bits); ++val) {
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        auto& bits = m.v[atoms[k]];
        bits.assign(n, false);
        for (std::size_t w = 0; w < n; ++w) bits[w] = (val >> (k * n + w)) & 1;
      }
      if (!f(m)) return false;
    }
  }
  return true;
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Const || f.op() == Op::Var) {
    out.insert(f.name());
    return;
  }
  if (modal::is_unary(f.op())) collect_atoms(f.lhs(), out);
  if (modal::is_binary(f.op())) {
    collect_atoms(f.lhs(), out);
    collect_atoms(f.rhs(), out);
  }
}

inline bool premises_hold(const Model& m, const std::vector<modal::ModalPremise>& ps) {
  for (const auto& p : ps) {
    if (p.mode == modal::PremiseMode::Local) {
      if (!eval(m, m.designated, p.formula)) return false;
    } else {
      for (std::size_t w = 0; w < m.n; ++w)
        if (!eval(m, w, p.formula)) return false;
    }
  }
  return true;
}

// Smallest world count of a countermodel in class `c`, or 0 if none up to
// `max_worlds`.
inline std::size_t smallest_countermodel(const std::vector<modal::ModalPremise>& ps, const Formula& goal,
                                         modal::FrameClass c, std::size_t max_worlds) {
  std::set<std::string> as;
  for (const auto& p : ps) collect_atoms(p.formula, as);
  collect_atoms(goal, as);
  std::vector<std::string> atoms(as.begin(), as.end());
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    bool found = false;
    for_each_model(n, atoms, [&](const Model& m) {
      if (in_class(m, c) && premises_hold(m, ps) && !eval(m, 0, goal)) found = true;
      return !found;
    });
    if (found) return n;
  }
  return 0;
}

// S5 entailment by brute force over universal models whose worlds are
// distinct valuation types: every non-empty set of types, every designated
// type.
inline bool s5_entails(const std::vector<modal::ModalPremise>& ps, const Formula& goal) {
  std::set<std::string> as;
  for (const auto& p : ps) collect_atoms(p.formula, as);
  collect_atoms(goal, as);
  std::vector<std::string> atoms(as.begin(), as.end());
  const std::size_t types = std::size_t{1} << atoms.size();
  for (std::size_t set = 1; set < (std::size_t{1} << types); ++set) {
    std::vector<std::size_t> members;
    for (std::size_t t = 0; t < types; ++t)
      if ((set >> t) & 1) members.push_back(t);
    Model m;
    m.n = members.size();
    m.r.assign(m.n, std::vector<bool>(m.n, true));
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      auto& bits = m.v[atoms[k]];
      bits.assign(m.n, false);
      for (std::size_t w = 0; w < m.n; ++w) bits[w] = (members[w] >> k) & 1;
    }
    for (std::size_t d = 0; d < m.n; ++d) {
      m.designated = d;
      if (premises_hold(m, ps) && !eval(m, d, goal)) return false;
    }
  }
  return true;
}

struct Generator {
  std::mt19937 rng;
  std::vector<std::string> constants{"p", "q", "r"};
  std::vector<std::string> variables;
  bool modal = true;
  bool iff = true;

  explicit Generator(unsigned seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  Formula atom() {
    const std::size_t k = constants.size() + variables.size();
    const std::size_t i = pick(k);
    return i < constants.size() ? Formula::constant(constants[i]) : Formula::var(variables[i - constants.size()]);
  }

  // Random formula of at most `depth` levels and at most `mdepth` nested
  // modal operators.
  Formula formula(std::size_t depth, std::size_t mdepth = 100) {
    if (depth == 0 || pick(4) == 0) return atom();
    std::vector<Op> ops{Op::Not, Op::And, Op::Or, Op::Imp};
    if (iff) ops.push_back(Op::Iff);
    if (modal && mdepth > 0) {
      ops.push_back(Op::Box);
      ops.push_back(Op::Dia);
    }
    const Op op = ops[pick(ops.size())];
    if (op == Op::Box || op == Op::Dia) return Formula::make(op, formula(depth - 1, mdepth - 1));
    if (op == Op::Not) return Formula::negation(formula(depth - 1, mdepth));
    return Formula::make(op, formula(depth - 1, mdepth), formula(depth - 1, mdepth));
  }

  // Random finite model with `n` worlds over the generator's constants.
  Model model(std::size_t n) {
    Model m;
    m.n = n;
    m.r.assign(n, std::vector<bool>(n));
    for (auto& row : m.r)
      for (std::size_t j = 0; j < n; ++j) row[j] = pick(2);
    for (const auto& a : constants) {
      auto& bits = m.v[a];
      bits.assign(n, false);
      for (std::size_t w = 0; w < n; ++w) bits[w] = pick(2);
    }
    m.designated = pick(n);
    return m;
  }
};

}  // namespace oracle
