// Modal propositional formulas: representation, concrete syntax,
// substitution and syntactic unification.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace modal {

enum class Op : std::uint8_t {
  Const,
  Var,
  Not,
  And,
  Or,
  Imp,
  Iff,
  Box,
  Dia,
  // Strict implication. Only produced by the parser when asked to keep it;
  // desugar() removes it.
  Strict,
};

bool is_binary(Op op);
bool is_unary(Op op);

// Immutable formula tree with shared subterms. Copying is cheap.
class Formula {
 public:
  static Formula constant(std::string name);
  static Formula var(std::string name);
  static Formula negation(Formula f);
  static Formula box(Formula f);
  static Formula dia(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula imp(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula strict(Formula a, Formula b);
  static Formula make(Op op, Formula a, Formula b);
  static Formula make(Op op, Formula a);

  Op op() const;
  bool is_atom() const { return op() == Op::Const || op() == Op::Var; }
  // Name of a Const or Var; empty otherwise.
  const std::string& name() const;
  // Operand of a unary node, left operand of a binary node.
  const Formula& lhs() const;
  const Formula& rhs() const;
  const Formula& operand() const { return lhs(); }

  // Number of nodes.
  std::size_t size() const;
  std::size_t hash() const;
  // True when no schema variable occurs.
  bool closed() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  // Total structural order, used for deterministic containers.
  friend bool operator<(const Formula& a, const Formula& b);

 private:
  struct Node;
  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula build(Op op, std::string name, Formula a, Formula b);

  std::shared_ptr<const Node> node_;
};

struct Formula::Node {
  Op op;
  std::string name;
  Formula a;
  Formula b;
  std::size_t size;
  std::size_t hash;
  bool closed;
};

inline Op Formula::op() const { return node_->op; }
inline const std::string& Formula::name() const { return node_->name; }
inline const Formula& Formula::lhs() const { return node_->a; }
inline const Formula& Formula::rhs() const { return node_->b; }
inline std::size_t Formula::size() const { return node_->size; }
inline std::size_t Formula::hash() const { return node_->hash; }
inline bool Formula::closed() const { return node_->closed; }

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

using Substitution = std::map<std::string, Formula>;

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct ParseOptions {
  // Keep `=>` as an Op::Strict node instead of desugaring it.
  bool keep_strict = false;
  // Read `->` as strict implication as well (Hartshorne's notation).
  bool arrow_is_strict = false;
};

// Parses the ASCII concrete syntax. Identifiers listed in `variables`
// become schema variables, all others propositional constants.
Formula parse(std::string_view text, const std::set<std::string>& variables = {},
              const ParseOptions& options = {});

// Canonical text form with the minimal parentheses needed for parse() to
// rebuild the same tree.
std::string render(const Formula& f);

// Replaces every strict implication A => B by N~(A & ~B).
Formula desugar(const Formula& f);

bool contains_strict(const Formula& f);

// Simultaneous substitution; unbound variables and constants are untouched.
Formula substitute(const Formula& f, const Substitution& s);

// Most general unifier with occurs check. The returned substitution is
// fully composed, so applying it once is enough.
std::optional<Substitution> unify(const Formula& f, const Formula& g);

std::set<std::string> vars(const Formula& f);
std::set<std::string> constants(const Formula& f);
bool occurs(const std::string& var, const Formula& f);

// Number of Box/Dia nodes.
std::size_t modal_count(const Formula& f);
// Maximal nesting of Box/Dia.
std::size_t modal_depth(const Formula& f);

bool is_identifier(std::string_view s);

}  // namespace modal
