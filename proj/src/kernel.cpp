#include "modal/kernel.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

namespace modal {

AxiomSchema AxiomSchema::make(std::string name, std::vector<std::string> variables,
                              std::string_view body_text) {
  std::set<std::string> vs(variables.begin(), variables.end());
  Formula body = parse(body_text, vs);
  for (const auto& v : vars(body))
    if (!vs.count(v)) throw std::invalid_argument("schema " + name + ": undeclared variable " + v);
  return {std::move(name), std::move(variables), std::move(body)};
}

// {{{ Catalog

namespace {

struct CatalogEntry {
  SchemaGroup group;
  AxiomSchema schema;
};

std::vector<CatalogEntry> build_catalog() {
  const std::vector<std::string> a{"a"}, ab{"a", "b"}, abc{"a", "b", "c"};
  std::vector<CatalogEntry> c;
  auto add = [&](SchemaGroup g, const char* name, const std::vector<std::string>& v,
                 const char* body) { c.push_back({g, AxiomSchema::make(name, v, body)}); };
  using G = SchemaGroup;
  add(G::Propositional, "pc1", ab, "a -> (b -> a)");
  add(G::Propositional, "pc2", abc, "(a -> (b -> c)) -> ((a -> b) -> (a -> c))");
  add(G::Propositional, "pc3", ab, "(~a -> ~b) -> (b -> a)");
  add(G::Propositional, "and1", ab, "a & b -> ~(a -> ~b)");
  add(G::Propositional, "and2", ab, "~(a -> ~b) -> a & b");
  add(G::Propositional, "or1", ab, "a | b -> (~a -> b)");
  add(G::Propositional, "or2", ab, "(~a -> b) -> a | b");
  add(G::Propositional, "iff1", ab, "(a <-> b) -> (a -> b)");
  add(G::Propositional, "iff2", ab, "(a <-> b) -> (b -> a)");
  add(G::Propositional, "iff3", ab, "(a -> b) -> ((b -> a) -> (a <-> b))");

  // Derived propositional lemmas. Each is checked to be a tautology below,
  // so adding them does not change the set of theorems.
  add(G::Lemma, "id", a, "a -> a");
  add(G::Lemma, "hs", abc, "(a -> b) -> ((b -> c) -> (a -> c))");
  add(G::Lemma, "hs2", abc, "(b -> c) -> ((a -> b) -> (a -> c))");
  add(G::Lemma, "dn1", a, "~~a -> a");
  add(G::Lemma, "dn2", a, "a -> ~~a");
  add(G::Lemma, "ct1", ab, "(a -> b) -> (~b -> ~a)");
  add(G::Lemma, "ct2", ab, "(a -> ~b) -> (b -> ~a)");
  add(G::Lemma, "ct3", ab, "(~a -> b) -> (~b -> a)");
  add(G::Lemma, "sim1", ab, "(a -> b) -> ~(a & ~b)");
  add(G::Lemma, "sim2", ab, "~(a & ~b) -> (a -> b)");
  add(G::Lemma, "nand1", ab, "(a -> ~b) -> ~(a & b)");
  add(G::Lemma, "nand2", ab, "~(a & b) -> (a -> ~b)");

  add(G::Modal, "K", ab, "N(a -> b) -> (N a -> N b)");
  add(G::Modal, "km", ab, "N(a -> b) -> (M a -> M b)");
  add(G::Modal, "dual1", a, "M a -> ~N ~a");
  add(G::Modal, "dual2", a, "~N ~a -> M a");
  add(G::Modal, "dual3", a, "N a -> ~M ~a");
  add(G::Modal, "dual4", a, "~M ~a -> N a");
  add(G::Modal, "t", a, "N a -> a");
  add(G::Modal, "b", a, "M N a -> a");
  add(G::Modal, "brouwer", a, "a -> N M a");
  add(G::Modal, "4", a, "N a -> N N a");
  add(G::Modal, "5", a, "M N a -> N a");
  add(G::Modal, "becker", a, "~N a -> N ~N a");

  for (const auto& e : c)
    if (e.group != G::Modal && !is_propositional_tautology(e.schema.body))
      throw std::logic_error("catalog: " + e.schema.name + " is not a tautology");
  return c;
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

std::vector<AxiomSchema> pick(std::initializer_list<const char*> names) {
  std::vector<AxiomSchema> out;
  for (const auto& e : catalog_entries())
    if (e.group == SchemaGroup::Propositional || e.group == SchemaGroup::Lemma) out.push_back(e.schema);
  for (const char* n : names) out.push_back(*catalog_schema(n));
  return out;
}

}  // namespace

const std::vector<AxiomSchema>& catalog() {
  static const std::vector<AxiomSchema> all = [] {
    std::vector<AxiomSchema> v;
    for (const auto& e : catalog_entries()) v.push_back(e.schema);
    return v;
  }();
  return all;
}

const AxiomSchema* catalog_schema(std::string_view name) {
  for (const auto& e : catalog_entries())
    if (e.schema.name == name) return &e.schema;
  return nullptr;
}

SchemaGroup catalog_group(std::string_view name) {
  for (const auto& e : catalog_entries())
    if (e.schema.name == name) return e.group;
  return SchemaGroup::Extra;
}

// }}}

// {{{ LogicSystem

LogicSystem::LogicSystem(std::string name, std::vector<AxiomSchema> schemas, bool nec_enabled)
    : name_(std::move(name)), nec_enabled_(nec_enabled) {
  for (auto& s : schemas) {
    if (find(s.name)) throw std::invalid_argument("duplicate schema name " + s.name);
    schemas_.push_back(std::move(s));
  }
}

bool LogicSystem::is_named(std::string_view name) {
  return name == "K" || name == "T" || name == "KB" || name == "S4" || name == "S5";
}

std::vector<std::string> LogicSystem::names() { return {"K", "T", "KB", "S4", "S5"}; }

LogicSystem LogicSystem::named(std::string_view name) {
  if (name == "K") return {"K", pick({"K", "km", "dual1", "dual2", "dual3", "dual4"})};
  if (name == "T") return {"T", pick({"K", "km", "dual1", "dual2", "dual3", "dual4", "t"})};
  if (name == "KB")
    return {"KB", pick({"K", "km", "dual1", "dual2", "dual3", "dual4", "b", "brouwer"})};
  if (name == "S4") return {"S4", pick({"K", "km", "dual1", "dual2", "dual3", "dual4", "t", "4"})};
  if (name == "S5") return {"S5", pick({"K", "km", "dual1", "dual2", "dual3", "dual4", "t", "5"})};
  throw std::invalid_argument("unknown logic " + std::string(name));
}

const AxiomSchema* LogicSystem::find(std::string_view schema) const {
  for (const auto& s : schemas_)
    if (s.name == schema) return &s;
  return nullptr;
}

LogicSystem LogicSystem::with(AxiomSchema s) const {
  if (find(s.name)) throw std::invalid_argument("duplicate schema name " + s.name);
  for (const auto& v : s.variables)
    if (is_reserved_variable(v))
      throw std::invalid_argument("schema " + s.name + " uses reserved variable " + v);
  LogicSystem out = *this;
  out.name_ += "+" + s.name;
  out.schemas_.push_back(std::move(s));
  return out;
}

LogicSystem LogicSystem::without_nec() const {
  LogicSystem out = *this;
  out.nec_enabled_ = false;
  return out;
}

// }}}

std::string_view to_string(PremiseMode m) { return m == PremiseMode::Local ? "local" : "global"; }

Premise parse_premise(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  PremiseMode mode = PremiseMode::Global;
  for (auto [word, m] : {std::pair{"global", PremiseMode::Global}, std::pair{"local", PremiseMode::Local}}) {
    std::string_view w(word);
    if (s.substr(0, w.size()) == w && s.size() > w.size() &&
        std::isspace(static_cast<unsigned char>(s[w.size()]))) {
      mode = m;
      s = trim(s.substr(w.size()));
    }
  }
  auto colon = s.find(':');
  if (colon == std::string_view::npos) throw SyntaxError("premise: expected 'name: formula'", 0);
  std::string name(trim(s.substr(0, colon)));
  if (name.empty()) throw SyntaxError("premise: missing name", 0);
  for (char c : name)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw SyntaxError("premise: bad name '" + name + "'", 0);
  Formula f = parse(s.substr(colon + 1));
  return {std::move(name), std::move(f), mode};
}

// {{{ Proof terms

ProofTerm::ProofTerm(Kind k, std::string name, ProofTermPtr a, ProofTermPtr b)
    : kind_(k), name_(std::move(name)), a_(std::move(a)), b_(std::move(b)) {
  size_ = k == Kind::Ref ? 0 : 1;
  if (a_) size_ += a_->size();
  if (b_) size_ += b_->size();
}

ProofTermPtr ProofTerm::ref(std::string name) {
  return std::make_shared<const ProofTerm>(Kind::Ref, std::move(name), nullptr, nullptr);
}
ProofTermPtr ProofTerm::d(ProofTermPtr major, ProofTermPtr minor) {
  return std::make_shared<const ProofTerm>(Kind::D, "", std::move(major), std::move(minor));
}
ProofTermPtr ProofTerm::nec(ProofTermPtr sub) {
  return std::make_shared<const ProofTerm>(Kind::Nec, "", std::move(sub), nullptr);
}

bool operator==(const ProofTerm& a, const ProofTerm& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  switch (a.kind()) {
    case ProofTerm::Kind::Ref:
      return a.name() == b.name();
    case ProofTerm::Kind::Nec:
      return *a.sub() == *b.sub();
    case ProofTerm::Kind::D:
      return *a.major() == *b.major() && *a.minor() == *b.minor();
  }
  return false;
}

namespace {

class TermParser {
 public:
  explicit TermParser(std::string_view s) : s_(s) {}

  ProofTermPtr run() {
    ProofTermPtr t = term();
    skip();
    if (i_ != s_.size()) throw SyntaxError("proof term: trailing input", i_);
    return t;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c)
      throw SyntaxError(std::string("proof term: expected '") + c + "'", i_);
    ++i_;
  }
  std::string ident() {
    skip();
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j == i_) throw SyntaxError("proof term: expected identifier", i_);
    std::string id(s_.substr(i_, j - i_));
    i_ = j;
    return id;
  }
  bool at(char c) {
    skip();
    return i_ < s_.size() && s_[i_] == c;
  }

  ProofTermPtr term() {
    std::string id = ident();
    if ((id == "D" || id == "Nec") && at('(')) {
      expect('(');
      ProofTermPtr a = term();
      if (id == "Nec") {
        expect(')');
        return ProofTerm::nec(std::move(a));
      }
      expect(',');
      ProofTermPtr b = term();
      expect(')');
      return ProofTerm::d(std::move(a), std::move(b));
    }
    return ProofTerm::ref(std::move(id));
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

void render_term(const ProofTerm& t, std::string& out) {
  switch (t.kind()) {
    case ProofTerm::Kind::Ref:
      out += t.name();
      return;
    case ProofTerm::Kind::Nec:
      out += "Nec(";
      render_term(*t.sub(), out);
      out += ')';
      return;
    case ProofTerm::Kind::D:
      out += "D(";
      render_term(*t.major(), out);
      out += ", ";
      render_term(*t.minor(), out);
      out += ')';
      return;
  }
}

}  // namespace

ProofTermPtr parse_proof_term(std::string_view text) { return TermParser(text).run(); }

std::string render(const ProofTerm& t) {
  std::string out;
  render_term(t, out);
  return out;
}

// }}}

// {{{ Rule application

bool is_reserved_variable(std::string_view name) {
  if (name.size() < 2 || name[0] != 'v') return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

namespace {

void first_occurrence(const Formula& f, std::vector<std::string>& order, std::set<std::string>& seen) {
  if (f.closed()) return;
  if (f.op() == Op::Var) {
    if (seen.insert(f.name()).second) order.push_back(f.name());
  } else if (is_unary(f.op())) {
    first_occurrence(f.operand(), order, seen);
  } else {
    first_occurrence(f.lhs(), order, seen);
    first_occurrence(f.rhs(), order, seen);
  }
}

Formula shift(const Formula& f, std::size_t offset, std::size_t* count) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  first_occurrence(f, order, seen);
  Substitution s;
  for (std::size_t i = 0; i < order.size(); ++i)
    s.emplace(order[i], Formula::var("v" + std::to_string(offset + i)));
  if (count) *count = order.size();
  return substitute(f, s);
}

}  // namespace

Formula canonical(const Formula& f) { return shift(f, 0, nullptr); }

Judgement condensed_detach(const Judgement& major, const Judgement& minor) {
  std::size_t n = 0;
  Formula maj = shift(major.formula, 0, &n);
  if (maj.op() != Op::Imp)
    throw ProofError(ProofError::Kind::NotImplication, "D: major premise " + render(major.formula) +
                                                           " is not an implication");
  Formula min = shift(minor.formula, n, nullptr);
  auto sigma = unify(maj.lhs(), min);
  if (!sigma)
    throw ProofError(ProofError::Kind::UnificationFailure,
                     "D: cannot unify " + render(maj.lhs()) + " with " + render(minor.formula));
  return {canonical(substitute(maj.rhs(), *sigma)), major.local_taint || minor.local_taint};
}

Judgement necessitate(const Judgement& j, bool nec_enabled) {
  if (!nec_enabled) throw ProofError(ProofError::Kind::RuleDisabled, "Nec: rule disabled in this system");
  if (j.local_taint)
    throw ProofError(ProofError::Kind::TaintViolation,
                     "Nec: " + render(j.formula) + " depends on a local premise");
  return {Formula::box(j.formula), false};
}

namespace {

Judgement eval(const ProofTerm& t, const LogicSystem& sys, const std::vector<Premise>& premises,
               std::vector<TraceLine>* trace, std::size_t depth) {
  std::optional<Judgement> j;
  switch (t.kind()) {
    case ProofTerm::Kind::Ref: {
      auto p = std::find_if(premises.begin(), premises.end(), [&](const Premise& p) { return p.name == t.name(); });
      const AxiomSchema* s = sys.find(t.name());
      if (p != premises.end() && s)
        throw ProofError(ProofError::Kind::UnresolvedRef, "ambiguous reference " + t.name());
      if (p != premises.end()) {
        j = Judgement{p->formula, p->mode == PremiseMode::Local};
      } else if (s) {
        j = Judgement{canonical(s->body), false};
      } else {
        throw ProofError(ProofError::Kind::UnresolvedRef, "unresolved reference " + t.name());
      }
      break;
    }
    case ProofTerm::Kind::D: {
      Judgement a = eval(*t.major(), sys, premises, trace, depth + 1);
      Judgement b = eval(*t.minor(), sys, premises, trace, depth + 1);
      j = condensed_detach(a, b);
      break;
    }
    case ProofTerm::Kind::Nec:
      j = necessitate(eval(*t.sub(), sys, premises, trace, depth + 1), sys.nec_enabled());
      break;
  }
  if (trace) trace->push_back({depth, render(t), *j});
  return *j;
}

bool match(const Formula& spec, const Formula& gen, Substitution& s) {
  if (gen.op() == Op::Var) {
    auto [it, fresh] = s.emplace(gen.name(), spec);
    return fresh || it->second == spec;
  }
  if (gen.op() != spec.op() || gen.name() != spec.name()) return false;
  if (gen.is_atom()) return true;
  if (is_unary(gen.op())) return match(spec.operand(), gen.operand(), s);
  return match(spec.lhs(), gen.lhs(), s) && match(spec.rhs(), gen.rhs(), s);
}

void boolean_atoms(const Formula& f, std::vector<Formula>& atoms) {
  switch (f.op()) {
    case Op::Not:
      boolean_atoms(f.operand(), atoms);
      return;
    case Op::And:
    case Op::Or:
    case Op::Imp:
    case Op::Iff:
      boolean_atoms(f.lhs(), atoms);
      boolean_atoms(f.rhs(), atoms);
      return;
    default:
      if (std::find(atoms.begin(), atoms.end(), f) == atoms.end()) atoms.push_back(f);
  }
}

bool truth(const Formula& f, const std::vector<Formula>& atoms, unsigned long row) {
  switch (f.op()) {
    case Op::Not:
      return !truth(f.operand(), atoms, row);
    case Op::And:
      return truth(f.lhs(), atoms, row) && truth(f.rhs(), atoms, row);
    case Op::Or:
      return truth(f.lhs(), atoms, row) || truth(f.rhs(), atoms, row);
    case Op::Imp:
      return !truth(f.lhs(), atoms, row) || truth(f.rhs(), atoms, row);
    case Op::Iff:
      return truth(f.lhs(), atoms, row) == truth(f.rhs(), atoms, row);
    default: {
      auto i = std::find(atoms.begin(), atoms.end(), f) - atoms.begin();
      return (row >> i) & 1UL;
    }
  }
}

}  // namespace

Judgement check_proof(const ProofTerm& t, const LogicSystem& system, const std::vector<Premise>& premises,
                      std::vector<TraceLine>* trace) {
  return eval(t, system, premises, trace, 0);
}

std::optional<Substitution> instance_of(const Formula& specific, const Formula& general) {
  Substitution s;
  if (!match(specific, general, s)) return std::nullopt;
  return s;
}

bool is_propositional_tautology(const Formula& f) {
  Formula g = desugar(f);
  std::vector<Formula> atoms;
  boolean_atoms(g, atoms);
  if (atoms.size() > 20) throw std::invalid_argument("tautology check: too many atoms");
  for (unsigned long row = 0; row < (1UL << atoms.size()); ++row)
    if (!truth(g, atoms, row)) return false;
  return true;
}

// }}}

}  // namespace modal
