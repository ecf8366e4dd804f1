#include "modal/kripke.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace modal {

void KripkeModel::validate() const {
  if (n_worlds == 0) throw std::invalid_argument("model: no worlds");
  if (designated >= n_worlds) throw std::invalid_argument("model: designated world out of range");
  for (auto [a, b] : relation)
    if (a >= n_worlds || b >= n_worlds) throw std::invalid_argument("model: relation pair out of range");
  for (const auto& [atom, ws] : valuation) {
    if (!is_identifier(atom)) throw std::invalid_argument("model: bad atom name " + atom);
    for (auto w : ws)
      if (w >= n_worlds) throw std::invalid_argument("model: valuation world out of range");
  }
}

// {{{ Text format

std::string render(const KripkeModel& m) {
  std::ostringstream out;
  out << "model worlds=" << m.n_worlds << " designated=" << m.designated << " rel={";
  bool first = true;
  for (auto [a, b] : m.relation) {
    if (!first) out << ',';
    first = false;
    out << '(' << a << ',' << b << ')';
  }
  out << "} val={";
  first = true;
  for (const auto& [atom, ws] : m.valuation) {
    if (!first) out << ',';
    first = false;
    out << atom << ":[";
    bool f2 = true;
    for (auto w : ws) {
      if (!f2) out << ',';
      f2 = false;
      out << w;
    }
    out << ']';
  }
  out << '}';
  return out.str();
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_ += c;
  }

  KripkeModel run() {
    take("model");
    KripkeModel m;
    bool have_worlds = false;
    while (i_ < s_.size()) {
      if (try_take("worlds=")) {
        m.n_worlds = number();
        have_worlds = true;
      } else if (try_take("designated=")) {
        m.designated = number();
      } else if (try_take("rel={")) {
        while (!try_take("}")) {
          take("(");
          std::size_t a = number();
          take(",");
          std::size_t b = number();
          take(")");
          m.relation.emplace(a, b);
          try_take(",");
        }
      } else if (try_take("val={")) {
        while (!try_take("}")) {
          std::string atom = ident();
          take(":[");
          auto& ws = m.valuation[atom];
          while (!try_take("]")) {
            ws.insert(number());
            try_take(",");
          }
          try_take(",");
        }
      } else {
        fail("unexpected input");
      }
    }
    if (!have_worlds) fail("missing worlds=");
    m.validate();
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw SyntaxError("model: " + msg, i_); }
  bool try_take(std::string_view w) {
    if (s_.compare(i_, w.size(), w) != 0) return false;
    i_ += w.size();
    return true;
  }
  void take(std::string_view w) {
    if (!try_take(w)) fail("expected '" + std::string(w) + "'");
  }
  std::size_t number() {
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j == i_) fail("expected number");
    std::size_t v = std::stoul(s_.substr(i_, j - i_));
    i_ = j;
    return v;
  }
  std::string ident() {
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
    if (j == i_) fail("expected atom name");
    std::string id = s_.substr(i_, j - i_);
    i_ = j;
    return id;
  }

  std::string s_;
  std::size_t i_ = 0;
};

}  // namespace

KripkeModel parse_model(std::string_view text) { return ModelReader(text).run(); }

// }}}

bool eval(const KripkeModel& m, std::size_t w, const Formula& f) {
  switch (f.op()) {
    case Op::Const: {
      auto it = m.valuation.find(f.name());
      return it != m.valuation.end() && it->second.count(w);
    }
    case Op::Var:
      throw std::invalid_argument("eval: formula contains schema variable " + f.name());
    case Op::Not:
      return !eval(m, w, f.operand());
    case Op::And:
      return eval(m, w, f.lhs()) && eval(m, w, f.rhs());
    case Op::Or:
      return eval(m, w, f.lhs()) || eval(m, w, f.rhs());
    case Op::Imp:
      return !eval(m, w, f.lhs()) || eval(m, w, f.rhs());
    case Op::Iff:
      return eval(m, w, f.lhs()) == eval(m, w, f.rhs());
    case Op::Strict:
      return eval(m, w, desugar(f));
    case Op::Box:
      for (auto [a, b] : m.relation)
        if (a == w && !eval(m, b, f.operand())) return false;
      return true;
    case Op::Dia:
      for (auto [a, b] : m.relation)
        if (a == w && eval(m, b, f.operand())) return true;
      return false;
  }
  return false;
}

// {{{ Frames

std::string_view to_string(FrameProperty p) {
  switch (p) {
    case FrameProperty::Reflexive:
      return "reflexive";
    case FrameProperty::Symmetric:
      return "symmetric";
    case FrameProperty::Transitive:
      return "transitive";
    case FrameProperty::Euclidean:
      return "euclidean";
    case FrameProperty::Serial:
      return "serial";
    case FrameProperty::Universal:
      return "universal";
  }
  return "";
}

namespace {

using Mask = std::uint32_t;

struct Frame {
  std::size_t n;
  std::vector<Mask> succ;
};

Frame frame_of(std::size_t n, std::uint64_t rel_bits) {
  Frame f{n, std::vector<Mask>(n, 0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((rel_bits >> (i * n + j)) & 1ULL) f.succ[i] |= Mask{1} << j;
  return f;
}

std::set<FrameProperty> properties(const Frame& f) {
  const std::size_t n = f.n;
  const Mask all = n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1;
  auto has = [&](std::size_t i, std::size_t j) { return (f.succ[i] >> j) & 1U; };
  bool refl = true, sym = true, trans = true, eucl = true, serial = true, univ = true;
  for (std::size_t i = 0; i < n; ++i) {
    refl = refl && has(i, i);
    serial = serial && f.succ[i] != 0;
    univ = univ && f.succ[i] == all;
    for (std::size_t j = 0; j < n; ++j) {
      if (!has(i, j)) continue;
      sym = sym && has(j, i);
      for (std::size_t k = 0; k < n; ++k) {
        if (has(j, k) && !has(i, k)) trans = false;
        if (has(i, k) && !has(j, k)) eucl = false;
      }
    }
  }
  std::set<FrameProperty> out;
  if (refl) out.insert(FrameProperty::Reflexive);
  if (sym) out.insert(FrameProperty::Symmetric);
  if (trans) out.insert(FrameProperty::Transitive);
  if (eucl) out.insert(FrameProperty::Euclidean);
  if (serial) out.insert(FrameProperty::Serial);
  if (univ) out.insert(FrameProperty::Universal);
  return out;
}

Frame frame_of(const KripkeModel& m) {
  Frame f{m.n_worlds, std::vector<Mask>(m.n_worlds, 0)};
  for (auto [a, b] : m.relation) f.succ[a] |= Mask{1} << b;
  return f;
}

}  // namespace

std::set<FrameProperty> frame_properties(const KripkeModel& m) {
  m.validate();
  if (m.n_worlds > 32) throw CapabilityError("frame_properties: more than 32 worlds");
  return properties(frame_of(m));
}

std::string_view to_string(FrameClass c) {
  switch (c) {
    case FrameClass::K:
      return "K";
    case FrameClass::T:
      return "T";
    case FrameClass::KB:
      return "KB";
    case FrameClass::S4:
      return "S4";
    case FrameClass::S5:
      return "S5";
    case FrameClass::Universal:
      return "universal";
  }
  return "";
}

std::optional<FrameClass> parse_frame_class(std::string_view name) {
  for (auto c : {FrameClass::K, FrameClass::T, FrameClass::KB, FrameClass::S4, FrameClass::S5, FrameClass::Universal})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::set<FrameProperty> required_properties(FrameClass c) {
  using P = FrameProperty;
  switch (c) {
    case FrameClass::K:
      return {};
    case FrameClass::T:
      return {P::Reflexive};
    case FrameClass::KB:
      return {P::Symmetric};
    case FrameClass::S4:
      return {P::Reflexive, P::Transitive};
    case FrameClass::S5:
      return {P::Reflexive, P::Symmetric, P::Transitive};
    case FrameClass::Universal:
      return {P::Universal};
  }
  return {};
}

bool in_frame_class(const KripkeModel& m, FrameClass c) {
  auto have = frame_properties(m);
  auto need = required_properties(c);
  return std::includes(have.begin(), have.end(), need.begin(), need.end());
}

// }}}

// {{{ Bitmask evaluation

namespace {

// Formulas compiled to a postorder program over world masks.
class Program {
 public:
  explicit Program(const std::vector<std::string>& atoms) : atoms_(atoms) {}

  std::size_t add(const Formula& f) { return emit(desugar(f)); }

  void run(const Frame& fr, const std::vector<Mask>& atom_masks, std::vector<Mask>& regs) const {
    const std::size_t n = fr.n;
    const Mask all = (Mask{1} << n) - 1;
    regs.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
      const Instr& in = code_[i];
      Mask r = 0;
      switch (in.op) {
        case Op::Const:
          r = atom_masks[in.a];
          break;
        case Op::Not:
          r = ~regs[in.a] & all;
          break;
        case Op::And:
          r = regs[in.a] & regs[in.b];
          break;
        case Op::Or:
          r = regs[in.a] | regs[in.b];
          break;
        case Op::Imp:
          r = (~regs[in.a] | regs[in.b]) & all;
          break;
        case Op::Iff:
          r = ~(regs[in.a] ^ regs[in.b]) & all;
          break;
        case Op::Box:
          for (std::size_t w = 0; w < n; ++w)
            if ((fr.succ[w] & ~regs[in.a]) == 0) r |= Mask{1} << w;
          break;
        case Op::Dia:
          for (std::size_t w = 0; w < n; ++w)
            if (fr.succ[w] & regs[in.a]) r |= Mask{1} << w;
          break;
        default:
          break;
      }
      regs[i] = r;
    }
  }

 private:
  struct Instr {
    Op op;
    std::size_t a = 0, b = 0;
  };

  std::size_t emit(const Formula& f) {
    Instr in{f.op()};
    if (f.op() == Op::Var) throw std::invalid_argument("formula contains schema variable " + f.name());
    if (f.op() == Op::Const) {
      in.a = std::find(atoms_.begin(), atoms_.end(), f.name()) - atoms_.begin();
    } else if (is_unary(f.op())) {
      in.a = emit(f.operand());
    } else {
      in.a = emit(f.lhs());
      in.b = emit(f.rhs());
    }
    code_.push_back(in);
    return code_.size() - 1;
  }

  std::vector<std::string> atoms_;
  std::vector<Instr> code_;
};

std::vector<std::string> atoms_of(const std::vector<ModalPremise>& premises, const Formula& goal) {
  std::set<std::string> s = constants(goal);
  for (const auto& p : premises) {
    if (!p.formula.closed() || !goal.closed()) throw std::invalid_argument("formulas must be closed");
    auto c = constants(p.formula);
    s.insert(c.begin(), c.end());
  }
  if (!goal.closed()) throw std::invalid_argument("formulas must be closed");
  return {s.begin(), s.end()};
}

struct Compiled {
  Program prog;
  std::vector<std::pair<std::size_t, PremiseMode>> premises;
  std::size_t goal;
};

Compiled compile(const std::vector<std::string>& atoms, const std::vector<ModalPremise>& premises,
                 const Formula& goal) {
  Compiled c{Program(atoms), {}, 0};
  for (const auto& p : premises) c.premises.emplace_back(c.prog.add(p.formula), p.mode);
  c.goal = c.prog.add(goal);
  return c;
}

bool refuted_at(const Compiled& c, const std::vector<Mask>& regs, Mask all, std::size_t designated) {
  const Mask d = Mask{1} << designated;
  if (regs[c.goal] & d) return false;
  for (auto [idx, mode] : c.premises) {
    if (mode == PremiseMode::Global ? regs[idx] != all : !(regs[idx] & d)) return false;
  }
  return true;
}

KripkeModel to_model(const Frame& fr, const std::vector<std::string>& atoms, const std::vector<Mask>& masks,
                     std::size_t designated) {
  KripkeModel m;
  m.n_worlds = fr.n;
  m.designated = designated;
  for (std::size_t i = 0; i < fr.n; ++i)
    for (std::size_t j = 0; j < fr.n; ++j)
      if ((fr.succ[i] >> j) & 1U) m.relation.emplace(i, j);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    auto& ws = m.valuation[atoms[k]];
    for (std::size_t w = 0; w < fr.n; ++w)
      if ((masks[k] >> w) & 1U) ws.insert(w);
  }
  return m;
}

}  // namespace

bool refutes(const KripkeModel& m, const std::vector<ModalPremise>& premises, const Formula& goal) {
  m.validate();
  if (eval(m, m.designated, goal)) return false;
  for (const auto& p : premises) {
    if (p.mode == PremiseMode::Local) {
      if (!eval(m, m.designated, p.formula)) return false;
    } else {
      for (std::size_t w = 0; w < m.n_worlds; ++w)
        if (!eval(m, w, p.formula)) return false;
    }
  }
  return true;
}

std::string describe(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Valid:
      return "valid";
    case Verdict::Kind::Countermodel:
      return "countermodel " + render(*v.model);
    case Verdict::Kind::NoCountermodelUpTo:
      return "no countermodel up to " + std::to_string(v.bound) + " worlds";
  }
  return "";
}

Verdict find_countermodel(const std::vector<ModalPremise>& premises, const Formula& goal, FrameClass frame,
                          std::size_t max_worlds) {
  const auto atoms = atoms_of(premises, goal);
  const Compiled c = compile(atoms, premises, goal);
  const auto need = required_properties(frame);
  Verdict v;
  v.bound = max_worlds;
  std::vector<Mask> regs, masks(atoms.size());
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    const std::size_t rel_bits = n * n, val_bits = atoms.size() * n;
    if (rel_bits + val_bits > 30)
      throw CapabilityError("find_countermodel: " + std::to_string(n) + " worlds with " +
                            std::to_string(atoms.size()) + " atoms exceeds the enumeration bound");
    const Mask all = (Mask{1} << n) - 1;
    for (std::uint64_t rel = 0; rel < (1ULL << rel_bits); ++rel) {
      Frame fr = frame_of(n, rel);
      auto have = properties(fr);
      if (!std::includes(have.begin(), have.end(), need.begin(), need.end())) continue;
      for (std::uint64_t val = 0; val < (1ULL << val_bits); ++val) {
        for (std::size_t k = 0; k < atoms.size(); ++k) masks[k] = static_cast<Mask>((val >> (k * n)) & all);
        c.prog.run(fr, masks, regs);
        ++v.models_checked;
        if (refuted_at(c, regs, all, 0)) {
          v.kind = Verdict::Kind::Countermodel;
          v.model = to_model(fr, atoms, masks, 0);
          return v;
        }
      }
    }
  }
  return v;
}

Verdict decide_s5(const std::vector<ModalPremise>& premises, const Formula& goal) {
  const auto atoms = atoms_of(premises, goal);
  if (atoms.size() > 4)
    throw CapabilityError("decide_s5: " + std::to_string(atoms.size()) + " atoms exceed the bound of 4");
  const Compiled c = compile(atoms, premises, goal);

  std::size_t modal = modal_count(desugar(goal));
  for (const auto& p : premises) modal += modal_count(desugar(p.formula)) + (p.mode == PremiseMode::Global ? 1 : 0);
  const std::size_t types = std::size_t{1} << atoms.size();
  Verdict v;
  v.bound = modal + 1;
  const std::size_t max_size = std::min(v.bound, types);

  std::vector<Mask> regs, masks(atoms.size());
  std::vector<std::size_t> pick;
  for (std::size_t size = 1; size <= max_size; ++size) {
    // Combinations of `size` distinct valuation types in lexicographic order.
    pick.resize(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    Frame fr{size, std::vector<Mask>(size, (Mask{1} << size) - 1)};
    const Mask all = (Mask{1} << size) - 1;
    while (true) {
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        masks[k] = 0;
        for (std::size_t w = 0; w < size; ++w)
          if ((pick[w] >> k) & 1U) masks[k] |= Mask{1} << w;
      }
      c.prog.run(fr, masks, regs);
      ++v.models_checked;
      for (std::size_t d = 0; d < size; ++d) {
        if (!refuted_at(c, regs, all, d)) continue;
        // Report with the designated world first.
        std::vector<std::size_t> order{d};
        for (std::size_t w = 0; w < size; ++w)
          if (w != d) order.push_back(w);
        std::vector<Mask> reordered(atoms.size(), 0);
        for (std::size_t k = 0; k < atoms.size(); ++k)
          for (std::size_t w = 0; w < size; ++w)
            if ((masks[k] >> order[w]) & 1U) reordered[k] |= Mask{1} << w;
        v.kind = Verdict::Kind::Countermodel;
        v.model = to_model(fr, atoms, reordered, 0);
        return v;
      }
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == types - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  v.kind = Verdict::Kind::Valid;
  return v;
}

// }}}

// {{{ Derivations

void Derivation::validate() const {
  std::set<std::string> seen;
  for (const auto& l : lines) {
    for (const auto& c : l.cites)
      if (!seen.count(c)) throw std::invalid_argument("line " + l.label + " cites " + c + ", not an earlier line");
    if (l.kind == DerivationLine::Kind::From && l.cites.empty())
      throw std::invalid_argument("line " + l.label + ": inference without cited lines");
    if (!seen.insert(l.label).second) throw std::invalid_argument("duplicate line label " + l.label);
  }
}

bool DerivationReport::passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const LineReport& l) { return l.ok(); });
}

std::vector<std::string> DerivationReport::failing() const {
  std::vector<std::string> out;
  for (const auto& l : lines)
    if (!l.ok()) out.push_back(l.label);
  return out;
}

DerivationReport check_derivation(const Derivation& d, FrameClass frame, std::size_t max_worlds) {
  d.validate();
  DerivationReport report;
  report.exact = frame == FrameClass::S5 || frame == FrameClass::Universal;
  std::map<std::string, const DerivationLine*> by_label;
  for (const auto& line : d.lines) {
    LineReport r;
    r.label = line.label;
    if (line.kind == DerivationLine::Kind::Premise) {
      r.status = LineReport::Status::Premise;
    } else {
      std::vector<ModalPremise> from;
      for (const auto& c : line.cites) {
        const DerivationLine* cited = by_label.at(c);
        const bool premise = cited->kind == DerivationLine::Kind::Premise;
        from.push_back({cited->formula, premise ? d.premise_mode : PremiseMode::Local});
      }
      Verdict v = report.exact ? decide_s5(from, line.formula)
                               : find_countermodel(from, line.formula, frame, max_worlds);
      r.bound = v.bound;
      if (v.kind == Verdict::Kind::Countermodel) {
        r.status = LineReport::Status::Refuted;
        r.model = v.model;
      } else {
        r.status = v.kind == Verdict::Kind::Valid ? LineReport::Status::Pass : LineReport::Status::NoCountermodelUpTo;
      }
    }
    by_label[line.label] = &line;
    report.lines.push_back(std::move(r));
  }
  return report;
}

// }}}

}  // namespace modal
