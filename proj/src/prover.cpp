#include "modal/prover.hpp"

#include "modal/kripke.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>
#include <unordered_set>

namespace modal {

namespace {

// {{{ Compact terms

template <typename Sig>
class FunctionRef;

template <typename R, typename... Args>
class FunctionRef<R(Args...)> {
 public:
  template <typename F, typename = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FunctionRef>>>
  FunctionRef(F&& f)  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(&f))),
        call_([](void* o, Args... a) -> R { return (*static_cast<std::remove_reference_t<F>*>(o))(a...); }) {}
  R operator()(Args... a) const { return call_(obj_, a...); }

 private:
  void* obj_;
  R (*call_)(void*, Args...);
};

// Preorder node; `size` is the subtree size, so the right child of a binary
// node at i sits at i + 1 + nodes[i + 1].size.
struct PNode {
  Op op;
  std::int32_t sym;
  std::int32_t size;
  bool operator==(const PNode& o) const { return op == o.op && sym == o.sym && size == o.size; }
};

// Formula with variables numbered 0..nvars-1 in first-occurrence order.
struct Pattern {
  std::vector<PNode> nodes;
  std::int32_t nvars = 0;

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& n : nodes) {
      h = (h ^ static_cast<std::size_t>(n.op)) * 1099511628211ULL;
      h = (h ^ static_cast<std::size_t>(n.sym + 7)) * 1099511628211ULL;
    }
    return h;
  }
  bool operator==(const Pattern& o) const { return nodes == o.nodes; }
  std::int32_t rhs(std::int32_t i) const { return i + 1 + nodes[i + 1].size; }
};

struct PatternHash {
  std::size_t operator()(const Pattern& p) const { return p.hash(); }
};

class Symbols {
 public:
  std::int32_t intern(const std::string& s) {
    auto [it, fresh] = ids_.emplace(s, static_cast<std::int32_t>(names_.size()));
    if (fresh) names_.push_back(s);
    return it->second;
  }
  const std::string& name(std::int32_t id) const { return names_[id]; }

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> names_;
};

void to_pattern(const Formula& f, Symbols& syms, std::unordered_map<std::string, std::int32_t>& vmap,
                Pattern& out) {
  const auto at = out.nodes.size();
  out.nodes.push_back({f.op(), -1, 0});
  if (f.op() == Op::Var) {
    auto [it, fresh] = vmap.emplace(f.name(), out.nvars);
    if (fresh) ++out.nvars;
    out.nodes[at].sym = it->second;
  } else if (f.op() == Op::Const) {
    out.nodes[at].sym = syms.intern(f.name());
  } else if (is_unary(f.op())) {
    to_pattern(f.operand(), syms, vmap, out);
  } else {
    to_pattern(f.lhs(), syms, vmap, out);
    to_pattern(f.rhs(), syms, vmap, out);
  }
  out.nodes[at].size = static_cast<std::int32_t>(out.nodes.size() - at);
}

Pattern to_pattern(const Formula& f, Symbols& syms) {
  Pattern p;
  std::unordered_map<std::string, std::int32_t> vmap;
  to_pattern(desugar(f), syms, vmap, p);
  return p;
}

Formula to_formula(const Pattern& p, std::int32_t i, const Symbols& syms) {
  const PNode& n = p.nodes[i];
  switch (n.op) {
    case Op::Var:
      return Formula::var("v" + std::to_string(n.sym));
    case Op::Const:
      return Formula::constant(syms.name(n.sym));
    default:
      if (is_unary(n.op)) return Formula::make(n.op, to_formula(p, i + 1, syms));
      return Formula::make(n.op, to_formula(p, i + 1, syms), to_formula(p, p.rhs(i), syms));
  }
}

bool subtree_equal(const Pattern& p, std::int32_t i, std::int32_t j) {
  const auto n = p.nodes[i].size;
  if (p.nodes[j].size != n) return false;
  return std::equal(p.nodes.begin() + i, p.nodes.begin() + i + n, p.nodes.begin() + j);
}

// One-sided matching of general pattern g (at gi) into specific s (at si).
bool match(const Pattern& s, std::int32_t si, const Pattern& g, std::int32_t gi, std::vector<std::int32_t>& bind) {
  const PNode& gn = g.nodes[gi];
  if (gn.op == Op::Var) {
    std::int32_t& b = bind[gn.sym];
    if (b < 0) {
      b = si;
      return true;
    }
    return subtree_equal(s, b, si);
  }
  const PNode& sn = s.nodes[si];
  if (gn.op != sn.op) return false;
  if (gn.op == Op::Const) return gn.sym == sn.sym;
  if (gn.size > sn.size) return false;
  if (is_unary(gn.op)) return match(s, si + 1, g, gi + 1, bind);
  return match(s, si + 1, g, gi + 1, bind) && match(s, s.rhs(si), g, g.rhs(gi), bind);
}

bool is_instance(const Pattern& specific, const Pattern& general) {
  if (general.nodes.size() > specific.nodes.size()) return false;
  if (static_cast<std::size_t>(general.nvars) > specific.nodes.size()) return false;
  thread_local std::vector<std::int32_t> bind;
  bind.assign(general.nvars, -1);
  return match(specific, 0, general, 0, bind);
}

// Term bank with trail-based variable bindings.
class Bank {
 public:
  struct Node {
    Op op;
    std::int32_t sym;
    std::int32_t a, b;
  };

  struct Mark {
    std::size_t nodes, trail, vars;
  };

  Mark mark() const { return {nodes_.size(), trail_.size(), binding_.size()}; }
  void undo(const Mark& m) {
    while (trail_.size() > m.trail) {
      binding_[trail_.back()] = -1;
      trail_.pop_back();
    }
    nodes_.resize(m.nodes);
    binding_.resize(m.vars);
  }

  std::int32_t make(Op op, std::int32_t sym, std::int32_t a = -1, std::int32_t b = -1) {
    nodes_.push_back({op, sym, a, b});
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }
  std::int32_t fresh_var() {
    binding_.push_back(-1);
    return make(Op::Var, static_cast<std::int32_t>(binding_.size() - 1));
  }
  // Some node standing for variable v.
  std::int32_t var_node(std::int32_t v) {
    const std::int32_t b = binding_[v];
    return b >= 0 ? b : make(Op::Var, v);
  }
  const Node& at(std::int32_t t) const { return nodes_[t]; }

  std::int32_t deref(std::int32_t t) const {
    while (nodes_[t].op == Op::Var) {
      std::int32_t b = binding_[nodes_[t].sym];
      if (b < 0) break;
      t = b;
    }
    return t;
  }

  std::int32_t instantiate(const Pattern& p) {
    std::int32_t base = static_cast<std::int32_t>(binding_.size());
    binding_.resize(binding_.size() + p.nvars, -1);
    std::vector<std::int32_t> var_nodes(p.nvars, -1);
    return build(p, 0, base, var_nodes);
  }

  bool occurs(std::int32_t var, std::int32_t t) const {
    t = deref(t);
    const Node& n = nodes_[t];
    if (n.op == Op::Var) return n.sym == var;
    if (n.op == Op::Const) return false;
    if (is_unary(n.op)) return occurs(var, n.a);
    return occurs(var, n.a) || occurs(var, n.b);
  }

  bool unify(std::int32_t x, std::int32_t y) {
    x = deref(x);
    y = deref(y);
    if (x == y) return true;
    const Node& nx = nodes_[x];
    const Node& ny = nodes_[y];
    if (nx.op == Op::Var) return bind(nx.sym, y);
    if (ny.op == Op::Var) return bind(ny.sym, x);
    if (nx.op != ny.op) return false;
    if (nx.op == Op::Const) return nx.sym == ny.sym;
    if (is_unary(nx.op)) return unify(nx.a, ny.a);
    const std::int32_t xb = nx.b, yb = ny.b;
    return unify(nx.a, ny.a) && unify(xb, yb);
  }

  // Cheap necessary condition for unifying pattern node i with term t:
  // operators agree down to `depth`, variables on either side match anything.
  bool may_unify(const Pattern& p, std::int32_t i, std::int32_t t, int depth) const {
    const PNode& pn = p.nodes[i];
    if (pn.op == Op::Var) return true;
    t = deref(t);
    const Node& n = nodes_[t];
    if (n.op == Op::Var) return true;
    if (n.op != pn.op) return false;
    if (n.op == Op::Const) return n.sym == pn.sym;
    if (depth == 0) return true;
    if (!may_unify(p, i + 1, n.a, depth - 1)) return false;
    return is_unary(n.op) || may_unify(p, p.rhs(i), n.b, depth - 1);
  }

  // Unbound variable ids (symbol numbers) reachable from t.
  void free_vars(std::int32_t t, std::vector<std::int32_t>& out) const {
    t = deref(t);
    const Node& n = nodes_[t];
    if (n.op == Op::Var) {
      if (std::find(out.begin(), out.end(), n.sym) == out.end()) out.push_back(n.sym);
    } else if (n.op != Op::Const) {
      free_vars(n.a, out);
      if (!is_unary(n.op)) free_vars(n.b, out);
    }
  }

  // Joint canonical pattern of the given variables' current values, as
  // the children of an And chain.
  std::optional<Pattern> extract_values(const std::vector<std::int32_t>& vars, std::size_t cap) {
    Pattern p;
    std::unordered_map<std::int32_t, std::int32_t> vmap;
    for (std::int32_t v : vars) {
      p.nodes.push_back({Op::And, -1, 0});
      const auto at = p.nodes.size() - 1;
      if (!extract(var_node(v), cap, vmap, p)) return std::nullopt;
      p.nodes[at].size = static_cast<std::int32_t>(p.nodes.size() - at);
    }
    return p;
  }

  // Canonical pattern of the dereferenced term; nullopt if it exceeds cap.
  std::optional<Pattern> extract(std::int32_t t, std::size_t cap) const {
    Pattern p;
    std::unordered_map<std::int32_t, std::int32_t> vmap;
    if (!extract(t, cap, vmap, p)) return std::nullopt;
    return p;
  }

 private:
  bool bind(std::int32_t var, std::int32_t t) {
    if (occurs(var, t)) return false;
    binding_[var] = t;
    trail_.push_back(var);
    return true;
  }

  std::int32_t build(const Pattern& p, std::int32_t i, std::int32_t base, std::vector<std::int32_t>& var_nodes) {
    const PNode& n = p.nodes[i];
    if (n.op == Op::Var) {
      if (var_nodes[n.sym] < 0) var_nodes[n.sym] = make(Op::Var, base + n.sym);
      return var_nodes[n.sym];
    }
    if (n.op == Op::Const) return make(Op::Const, n.sym);
    if (is_unary(n.op)) {
      std::int32_t a = build(p, i + 1, base, var_nodes);
      return make(n.op, -1, a);
    }
    std::int32_t a = build(p, i + 1, base, var_nodes);
    std::int32_t b = build(p, p.rhs(i), base, var_nodes);
    return make(n.op, -1, a, b);
  }

  bool extract(std::int32_t t, std::size_t cap, std::unordered_map<std::int32_t, std::int32_t>& vmap,
               Pattern& out) const {
    if (out.nodes.size() >= cap) return false;
    t = deref(t);
    const Node& n = nodes_[t];
    const auto at = out.nodes.size();
    out.nodes.push_back({n.op, n.sym, 0});
    if (n.op == Op::Var) {
      auto [it, fresh] = vmap.emplace(n.sym, out.nvars);
      if (fresh) ++out.nvars;
      out.nodes[at].sym = it->second;
    } else if (n.op != Op::Const) {
      out.nodes[at].sym = -1;
      if (!extract(n.a, cap, vmap, out)) return false;
      if (!is_unary(n.op) && !extract(n.b, cap, vmap, out)) return false;
    }
    out.nodes[at].size = static_cast<std::int32_t>(out.nodes.size() - at);
    return true;
  }

  std::vector<Node> nodes_;
  std::vector<std::int32_t> binding_;
  std::vector<std::int32_t> trail_;
};

// }}}

// {{{ Theorem table

struct Entry {
  Pattern pat;
  bool taint = false;
  std::size_t level = 0;
  ProofTermPtr term;
  bool dead = false;
};

// Op of a child root for indexing; Var collapses to a wildcard.
std::uint32_t child_key(const Pattern& p, std::int32_t i) { return static_cast<std::uint32_t>(p.nodes[i].op); }

std::uint32_t index_key(const Pattern& p) {
  const PNode& r = p.nodes[0];
  std::uint32_t k = static_cast<std::uint32_t>(r.op) << 16;
  if (r.op == Op::Var || r.op == Op::Const) return k | 0xffff;
  k |= child_key(p, 1) << 8;
  k |= is_unary(r.op) ? 0xff : child_key(p, p.rhs(0));
  return k;
}

// Index keys under which a pattern having `pat` as an instance is filed.
std::size_t general_keys(const Pattern& pat, std::uint32_t keys[4]) {
  const PNode& r = pat.nodes[0];
  const std::uint32_t base = static_cast<std::uint32_t>(r.op) << 16;
  std::size_t nk = 0;
  if (r.op == Op::Var || r.op == Op::Const) {
    keys[nk++] = base | 0xffff;
  } else if (is_unary(r.op)) {
    keys[nk++] = base | child_key(pat, 1) << 8 | 0xff;
    if (child_key(pat, 1) != static_cast<std::uint32_t>(Op::Var))
      keys[nk++] = base | static_cast<std::uint32_t>(Op::Var) << 8 | 0xff;
  } else {
    const std::uint32_t l = child_key(pat, 1), rr = child_key(pat, pat.rhs(0));
    const std::uint32_t v = static_cast<std::uint32_t>(Op::Var);
    keys[nk++] = base | l << 8 | rr;
    if (rr != v) keys[nk++] = base | l << 8 | v;
    if (l != v) keys[nk++] = base | v << 8 | rr;
    if (l != v && rr != v) keys[nk++] = base | v << 8 | v;
  }
  return nk;
}

class Table {
 public:
  Table(Symbols& syms, const SearchLimits& limits) : syms_(syms), limits_(limits) {}

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<std::size_t>& level(std::size_t l) const { return levels_[l]; }
  std::size_t levels() const { return levels_.size(); }
  bool complete(std::size_t l) const { return l < levels_.size() && complete_[l]; }
  std::size_t live() const { return live_; }

  void begin_level() {
    levels_.emplace_back();
    complete_.push_back(true);
  }
  void mark_truncated() { complete_.back() = false; }
  bool full() const { return live_ >= limits_.max_theorems; }

  // Adds a candidate unless it is a duplicate or subsumed.
  bool add(Pattern pat, bool taint, ProofTermPtr term) {
    const std::size_t lvl = levels_.size() - 1;
    auto dup = seen_.find(pat);
    if (dup != seen_.end()) {
      const Entry& e = entries_[dup->second];
      if (!e.dead && (!e.taint || taint)) return false;
      if (!e.dead && e.level == lvl && e.taint && !taint) kill(dup->second);
    }
    if (limits_.subsumption && subsumed(pat, taint)) return false;
    if (limits_.subsumption) backward(pat, taint, lvl);
    const std::size_t id = entries_.size();
    entries_.push_back({pat, taint, lvl, std::move(term), false});
    seen_[entries_.back().pat] = id;
    by_key_[index_key(entries_.back().pat)].push_back(id);
    levels_.back().push_back(id);
    ++live_;
    return true;
  }

 private:
  void kill(std::size_t id) {
    if (entries_[id].dead) return;
    entries_[id].dead = true;
    --live_;
  }

  bool subsumed(const Pattern& pat, bool taint) const {
    std::uint32_t keys[4];
    const std::size_t nk = general_keys(pat, keys);
    for (std::size_t k = 0; k < nk; ++k) {
      auto it = by_key_.find(keys[k]);
      if (it == by_key_.end()) continue;
      for (std::size_t id : it->second) {
        const Entry& e = entries_[id];
        if (e.dead || (e.taint && !taint)) continue;
        if (is_instance(pat, e.pat)) return true;
      }
    }
    return false;
  }

  // Only entries of the current level are removed, so retained proofs stay
  // minimal in size.
  void backward(const Pattern& pat, bool taint, std::size_t lvl) {
    for (std::size_t id : levels_[lvl]) {
      Entry& e = entries_[id];
      if (e.dead || (taint && !e.taint)) continue;
      if (is_instance(e.pat, pat)) kill(id);
    }
  }

  Symbols& syms_;
  SearchLimits limits_;
  std::vector<Entry> entries_;
  std::vector<std::vector<std::size_t>> levels_;
  std::vector<bool> complete_;
  std::unordered_map<Pattern, std::size_t, PatternHash> seen_;
  std::unordered_map<std::uint32_t, std::vector<std::size_t>> by_key_;
  std::size_t live_ = 0;
};

// }}}

struct Leaf {
  std::string name;
  Formula formula;
  bool taint;
};

std::vector<Leaf> leaves_of(const LogicSystem& system, const std::vector<Premise>& premises) {
  std::vector<Leaf> out;
  for (const auto& p : premises) out.push_back({p.name, p.formula, p.mode == PremiseMode::Local});
  for (const auto& s : system.schemas()) out.push_back({s.name, s.body, false});
  std::sort(out.begin(), out.end(), [](const Leaf& a, const Leaf& b) { return a.name < b.name; });
  return out;
}

void box_operands(const Formula& f, std::vector<Formula>& out) {
  if (f.is_atom()) return;
  if (f.op() == Op::Box && f.operand().op() != Op::Var) out.push_back(f.operand());
  if (is_unary(f.op())) {
    box_operands(f.operand(), out);
  } else {
    box_operands(f.lhs(), out);
    box_operands(f.rhs(), out);
  }
}

// Box positions Nec results may be consumed at: operands of N inside the
// goal and inside antecedents of leaves. Bare variables carry no
// information and are skipped, so this is a heuristic filter.
std::vector<Formula> nec_targets(const std::vector<Leaf>& leaves, const Formula* goal) {
  std::vector<Formula> out;
  for (const auto& l : leaves) {
    Formula f = desugar(l.formula);
    while (f.op() == Op::Imp) {
      box_operands(f.lhs(), out);
      f = f.rhs();
    }
  }
  if (goal) box_operands(desugar(*goal), out);
  return out;
}

// Frame class whose models validate every theorem of `system` derived from
// `premises`; only unmodified named systems with closed premises have one.
std::optional<FrameClass> semantics_of(const LogicSystem& system, const std::vector<Premise>& premises) {
  if (!LogicSystem::is_named(system.name())) return std::nullopt;
  const LogicSystem ref = LogicSystem::named(system.name());
  const auto& a = ref.schemas();
  const auto& b = system.schemas();
  if (a.size() != b.size()) return std::nullopt;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || !(a[i].body == b[i].body)) return std::nullopt;
  for (const auto& p : premises)
    if (!p.formula.closed()) return std::nullopt;
  return parse_frame_class(system.name());
}

class Engine {
 public:
  Engine(const LogicSystem& system, const std::vector<Premise>& premises, const SearchLimits& limits,
         const Formula* goal)
      : system_(system), premises_(premises), limits_(limits), table_(syms_, limits) {
    leaves_ = leaves_of(system, premises);
    if (goal) frame_ = semantics_of(system, premises);
    for (const auto& l : leaves_) leaf_pats_.push_back(to_pattern(l.formula, syms_));
    for (const auto& t : nec_targets(leaves_, goal)) targets_.push_back(to_pattern(t, syms_));
  }

  Symbols& syms() { return syms_; }
  Table& table() { return table_; }
  Bank& bank() { return bank_; }
  bool truncated() const { return truncated_; }

  void build_levels(std::size_t depth) {
    table_.begin_level();
    for (const auto& l : leaves_) table_.add(to_pattern(l.formula, syms_), l.taint, ProofTerm::ref(l.name));
    for (std::size_t lvl = 1; lvl <= depth; ++lvl) {
      table_.begin_level();
      if (!build_level(lvl)) {
        table_.mark_truncated();
        truncated_ = true;
        return;
      }
    }
  }

  // Proof of `goal` with exactly n nodes; calls k on each candidate until
  // it returns true.
  bool solve(std::int32_t goal, std::size_t n, bool untainted, FunctionRef<bool(const ProofTermPtr&)> k) {
    ++nodes_;
    goal = bank_.deref(goal);
    const bool open = bank_.at(goal).op == Op::Var;
    if (open && n > 0) return false;

    const Solutions* sols = solutions(goal, n, untainted);
    if (!sols) return search(goal, n, untainted, k);
    for (std::size_t i = 0; i < sols->size(); ++i) {
      const auto m = bank_.mark();
      bool stop = bank_.unify(goal, bank_.instantiate((*sols)[i].first)) && k((*sols)[i].second);
      bank_.undo(m);
      if (stop) return true;
    }
    return false;
  }

  std::size_t nodes() const { return nodes_; }

 private:
  bool search(std::int32_t goal, std::size_t n, bool untainted, FunctionRef<bool(const ProofTermPtr&)> k) {
    if (table_.complete(n)) return lookup(goal, n, untainted, k);
    if (system_.nec_enabled() && n > 0 && bank_.at(goal).op == Op::Box) {
      const std::int32_t body = bank_.at(goal).a;
      if (solve(body, n - 1, true, [&](const ProofTermPtr& sub) { return k(ProofTerm::nec(sub)); })) return true;
    }
    for (std::size_t h = 0; h < leaf_pats_.size(); ++h) {
      if (untainted && leaves_[h].taint) continue;
      if (spine(h, goal, n, untainted, k)) return true;
    }
    return false;
  }

  // Proofs D(...D(D(leaf, m1), m2)..., mk) whose k-th consequent of the
  // leaf unifies with the goal; the minors share the remaining budget.
  bool spine(std::size_t h, std::int32_t goal, std::size_t n, bool untainted,
             FunctionRef<bool(const ProofTermPtr&)>& k) {
    const Pattern& pat = leaf_pats_[h];
    std::int32_t pi = 0;
    std::size_t arity = 0;
    while (pat.nodes[pi].op == Op::Imp && arity < n) {
      ++arity;
      pi = pat.rhs(pi);
      if (!bank_.may_unify(pat, pi, goal, 3)) continue;
      // A bare variable consequent matches every goal; with two or more
      // minors this floods the search, so such spines are not tried.
      if (arity >= 2 && pat.nodes[pi].op == Op::Var) continue;
      const auto m = bank_.mark();
      std::int32_t t = bank_.instantiate(pat);
      std::vector<std::int32_t> ants;
      for (std::size_t i = 0; i < arity; ++i) {
        ants.push_back(bank_.at(t).a);
        t = bank_.at(t).b;
      }
      bool stop = false;
      if (bank_.unify(t, goal)) {
        std::vector<ProofTermPtr> minors(arity);
        const ProofTermPtr head = ProofTerm::ref(leaves_[h].name);
        stop = minors_from(ants, arity, n - arity, untainted, minors, head, goal, k);
      }
      bank_.undo(m);
      if (stop) return true;
    }
    return false;
  }

  // Fixed nodes of a term; the most instantiated minor is solved first.
  std::size_t rigidity(std::int32_t t) const {
    t = bank_.deref(t);
    const Bank::Node& n = bank_.at(t);
    if (n.op == Op::Var) return 0;
    if (n.op == Op::Const) return 1;
    return 1 + rigidity(n.a) + (is_unary(n.op) ? 0 : rigidity(n.b));
  }

  // Minors are solved most instantiated first. Only the bindings of
  // variables shared with the goal or the remaining minors matter to the
  // continuation, so solutions agreeing on those are tried once. A minor
  // sharing nothing only needs a proof of the smallest size that has one:
  // with a larger one, swapping in the smaller proof would give a shorter
  // proof overall, which an earlier deepening round would have returned.
  bool minors_from(const std::vector<std::int32_t>& ants, std::size_t left, std::size_t rem, bool untainted,
                   std::vector<ProofTermPtr>& minors, const ProofTermPtr& head, std::int32_t goal,
                   FunctionRef<bool(const ProofTermPtr&)>& k) {
    std::size_t at = ants.size(), best = 0;
    for (std::size_t i = 0; i < ants.size(); ++i) {
      if (minors[i]) continue;
      const std::size_t r = rigidity(ants[i]);
      if (at == ants.size() || r > best) at = i, best = r;
    }
    std::vector<std::int32_t> outside, mine, shared;
    bank_.free_vars(goal, outside);
    for (std::size_t i = 0; i < ants.size(); ++i)
      if (!minors[i] && i != at) bank_.free_vars(ants[i], outside);
    bank_.free_vars(ants[at], mine);
    for (std::int32_t v : mine)
      if (std::find(outside.begin(), outside.end(), v) != outside.end()) shared.push_back(v);
    std::sort(shared.begin(), shared.end());

    auto finish = [&](const ProofTermPtr& t, std::size_t sz) {
      minors[at] = t;
      bool r;
      if (left == 1) {
        ProofTermPtr term = head;
        for (const auto& mn : minors) term = ProofTerm::d(term, mn);
        r = k(term);
      } else {
        r = minors_from(ants, left - 1, rem - sz, untainted, minors, head, goal, k);
      }
      minors[at] = nullptr;
      return r;
    };

    const std::size_t lo = left == 1 ? rem : 0;
    for (std::size_t sz = 0; sz <= rem; ++sz) {
      if (shared.empty()) {
        // Existence only.
        const auto m = bank_.mark();
        bool stop = false, any = false;
        solve(ants[at], sz, untainted, [&](const ProofTermPtr& t) {
          any = true;
          if (sz >= lo) stop = finish(t, sz);
          return true;
        });
        bank_.undo(m);
        if (any) return stop;
        continue;
      }
      if (sz < lo) continue;
      std::unordered_set<Pattern, PatternHash> seen;
      bool stop = solve(ants[at], sz, untainted, [&](const ProofTermPtr& t) {
        std::optional<Pattern> key = bank_.extract_values(shared, cap());
        if (key && !seen.insert(std::move(*key)).second) return false;
        return finish(t, sz);
      });
      if (stop) return true;
    }
    return false;
  }

  using Solutions = std::vector<std::pair<Pattern, ProofTermPtr>>;

  // A small countermodel shows a closed subgoal has no proof at any size.
  // `key` carries the size as its last node.
  bool refuted(const Pattern& key, bool untainted) {
    if (!frame_) return false;
    Pattern p{std::vector<PNode>(key.nodes.begin(), key.nodes.end() - 1), 0};
    p.nodes.push_back({Op::Const, untainted ? 1 : 0, 0});
    if (auto it = refuted_.find(p); it != refuted_.end()) return it->second;
    std::vector<ModalPremise> ps;
    for (const auto& pr : premises_)
      if (pr.mode == PremiseMode::Global || !untainted) ps.push_back({pr.formula, pr.mode});
    bool out = false;
    try {
      out = find_countermodel(ps, to_formula(key, 0, syms_), *frame_, 2).kind == Verdict::Kind::Countermodel;
    } catch (const CapabilityError&) {
    }
    refuted_.emplace(std::move(p), out);
    return out;
  }

  std::size_t cap() const { return limits_.max_formula_size * 4; }

  // Subgoals are tabled up to variable renaming: the distinct solutions of
  // each exact size are computed once and replayed. Sizes strictly
  // decrease in recursive calls, so there are no cycles.
  //
  // A ground goal binds nothing, so one solution is as good as any, and
  // none is needed at size n if it has one at a smaller size: the smaller
  // proof completes whatever the larger one does, giving a shorter proof
  // that an earlier deepening round would have returned.
  const Solutions* solutions(std::int32_t goal, std::size_t n, bool untainted) {
    std::optional<Pattern> key = bank_.extract(goal, cap());
    if (!key) return nullptr;
    key->nodes.push_back({Op::Const, static_cast<std::int32_t>(n * 2 + (untainted ? 1 : 0)), 0});
    if (auto it = memo_.find(*key); it != memo_.end()) return &it->second;

    const bool ground = key->nvars == 0;
    bool skip = ground && refuted(*key, untainted);
    for (std::size_t s = 0; ground && !skip && s < n; ++s) {
      const Solutions* p = solutions(goal, s, untainted);
      skip = p && !p->empty();
    }
    Solutions out;
    if (!skip) {
      std::unordered_set<Pattern, PatternHash> seen;
      search(goal, n, untainted, [&](const ProofTermPtr& t) {
        std::optional<Pattern> p = bank_.extract(goal, cap());
        if (p && p->nodes.size() <= limits_.max_formula_size && seen.insert(*p).second)
          out.emplace_back(std::move(*p), t);
        return ground && !out.empty();
      });
    }
    return &memo_.emplace(std::move(*key), std::move(out)).first->second;
  }

  bool usable(const Entry& e, bool untainted) const { return !e.dead && !(untainted && e.taint); }

  bool lookup(std::int32_t goal, std::size_t n, bool untainted, FunctionRef<bool(const ProofTermPtr&)>& k) {
    const auto& ids = table_.level(n);
    for (std::size_t idx = 0; idx < ids.size(); ++idx) {
      const Entry& e = table_.entries()[ids[idx]];
      if (!usable(e, untainted) || !bank_.may_unify(e.pat, 0, goal, 3)) continue;
      const auto m = bank_.mark();
      std::int32_t t = bank_.instantiate(e.pat);
      bool stop = bank_.unify(goal, t) && k(e.term);
      bank_.undo(m);
      if (stop) return true;
    }
    return false;
  }

  bool nec_relevant(const Pattern& p) {
    if (targets_.empty()) return false;
    for (const auto& t : targets_) {
      const auto m = bank_.mark();
      bool ok = bank_.unify(bank_.instantiate(p), bank_.instantiate(t));
      bank_.undo(m);
      if (ok) return true;
    }
    return false;
  }

  // Returns false when max_theorems cut the level short.
  bool build_level(std::size_t lvl) {
    for (std::size_t i = 0; i < lvl; ++i) {
      const std::size_t j = lvl - 1 - i;
      const std::vector<std::size_t> majors = table_.level(i);
      const std::vector<std::size_t> minors = table_.level(j);
      for (std::size_t mi : majors) {
        if (table_.entries()[mi].dead) continue;
        if (table_.entries()[mi].pat.nodes[0].op != Op::Imp) continue;
        for (std::size_t ni : minors) {
          const Entry& maj = table_.entries()[mi];
          const Entry& min = table_.entries()[ni];
          if (maj.dead || min.dead) continue;
          const auto m = bank_.mark();
          std::int32_t t = bank_.instantiate(maj.pat);
          std::int32_t c = bank_.instantiate(min.pat);
          std::optional<Pattern> res;
          if (bank_.unify(bank_.at(t).a, c)) res = bank_.extract(bank_.at(t).b, limits_.max_formula_size + 1);
          bank_.undo(m);
          if (!res || res->nodes.size() > limits_.max_formula_size) continue;
          const bool taint = maj.taint || min.taint;
          ProofTermPtr term = ProofTerm::d(maj.term, min.term);
          table_.add(std::move(*res), taint, std::move(term));
          if (table_.full()) return false;
        }
      }
    }
    if (system_.nec_enabled()) {
      const std::vector<std::size_t> prev = table_.level(lvl - 1);
      for (std::size_t id : prev) {
        const Entry& e = table_.entries()[id];
        if (e.dead || e.taint) continue;
        if (e.pat.nodes.size() + 1 > limits_.max_formula_size) continue;
        if (!nec_relevant(e.pat)) continue;
        Pattern p;
        p.nvars = e.pat.nvars;
        p.nodes.reserve(e.pat.nodes.size() + 1);
        p.nodes.push_back({Op::Box, -1, static_cast<std::int32_t>(e.pat.nodes.size() + 1)});
        p.nodes.insert(p.nodes.end(), e.pat.nodes.begin(), e.pat.nodes.end());
        table_.add(std::move(p), false, ProofTerm::nec(e.term));
        if (table_.full()) return false;
      }
    }
    return true;
  }

  const LogicSystem& system_;
  const std::vector<Premise>& premises_;
  SearchLimits limits_;
  Symbols syms_;
  Table table_;
  Bank bank_;
  std::vector<Leaf> leaves_;
  std::vector<Pattern> leaf_pats_;
  std::vector<Pattern> targets_;
  bool truncated_ = false;
  std::size_t nodes_ = 0;
  std::unordered_map<Pattern, Solutions, PatternHash> memo_;
  std::unordered_map<Pattern, bool, PatternHash> refuted_;
  std::optional<FrameClass> frame_;
};

void check_limits(const SearchLimits& l) {
  if (l.max_formula_size == 0 || l.max_theorems == 0)
    throw std::invalid_argument("search limits must be positive");
}

}  // namespace

SearchResult prove(const LogicSystem& system, const std::vector<Premise>& premises, const Formula& goal,
                   const SearchLimits& limits) {
  check_limits(limits);
  Formula g = desugar(goal);
  if (!g.closed()) throw std::invalid_argument("prove: goal must be closed");
  Engine engine(system, premises, limits, &g);
  engine.build_levels(std::min(limits.table_depth, limits.max_term_size));

  SearchResult result;
  result.table_size = engine.table().live();
  Pattern gp = to_pattern(g, engine.syms());
  for (std::size_t n = 0; n <= limits.max_term_size; ++n) {
    auto& bank = engine.bank();
    const auto m = bank.mark();
    std::int32_t gt = bank.instantiate(gp);
    bool found = engine.solve(gt, n, false, [&](const ProofTermPtr& term) {
      // The kernel has the final word on every candidate.
      try {
        Judgement j = check_proof(*term, system, premises);
        if (!instance_of(g, j.formula)) return false;
        result.found = true;
        result.term = term;
        result.theorem = j.formula;
        return true;
      } catch (const ProofError&) {
        return false;
      }
    });
    bank.undo(m);
    if (found) break;
  }
  result.nodes = engine.nodes();
  if (!result.found) result.limit = "max_term_size=" + std::to_string(limits.max_term_size);
  return result;
}

SaturationResult saturate(const LogicSystem& system, const std::vector<Premise>& premises,
                          const SearchLimits& limits) {
  check_limits(limits);
  Engine engine(system, premises, limits, nullptr);
  engine.build_levels(limits.max_term_size);
  SaturationResult out;
  out.truncated = engine.truncated();
  for (const auto& e : engine.table().entries()) {
    if (e.dead) continue;
    Formula f = to_formula(e.pat, 0, engine.syms());
    out.theorems.push_back({f, e.taint});
    out.terms.push_back(e.term);
  }
  return out;
}

}  // namespace modal
