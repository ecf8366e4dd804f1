#include "modal/formula.hpp"

#include <cctype>
#include <functional>
#include <utility>
#include <vector>

namespace modal {

bool is_binary(Op op) {
  switch (op) {
    case Op::And:
    case Op::Or:
    case Op::Imp:
    case Op::Iff:
    case Op::Strict:
      return true;
    default:
      return false;
  }
}

bool is_unary(Op op) { return op == Op::Not || op == Op::Box || op == Op::Dia; }

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula Formula::build(Op op, std::string name, Formula a, Formula b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->size = 1;
  n->hash = mix(0x51ed27, static_cast<std::size_t>(op));
  n->closed = op != Op::Var;
  if (!name.empty()) n->hash = mix(n->hash, std::hash<std::string>{}(name));
  n->name = std::move(name);
  for (const Formula* c : {&a, &b}) {
    if (!c->node_) continue;
    n->size += c->size();
    n->hash = mix(n->hash, c->hash());
    n->closed = n->closed && c->closed();
  }
  n->a = std::move(a);
  n->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::constant(std::string name) { return build(Op::Const, std::move(name), {}, {}); }
Formula Formula::var(std::string name) { return build(Op::Var, std::move(name), {}, {}); }
Formula Formula::negation(Formula f) { return build(Op::Not, {}, std::move(f), {}); }
Formula Formula::box(Formula f) { return build(Op::Box, {}, std::move(f), {}); }
Formula Formula::dia(Formula f) { return build(Op::Dia, {}, std::move(f), {}); }
Formula Formula::conj(Formula a, Formula b) { return build(Op::And, {}, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return build(Op::Or, {}, std::move(a), std::move(b)); }
Formula Formula::imp(Formula a, Formula b) { return build(Op::Imp, {}, std::move(a), std::move(b)); }
Formula Formula::iff(Formula a, Formula b) { return build(Op::Iff, {}, std::move(a), std::move(b)); }
Formula Formula::strict(Formula a, Formula b) { return build(Op::Strict, {}, std::move(a), std::move(b)); }

Formula Formula::make(Op op, Formula a, Formula b) {
  if (!is_binary(op)) throw std::invalid_argument("Formula::make: not a binary operator");
  return build(op, {}, std::move(a), std::move(b));
}

Formula Formula::make(Op op, Formula a) {
  if (!is_unary(op)) throw std::invalid_argument("Formula::make: not a unary operator");
  return build(op, {}, std::move(a), {});
}

bool operator==(const Formula& x, const Formula& y) {
  const Formula::Node* a = x.node_.get();
  const Formula::Node* b = y.node_.get();
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->size != b->size || a->op != b->op) return false;
  if (a->name != b->name) return false;
  return a->a == b->a && a->b == b->b;
}

bool operator<(const Formula& x, const Formula& y) {
  const Formula::Node* a = x.node_.get();
  const Formula::Node* b = y.node_.get();
  if (a == b) return false;
  if (!a) return true;
  if (!b) return false;
  if (a->op != b->op) return a->op < b->op;
  if (a->name != b->name) return a->name < b->name;
  if (a->a != b->a) return a->a < b->a;
  return a->b < b->b;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return s != "N" && s != "M";
}

// {{{ Parser

namespace {

enum class Tok { Ident, Not, Box, Dia, And, Or, Imp, Strict, Iff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      std::string id(s.substr(i, j - i));
      Tok kind = id == "N" ? Tok::Box : id == "M" ? Tok::Dia : Tok::Ident;
      out.push_back({kind, std::move(id), i});
      i = j;
    } else if (s.compare(i, 3, "<->") == 0) {
      out.push_back({Tok::Iff, "<->", i});
      i += 3;
    } else if (s.compare(i, 2, "->") == 0) {
      out.push_back({Tok::Imp, "->", i});
      i += 2;
    } else if (s.compare(i, 2, "=>") == 0) {
      out.push_back({Tok::Strict, "=>", i});
      i += 2;
    } else if (s.compare(i, 2, "[]") == 0) {
      out.push_back({Tok::Box, "[]", i});
      i += 2;
    } else if (s.compare(i, 2, "<>") == 0) {
      out.push_back({Tok::Dia, "<>", i});
      i += 2;
    } else if (c == '~') {
      out.push_back({Tok::Not, "~", i++});
    } else if (c == '&') {
      out.push_back({Tok::And, "&", i++});
    } else if (c == '|') {
      out.push_back({Tok::Or, "|", i++});
    } else if (c == '(') {
      out.push_back({Tok::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Tok::RParen, ")", i++});
    } else {
      throw SyntaxError(std::string("unknown token '") + c + "'", i);
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>& vars, const ParseOptions& opts)
      : toks_(tokenize(text)), vars_(vars), opts_(opts) {}

  Formula run() {
    Formula f = iff();
    if (peek().kind == Tok::RParen) throw SyntaxError("unbalanced parentheses", peek().pos);
    if (peek().kind != Tok::End) throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++i_;
    return true;
  }

  Formula iff() {
    Formula f = imp();
    while (accept(Tok::Iff)) f = Formula::iff(f, imp());
    return f;
  }

  Formula imp() {
    Formula f = disj();
    if (peek().kind == Tok::Imp || peek().kind == Tok::Strict) {
      const bool strict = next().kind == Tok::Strict || opts_.arrow_is_strict;
      Formula g = imp();
      if (!strict) return Formula::imp(f, g);
      Formula s = Formula::strict(f, g);
      return opts_.keep_strict ? s : desugar(s);
    }
    return f;
  }

  Formula disj() {
    Formula f = conj();
    while (accept(Tok::Or)) f = Formula::disj(f, conj());
    return f;
  }

  Formula conj() {
    Formula f = unary();
    while (accept(Tok::And)) f = Formula::conj(f, unary());
    return f;
  }

  Formula unary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Not:
        return Formula::negation(unary());
      case Tok::Box:
        return Formula::box(unary());
      case Tok::Dia:
        return Formula::dia(unary());
      case Tok::Ident:
        return vars_.count(t.text) ? Formula::var(t.text) : Formula::constant(t.text);
      case Tok::LParen: {
        Formula f = iff();
        if (!accept(Tok::RParen)) throw SyntaxError("unbalanced parentheses", peek().pos);
        return f;
      }
      case Tok::End:
        throw SyntaxError("unexpected end of input", t.pos);
      case Tok::RParen:
        throw SyntaxError("unbalanced parentheses", t.pos);
      default:
        throw SyntaxError("unexpected '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const std::set<std::string>& vars_;
  ParseOptions opts_;
};

}  // namespace

Formula parse(std::string_view text, const std::set<std::string>& variables,
              const ParseOptions& options) {
  return Parser(text, variables, options).run();
}

// }}}

// {{{ Printer

namespace {

int level(Op op) {
  switch (op) {
    case Op::Iff:
      return 1;
    case Op::Imp:
    case Op::Strict:
      return 2;
    case Op::Or:
      return 3;
    case Op::And:
      return 4;
    case Op::Not:
    case Op::Box:
    case Op::Dia:
      return 5;
    default:
      return 6;
  }
}

const char* symbol(Op op) {
  switch (op) {
    case Op::Not:
      return "~";
    case Op::Box:
      return "N";
    case Op::Dia:
      return "M";
    case Op::And:
      return " & ";
    case Op::Or:
      return " | ";
    case Op::Imp:
      return " -> ";
    case Op::Strict:
      return " => ";
    case Op::Iff:
      return " <-> ";
    default:
      return "";
  }
}

void print(const Formula& f, std::string& out) {
  const Op op = f.op();
  if (f.is_atom()) {
    out += f.name();
    return;
  }
  const int lv = level(op);
  if (is_unary(op)) {
    const Formula& c = f.operand();
    out += symbol(op);
    const bool paren = level(c.op()) < lv;
    if (op != Op::Not && !paren) out += ' ';
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
    return;
  }
  const bool right_assoc = lv == 2;
  const int ll = level(f.lhs().op());
  const int rl = level(f.rhs().op());
  const bool lp = ll < lv || (ll == lv && right_assoc);
  const bool rp = rl < lv || (rl == lv && !right_assoc);
  if (lp) out += '(';
  print(f.lhs(), out);
  if (lp) out += ')';
  out += symbol(op);
  if (rp) out += '(';
  print(f.rhs(), out);
  if (rp) out += ')';
}

}  // namespace

std::string render(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

// }}}

Formula desugar(const Formula& f) {
  if (f.is_atom()) return f;
  if (is_unary(f.op())) {
    Formula c = desugar(f.operand());
    return c == f.operand() ? f : Formula::make(f.op(), c);
  }
  Formula a = desugar(f.lhs());
  Formula b = desugar(f.rhs());
  if (f.op() == Op::Strict)
    return Formula::box(Formula::negation(Formula::conj(a, Formula::negation(b))));
  if (a == f.lhs() && b == f.rhs()) return f;
  return Formula::make(f.op(), a, b);
}

bool contains_strict(const Formula& f) {
  if (f.is_atom()) return false;
  if (f.op() == Op::Strict) return true;
  if (is_unary(f.op())) return contains_strict(f.operand());
  return contains_strict(f.lhs()) || contains_strict(f.rhs());
}

Formula substitute(const Formula& f, const Substitution& s) {
  if (f.closed() || s.empty()) return f;
  if (f.op() == Op::Var) {
    auto it = s.find(f.name());
    return it == s.end() ? f : it->second;
  }
  if (is_unary(f.op())) return Formula::make(f.op(), substitute(f.operand(), s));
  return Formula::make(f.op(), substitute(f.lhs(), s), substitute(f.rhs(), s));
}

bool occurs(const std::string& var, const Formula& f) {
  if (f.closed()) return false;
  if (f.op() == Op::Var) return f.name() == var;
  if (is_unary(f.op())) return occurs(var, f.operand());
  return occurs(var, f.lhs()) || occurs(var, f.rhs());
}

namespace {

// Triangular bindings; resolve() produces the composed substitution.
struct Unifier {
  Substitution bind;

  Formula walk(Formula f) const {
    while (f.op() == Op::Var) {
      auto it = bind.find(f.name());
      if (it == bind.end()) break;
      f = it->second;
    }
    return f;
  }

  bool occurs_deep(const std::string& v, const Formula& f) const {
    Formula g = walk(f);
    if (g.closed()) return false;
    if (g.op() == Op::Var) return g.name() == v;
    if (is_unary(g.op())) return occurs_deep(v, g.operand());
    return occurs_deep(v, g.lhs()) || occurs_deep(v, g.rhs());
  }

  bool run(const Formula& x, const Formula& y) {
    std::vector<std::pair<Formula, Formula>> work{{x, y}};
    while (!work.empty()) {
      auto [a, b] = work.back();
      work.pop_back();
      a = walk(a);
      b = walk(b);
      if (a == b) continue;
      if (a.op() == Op::Var || b.op() == Op::Var) {
        if (a.op() != Op::Var) std::swap(a, b);
        if (occurs_deep(a.name(), b)) return false;
        bind.emplace(a.name(), b);
        continue;
      }
      if (a.op() != b.op() || a.name() != b.name()) return false;
      if (a.is_atom()) continue;  // equal constants were caught by a == b
      if (is_unary(a.op())) {
        work.emplace_back(a.operand(), b.operand());
      } else {
        work.emplace_back(a.rhs(), b.rhs());
        work.emplace_back(a.lhs(), b.lhs());
      }
    }
    return true;
  }

  Formula resolve(const Formula& f) const {
    if (f.closed()) return f;
    if (f.op() == Op::Var) {
      auto it = bind.find(f.name());
      return it == bind.end() ? f : resolve(it->second);
    }
    if (is_unary(f.op())) return Formula::make(f.op(), resolve(f.operand()));
    return Formula::make(f.op(), resolve(f.lhs()), resolve(f.rhs()));
  }
};

void collect(const Formula& f, Op kind, std::set<std::string>& out) {
  if (f.op() == kind) {
    out.insert(f.name());
  } else if (is_unary(f.op())) {
    collect(f.operand(), kind, out);
  } else if (is_binary(f.op())) {
    collect(f.lhs(), kind, out);
    collect(f.rhs(), kind, out);
  }
}

}  // namespace

std::optional<Substitution> unify(const Formula& f, const Formula& g) {
  Unifier u;
  if (!u.run(f, g)) return std::nullopt;
  Substitution out;
  for (const auto& [k, v] : u.bind) out.emplace(k, u.resolve(v));
  return out;
}

std::set<std::string> vars(const Formula& f) {
  std::set<std::string> out;
  if (!f.closed()) collect(f, Op::Var, out);
  return out;
}

std::set<std::string> constants(const Formula& f) {
  std::set<std::string> out;
  collect(f, Op::Const, out);
  return out;
}

std::size_t modal_count(const Formula& f) {
  if (f.is_atom()) return 0;
  std::size_t here = (f.op() == Op::Box || f.op() == Op::Dia) ? 1 : 0;
  if (is_unary(f.op())) return here + modal_count(f.operand());
  return modal_count(f.lhs()) + modal_count(f.rhs());
}

std::size_t modal_depth(const Formula& f) {
  if (f.is_atom()) return 0;
  if (is_unary(f.op()))
    return modal_depth(f.operand()) + (f.op() == Op::Not ? 0 : 1);
  return std::max(modal_depth(f.lhs()), modal_depth(f.rhs()));
}

}  // namespace modal
