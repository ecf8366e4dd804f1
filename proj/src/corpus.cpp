#include "modal/corpus.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace modal {

std::string_view to_string(Expect e) {
  switch (e) {
    case Expect::Provable:
      return "provable";
    case Expect::Refutable:
      return "refutable";
    case Expect::DerivationPasses:
      return "derivation-passes";
    case Expect::DerivationFailsAt:
      return "derivation-fails-at";
    case Expect::Definition:
      return "definition";
  }
  return "";
}

std::string_view to_string(Certificate::Kind k) {
  switch (k) {
    case Certificate::Kind::Proof:
      return "proof";
    case Certificate::Kind::Model:
      return "model";
    case Certificate::Kind::Search:
      return "search";
    case Certificate::Kind::S5Decision:
      return "s5-decision";
  }
  return "";
}

CorpusError::CorpusError(std::string file, std::size_t line, const std::string& msg)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), file_(std::move(file)), line_(line) {}

FrameClass Problem::frame_class() const {
  if (frame) return *frame;
  if (derivation) return FrameClass::S5;
  if (auto f = parse_frame_class(logic)) return *f;
  return FrameClass::K;
}

std::vector<ModalPremise> modal_premises(const std::vector<Premise>& premises) {
  std::vector<ModalPremise> out;
  for (const auto& p : premises) out.push_back({p.formula, p.mode});
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool starts_with_word(std::string_view s, std::string_view w) {
  if (s.substr(0, w.size()) != w) return false;
  return s.size() == w.size() || std::isspace(static_cast<unsigned char>(s[w.size()])) || s[w.size()] == ':';
}

// Text after `key` and an optional colon.
std::string_view rest_after(std::string_view s, std::string_view key) {
  s = trim(s.substr(key.size()));
  if (!s.empty() && s.front() == ':') s = trim(s.substr(1));
  return s;
}

std::vector<std::string> split_labels(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

struct Raw {
  std::size_t line;
  std::string text;
};

struct RawLine {
  std::size_t line;
  std::string label, formula, justification;
};

struct Builder {
  std::string file;
  Problem p;
  std::vector<Raw> goals, assumes;
  std::vector<RawLine> lines;
  std::optional<std::size_t> logic_line, expect_line;
  std::vector<std::size_t> cert_lines;
  bool in_derivation = false;
  std::optional<PremiseMode> mode;

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw CorpusError(file, line, msg); }
};

// key=value pairs separated by whitespace.
std::map<std::string, std::string> parse_options(const Builder& b, std::size_t line, std::string_view s) {
  std::map<std::string, std::string> out;
  for (const auto& tok : split_labels(s)) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) b.fail(line, "expected key=value, got '" + tok + "'");
    out[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return out;
}

std::size_t to_count(const Builder& b, std::size_t line, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) b.fail(line, "expected a number, got '" + v + "'");
  return std::stoul(v);
}

FrameClass to_frame(const Builder& b, std::size_t line, std::string_view v) {
  auto f = parse_frame_class(v);
  if (!f) b.fail(line, "unknown frame class '" + std::string(v) + "'");
  return *f;
}

void apply_limits(const Builder& b, std::size_t line, const std::map<std::string, std::string>& opts,
                  SearchLimits& limits, std::optional<FrameClass>* frame, std::size_t* max_worlds) {
  for (const auto& [k, v] : opts) {
    if (k == "max-size") {
      limits.max_term_size = to_count(b, line, v);
    } else if (k == "max-formula-size") {
      limits.max_formula_size = to_count(b, line, v);
    } else if (k == "max-theorems") {
      limits.max_theorems = to_count(b, line, v);
    } else if (k == "table-depth") {
      limits.table_depth = to_count(b, line, v);
    } else if (k == "subsumption" && (v == "on" || v == "off")) {
      limits.subsumption = v == "on";
    } else if (k == "frame" && frame) {
      *frame = to_frame(b, line, v);
    } else if (k == "max-worlds" && max_worlds) {
      *max_worlds = to_count(b, line, v);
    } else {
      b.fail(line, "unknown option '" + k + "'");
    }
  }
}

Certificate parse_certificate(const Builder& b, std::size_t line, std::string_view s) {
  Certificate c;
  c.text = std::string(s);
  try {
    if (starts_with_word(s, "proof")) {
      c.kind = Certificate::Kind::Proof;
      c.term = parse_proof_term(rest_after(s, "proof"));
    } else if (starts_with_word(s, "model")) {
      c.kind = Certificate::Kind::Model;
      c.model = parse_model(s);
      c.model->validate();
    } else if (starts_with_word(s, "search")) {
      c.kind = Certificate::Kind::Search;
      apply_limits(b, line, parse_options(b, line, rest_after(s, "search")), c.limits, &c.frame, &c.max_worlds);
    } else if (s == "s5-decision") {
      c.kind = Certificate::Kind::S5Decision;
    } else {
      b.fail(line, "unknown certificate '" + std::string(s) + "'");
    }
  } catch (const CorpusError&) {
    throw;
  } catch (const std::exception& e) {
    b.fail(line, e.what());
  }
  return c;
}

AxiomSchema parse_schema(const Builder& b, std::size_t line, std::string_view s) {
  try {
    return parse_schema_declaration(s);
  } catch (const std::exception& e) {
    b.fail(line, e.what());
  }
}

void check_compatible(const Builder& b) {
  const Problem& p = b.p;
  for (std::size_t i = 0; i < p.certificates.size(); ++i) {
    const auto k = p.certificates[i].kind;
    bool ok = false;
    switch (p.expect) {
      case Expect::Provable:
        ok = k == Certificate::Kind::Proof || k == Certificate::Kind::Search || k == Certificate::Kind::S5Decision;
        break;
      case Expect::Refutable:
        ok = k == Certificate::Kind::Model || k == Certificate::Kind::Search;
        break;
      default:
        ok = false;
    }
    if (!ok)
      b.fail(b.cert_lines[i], "incompatible certificate: " + std::string(to_string(k)) + " for expect " +
                                  std::string(to_string(p.expect)));
  }
}

Problem finish(Builder& b) {
  Problem& p = b.p;
  if (!b.expect_line) b.fail(p.line, "problem '" + p.name + "' has no expect line");
  try {
    p.system = LogicSystem::named(p.logic);
    for (const auto& s : p.extra_schemas) p.system = p.system.with(s);
  } catch (const std::exception& e) {
    b.fail(b.logic_line.value_or(p.line), e.what());
  }
  ParseOptions opts;
  opts.arrow_is_strict = p.strict_reading;
  for (const auto& a : b.assumes) {
    try {
      Premise prem = parse_premise(a.text);
      for (const auto& q : p.premises)
        if (q.name == prem.name) b.fail(a.line, "duplicate premise '" + prem.name + "'");
      if (p.system.find(prem.name)) b.fail(a.line, "premise '" + prem.name + "' shadows a schema");
      p.premises.push_back(std::move(prem));
    } catch (const CorpusError&) {
      throw;
    } catch (const std::exception& e) {
      b.fail(a.line, e.what());
    }
  }
  for (const auto& g : b.goals) {
    try {
      p.goals.push_back(parse(g.text, {}, opts));
    } catch (const std::exception& e) {
      b.fail(g.line, e.what());
    }
  }
  const bool derivation_expect = p.expect == Expect::DerivationPasses || p.expect == Expect::DerivationFailsAt;
  if (!b.lines.empty()) {
    Derivation d;
    d.premise_mode = b.mode.value_or(PremiseMode::Local);
    for (const auto& rl : b.lines) {
      DerivationLine dl{rl.label, Formula::constant("_"), DerivationLine::Kind::Premise, {}};
      try {
        dl.formula = parse(rl.formula, {}, opts);
      } catch (const std::exception& e) {
        b.fail(rl.line, e.what());
      }
      std::string_view j = trim(rl.justification);
      if (j == "premise") {
        dl.kind = DerivationLine::Kind::Premise;
      } else if (j == "axiom") {
        dl.kind = DerivationLine::Kind::Axiom;
      } else if (starts_with_word(j, "from")) {
        dl.kind = DerivationLine::Kind::From;
        dl.cites = split_labels(rest_after(j, "from"));
        if (dl.cites.empty()) b.fail(rl.line, "'from' needs at least one label");
      } else {
        b.fail(rl.line, "expected [premise], [axiom] or [from labels]");
      }
      d.lines.push_back(std::move(dl));
    }
    try {
      d.validate();
    } catch (const std::exception& e) {
      b.fail(b.lines.front().line, e.what());
    }
    p.derivation = std::move(d);
  }
  check_compatible(b);
  if (derivation_expect) {
    if (!p.derivation) b.fail(*b.expect_line, "derivation expected but no derivation block");
    if (!p.goals.empty()) b.fail(b.goals.front().line, "derivation problems take no goal");
    std::set<std::string> labels;
    for (const auto& l : p.derivation->lines) labels.insert(l.label);
    for (const auto& l : p.fail_labels)
      if (!labels.count(l)) b.fail(*b.expect_line, "unknown line label '" + l + "'");
    if (p.expect == Expect::DerivationFailsAt && p.fail_labels.empty())
      b.fail(*b.expect_line, "derivation-fails-at needs labels");
  } else if (p.expect == Expect::Definition) {
    if (!p.goals.empty() || p.derivation) b.fail(*b.expect_line, "definition entries make no claim");
    if (p.extra_schemas.empty()) b.fail(*b.expect_line, "definition entry without a schema");
  } else {
    if (p.goals.empty()) b.fail(*b.expect_line, "problem '" + p.name + "' has no goal");
    if (p.derivation) b.fail(b.lines.front().line, "derivation block in a goal problem");
    if (p.certificates.empty()) b.fail(*b.expect_line, "problem '" + p.name + "' has no certificate");
    std::size_t proofs = 0;
    for (const auto& c : p.certificates) proofs += c.kind == Certificate::Kind::Proof;
    if (proofs != 0 && proofs != p.goals.size())
      b.fail(*b.expect_line, "need one proof certificate per goal");
  }
  if (p.exhaust && p.expect != Expect::Refutable && p.expect != Expect::DerivationFailsAt)
    b.fail(*b.expect_line, "exhaust applies to refutable claims only");
  return std::move(p);
}

}  // namespace

AxiomSchema parse_schema_declaration(std::string_view s) {
  auto open = s.find('('), close = s.find(')'), colon = s.find(':');
  if (open == std::string_view::npos || close == std::string_view::npos || colon == std::string_view::npos ||
      !(open < close && close < colon))
    throw std::invalid_argument("expected 'name(vars): body'");
  std::string name(trim(s.substr(0, open)));
  if (!is_identifier(name) && (name.empty() || name.find_first_not_of("0123456789") != std::string::npos))
    throw std::invalid_argument("bad schema name '" + name + "'");
  return AxiomSchema::make(name, split_labels(s.substr(open + 1, close - open - 1)), s.substr(colon + 1));
}

std::vector<Problem> load_text(std::string_view text, const std::string& name) {
  std::vector<Problem> out;
  std::set<std::string> names;
  std::optional<Builder> b;
  auto flush = [&] {
    if (!b) return;
    Problem p = finish(*b);
    if (!names.insert(p.name).second) throw CorpusError(name, p.line, "duplicate problem '" + p.name + "'");
    out.push_back(std::move(p));
    b.reset();
  };
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    if (starts_with_word(s, "problem")) {
      flush();
      b.emplace();
      b->file = name;
      b->p.file = name;
      b->p.line = lineno;
      std::string_view n = rest_after(s, "problem");
      if (n.size() >= 2 && n.front() == '"' && n.back() == '"') n = n.substr(1, n.size() - 2);
      if (!is_identifier(n)) throw CorpusError(name, lineno, "bad problem name '" + std::string(n) + "'");
      b->p.name = std::string(n);
      continue;
    }
    if (!b) throw CorpusError(name, lineno, "expected 'problem \"name\"'");
    Builder& cur = *b;
    if (starts_with_word(s, "line")) {
      if (!cur.in_derivation) cur.fail(lineno, "'line' outside a derivation block");
      std::string_view r = trim(s.substr(4));
      auto colon = r.find(':'), open = r.rfind('['), close = r.rfind(']');
      if (colon == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos ||
          !(colon < open && open < close) || !trim(r.substr(close + 1)).empty())
        cur.fail(lineno, "expected 'line <label>: <formula> [justification]'");
      RawLine rl{lineno, std::string(trim(r.substr(0, colon))),
                 std::string(trim(r.substr(colon + 1, open - colon - 1))),
                 std::string(r.substr(open + 1, close - open - 1))};
      if (rl.label.empty()) cur.fail(lineno, "missing line label");
      cur.lines.push_back(std::move(rl));
      continue;
    }
    cur.in_derivation = false;
    if (starts_with_word(s, "logic")) {
      std::string l(rest_after(s, "logic"));
      if (!LogicSystem::is_named(l)) cur.fail(lineno, "unknown logic '" + l + "'");
      cur.p.logic = l;
      cur.logic_line = lineno;
    } else if (starts_with_word(s, "schema")) {
      cur.p.extra_schemas.push_back(parse_schema(cur, lineno, rest_after(s, "schema")));
    } else if (starts_with_word(s, "assume")) {
      cur.assumes.push_back({lineno, std::string(rest_after(s, "assume"))});
    } else if (starts_with_word(s, "goal")) {
      cur.goals.push_back({lineno, std::string(rest_after(s, "goal"))});
    } else if (starts_with_word(s, "expect")) {
      if (cur.expect_line) cur.fail(lineno, "duplicate expect");
      cur.expect_line = lineno;
      std::string_view e = rest_after(s, "expect");
      if (e == "provable") {
        cur.p.expect = Expect::Provable;
      } else if (e == "refutable") {
        cur.p.expect = Expect::Refutable;
      } else if (e == "derivation-passes") {
        cur.p.expect = Expect::DerivationPasses;
      } else if (e == "definition") {
        cur.p.expect = Expect::Definition;
      } else if (starts_with_word(e, "derivation-fails-at")) {
        cur.p.expect = Expect::DerivationFailsAt;
        std::string_view ls = trim(e.substr(std::string_view("derivation-fails-at").size()));
        if (!ls.empty() && ls.front() == '(' && ls.back() == ')') ls = ls.substr(1, ls.size() - 2);
        cur.p.fail_labels = split_labels(ls);
      } else {
        cur.fail(lineno, "unknown expect '" + std::string(e) + "'");
      }
    } else if (starts_with_word(s, "certificate")) {
      cur.p.certificates.push_back(parse_certificate(cur, lineno, rest_after(s, "certificate")));
      cur.cert_lines.push_back(lineno);
    } else if (starts_with_word(s, "frame")) {
      cur.p.frame = to_frame(cur, lineno, rest_after(s, "frame"));
    } else if (starts_with_word(s, "max-worlds")) {
      cur.p.max_worlds = to_count(cur, lineno, std::string(rest_after(s, "max-worlds")));
    } else if (starts_with_word(s, "exhaust")) {
      SearchLimits l;
      apply_limits(cur, lineno, parse_options(cur, lineno, rest_after(s, "exhaust")), l, nullptr, nullptr);
      cur.p.exhaust = l;
    } else if (starts_with_word(s, "reading")) {
      std::string_view r = rest_after(s, "reading");
      if (r != "strict" && r != "material") cur.fail(lineno, "reading must be strict or material");
      cur.p.strict_reading = r == "strict";
    } else if (starts_with_word(s, "mode")) {
      std::string_view m = rest_after(s, "mode");
      if (m != "local" && m != "global") cur.fail(lineno, "mode must be local or global");
      cur.mode = m == "local" ? PremiseMode::Local : PremiseMode::Global;
    } else if (starts_with_word(s, "annotation")) {
      if (!cur.p.annotation.empty()) cur.p.annotation += ' ';
      cur.p.annotation += rest_after(s, "annotation");
    } else if (starts_with_word(s, "derivation")) {
      if (!rest_after(s, "derivation").empty()) cur.fail(lineno, "unexpected text after 'derivation:'");
      if (!cur.lines.empty()) cur.fail(lineno, "duplicate derivation block");
      cur.in_derivation = true;
    } else {
      cur.fail(lineno, "unrecognized line '" + std::string(s) + "'");
    }
  }
  flush();
  return out;
}

std::vector<Problem> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_text(ss.str(), path);
}

// {{{ Verification

namespace {

bool variants(const Formula& a, const Formula& b) {
  return instance_of(a, b).has_value() && instance_of(b, a).has_value();
}

struct Verifier {
  const Problem& p;
  Report& r;

  void note(std::string s) { r.evidence.push_back(std::move(s)); }
  bool fail(std::string s) {
    note(std::move(s));
    return false;
  }

  // Kernel re-check of a proof term against `goal`.
  std::optional<Formula> kernel_check(const ProofTerm& t, const Formula& goal, const std::string& what) {
    Judgement j = check_proof(t, p.system, p.premises);
    if (!instance_of(goal, j.formula)) {
      fail(what + ": theorem " + render(j.formula) + " does not have goal " + render(goal) + " as an instance");
      return std::nullopt;
    }
    return j.formula;
  }

  bool provable(std::size_t gi) {
    const Formula& goal = p.goals[gi];
    const std::string tag = p.goals.size() > 1 ? "goal " + std::to_string(gi + 1) + ": " : "";
    std::optional<Formula> certified;
    std::size_t proof_index = 0;
    bool ok = true;
    for (const auto& c : p.certificates) {
      switch (c.kind) {
        case Certificate::Kind::Proof: {
          if (proof_index++ != gi) break;
          auto th = kernel_check(*c.term, goal, tag + "proof");
          if (!th) return false;
          certified = th;
          note(tag + "theorem " + render(*th));
          break;
        }
        case Certificate::Kind::Search: {
          SearchResult res = prove(p.system, p.premises, goal, c.limits);
          if (!res.found)
            return fail(tag + "no proof up to size " + std::to_string(c.limits.max_term_size) + " (" + res.limit + ")");
          auto th = kernel_check(*res.term, goal, tag + "search");
          if (!th) return false;
          note(tag + "found " + render(*res.term) + " (size " + std::to_string(res.term->size()) + ") : " +
               render(*th));
          if (certified && !variants(*certified, *th))
            return fail(tag + "search theorem " + render(*th) + " differs from certificate theorem " +
                        render(*certified));
          if (!certified) certified = th;
          break;
        }
        case Certificate::Kind::S5Decision: {
          Verdict v = decide_s5(modal_premises(p.premises), goal);
          if (v.kind != Verdict::Kind::Valid) return fail(tag + "decide-s5: " + describe(v));
          note(tag + "decide-s5: valid (" + std::to_string(v.models_checked) + " models, bound " +
               std::to_string(v.bound) + ")");
          break;
        }
        case Certificate::Kind::Model:
          ok = false;
          break;
      }
    }
    return ok;
  }

  bool model_refutes(const KripkeModel& m, const std::vector<ModalPremise>& prem, const Formula& goal,
                     FrameClass frame, const std::string& what) {
    if (!in_frame_class(m, frame))
      return fail(what + ": " + render(m) + " is not a " + std::string(to_string(frame)) + " model");
    if (!refutes(m, prem, goal)) return fail(what + ": " + render(m) + " does not refute the goal");
    return true;
  }

  bool refutable(std::size_t gi) {
    const Formula& goal = p.goals[gi];
    const std::string tag = p.goals.size() > 1 ? "goal " + std::to_string(gi + 1) + ": " : "";
    const auto prem = modal_premises(p.premises);
    std::optional<KripkeModel> given;
    for (const auto& c : p.certificates)
      if (c.kind == Certificate::Kind::Model) given = c.model;
    for (const auto& c : p.certificates) {
      const FrameClass frame = c.frame.value_or(p.frame_class());
      if (c.kind == Certificate::Kind::Model) {
        if (!model_refutes(*c.model, prem, goal, frame, tag + "model")) return false;
        note(tag + "countermodel " + render(*c.model) + " (" + std::string(to_string(frame)) + ")");
      } else if (c.kind == Certificate::Kind::Search) {
        Verdict v = find_countermodel(prem, goal, frame, c.max_worlds);
        if (v.kind != Verdict::Kind::Countermodel) return fail(tag + "search: " + describe(v));
        if (!model_refutes(*v.model, prem, goal, frame, tag + "search")) return false;
        if (given && !(*given == *v.model))
          return fail(tag + "search found " + render(*v.model) + ", certificate lists " + render(*given));
        if (!given)
          note(tag + "countermodel " + render(*v.model) + " (" + std::string(to_string(frame)) + ", search up to " +
               std::to_string(c.max_worlds) + " worlds)");
        else
          note(tag + "canonical search reproduces the certificate model");
      } else {
        return fail("incompatible certificate");
      }
    }
    if (p.exhaust && !exhausted(p.premises, goal, tag)) return false;
    return true;
  }

  bool exhausted(const std::vector<Premise>& premises, const Formula& goal, const std::string& tag) {
    SearchResult res = prove(p.system, premises, goal, *p.exhaust);
    if (res.found) return fail(tag + "prover found " + render(*res.term) + " for a refuted claim");
    note(tag + "prover: no proof up to size " + std::to_string(p.exhaust->max_term_size) + " (non-conclusive)");
    return true;
  }

  bool derivation() {
    const Derivation& d = *p.derivation;
    const FrameClass frame = p.frame_class();
    DerivationReport rep = check_derivation(d, frame, p.max_worlds);
    std::map<std::string, const DerivationLine*> by_label;
    for (const auto& l : d.lines) by_label[l.label] = &l;
    bool ok = true;
    std::size_t undecided = 0;
    for (const auto& lr : rep.lines) {
      if (lr.status == LineReport::Status::NoCountermodelUpTo) ++undecided;
      if (lr.status != LineReport::Status::Refuted) continue;
      const DerivationLine& line = *by_label.at(lr.label);
      std::vector<ModalPremise> from;
      std::vector<Premise> cited;
      for (const auto& c : line.cites) {
        const DerivationLine& cl = *by_label.at(c);
        const PremiseMode m = cl.kind == DerivationLine::Kind::Premise ? d.premise_mode : PremiseMode::Local;
        from.push_back({cl.formula, m});
        cited.push_back({"l" + c, cl.formula, m});
      }
      const FrameClass check = rep.exact ? FrameClass::Universal : frame;
      if (!model_refutes(*lr.model, from, line.formula, check, "line " + lr.label)) return false;
      note("line " + lr.label + " refuted by " + render(*lr.model));
      if (p.exhaust && !exhausted(cited, line.formula, "line " + lr.label + ": ")) ok = false;
    }
    const auto failing = rep.failing();
    if (p.expect == Expect::DerivationPasses) {
      if (!failing.empty()) return false;
      note("all " + std::to_string(d.lines.size()) + " lines pass (" + std::string(to_string(frame)) +
           (rep.exact ? ", exact)" : ", up to " + std::to_string(p.max_worlds) + " worlds)"));
    } else {
      if (failing != p.fail_labels) {
        std::string got;
        for (const auto& l : failing) got += (got.empty() ? "" : ",") + l;
        return fail("failing lines {" + got + "} differ from expected");
      }
      note("all other lines pass");
    }
    if (undecided) note(std::to_string(undecided) + " lines without countermodel in the bound (not exact)");
    return ok;
  }

  bool run() {
    switch (p.expect) {
      case Expect::Provable:
      case Expect::Refutable: {
        for (std::size_t i = 0; i < p.goals.size(); ++i)
          if (!(p.expect == Expect::Provable ? provable(i) : refutable(i))) return false;
        return true;
      }
      case Expect::DerivationPasses:
      case Expect::DerivationFailsAt:
        return derivation();
      case Expect::Definition:
        for (const auto& s : p.extra_schemas) note("definition only: " + s.name + ": " + render(s.body));
        return true;
    }
    return false;
  }
};

}  // namespace

Report verify(const Problem& p) {
  Report r;
  r.name = p.name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = Verifier{p, r}.run();
  } catch (const std::exception& e) {
    r.pass = false;
    r.evidence.push_back(std::string("error: ") + e.what());
  }
  r.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<Report> verify_all(const std::vector<Problem>& problems, unsigned threads) {
  std::vector<Report> out(problems.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < problems.size(); ++i) out[i] = verify(problems[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < problems.size();) out[i] = verify(problems[i]);
    });
  for (auto& th : pool) th.join();
  return out;
}

std::vector<Problem> builtin_corpus() {
  std::vector<Problem> out;
  std::set<std::string> names;
  for (const auto& [file, text] : detail::builtin_corpus_files()) {
    for (auto& p : load_text(text, file)) {
      if (!names.insert(p.name).second) throw CorpusError(file, p.line, "duplicate problem '" + p.name + "'");
      out.push_back(std::move(p));
    }
  }
  return out;
}

// }}}

}  // namespace modal
