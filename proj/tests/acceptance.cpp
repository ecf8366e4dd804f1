// Acceptance suite: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "modal/corpus.hpp"
#include "modal/kernel.hpp"
#include "modal/kripke.hpp"
#include "modal/prover.hpp"
#include "support.hpp"

using namespace modal;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double ms = ms_since(t0);
  if (!o.pass) ++failures;
  std::printf("%s criterion %2d: %s (%.0f ms)%s\n", o.pass ? "PASS" : "FAIL", n, title, ms, o.detail.str().c_str());
  std::fflush(stdout);
}

std::vector<Premise> schanno_premises() {
  return {parse_premise("global ap: N(q -> N q)"), parse_premise("local ip: M q")};
}

std::vector<ModalPremise> mp(std::initializer_list<std::pair<const char*, PremiseMode>> ps) {
  std::vector<ModalPremise> out;
  for (auto [f, m] : ps) out.push_back({parse(f), m});
  return out;
}

SearchResult prove_within(Outcome& o, const LogicSystem& s, const std::vector<Premise>& ps, const char* goal,
                          std::size_t size, double max_ms) {
  SearchLimits l;
  l.max_term_size = size;
  const auto t0 = Clock::now();
  SearchResult r = prove(s, ps, parse(goal), l);
  const double ms = ms_since(t0);
  o.require(r.found, std::string("proof of ") + goal);
  if (r.found) {
    Judgement j = check_proof(*r.term, s, ps);
    o.require(instance_of(parse(goal), j.formula).has_value(), std::string("recheck of ") + goal);
    o.require(r.term->size() <= size, "size bound");
    o.detail << " " << goal << " by " << render(*r.term) << " [" << r.term->size() << ", " << static_cast<long>(ms)
             << " ms]";
  }
  o.require(ms < max_ms, std::string("time for ") + goal);
  return r;
}

bool all_detachments(const ProofTerm& t) {
  if (t.kind() == ProofTerm::Kind::Nec) return false;
  if (t.kind() == ProofTerm::Kind::Ref) return true;
  return all_detachments(*t.major()) && all_detachments(*t.minor());
}

const Problem& find_problem(const std::vector<Problem>& ps, const std::string& name) {
  for (const auto& p : ps)
    if (p.name == name) return p;
  throw std::runtime_error("missing problem " + name);
}

// Random S5 goal: a plain random formula or an instance of a schema.
Formula random_goal(oracle::Generator& g, const LogicSystem& s5) {
  for (;;) {
    Formula f = Formula::constant("_");
    if (g.pick(3) == 0) {
      const auto& sc = s5.schemas()[g.pick(s5.schemas().size())];
      Substitution sub;
      for (const auto& v : sc.variables) sub.insert_or_assign(v, g.formula(1, 1));
      f = substitute(sc.body, sub);
    } else {
      f = g.formula(4, 2);
    }
    if (f.size() <= 12 && modal_depth(f) <= 2) return f;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  criterion(1, "Schanno proof term checks in S5 and yields q", [](Outcome& o) {
    const auto s5 = LogicSystem::named("S5");
    auto term = parse_proof_term("D(t, D(5, D(D(km, ap), ip)))");
    const auto t0 = Clock::now();
    Judgement j = check_proof(*term, s5, schanno_premises());
    const double ms = ms_since(t0);
    o.require(j.formula == parse("q"), "theorem is q");
    o.require(ms < 10, "under 10 ms");
    o.detail << " theorem " << render(j.formula) << ", check " << ms << " ms";
  });

  criterion(2, "KB reduction checks and is found with 3 detachments", [](Outcome& o) {
    const auto kb = LogicSystem::named("KB");
    Judgement j = check_proof(*parse_proof_term("D(b, D(D(km, ap), ip))"), kb, schanno_premises());
    o.require(j.formula == parse("q"), "certificate theorem is q");
    SearchResult r = prove_within(o, kb, schanno_premises(), "q", 6, 5000);
    o.require(r.found && r.term->size() == 3 && all_detachments(*r.term), "three detachments");
  });

  criterion(3, "K plus M N q -> N q derives N q; q has a K countermodel", [](Outcome& o) {
    LogicSystem k = LogicSystem::named("K").with(AxiomSchema::make("hn", {}, "M N q -> N q"));
    prove_within(o, k, schanno_premises(), "N q", 6, 5000);
    Verdict v = find_countermodel(mp({{"N(q -> N q)", PremiseMode::Global},
                                      {"M q", PremiseMode::Local},
                                      {"M N q -> N q", PremiseMode::Global}}),
                                  parse("q"), FrameClass::K, 3);
    o.require(v.kind == Verdict::Kind::Countermodel, "countermodel found");
    if (v.model) {
      o.require(v.model->n_worlds <= 3, "at most 3 worlds");
      o.require(!v.model->relation.count({v.model->designated, v.model->designated}), "designated world irreflexive");
      o.detail << " " << render(*v.model);
    }
  });

  criterion(4, "Table 1: decide_s5({M q, N(q -> N q)} local, q) is valid", [](Outcome& o) {
    const auto t0 = Clock::now();
    Verdict v = decide_s5(mp({{"M q", PremiseMode::Local}, {"N(q -> N q)", PremiseMode::Local}}), parse("q"));
    const double ms = ms_since(t0);
    o.require(v.kind == Verdict::Kind::Valid, "valid");
    o.require(v.bound <= 5, "bound at most 5 worlds");
    o.require(v.models_checked <= 4, "at most 2^(2^1) valuation sets");
    o.require(ms < 1000, "under 1 s");
    o.detail << " " << describe(v) << ", " << v.models_checked << " valuation sets, bound " << v.bound;
  });

  const auto problems = builtin_corpus();

  criterion(5, "Figure 1: strict reading passes, material reading fails exactly at line 5", [&](Outcome& o) {
    const Problem& strict = find_problem(problems, "hartshorne_fig1_strict");
    const Problem& material = find_problem(problems, "hartshorne_fig1_material");
    DerivationReport s = check_derivation(*strict.derivation, FrameClass::S5);
    o.require(s.exact && s.passed() && s.lines.size() == 10, "strict: all 10 lines pass");
    DerivationReport m = check_derivation(*material.derivation, FrameClass::S5);
    o.require(m.failing() == std::vector<std::string>{"5"}, "material: only line 5 fails");
    for (const auto& l : m.lines)
      if (l.label == "5") {
        o.require(l.model && l.model->n_worlds <= 3, "countermodel with at most 3 worlds");
        if (l.model) o.detail << " line 5: " << render(*l.model);
      }
  });

  criterion(6, "Goedel's notes: global passes, local fails at M p -> M N p, Becker-to-5 passes", [&](Outcome& o) {
    const Problem& global = find_problem(problems, "godel_notes_global");
    const Problem& local = find_problem(problems, "godel_notes_local_gap");
    const Problem& becker = find_problem(problems, "godel_becker_to_5");
    DerivationReport g = check_derivation(*global.derivation, FrameClass::S5);
    o.require(g.passed(), "global mode passes");
    std::size_t derived = 0;
    for (const auto& l : global.derivation->lines) derived += l.kind != DerivationLine::Kind::Premise;
    o.require(derived == 6, "six derived lines");
    DerivationReport l = check_derivation(*local.derivation, FrameClass::S5);
    const auto failing = l.failing();
    o.require(failing.size() == 1, "one failing line in local mode");
    for (std::size_t i = 0; i < l.lines.size(); ++i) {
      if (l.lines[i].status != LineReport::Status::Refuted) continue;
      o.require(local.derivation->lines[i].formula == parse("M p -> M N p"), "the failing line is M p -> M N p");
      const auto& m = *l.lines[i].model;
      o.require(m.n_worlds == 2 && in_frame_class(m, FrameClass::Universal), "2-world universal model");
      o.require(m.valuation.count("p") && m.valuation.at("p") == std::set<std::size_t>{1 - m.designated},
                "p true only at the non-designated world");
      o.detail << " " << render(m);
    }
    o.require(check_derivation(*becker.derivation, FrameClass::S5).passed(), "Becker-to-5 passes");
  });

  criterion(7, "prosleptic premises: K definitions, KB global interderivability, KB local countermodel", [](Outcome& o) {
    const auto k = LogicSystem::named("K"), kb = LogicSystem::named("KB");
    prove_within(o, k, {}, "N(M q -> q) -> ~M(M q & ~q)", 8, 60000);
    prove_within(o, k, {}, "~M(M q & ~q) -> N(M q -> q)", 8, 60000);
    prove_within(o, k, {}, "~M(q & M ~q) -> N(q -> N q)", 8, 60000);
    prove_within(o, k, {}, "N(q -> N q) -> ~M(q & M ~q)", 8, 60000);
    prove_within(o, kb, {parse_premise("global p2: N(M q -> q)")}, "N(q -> N q)", 10, 60000);
    prove_within(o, kb, {parse_premise("global p3: N(q -> N q)")}, "N(M q -> q)", 10, 60000);
    Verdict v = find_countermodel(mp({{"N(M q -> q)", PremiseMode::Local}}), parse("N(q -> N q)"), FrameClass::KB, 3);
    o.require(v.kind == Verdict::Kind::Countermodel, "local countermodel");
    if (v.model) {
      o.require(v.model->n_worlds <= 3 && in_frame_class(*v.model, FrameClass::KB), "at most 3 symmetric worlds");
      o.detail << " local: " << render(*v.model);
    }
  });

  criterion(8, "type-lifted claims: KB equivalence, K with polarity, K countermodel without it", [](Outcome& o) {
    const auto kb = LogicSystem::named("KB");
    prove_within(o, kb, {parse_premise("global e3: a -> N a")}, "M a -> a", 8, 60000);
    prove_within(o, kb, {parse_premise("global e4: M a -> a")}, "a -> N a", 8, 60000);
    // Exhaustive: no K model with at most 3 worlds satisfies the three global
    // premises everywhere and refutes M a -> a somewhere.
    const Formula pol = parse("a <-> ~b"), ta = parse("a -> N a"), tb = parse("b -> N b"), goal = parse("M a -> a");
    std::size_t models = 0, satisfying = 0;
    bool refuted = false;
    for (std::size_t n = 1; n <= 3; ++n)
      oracle::for_each_model(n, {"a", "b"}, [&](const oracle::Model& m) {
        ++models;
        const auto km = m.to_kripke();
        bool ok = true;
        for (std::size_t w = 0; w < n && ok; ++w) ok = eval(km, w, pol) && eval(km, w, ta) && eval(km, w, tb);
        if (!ok) return true;
        ++satisfying;
        for (std::size_t w = 0; w < n; ++w) refuted = refuted || !eval(km, w, goal);
        return true;
      });
    o.require(!refuted, "polarity makes K sufficient");
    o.detail << " polarity: " << models << " models, " << satisfying << " satisfy the premises, none refutes";
    Verdict v = find_countermodel(mp({{"a -> N a", PremiseMode::Global}, {"b -> N b", PremiseMode::Global}}),
                                  parse("M a -> a"), FrameClass::K, 2);
    o.require(v.kind == Verdict::Kind::Countermodel, "K countermodel");
    if (v.model) {
      o.require(v.model->n_worlds == 2, "2 worlds");
      o.require(v.model->relation == std::set<std::pair<std::size_t, std::size_t>>{{0, 1}}, "relation {(0,1)}");
      o.require(v.model->valuation.at("a") == std::set<std::size_t>{1}, "a only at world 1");
      o.detail << "; without polarity: " << render(*v.model);
    }
  });

  criterion(9, "footnote: both conjuncts hold iff p is constant on universal models", [](Outcome& o) {
    const Formula both = parse("N(p -> N p) & N(~p -> N ~p)");
    const Formula c1 = parse("N(p -> N p)"), c2 = parse("N(~p -> N ~p)");
    std::size_t models = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
      for (std::size_t val = 0; val < (std::size_t{1} << n); ++val) {
        KripkeModel m;
        m.n_worlds = n;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) m.relation.insert({i, j});
        for (std::size_t w = 0; w < n; ++w)
          if ((val >> w) & 1) m.valuation["p"].insert(w);
        const bool constant = val == 0 || val == (std::size_t{1} << n) - 1;
        for (std::size_t d = 0; d < n; ++d) {
          m.designated = d;
          ++models;
          o.require(eval(m, d, both) == constant, "iff on " + render(m));
          if (!constant) o.require(!eval(m, d, c1) && !eval(m, d, c2), "both false on " + render(m));
        }
      }
    }
    o.detail << " " << models << " pointed universal models";
  });

  criterion(10, "500 random S5 goals: every prover result is decide_s5-valid", [](Outcome& o) {
    const auto s5 = LogicSystem::named("S5");
    oracle::Generator g(2024);
    g.constants = {"p", "q"};
    SearchLimits l;
    l.max_term_size = 3;
    std::size_t found = 0, discrepancies = 0;
    for (int i = 0; i < 500; ++i) {
      Formula goal = random_goal(g, s5);
      SearchResult r = prove(s5, {}, goal, l);
      if (!r.found) continue;
      ++found;
      if (decide_s5({}, goal).kind != Verdict::Kind::Valid) {
        ++discrepancies;
        o.detail << " discrepancy: " << render(goal);
      }
    }
    o.require(discrepancies == 0, "no discrepancy");
    o.require(found > 0, "some goals proved");
    o.detail << " " << found << " found, " << discrepancies << " discrepancies";
  });

  criterion(11, "full verify of the built-in corpus", [&](Outcome& o) {
    o.require(problems.size() >= 19, "at least 19 problems");
    const auto t0 = Clock::now();
    int status = -1;
    if (!cli.empty()) {
      status = std::system((cli + " verify > /dev/null").c_str());
      o.detail << " modalwb verify exit " << (status == 0 ? 0 : 1);
    } else {
      auto reports = verify_all(problems, 4);
      status = 0;
      for (const auto& r : reports) status |= !r.pass;
      o.detail << " in-process verify";
    }
    const double ms = ms_since(t0);
    o.require(status == 0, "exit status 0");
    o.require(ms < 120000, "under 2 minutes");
    o.detail << ", " << problems.size() << " problems";
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
