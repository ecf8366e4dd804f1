// modalwb: command-line front end for the modal logic workbench.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "modal/corpus.hpp"
#include "modal/formula.hpp"
#include "modal/kernel.hpp"
#include "modal/kripke.hpp"
#include "modal/prover.hpp"

using json = nlohmann::ordered_json;
using namespace modal;

namespace {

// Input errors map to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  bool json = false;
  std::string logic = "K";
  std::vector<std::string> schemas;
  std::vector<std::string> assumes;
  std::string mode = "global";
};

LogicSystem system_of(const Common& c) {
  if (!LogicSystem::is_named(c.logic)) throw UsageError("unknown logic '" + c.logic + "'");
  LogicSystem s = LogicSystem::named(c.logic);
  for (const auto& d : c.schemas) s = s.with(parse_schema_declaration(d));
  return s;
}

bool has_mode_word(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s.starts_with("global ") || s.starts_with("local ");
}

// Corpus premise grammar. Unnamed premises get p1, p2, ...; premises without
// a mode word take --mode.
std::vector<Premise> premises_of(const Common& c) {
  std::vector<Premise> out;
  for (std::size_t i = 0; i < c.assumes.size(); ++i) {
    std::string text = c.assumes[i];
    std::string_view body = text;
    if (has_mode_word(body)) body = body.substr(body.find(' ') + 1);
    if (body.find(':') == std::string_view::npos) {
      std::string prefix = has_mode_word(text) ? text.substr(0, text.find(' ') + 1) : "";
      text = prefix + "p" + std::to_string(i + 1) + ": " + std::string(body);
    }
    const bool explicit_mode = has_mode_word(text);
    Premise p = parse_premise(text);
    if (!explicit_mode) p.mode = c.mode == "local" ? PremiseMode::Local : PremiseMode::Global;
    out.push_back(std::move(p));
  }
  return out;
}

FrameClass frame_of(const std::string& name) {
  auto f = parse_frame_class(name);
  if (!f) throw UsageError("unknown frame class '" + name + "'");
  return *f;
}

json model_json(const KripkeModel& m) {
  json rel = json::array(), val = json::object();
  for (auto [a, b] : m.relation) rel.push_back({a, b});
  for (const auto& [atom, ws] : m.valuation) val[atom] = ws;
  return {{"worlds", m.n_worlds}, {"designated", m.designated}, {"relation", rel}, {"valuation", val},
          {"text", render(m)}};
}

json verdict_json(const Verdict& v) {
  json j{{"verdict", v.kind == Verdict::Kind::Valid          ? "valid"
                     : v.kind == Verdict::Kind::Countermodel ? "countermodel"
                                                             : "no-countermodel"},
         {"bound", v.bound},
         {"models_checked", v.models_checked}};
  j["model"] = v.model ? model_json(*v.model) : json(nullptr);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_common(CLI::App* cmd, Common& c, bool with_logic, bool with_mode) {
  cmd->add_flag("--json", c.json, "Machine-readable output");
  if (with_logic) {
    cmd->add_option("--logic", c.logic, "Named logic: K, T, KB, S4, S5")->capture_default_str();
    cmd->add_option("--schema", c.schemas, "Extra schema, e.g. \"hn(): M N q -> N q\"")->allow_extra_args(false);
  }
  cmd->add_option("--assume", c.assumes, "Premise, e.g. \"global ap: N(q -> N q)\"")->allow_extra_args(false);
  if (with_mode)
    cmd->add_option("--mode", c.mode, "Mode of premises without a mode word")
        ->check(CLI::IsMember({"local", "global"}))
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modal logic workbench: proof checking, proof search and Kripke countermodels"};
  app.require_subcommand(1, 1);
  Common c;

  std::string text;
  bool strict_arrow = false;
  auto* parse_cmd = app.add_subcommand("parse", "Print the canonical rendering of a formula");
  parse_cmd->add_option("formula", text, "Formula")->required();
  parse_cmd->add_flag("--strict-arrow", strict_arrow, "Read -> as strict implication");
  parse_cmd->add_flag("--json", c.json, "Machine-readable output");

  std::string term;
  bool trace = false;
  auto* check_cmd = app.add_subcommand("check", "Check a proof term");
  add_common(check_cmd, c, true, false);
  check_cmd->add_option("--term", term, "Proof term, e.g. \"D(t, D(5, D(D(km, ap), ip)))\"")->required();
  check_cmd->add_flag("--trace", trace, "Print every subterm");

  std::string goal;
  SearchLimits limits;
  auto* prove_cmd = app.add_subcommand("prove", "Search for a proof");
  add_common(prove_cmd, c, true, false);
  prove_cmd->add_option("goal", goal, "Goal formula")->required();
  prove_cmd->add_option("--max-size", limits.max_term_size, "Maximal proof term size")->capture_default_str();
  prove_cmd->add_option("--max-formula-size", limits.max_formula_size, "Node cap on derived formulas")
      ->capture_default_str();
  prove_cmd->add_option("--table-depth", limits.table_depth, "Forward table levels")->capture_default_str();

  std::string frame = "K";
  std::size_t max_worlds = 4;
  auto* counter_cmd = app.add_subcommand("counter", "Search for a Kripke countermodel");
  add_common(counter_cmd, c, false, true);
  counter_cmd->add_option("goal", goal, "Goal formula")->required();
  counter_cmd->add_option("--frame", frame, "Frame class: K, T, KB, S4, S5, Universal")->capture_default_str();
  counter_cmd->add_option("--max-worlds", max_worlds, "World bound")->capture_default_str();

  auto* s5_cmd = app.add_subcommand("decide-s5", "Decide an S5 entailment");
  add_common(s5_cmd, c, false, true);
  s5_cmd->add_option("goal", goal, "Goal formula")->required();

  std::string file, reading = "material";
  std::string dframe = "S5";
  std::size_t dworlds = 3;
  auto* deriv_cmd = app.add_subcommand("derivation", "Check a derivation line by line");
  deriv_cmd->add_option("file", file, "File with 'line <label>: <formula> [justification]' entries")->required();
  deriv_cmd->add_option("--reading", reading, "Arrow reading")
      ->check(CLI::IsMember({"strict", "material"}))
      ->capture_default_str();
  deriv_cmd->add_option("--mode", c.mode, "Premise mode")->check(CLI::IsMember({"local", "global"}))->capture_default_str();
  deriv_cmd->add_option("--frame", dframe, "Frame class")->capture_default_str();
  deriv_cmd->add_option("--max-worlds", dworlds, "World bound for non-S5 frames")->capture_default_str();
  deriv_cmd->add_flag("--json", c.json, "Machine-readable output");

  std::vector<std::string> files;
  unsigned threads = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  auto* verify_cmd = app.add_subcommand("verify", "Verify corpus files (default: the built-in corpus)");
  verify_cmd->add_option("files", files, "Problem files");
  verify_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--json", c.json, "Machine-readable output");

  auto* list_cmd = app.add_subcommand("corpus-list", "List the built-in problems");
  list_cmd->add_flag("--json", c.json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*parse_cmd) {
      ParseOptions o;
      o.arrow_is_strict = strict_arrow;
      Formula f = parse(text, {}, o);
      if (c.json)
        std::cout << json{{"input", text}, {"rendering", render(f)}, {"size", f.size()}}.dump(2) << '\n';
      else
        std::cout << render(f) << '\n';
      return 0;
    }

    if (*check_cmd) {
      LogicSystem sys = system_of(c);
      auto prem = premises_of(c);
      ProofTermPtr t = parse_proof_term(term);
      std::vector<TraceLine> lines;
      try {
        Judgement j = check_proof(*t, sys, prem, trace ? &lines : nullptr);
        if (c.json) {
          json tr = json::array();
          for (const auto& l : lines)
            tr.push_back({{"depth", l.depth}, {"term", l.term}, {"formula", render(l.judgement.formula)},
                          {"local", l.judgement.local_taint}});
          json out{{"ok", true}, {"term", render(*t)}, {"theorem", render(j.formula)}, {"local", j.local_taint}};
          if (trace) out["trace"] = tr;
          std::cout << out.dump(2) << '\n';
        } else {
          for (const auto& l : lines)
            std::cout << std::string(2 * l.depth, ' ') << l.term << " : " << render(l.judgement.formula)
                      << (l.judgement.local_taint ? "  [local]" : "") << '\n';
          std::cout << render(j.formula) << '\n';
        }
        return 0;
      } catch (const ProofError& e) {
        if (c.json)
          std::cout << json{{"ok", false}, {"term", render(*t)}, {"error", e.what()}}.dump(2) << '\n';
        else
          std::cout << "rejected: " << e.what() << '\n';
        return 1;
      }
    }

    if (*prove_cmd) {
      LogicSystem sys = system_of(c);
      auto prem = premises_of(c);
      Formula g = parse(goal);
      SearchResult r = prove(sys, prem, g, limits);
      if (c.json) {
        json out{{"found", r.found}, {"goal", render(g)}};
        out["term"] = r.found ? json(render(*r.term)) : json(nullptr);
        out["size"] = r.found ? json(r.term->size()) : json(nullptr);
        out["theorem"] = r.found ? json(render(r.theorem)) : json(nullptr);
        out["limit"] = r.found ? json(nullptr) : json(r.limit);
        out["nodes"] = r.nodes;
        std::cout << out.dump(2) << '\n';
      } else if (r.found) {
        std::cout << render(*r.term) << '\n' << render(r.theorem) << '\n';
      } else {
        std::cout << "exhausted (" << r.limit << ")\n";
      }
      return r.found ? 0 : 1;
    }

    if (*counter_cmd || *s5_cmd) {
      auto prem = modal_premises(premises_of(c));
      Formula g = parse(goal);
      Verdict v = *counter_cmd ? find_countermodel(prem, g, frame_of(frame), max_worlds) : decide_s5(prem, g);
      if (c.json)
        std::cout << verdict_json(v).dump(2) << '\n';
      else
        std::cout << describe(v) << '\n';
      if (*counter_cmd) return v.kind == Verdict::Kind::Countermodel ? 0 : 1;
      return v.kind == Verdict::Kind::Valid ? 0 : 1;
    }

    if (*deriv_cmd) {
      std::string body = "problem \"cli\"\nreading: " + reading + "\nmode: " + c.mode + "\nderivation:\n";
      std::istringstream in(read_file(file));
      for (std::string l; std::getline(in, l);) {
        auto pos = l.find_first_not_of(" \t");
        if (pos != std::string::npos && l.compare(pos, 4, "line") == 0) body += l + '\n';
      }
      body += "expect: derivation-passes\n";
      Problem p = load_text(body, file).at(0);
      DerivationReport rep = check_derivation(*p.derivation, frame_of(dframe), dworlds);
      auto status = [](LineReport::Status s) {
        switch (s) {
          case LineReport::Status::Premise:
            return "premise";
          case LineReport::Status::Pass:
            return "pass";
          case LineReport::Status::NoCountermodelUpTo:
            return "no-countermodel";
          case LineReport::Status::Refuted:
            return "refuted";
        }
        return "";
      };
      if (c.json) {
        json lines = json::array();
        for (std::size_t i = 0; i < rep.lines.size(); ++i) {
          const auto& lr = rep.lines[i];
          json j{{"label", lr.label}, {"formula", render(p.derivation->lines[i].formula)}, {"status", status(lr.status)}};
          j["model"] = lr.model ? model_json(*lr.model) : json(nullptr);
          lines.push_back(j);
        }
        std::cout << json{{"exact", rep.exact}, {"passed", rep.passed()}, {"lines", lines}}.dump(2) << '\n';
      } else {
        for (std::size_t i = 0; i < rep.lines.size(); ++i) {
          const auto& lr = rep.lines[i];
          std::cout << lr.label << ": " << render(p.derivation->lines[i].formula) << "  " << status(lr.status);
          if (lr.model) std::cout << "  " << render(*lr.model);
          std::cout << '\n';
        }
      }
      return rep.passed() ? 0 : 1;
    }

    if (*verify_cmd) {
      std::vector<Problem> problems;
      if (files.empty()) {
        problems = builtin_corpus();
      } else {
        for (const auto& f : files)
          for (auto& p : load(f)) problems.push_back(std::move(p));
      }
      auto reports = verify_all(problems, threads);
      std::size_t passed = 0;
      for (const auto& r : reports) passed += r.pass;
      if (c.json) {
        json recs = json::array();
        for (const auto& r : reports)
          recs.push_back({{"name", r.name}, {"pass", r.pass}, {"evidence", r.evidence}, {"time", r.time_ms}});
        std::cout << json{{"problems", recs}, {"passed", passed}, {"total", reports.size()}}.dump(2) << '\n';
      } else {
        for (const auto& r : reports) {
          std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  (" << static_cast<long>(r.time_ms) << " ms)\n";
          for (const auto& e : r.evidence) std::cout << "    " << e << '\n';
        }
        std::cout << passed << "/" << reports.size() << " problems pass\n";
      }
      return passed == reports.size() ? 0 : 1;
    }

    if (*list_cmd) {
      auto problems = builtin_corpus();
      if (c.json) {
        json recs = json::array();
        for (const auto& p : problems)
          recs.push_back({{"name", p.name}, {"file", p.file}, {"logic", p.logic}, {"expect", to_string(p.expect)}});
        std::cout << recs.dump(2) << '\n';
      } else {
        for (const auto& p : problems)
          std::cout << p.name << "  " << p.file << "  " << p.logic << "  " << to_string(p.expect) << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
