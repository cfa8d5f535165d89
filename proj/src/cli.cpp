#include "laxkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "laxkit/coalgebra.hpp"
#include "laxkit/json_io.hpp"
#include "laxkit/lax.hpp"
#include "laxkit/preservation.hpp"

namespace laxkit::cli {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

// A --functor value is either a builtin name or a path to a spec file.
FunctorHandle resolve_functor(const std::string& value) {
  try {
    return functor_by_name(value);
  } catch (const std::invalid_argument&) {
    return build_functor(load_json_file(value));
  }
}

struct Emitter {
  std::ostream& out;
  std::string out_path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  // Assembles the final report, writes it, and returns the exit code.
  int finish(const std::string& command, const json& inputs, bool pass,
             json payload) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    json report{{"command", command},
                {"inputs_digest", json_digest(inputs)},
                {"verdict", pass ? "pass" : "fail"},
                {"wall_time_ms", ms}};
    report.update(payload);
    if (!out_path.empty()) {
      std::ofstream f(out_path);
      f << report.dump(2) << "\n";
    }
    out << report.dump(2) << "\n";
    return pass ? 0 : 1;
  }
};

int cmd_validate(const std::string& functor, std::size_t bound, Emitter& em) {
  FunctorHandle F = resolve_functor(functor);
  auto report = validate_functoriality(*F, bound);
  json payload{{"functor", F->spec_json()}, {"bound", bound}};
  if (!report.pass) payload["detail"] = report.detail;
  return em.finish("validate-functor", payload, report.pass, payload);
}

int cmd_check(const std::string& functor, const std::string& shape, std::size_t bound,
              std::size_t jobs, Emitter& em) {
  FunctorHandle F = resolve_functor(functor);
  auto sh = shape_from_name(shape);
  if (!sh) throw CLI::ValidationError("--shape", "unknown shape " + shape);
  auto report = check_preservation(F, *sh, bound, jobs);
  json inputs{{"functor", F->spec_json()}, {"shape", shape}, {"bound", bound}};
  return em.finish("check", inputs, report.pass, report.to_json());
}

int cmd_monoid(const std::string& spec, Emitter& em) {
  MonoidSpec m = [&]() {
    if (spec == "z2") return monoid_z2();
    if (spec == "sat012") return monoid_sat012();
    if (spec.rfind("nat", 0) == 0 && spec.size() > 3)
      return monoid_truncated_nat(std::stoul(spec.substr(3)));
    json j = load_json_file(spec);
    FinSet carrier(j.at("carrier").get<std::vector<std::string>>());
    std::vector<std::vector<std::size_t>> table;
    for (const auto& row : j.at("table")) {
      std::vector<std::size_t> r;
      for (const auto& cell : row) r.push_back(carrier.index_of(cell.get<std::string>()));
      table.push_back(std::move(r));
    }
    return MonoidSpec(carrier, std::move(table),
                      carrier.index_of(j.at("zero").get<std::string>()),
                      j.value("name", "monoid"));
  }();
  auto analysis = monoid_analysis(m);
  json payload{{"monoid", m.name()},
               {"positive", analysis.positive},
               {"refinable", analysis.refinable}};
  if (analysis.inverse_witness)
    payload["inverse_witness"] = {analysis.inverse_witness->first,
                                  analysis.inverse_witness->second};
  if (analysis.refinability_witness) {
    const auto& w = *analysis.refinability_witness;
    payload["refinability_witness"] = {w[0], w[1], w[2], w[3]};
  }
  return em.finish("monoid", payload, true, payload);
}

int cmd_barr(const std::string& functor, const std::string& rel_path, Emitter& em) {
  FunctorHandle F = resolve_functor(functor);
  Rel r = rel_from_json(load_json_file(rel_path));
  Rel lifted = barr_lift(*F, r);
  json inputs{{"functor", F->spec_json()}, {"rel", rel_to_json(r)}};
  json payload{{"lifted", rel_to_json(lifted)}};
  return em.finish("barr", inputs, true, payload);
}

int cmd_laxify(const std::string& functor, const std::string& rel_path,
               std::size_t max_len, std::size_t max_mid, std::size_t budget,
               std::uint64_t seed, Emitter& em) {
  FunctorHandle F = resolve_functor(functor);
  Rel r = rel_from_json(load_json_file(rel_path));
  LaxifyOptions opts;
  opts.max_len = max_len;
  opts.max_mid = max_mid;
  opts.budget = budget;
  opts.seed = seed;
  Rel lifted = laxification_approx(*F, r, opts);
  json inputs{{"functor", F->spec_json()},
              {"rel", rel_to_json(r)},
              {"max_len", max_len},
              {"max_mid", max_mid}};
  json payload{{"lifted", rel_to_json(lifted)},
               {"bounds", {{"max_len", max_len}, {"max_mid", opts.max_mid}}}};
  return em.finish("laxify", inputs, true, payload);
}

int cmd_normality(const std::string& functor, std::size_t set_size,
                  std::size_t max_len, std::size_t max_mid, std::size_t ceiling,
                  std::size_t budget, std::uint64_t seed,
                  const std::string& verify_path, Emitter& em) {
  FunctorHandle F = resolve_functor(functor);
  if (!verify_path.empty()) {
    RelSeq seq(relseq_from_json(load_json_file(verify_path)));
    auto witness = verify_normality_violation(*F, seq);
    json inputs{{"functor", F->spec_json()}, {"verify", verify_path}};
    json payload;
    if (witness) payload["witness"] = witness->to_json();
    return em.finish("normality", inputs, !witness.has_value(), payload);
  }
  NormalitySearchOptions opts;
  opts.max_len = max_len;
  opts.max_mid = max_mid;
  opts.exhaustive_ceiling = ceiling;
  opts.sample_budget = budget;
  opts.seed = seed;
  auto result = normality_search(*F, canonical_set(set_size), opts);
  json inputs{{"functor", F->spec_json()},
              {"set", set_size},
              {"max_len", max_len},
              {"max_mid", max_mid}};
  json payload{{"exhausted", result.exhausted},
               {"sequences_checked", result.sequences_checked},
               {"bounds", {{"max_len", max_len}, {"max_mid", opts.max_mid}}}};
  if (result.witness) {
    payload["witness"] = result.witness->to_json();
  } else {
    payload["note"] = "no violation found within bounds";
  }
  return em.finish("normality", inputs, !result.witness.has_value(), payload);
}

int cmd_bisim(const std::string& a_path, const std::string& b_path,
              const std::string& backend_name_str, Emitter& em) {
  Coalgebra a = Coalgebra::from_json(load_json_file(a_path));
  Coalgebra b = Coalgebra::from_json(load_json_file(b_path));
  auto backend = backend_from_name(backend_name_str);
  if (!backend) throw CLI::ValidationError("--backend", "unknown backend");
  Rel bisim = greatest_L_bisimulation(a, b, *backend);
  Rel beh = behavioural_equivalence(a, b);
  json inputs{{"a", a.to_json()}, {"b", b.to_json()}, {"backend", backend_name_str}};
  json payload{{"backend", backend_name_str},
               {"bisimulation", rel_to_json(bisim)},
               {"behavioural_equivalence", rel_to_json(beh)},
               {"coincide", bisim == beh}};
  return em.finish("bisim", inputs, true, payload);
}

// Scoreboard of the reproduced worked examples.
int cmd_paper_suite(Emitter& em, std::ostream& out) {
  struct Scenario {
    std::string name;
    std::function<bool()> run;
  };
  std::vector<Scenario> scenarios;

  scenarios.push_back({"neighbourhood fails iso-quarter at bound 2 on (∅↪1, 2→1)", [] {
    auto report = check_preservation(neighbourhood_functor(), SquareShape::IsoQuarter, 2);
    if (report.pass || !report.witness_square) return false;
    const Square& sq = *report.witness_square;
    return sq.f.dom().size() == 0 && sq.g.dom().size() == 2 && sq.f.cod().size() == 1;
  }});

  scenarios.push_back({"monotone sends ↑{0,1} ∪ ↑{1,2} to ↑{0} along 3→2", [] {
    auto F = monotone_neighbourhood_functor();
    FinSet three = canonical_set(3), two = canonical_set(2);
    FinFun e(three, two, {0, 0, 1});
    return F->map_element(e, "↑{0,1} ∪ ↑{1,2}") == "↑{0}";
  }});

  scenarios.push_back({"monotone weakly preserves the 4/4-epi square 2,2 over 1", [] {
    auto F = monotone_neighbourhood_functor();
    FinSet two = canonical_set(2), one = canonical_set(1);
    FinFun bang(two, one, {0, 0});
    return check_square_weak_preservation(*F, Square::of_cospan(bang, bang));
  }});

  scenarios.push_back({"monoid z2 collapses (1,1) with the empty map along 2→1", [] {
    auto F = monoid_valued_functor(monoid_z2());
    FinSet two = canonical_set(2), one = canonical_set(1);
    FinFun bang(two, one, {0, 0});
    return F->map_element(bang, "{0:1,1:1}") == "{}" &&
           F->map_element(bang, "{}") == "{}";
  }});

  scenarios.push_back({"monoid z2 fails iso-quarter at bound 2", [] {
    auto report = check_preservation(monoid_valued_functor(monoid_z2()),
                                     SquareShape::IsoQuarter, 2);
    return !report.pass && report.witness_pair &&
           report.witness_pair->second == "{0:1,1:1}";
  }});

  scenarios.push_back({"monoid z2 is not positive, sat012 is positive not refinable", [] {
    auto z2 = monoid_analysis(monoid_z2());
    auto sat = monoid_analysis(monoid_sat012());
    return !z2.positive && sat.positive && !sat.refinable;
  }});

  scenarios.push_back({"x5 quotient: sequence composes to the identity", [] {
    x5_quotient_sequence();
    return true;
  }});

  scenarios.push_back({"x5 quotient preserves iso-quarter pullbacks at bound 2", [] {
    return check_preservation(x5_quotient_functor(), SquareShape::IsoQuarter, 2).pass;
  }});

  scenarios.push_back({"x5 quotient: Barr lifts of the sequence relate two classes", [] {
    auto F = x5_quotient_functor();
    auto witness = verify_normality_violation(*F, x5_quotient_sequence());
    if (!witness) return false;
    FinSet two({"x", "y"});
    const FinSet& codes = F->carrier(two);
    // h(x,y) = f(x,x,x,y,y) and u(x,y) = g(x,x,y,y,y) stay distinct.
    std::string h, u;
    for (const auto& c : codes.atoms()) {
      if (c == "f(x,x,x,y,y)" || c == "f(y,x,x,y,y)") h = c;
    }
    for (const auto& c : codes.atoms()) {
      if (c == "g(x,x,y,y,x)" || c == "g(x,x,y,y,y)") u = c;
    }
    return !h.empty() && !u.empty() && h != u &&
           ((witness->codes.first == h && witness->codes.second == u) ||
            (witness->codes.first == u && witness->codes.second == h));
  }});

  scenarios.push_back({"x5 quotient passes the pair/triple normality check at bound 2", [] {
    return check_pair_triple_normality(x5_quotient_functor(), 2).pass;
  }});

  scenarios.push_back({"x3 quotient: exhaustive search at (3,3) finds no violation", [] {
    NormalitySearchOptions opts;
    opts.max_len = 3;
    opts.max_mid = 3;
    auto result = normality_search(*x3_quotient_functor(), canonical_set(2), opts);
    return result.exhausted && !result.witness;
  }});

  scenarios.push_back({"bounded words: a·b·a and a·b do not lift over the kernel of 2→1", [] {
    auto F = bounded_words_functor(4);
    FinSet two = canonical_set(2), one = canonical_set(1);
    FinFun bang(two, one, {0, 0});
    Square sq = Square::of_cospan(bang, bang);
    return !check_square_weak_preservation(*F, sq) &&
           !weak_lift_exists(*F, sq, "0·1·0", "0·1");
  }});

  scenarios.push_back({"pair normality: neighbourhood fails, monotone passes at bound 2", [] {
    return !check_pair_triple_normality(neighbourhood_functor(), 2).pass &&
           check_pair_triple_normality(monotone_neighbourhood_functor(), 2).pass;
  }});

  bool all = true;
  json lines = json::array();
  for (const auto& s : scenarios) {
    bool ok = false;
    std::string error;
    try {
      ok = s.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    all = all && ok;
    out << (ok ? "[PASS] " : "[FAIL] ") << s.name;
    if (!error.empty()) out << "  (" << error << ")";
    out << "\n";
    lines.push_back({{"name", s.name}, {"pass", ok}});
  }
  json payload{{"scenarios", lines}};
  return em.finish("paper-suite", payload, all, payload);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"laxkit: relation liftings, pullback-preservation checks, "
               "normality search and bisimulation for finite set-functors"};
  app.require_subcommand(1);

  std::string functor, shape = "general", rel_path, verify_path, out_path;
  std::string a_path, b_path, backend = "barr", monoid_spec;
  std::size_t bound = 3, jobs = 1, set_size = 2;
  std::size_t max_len = 4, max_mid = 0, budget = 200'000, ceiling = 10'000'000;
  std::uint64_t seed = 0xba111adULL;

  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the JSON report to a file");
  };

  auto* validate = app.add_subcommand("validate-functor", "check functor laws");
  validate->add_option("--functor", functor, "builtin name or spec file")->required();
  validate->add_option("--bound", bound, "size bound");
  add_out(validate);

  auto* check = app.add_subcommand("check", "pullback preservation check");
  check->add_option("--functor", functor)->required();
  check->add_option("--shape", shape,
                    "iso-quarter|iso-mono-quarter|mono-quarter|epi-all|kernel-pair|general");
  check->add_option("--bound", bound);
  check->add_option("--jobs", jobs, "worker fan-out");
  add_out(check);

  auto* monoid = app.add_subcommand("monoid", "positivity / refinability analysis");
  monoid->add_option("--spec", monoid_spec, "z2|sat012|natK or a JSON file")->required();
  add_out(monoid);

  auto* barr = app.add_subcommand("barr", "Barr lift of a relation");
  barr->add_option("--functor", functor)->required();
  barr->add_option("--rel", rel_path)->required();
  add_out(barr);

  auto* laxify = app.add_subcommand("laxify", "laxification approximant");
  laxify->add_option("--functor", functor)->required();
  laxify->add_option("--rel", rel_path)->required();
  laxify->add_option("--max-len", max_len);
  laxify->add_option("--max-mid", max_mid);
  laxify->add_option("--budget", budget);
  laxify->add_option("--seed", seed);
  add_out(laxify);

  auto* normality = app.add_subcommand("normality", "normality verification / search");
  normality->add_option("--functor", functor)->required();
  normality->add_option("--set", set_size, "canonical base set size");
  normality->add_option("--max-len", max_len);
  normality->add_option("--max-mid", max_mid);
  normality->add_option("--ceiling", ceiling, "exhaustive enumeration ceiling");
  normality->add_option("--budget", budget, "sampling budget");
  normality->add_option("--seed", seed);
  normality->add_option("--verify", verify_path, "sequence JSON to verify");
  add_out(normality);

  auto* bisim = app.add_subcommand("bisim", "greatest L-bisimulation");
  bisim->add_option("--a", a_path)->required();
  bisim->add_option("--b", b_path)->required();
  bisim->add_option("--backend", backend, "barr|laxify:K:M|difunctional");
  add_out(bisim);

  auto* suite = app.add_subcommand("paper-suite", "scoreboard of worked examples");
  add_out(suite);

  std::vector<std::string> argv(args);
  std::reverse(argv.begin(), argv.end());  // CLI11's vector overload wants reverse order
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Emitter em{out, out_path};
  try {
    if (validate->parsed()) return cmd_validate(functor, bound, em);
    if (check->parsed()) return cmd_check(functor, shape, bound, jobs, em);
    if (monoid->parsed()) return cmd_monoid(monoid_spec, em);
    if (barr->parsed()) return cmd_barr(functor, rel_path, em);
    if (laxify->parsed())
      return cmd_laxify(functor, rel_path, max_len, max_mid, budget, seed, em);
    if (normality->parsed())
      return cmd_normality(functor, set_size, max_len, max_mid, ceiling, budget, seed,
                           verify_path, em);
    if (bisim->parsed()) return cmd_bisim(a_path, b_path, backend, em);
    if (suite->parsed()) return cmd_paper_suite(em, out);
  } catch (const nlohmann::json::parse_error& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace laxkit::cli
