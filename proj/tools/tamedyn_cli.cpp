#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tamedyn/conjugacy.hpp"
#include "tamedyn/families.hpp"
#include "tamedyn/hensel.hpp"
#include "tamedyn/io.hpp"

using namespace tamedyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitExhausted = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExhausted:
    case ErrorCode::PrecisionExhausted:
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::OrderInsufficient:
      return kExitExhausted;
    default:
      return kExitInput;
  }
}

struct Flags {
  std::vector<std::string> inputs;
  std::optional<int> budget;
  std::optional<std::string> precision;
  int depth = 4;
  std::string rho = "inf";
  std::string format = "json";
  std::optional<std::string> at;
  std::string target = "40";
  int max_iter = 16;
  std::vector<std::string> samples;
  int order = 4;
  int trials = 4;
  std::optional<std::string> sub_center;
  std::optional<std::string> sub_radius;
  bool permute = false;
  bool negative_control = false;
};

// resolved, validated settings shared by all subcommands
struct Settings {
  int budget = kDefaultBudget;
  Rational precision = 20;
  Val rho = Val::infinity();
  Val target = Val(40);
};

int env_int(const char* name, int fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  Rational q = parse_rational(raw);
  if (q.get_den() != 1 || q <= 0 || q > 1000000)
    throw Error(ErrorCode::InputError, std::string(name) + " must be a positive integer");
  return static_cast<int>(q.get_num().get_si());
}

Settings resolve(const Flags& fl) {
  Settings s;
  s.budget = fl.budget ? *fl.budget : env_int("BERK_BUDGET", kDefaultBudget);
  if (s.budget <= 0) throw Error(ErrorCode::InputError, "--budget must be positive");
  if (fl.precision) {
    s.precision = parse_rational(*fl.precision);
  } else if (const char* raw = std::getenv("BERK_PRECISION"); raw && *raw) {
    s.precision = parse_rational(raw);
  }
  if (s.precision <= 0) throw Error(ErrorCode::InputError, "precision must be positive");
  s.rho = Val::parse(fl.rho);
  if (s.rho <= Val(0)) throw Error(ErrorCode::InputError, "--rho must be positive or inf");
  s.target = Val::parse(fl.target);
  if (fl.depth < 0) throw Error(ErrorCode::InputError, "--depth must be non-negative");
  if (fl.order < 0) throw Error(ErrorCode::InputError, "--order must be non-negative");
  if (fl.trials < 0) throw Error(ErrorCode::InputError, "--trials must be non-negative");
  if (fl.max_iter < 0) throw Error(ErrorCode::InputError, "--max-iter must be non-negative");
  if (fl.format != "json" && fl.format != "dot") throw Error(ErrorCode::InputError, "--format must be json or dot");
  return s;
}

Scalar scalar_arg(const FieldRef& F, const std::string& text) {
  if (!text.empty() && text.front() == '[') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InputError, "bad scalar '" + text + "'");
    }
    return scalar_from_json(F, j);
  }
  return Scalar(F, parse_rational(text));
}

Json error_json(const Error& e) { return Json{{"code", error_name(e.code())}, {"detail", e.detail()}}; }

Json escape_json(const EscapeRecord& r) {
  Json out;
  out["kind"] = escape_kind_name(r.kind);
  out["first_exit"] = r.first_exit >= 0 ? Json(r.first_exit) : Json(nullptr);
  out["bounded"] = r.kind == EscapeKind::Bounded ? Json(bounded_kind_name(r.bounded)) : Json(nullptr);
  out["diam_exp"] = r.kind == EscapeKind::Bounded ? val_to_json(r.diam_exp) : Json(nullptr);
  out["budget_spent"] = r.budget_spent;
  out["reason"] = r.reason;
  return out;
}

Json witness_json(const Witness& w) {
  return Json{{"mark", w.mark}, {"iterate", w.iterate}, {"radius_exp", val_to_json(w.q)}};
}

Json clause_json(const ClauseResult& c) {
  return Json{{"verdict", verdict_name(c.verdict)}, {"detail", c.detail}};
}

Json report_json(const VerificationReport& r) {
  Json out;
  out["isometry"] = clause_json(r.isometry);
  out["equivariance"] = clause_json(r.equivariance);
  out["local_translation"] = clause_json(r.local_translation);
  out["boettcher"] = clause_json(r.boettcher);
  out["verified_depth"] = r.verified_depth;
  out["overall"] = r.overall() ? "Pass" : "Fail";
  return out;
}

Json rho_json(const RhoBound& rb) {
  Json per = Json::array();
  for (const auto& v : rb.per_mark) per.push_back(val_to_json(v));
  return Json{{"rho", val_to_json(rb.rho)}, {"per_mark", per}, {"first_exit", rb.first_exit}};
}

Json julia_json(const MarkedPolynomial& f, const JuliaReport& rep, int budget) {
  Json out;
  out["classification"] = classification_name(rep.classification);
  Json marks = Json::array();
  std::optional<Val> min_mod;
  for (std::size_t i = 0; i < rep.marks.size(); ++i) {
    Json m;
    m["index"] = i;
    m["point"] = scalar_to_json(f.marks()[i].point);
    m["mult"] = f.marks()[i].mult;
    m["escape"] = escape_json(rep.marks[i]);
    if (rep.marks[i].kind == EscapeKind::Escaping) {
      Val mod = boettcher_modulus(f, BerkPoint(f.marks()[i].point, Val::infinity()), budget);
      m["boettcher_modulus_exp"] = val_to_json(mod);
      min_mod = min_mod ? vmin(*min_mod, mod) : mod;
    } else {
      m["boettcher_modulus_exp"] = nullptr;
    }
    marks.push_back(m);
  }
  out["marks"] = marks;
  if (min_mod && !f.is_simple()) {
    out["base_identity"] = Json{{"min_escaping_modulus_exp", val_to_json(*min_mod)},
                                {"holds", *min_mod == Val(f.base_exp())}};
  } else {
    out["base_identity"] = nullptr;
  }
  return out;
}

MarkedPolynomial load_poly(const std::string& path) { return polynomial_from_json(read_json_file(path)); }

Json cmd_analyze(const Flags& fl, const Settings& s, Json& config) {
  MarkedPolynomial f = load_poly(fl.inputs.at(0));
  config["backend"] = field_to_json(f.field());
  config["budget"] = s.budget;
  Json out;
  out["polynomial"] = polynomial_to_json(f);
  out["degree"] = f.degree();
  out["base_radius_exp"] = rat_str(f.base_exp());
  out["base_point"] = point_to_json(f.base_point());
  const TamenessResult& t = f.tameness();
  Json tj;
  tj["tame"] = t.tame;
  tj["offending_degree"] = t.tame ? Json(nullptr) : Json(t.degree);
  tj["witness"] = t.witness ? point_to_json(*t.witness) : Json(nullptr);
  out["tameness"] = tj;
  if (!t.tame) {
    out["simple"] = nullptr;
    out["classification"] = nullptr;
    out["rejected"] = Json{{"code", "NotTame"}, {"detail", "local degree " + std::to_string(t.degree) + " is divisible by p"}};
    return out;
  }
  out["simple"] = f.is_simple();
  JuliaReport rep = julia_in_affine(f, s.budget);
  Json jj = julia_json(f, rep, s.budget);
  for (auto& [k, v] : jj.items()) out[k] = v;
  return out;
}

std::optional<std::string> cmd_core(const Flags& fl, const Settings& s, Json& config, Json& result) {
  MarkedPolynomial f = load_poly(fl.inputs.at(0));
  config["backend"] = field_to_json(f.field());
  config["rho"] = val_to_json(s.rho);
  config["depth"] = fl.depth;
  config["budget"] = s.budget;
  config["format"] = fl.format;
  CoreTree tree = build_core(f, s.rho, fl.depth, s.budget);
  if (fl.format == "dot") return export_core(tree, ExportFormat::Dot);
  result = core_to_json(tree);
  Json checks = Json::array();
  for (std::size_t k = 0; k < tree.edges.size(); ++k) {
    ExpansionCheck ec = edge_expansion(tree, k);
    checks.push_back(Json{{"edge", k}, {"ok", ec.ok}, {"length", val_to_json(ec.length)}, {"image_length", val_to_json(ec.image_length)}});
  }
  result["expansion"] = checks;
  return std::nullopt;
}

Json cmd_compare(const Flags& fl, const Settings& s, Json& config) {
  MarkedPolynomial f = load_poly(fl.inputs.at(0));
  MarkedPolynomial g = load_poly(fl.inputs.at(1));
  if (!same_field(f.field(), g.field())) throw Error(ErrorCode::InputError, "inputs use different backends");
  config["backend"] = field_to_json(f.field());
  config["rho"] = val_to_json(s.rho);
  config["depth"] = fl.depth;
  config["precision"] = rat_str(s.precision);
  config["budget"] = s.budget;
  config["permute"] = fl.permute;
  config["negative_control"] = fl.negative_control;
  Json out;
  try {
    out["rho_closeness"] = rho_json(rho_closeness(f, g, s.precision, s.budget));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotComparable) throw;
    out["rho_closeness"] = Json{{"error", error_json(e)}};
  }
  ConjugacyOptions opt;
  opt.try_permutations = fl.permute;
  ConjugacyOutcome res;
  try {
    res = build_conjugacy(f, g, s.rho, fl.depth, s.budget, s.precision, opt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotComparable) throw;
    out["outcome"] = "NotComparable";
    out["reason"] = error_json(e);
    return out;
  }
  if (res.failure) {
    const FailureWitness& fw = *res.failure;
    out["outcome"] = "FailureWitness";
    out["failure"] = Json{{"first", witness_json(fw.first)}, {"second", witness_json(fw.second)}, {"level", fw.level}, {"detail", fw.detail}};
    return out;
  }
  const ConjugacyMap& h = *res.map;
  out["outcome"] = "Conjugacy";
  out["counts"] = Json{{"source_vertices", h.source.vertices.size()}, {"source_edges", h.source.edges.size()},
                       {"target_vertices", h.target.vertices.size()}, {"target_edges", h.target.edges.size()}};
  Json vm = Json::array();
  for (std::size_t i = 0; i < h.source.vertices.size(); ++i) {
    Json e;
    e["source"] = point_to_json(h.source.vertices[i].point);
    e["target"] = h.vertex_map[i] ? point_to_json(h.target.vertices[*h.vertex_map[i]].point) : Json(nullptr);
    e["translation"] = scalar_to_json(h.translation[i]);
    e["level"] = h.source.vertices[i].level;
    vm.push_back(e);
  }
  out["vertex_map"] = vm;
  out["report"] = report_json(h.report);
  out["overall"] = h.report.overall() ? "Pass" : "Fail";
  out["verified_depth"] = h.report.verified_depth;
  if (fl.negative_control) out["negative_control"] = report_json(verify_extendable(corrupt_swap(h), s.precision));
  return out;
}

Json cmd_boettcher(const Flags& fl, const Settings& s, Json& config) {
  MarkedPolynomial f = load_poly(fl.inputs.at(0));
  if (!fl.at) throw Error(ErrorCode::InputError, "--at is required");
  Scalar z = scalar_arg(f.field(), *fl.at);
  config["backend"] = field_to_json(f.field());
  config["at"] = scalar_to_json(z);
  config["precision"] = rat_str(s.precision);
  PhiResult phi = phi_eval_detail(f, z, s.precision);
  Json out;
  out["z"] = scalar_to_json(z);
  out["phi"] = scalar_to_json(phi.value);
  out["factors"] = phi.factors;
  out["functional_equation_residual"] = val_to_json(functional_equation_residual(f, z, s.precision));
  return out;
}

Json cmd_lift(const Flags& fl, const Settings& s, Json& config) {
  Poly f = raw_polynomial_from_json(read_json_file(fl.inputs.at(0)));
  Poly g = raw_polynomial_from_json(read_json_file(fl.inputs.at(1)));
  if (!same_field(f.field(), g.field())) throw Error(ErrorCode::InputError, "inputs use different backends");
  if (!fl.at) throw Error(ErrorCode::InputError, "--at is required");
  Scalar x = scalar_arg(f.field(), *fl.at);
  config["backend"] = field_to_json(f.field());
  config["at"] = scalar_to_json(x);
  config["target"] = val_to_json(s.target);
  config["max_iter"] = fl.max_iter;
  LiftResult r = lift(f, g, x, s.target, default_lift_params(f, g, fl.max_iter));
  Json out;
  out["value"] = scalar_to_json(r.value);
  out["certified_valuation"] = val_to_json(r.certified_valuation);
  out["displacement"] = val_to_json(r.displacement);
  out["iterations"] = r.trace.size() - 1;
  out["params"] = Json{{"s", val_to_json(r.params.s)}, {"mu", val_to_json(r.params.mu)}, {"r", rat_str(r.params.r)},
                       {"rho", rat_str(r.params.rho)}, {"max_iter", r.params.max_iter}};
  Json tr = Json::array();
  for (const auto& st : r.trace)
    tr.push_back(Json{{"z", scalar_to_json(st.z)}, {"w_val", val_to_json(st.w_val)}, {"residual_val", val_to_json(st.residual_val)}});
  out["trace"] = tr;
  return out;
}

Json defects_json(const std::vector<FamilyDefect>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(Json{{"lambda", scalar_to_json(d.lambda)}, {"reason", d.reason}});
  return out;
}

Json cmd_family(const std::string& mode, const Flags& fl, const Settings& s, Json& config) {
  Family fam = family_from_json(read_json_file(fl.inputs.at(0)));
  const FieldRef& F = fam.field();
  config["backend"] = field_to_json(F);
  config["disk"] = Json{{"center", scalar_to_json(fam.disk().center)}, {"radius_exp", val_to_json(fam.disk().radius_exp)}};
  config["budget"] = s.budget;
  Json out;
  if (mode == "report") {
    std::vector<Scalar> samples;
    for (const auto& t : fl.samples) samples.push_back(scalar_arg(F, t));
    if (samples.empty()) samples = default_samples(fam, fam.disk(), 4);
    Json sj = Json::array();
    for (const auto& x : samples) sj.push_back(scalar_to_json(x));
    config["samples"] = sj;
    PassivityReport pr = passivity_report(fam, samples, s.budget);
    Json used = Json::array();
    for (const auto& x : pr.samples) used.push_back(scalar_to_json(x));
    out["samples"] = used;
    out["defects"] = defects_json(pr.defects);
    Json marks = Json::array();
    for (std::size_t i = 0; i < pr.marks.size(); ++i) {
      const MarkPassivity& m = pr.marks[i];
      Json mj;
      mj["index"] = i;
      mj["verdict"] = passivity_name(m.kind);
      mj["witnesses"] = m.kind == PassivityKind::Active ? Json::array({scalar_to_json(*m.witness_a), scalar_to_json(*m.witness_b)})
                                                        : Json(nullptr);
      Json per = Json::array();
      for (auto k : m.per_sample) per.push_back(escape_kind_name(k));
      mj["per_sample"] = per;
      marks.push_back(mj);
    }
    out["marks"] = marks;
    out["note"] = pr.note;
    Constancy c = base_point_constancy(fam, samples);
    Json cj;
    cj["constant"] = c.constant;
    cj["exp"] = c.exp ? Json(rat_str(*c.exp)) : Json(nullptr);
    if (!c.constant)
      cj["witnesses"] = Json::array({Json{{"lambda", scalar_to_json(c.first->first)}, {"exp", rat_str(c.first->second)}},
                                     Json{{"lambda", scalar_to_json(c.second->first)}, {"exp", rat_str(c.second->second)}}});
    out["base_point_constancy"] = cj;
    return out;
  }
  if (mode == "rho") {
    ParamDisk sub = fam.disk();
    if (fl.sub_center) sub.center = scalar_arg(F, *fl.sub_center);
    if (fl.sub_radius) sub.radius_exp = Val::parse(*fl.sub_radius);
    config["subdisk"] = Json{{"center", scalar_to_json(sub.center)}, {"radius_exp", val_to_json(sub.radius_exp)}};
    config["order"] = fl.order;
    config["precision"] = rat_str(s.precision);
    FamilyRhoOptions opt;
    opt.budget = s.budget;
    FamilyRho fr = family_rho_bound(fam, sub, fl.order, s.precision, opt);
    out = rho_json(fr.bound);
    Json mains = Json::array(), tails = Json::array();
    for (const auto& v : fr.main_term) mains.push_back(val_to_json(v));
    for (const auto& v : fr.tail) tails.push_back(val_to_json(v));
    out["main_term"] = mains;
    out["tail"] = tails;
    out["note"] = fr.note;
    return out;
  }
  Scalar lam0 = fl.at ? scalar_arg(F, *fl.at) : fam.disk().center;
  config["at"] = scalar_to_json(lam0);
  config["trials"] = fl.trials;
  PerturbResult pr = perturb_to_escape(fam, lam0, s.budget, fl.trials);
  out["found"] = pr.found;
  out["lambda"] = pr.lambda ? scalar_to_json(*pr.lambda) : Json(nullptr);
  out["tried"] = pr.tried;
  Json vis = Json::array();
  for (const auto& x : pr.visited) vis.push_back(scalar_to_json(x));
  out["visited"] = vis;
  out["note"] = pr.note;
  out["report"] = pr.report ? julia_json(fam.at(*pr.lambda), *pr.report, s.budget) : Json(nullptr);
  return out;
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of tame polynomials on the Berkovich affine line"};
  app.require_subcommand(1);
  Flags fl;

  auto add_budget = [&](CLI::App* sc) { sc->add_option("--budget", fl.budget, "iteration budget (env BERK_BUDGET)"); };
  auto add_precision = [&](CLI::App* sc) { sc->add_option("--precision", fl.precision, "valuation precision (env BERK_PRECISION)"); };

  auto* analyze = app.add_subcommand("analyze", "base point, tameness, escape data, classification");
  analyze->add_option("f", fl.inputs, "polynomial JSON")->required()->expected(1);
  add_budget(analyze);

  auto* core = app.add_subcommand("core", "truncated trimmed dynamical core");
  core->add_option("f", fl.inputs, "polynomial JSON")->required()->expected(1);
  core->add_option("--rho", fl.rho, "trim distance (rational or inf)");
  core->add_option("--depth", fl.depth, "level depth J");
  core->add_option("--format", fl.format, "json or dot");
  add_budget(core);

  auto* compare = app.add_subcommand("compare", "Boettcher closeness and extendable conjugacy between two cores");
  compare->add_option("files", fl.inputs, "f.json g.json")->required()->expected(2);
  compare->add_option("--rho", fl.rho, "trim distance (rational or inf)");
  compare->add_option("--depth", fl.depth, "level depth J");
  compare->add_flag("--permute", fl.permute, "also try permutations of the marks of g");
  compare->add_flag("--negative-control", fl.negative_control, "verify a deliberately corrupted map as well");
  add_precision(compare);
  add_budget(compare);

  auto* boettcher = app.add_subcommand("boettcher", "evaluate the Boettcher coordinate");
  boettcher->add_option("f", fl.inputs, "polynomial JSON")->required()->expected(1);
  boettcher->add_option("--at", fl.at, "point z with |z| above the base radius")->required();
  add_precision(boettcher);

  auto* liftc = app.add_subcommand("lift", "Newton lift solving f(h(x)) = g(x)");
  liftc->add_option("files", fl.inputs, "f.json g.json")->required()->expected(2);
  liftc->add_option("--at", fl.at, "point x in the closed unit disk")->required();
  liftc->add_option("--target", fl.target, "target valuation of f(h(x)) - g(x)");
  liftc->add_option("--max-iter", fl.max_iter, "iteration cap");

  auto* family = app.add_subcommand("family", "analytic families of marked polynomials");
  family->require_subcommand(1);
  auto* freport = family->add_subcommand("report", "passivity and base point constancy at samples");
  auto* frho = family->add_subcommand("rho", "family Boettcher closeness bound on a subdisk");
  auto* fperturb = family->add_subcommand("perturb", "search for a nearby parameter in the shift locus");
  for (auto* sc : {freport, frho, fperturb}) {
    sc->add_option("family", fl.inputs, "family JSON")->required()->expected(1);
    add_budget(sc);
  }
  freport->add_option("--samples", fl.samples, "parameters to classify");
  frho->add_option("--order", fl.order, "truncation order in lambda");
  frho->add_option("--sub-center", fl.sub_center, "subdisk center (default: disk center)");
  frho->add_option("--sub-radius", fl.sub_radius, "subdisk radius exponent (default: disk radius)");
  add_precision(frho);
  fperturb->add_option("--at", fl.at, "starting parameter (default: disk center)");
  fperturb->add_option("--trials", fl.trials, "number of spheres to search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    Json env;
    env["schema"] = 1;
    env["error"] = Json{{"code", "InputError"}, {"detail", e.what()}};
    emit(env);
    return kExitInput;
  }

  std::string command;
  for (auto* sc : app.get_subcommands()) command = sc->get_name();
  std::string mode;
  if (command == "family")
    for (auto* sc : family->get_subcommands()) mode = sc->get_name();

  Json env;
  env["schema"] = 1;
  env["command"] = mode.empty() ? command : command + " " + mode;
  Json config;
  config["inputs"] = fl.inputs;
  try {
    Settings s = resolve(fl);
    Json result;
    if (command == "analyze") {
      result = cmd_analyze(fl, s, config);
    } else if (command == "core") {
      if (auto dot = cmd_core(fl, s, config, result)) {
        std::cout << *dot;
        return kExitOk;
      }
    } else if (command == "compare") {
      result = cmd_compare(fl, s, config);
    } else if (command == "boettcher") {
      result = cmd_boettcher(fl, s, config);
    } else if (command == "lift") {
      result = cmd_lift(fl, s, config);
    } else {
      result = cmd_family(mode, fl, s, config);
    }
    env["config"] = config;
    env["result"] = result;
    emit(env);
    return kExitOk;
  } catch (const Error& e) {
    env["config"] = config;
    env["error"] = error_json(e);
    emit(env);
    return exit_code_for(e.code());
  }
}
