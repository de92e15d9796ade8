#include "tamedyn/io.hpp"

#include <fstream>
#include <sstream>

namespace tamedyn {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InputError, what); }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

Rational rat_from(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  bad("expected a rational string, got " + j.dump());
}

long long_from(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<long>();
}

Json opt_index(const std::optional<std::size_t>& i) { return i ? Json(*i) : Json(nullptr); }

std::optional<std::size_t> index_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::size_t>();
}

Json witness_to_json(const Witness& w) {
  Json out;
  out["mark"] = w.mark;
  out["iterate"] = w.iterate;
  out["radius_exp"] = val_to_json(w.q);
  return out;
}

Witness witness_from_json(const Json& j) {
  return Witness{static_cast<int>(long_from(need(j, "mark"), "mark")), static_cast<int>(long_from(need(j, "iterate"), "iterate")),
                 val_from_json(need(j, "radius_exp"))};
}

}  // namespace

Json field_to_json(const FieldRef& F) {
  Json out;
  if (F->is_padic()) {
    out["kind"] = "padic";
    out["p"] = F->prime();
  } else {
    out["kind"] = "series";
    out["precision"] = rat_str(F->precision());
    out["ramification"] = F->ramification();
  }
  return out;
}

FieldRef field_from_json(const Json& j) {
  std::string kind = need(j, "kind").get<std::string>();
  if (kind == "padic") {
    long p = long_from(need(j, "p"), "p");
    if (p < 2) bad("p must be a prime >= 2");
    for (long k = 2; k * k <= p; ++k)
      if (p % k == 0) bad("p must be prime");
    return Field::padic(p);
  }
  if (kind == "series") {
    Rational prec = rat_from(need(j, "precision"));
    long ram = j.contains("ramification") ? long_from(j.at("ramification"), "ramification") : 1;
    if (prec <= 0 || ram < 1) bad("series precision and ramification must be positive");
    return Field::series(prec, ram);
  }
  bad("unknown backend kind \"" + kind + "\"");
}

Json scalar_to_json(const Scalar& x) {
  if (x.field()->is_padic()) return rat_str(x.rational());
  Json terms = Json::array();
  for (const auto& [k, c] : x.terms()) {
    Rational e(k, x.field()->ramification());
    e.canonicalize();
    terms.push_back(Json::array({rat_str(e), rat_str(c)}));
  }
  return terms;
}

Scalar scalar_from_json(const FieldRef& F, const Json& j) {
  if (j.is_string() || j.is_number_integer()) return Scalar(F, rat_from(j));
  if (!j.is_array()) bad("scalar must be a rational string or a list of [exp, coeff] pairs");
  if (F->is_padic()) bad("term lists are only valid for the series backend");
  std::vector<std::pair<Rational, Rational>> terms;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2) bad("series term must be [exp, coeff]");
    terms.emplace_back(rat_from(t[0]), rat_from(t[1]));
  }
  return Scalar::from_terms(F, terms);
}

Json val_to_json(const Val& v) { return v.str(); }

Val val_from_json(const Json& j) {
  if (j.is_string()) return Val::parse(j.get<std::string>());
  return Val(rat_from(j));
}

Json point_to_json(const BerkPoint& x) {
  Json out;
  out["center"] = scalar_to_json(x.center);
  out["radius_exp"] = val_to_json(x.radius_exp);
  return out;
}

BerkPoint point_from_json(const FieldRef& F, const Json& j) {
  return BerkPoint(scalar_from_json(F, need(j, "center")), val_from_json(need(j, "radius_exp")));
}

Json polynomial_to_json(const MarkedPolynomial& f) {
  Json out;
  out["backend"] = field_to_json(f.field());
  Json coeffs = Json::array();
  for (int i = 0; i <= f.degree(); ++i) coeffs.push_back(scalar_to_json(f.poly().coeff(i)));
  out["coefficients"] = coeffs;
  Json marks = Json::array();
  for (const auto& m : f.marks()) {
    Json mj;
    mj["point"] = scalar_to_json(m.point);
    mj["mult"] = m.mult;
    marks.push_back(mj);
  }
  out["marks"] = marks;
  return out;
}

MarkedPolynomial polynomial_from_json(const Json& j) {
  try {
    FieldRef F = field_from_json(need(j, "backend"));
    std::vector<CriticalMark> marks;
    for (const auto& m : need(j, "marks")) {
      CriticalMark cm;
      cm.point = scalar_from_json(F, need(m, "point"));
      cm.mult = m.contains("mult") ? static_cast<int>(long_from(m.at("mult"), "mult")) : 2;
      marks.push_back(cm);
    }
    if (j.contains("coefficients")) {
      std::vector<Scalar> coeffs;
      for (const auto& c : j.at("coefficients")) coeffs.push_back(scalar_from_json(F, c));
      return MarkedPolynomial::from_coefficients(F, coeffs, marks);
    }
    std::optional<int> degree;
    if (j.contains("degree")) degree = static_cast<int>(long_from(j.at("degree"), "degree"));
    Scalar b = j.contains("b") ? scalar_from_json(F, j.at("b")) : Scalar::zero(F);
    return MarkedPolynomial::from_critical_data(F, marks, b, degree);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed polynomial: ") + e.what());
  }
}

Poly raw_polynomial_from_json(const Json& j) {
  if (j.is_object() && j.contains("marks")) return polynomial_from_json(j).poly();
  try {
    FieldRef F = field_from_json(need(j, "backend"));
    std::vector<Scalar> coeffs;
    for (const auto& c : need(j, "coefficients")) coeffs.push_back(scalar_from_json(F, c));
    if (coeffs.empty()) bad("empty coefficient list");
    return Poly(F, std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed polynomial: ") + e.what());
  }
}

Json core_to_json(const CoreTree& tree) {
  Json out;
  out["polynomial"] = polynomial_to_json(tree.f);
  out["rho"] = val_to_json(tree.rho);
  out["depth"] = tree.depth;
  out["budget"] = tree.budget;
  out["horizon"] = tree.horizon;
  out["extra_iterates"] = tree.extra;
  out["base"] = opt_index(tree.base);
  out["top"] = opt_index(tree.top);
  out["escaping_marks"] = tree.escaping_marks;
  out["first_exit"] = tree.first_exit;
  out["depth_truncated"] = tree.depth_truncated;
  out["stable"] = tree.stable;
  out["warnings"] = tree.warnings;
  Json vs = Json::array();
  for (const auto& v : tree.vertices) {
    Json vj;
    vj["point"] = point_to_json(v.point);
    vj["level"] = v.level;
    vj["parent"] = opt_index(v.parent);
    vj["image"] = opt_index(v.image);
    Json ws = Json::array();
    for (const auto& w : v.witnesses) ws.push_back(witness_to_json(w));
    vj["witnesses"] = ws;
    vs.push_back(vj);
  }
  out["vertices"] = vs;
  Json es = Json::array();
  for (const auto& e : tree.edges) {
    Json ej;
    ej["lower"] = opt_index(e.lower);
    ej["boundary"] = e.boundary ? point_to_json(*e.boundary) : Json(nullptr);
    ej["boundary_witness"] = e.boundary_witness ? witness_to_json(*e.boundary_witness) : Json(nullptr);
    ej["upper"] = opt_index(e.upper);
    ej["degree"] = e.degree;
    ej["length"] = val_to_json(e.length);
    ej["level"] = e.level;
    es.push_back(ej);
  }
  out["edges"] = es;
  out["counts"] = Json{{"vertices", tree.vertices.size()}, {"edges", tree.edges.size()}};
  return out;
}

CoreTree core_from_json(const Json& j) {
  try {
    CoreTree tree;
    tree.f = polynomial_from_json(need(j, "polynomial"));
    const FieldRef& F = tree.f.field();
    tree.rho = val_from_json(need(j, "rho"));
    tree.depth = need(j, "depth").get<int>();
    tree.budget = need(j, "budget").get<int>();
    tree.horizon = need(j, "horizon").get<int>();
    tree.extra = need(j, "extra_iterates").get<int>();
    tree.base = index_from(need(j, "base"));
    tree.top = index_from(need(j, "top"));
    tree.escaping_marks = need(j, "escaping_marks").get<std::vector<int>>();
    tree.first_exit = need(j, "first_exit").get<std::vector<int>>();
    tree.depth_truncated = need(j, "depth_truncated").get<bool>();
    tree.stable = need(j, "stable").get<bool>();
    tree.warnings = need(j, "warnings").get<std::vector<std::string>>();
    for (const auto& vj : need(j, "vertices")) {
      CoreVertex v;
      v.point = point_from_json(F, need(vj, "point"));
      v.level = need(vj, "level").get<int>();
      v.parent = index_from(need(vj, "parent"));
      v.image = index_from(need(vj, "image"));
      for (const auto& w : need(vj, "witnesses")) v.witnesses.push_back(witness_from_json(w));
      tree.vertices.push_back(v);
    }
    for (const auto& ej : need(j, "edges")) {
      CoreEdge e;
      e.lower = index_from(need(ej, "lower"));
      if (!need(ej, "boundary").is_null()) e.boundary = point_from_json(F, ej.at("boundary"));
      if (!need(ej, "boundary_witness").is_null()) e.boundary_witness = witness_from_json(ej.at("boundary_witness"));
      e.upper = index_from(need(ej, "upper"));
      e.degree = need(ej, "degree").get<int>();
      e.length = val_from_json(need(ej, "length"));
      e.level = need(ej, "level").get<int>();
      tree.edges.push_back(e);
    }
    return tree;
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("malformed core tree: ") + e.what());
  }
}

std::string core_to_dot(const CoreTree& tree) {
  std::ostringstream out;
  out << "digraph core {\n  rankdir=BT;\n";
  for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
    const auto& v = tree.vertices[i];
    out << "  v" << i << " [label=\"" << v.point.center.str() << ", " << v.point.radius_exp.str() << ", L" << v.level
        << "\"];\n";
  }
  out << "  inf [label=\"inf\", shape=plaintext];\n";
  for (std::size_t k = 0; k < tree.edges.size(); ++k) {
    const auto& e = tree.edges[k];
    std::string lo;
    if (e.lower) {
      lo = "v" + std::to_string(*e.lower);
    } else {
      lo = "b" + std::to_string(k);
      out << "  " << lo << " [label=\"" << e.boundary->center.str() << ", " << e.boundary->radius_exp.str()
          << "\", shape=box];\n";
    }
    std::string hi = e.upper ? "v" + std::to_string(*e.upper) : "inf";
    out << "  " << lo << " -> " << hi << " [label=\"deg " << e.degree << ", len " << e.length.str() << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_core(const CoreTree& tree, ExportFormat format) {
  if (format == ExportFormat::Dot) return core_to_dot(tree);
  return core_to_json(tree).dump(2) + "\n";
}

CoreTree import_core_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return core_from_json(j);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    bad(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace tamedyn
