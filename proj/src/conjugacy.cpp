#include "tamedyn/conjugacy.hpp"

#include <algorithm>
#include <numeric>

namespace tamedyn {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Skipped: return "Skipped";
  }
  return "?";
}

bool VerificationReport::overall() const {
  return isometry.verdict == Verdict::Pass && equivariance.verdict == Verdict::Pass &&
         local_translation.verdict == Verdict::Pass && boettcher.verdict == Verdict::Pass;
}

namespace {

std::string wstr(const Witness& w) {
  return "(mark " + std::to_string(w.mark) + ", iterate " + std::to_string(w.iterate) + ", radius_exp " + w.q.str() + ")";
}

const OrbitPoint& orbit_at(const std::vector<std::vector<OrbitPoint>>& orbits, const Witness& w) {
  const auto& orb = orbits.at(static_cast<std::size_t>(w.mark));
  if (w.iterate >= static_cast<int>(orb.size())) throw Error(ErrorCode::PreconditionViolated, "witness beyond computed orbit");
  return orb[static_cast<std::size_t>(w.iterate)];
}

BerkPoint witness_point(const std::vector<std::vector<OrbitPoint>>& orbits, const Witness& w) {
  const OrbitPoint& z = orbit_at(orbits, w);
  if (w.q > z.accuracy) throw Error(ErrorCode::PrecisionExhausted, "orbit accuracy below witness radius " + w.q.str());
  return BerkPoint(z.value, w.q);
}

std::vector<std::vector<OrbitPoint>> orbits_for(const MarkedPolynomial& f, const CoreTree& tree) {
  std::vector<int> need(f.marks().size(), -1);
  for (const auto& v : tree.vertices)
    for (const auto& w : v.witnesses) need[static_cast<std::size_t>(w.mark)] = std::max(need[static_cast<std::size_t>(w.mark)], w.iterate);
  for (const auto& e : tree.edges)
    if (e.boundary_witness) {
      auto& n = need[static_cast<std::size_t>(e.boundary_witness->mark)];
      n = std::max(n, e.boundary_witness->iterate);
    }
  std::vector<std::vector<OrbitPoint>> out(f.marks().size());
  for (std::size_t i = 0; i < need.size(); ++i)
    if (need[i] >= 0) out[i] = iterate_orbit(f, f.marks()[i].point, need[i]);
  return out;
}

std::vector<MarkedPolynomial> aligned_candidates(const MarkedPolynomial& f, const MarkedPolynomial& g, bool permute) {
  std::vector<MarkedPolynomial> out{g};
  const std::size_t k = g.marks().size();
  if (!permute || k < 2 || k > 6) return out;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Scalar> coeffs = g.poly().coeffs();
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<CriticalMark> marks;
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      marks.push_back(g.marks()[perm[i]]);
      if (i < f.marks().size() && marks.back().mult != f.marks()[i].mult) ok = false;
    }
    if (ok) out.push_back(MarkedPolynomial::from_coefficients(g.field(), coeffs, marks));
  }
  return out;
}

std::optional<std::size_t> target_edge(const CoreTree& t, const std::optional<std::size_t>& lower,
                                       const std::optional<BerkPoint>& boundary, const std::optional<std::size_t>& upper) {
  for (std::size_t k = 0; k < t.edges.size(); ++k) {
    const auto& e = t.edges[k];
    if (e.upper != upper) continue;
    if (lower) {
      if (e.lower == lower) return k;
    } else if (!e.lower && e.boundary && boundary && *e.boundary == *boundary) {
      return k;
    }
  }
  return std::nullopt;
}

}  // namespace

ConjugacyOutcome build_conjugacy(const MarkedPolynomial& f, const MarkedPolynomial& g, const Val& rho, int depth,
                                 int budget, const Rational& precision, const ConjugacyOptions& opt) {
  f.require_tame();
  g.require_tame();
  if (!same_field(f.field(), g.field())) throw Error(ErrorCode::NotComparable, "different backends");

  std::optional<MarkedPolynomial> chosen;
  RhoBound bound;
  std::string why = "no aligned marking";
  for (const auto& cand : aligned_candidates(f, g, opt.try_permutations)) {
    try {
      RhoBound rb = rho_closeness(f, cand, precision, budget);
      if (rb.rho >= rho) {
        chosen = cand;
        bound = rb;
        break;
      }
      why = "Boettcher coordinates are only " + rb.rho.str() + "-close, below the requested rho " + rho.str();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotComparable) throw;
      why = e.detail();
    }
  }
  if (!chosen) throw Error(ErrorCode::NotComparable, why);

  ConjugacyMap h;
  h.g = *chosen;
  h.rho_bound = bound;
  h.source = build_core(f, rho, depth, budget, opt.core);
  h.target = build_core(h.g, rho, depth, budget, opt.core);
  auto source_orbits = orbits_for(f, h.source);
  h.target_orbits = orbits_for(h.g, h.source);

  for (const auto& v : h.source.vertices) {
    if (v.witnesses.empty()) throw Error(ErrorCode::PreconditionViolated, "vertex without witness: " + v.point.str());
    BerkPoint first = witness_point(h.target_orbits, v.witnesses.front());
    for (std::size_t k = 1; k < v.witnesses.size(); ++k) {
      BerkPoint other = witness_point(h.target_orbits, v.witnesses[k]);
      if (other != first) {
        FailureWitness fw;
        fw.first = v.witnesses.front();
        fw.second = v.witnesses[k];
        fw.level = v.level;
        fw.detail = "witnesses " + wstr(fw.first) + " and " + wstr(fw.second) + " coincide at " + v.point.str() +
                    " but map to " + first.str() + " and " + other.str();
        ConjugacyOutcome out;
        out.failure = fw;
        return out;
      }
    }
    const Scalar& sc = orbit_at(source_orbits, v.witnesses.front()).value;
    const Scalar& tc = orbit_at(h.target_orbits, v.witnesses.front()).value;
    h.vertex_map.push_back(h.target.find(first));
    h.source_centers.push_back(sc);
    h.target_centers.push_back(tc);
    h.translation.push_back(tc - sc);
  }
  h.report = verify_extendable(h, precision);
  ConjugacyOutcome out;
  out.map = std::move(h);
  return out;
}

VerificationReport verify_extendable(const ConjugacyMap& h, const Rational& precision) {
  const CoreTree& S = h.source;
  const CoreTree& T = h.target;
  VerificationReport rep;

  auto leaf_image = [&](const CoreEdge& e) -> std::optional<BerkPoint> {
    if (!e.boundary_witness) return std::nullopt;
    return witness_point(h.target_orbits, *e.boundary_witness);
  };

  // isometry, with degree preservation
  rep.isometry.verdict = Verdict::Pass;
  auto fail_iso = [&](const std::string& why) {
    if (rep.isometry.verdict == Verdict::Pass) rep.isometry = {Verdict::Fail, why};
  };
  if (S.vertices.size() != T.vertices.size() || S.edges.size() != T.edges.size())
    fail_iso("truncations differ in size: " + std::to_string(S.vertices.size()) + "/" + std::to_string(S.edges.size()) +
             " vs " + std::to_string(T.vertices.size()) + "/" + std::to_string(T.edges.size()) + " vertices/edges");
  std::vector<int> hits(T.vertices.size(), 0);
  for (std::size_t i = 0; i < S.vertices.size(); ++i) {
    if (!h.vertex_map[i]) {
      fail_iso("vertex " + S.vertices[i].point.str() + " has no image vertex");
      continue;
    }
    if (++hits[*h.vertex_map[i]] > 1) fail_iso("two vertices map to " + T.vertices[*h.vertex_map[i]].point.str());
  }
  for (const auto& e : S.edges) {
    std::optional<std::size_t> lo, up;
    if (e.lower) {
      lo = h.vertex_map[*e.lower];
      if (!lo) continue;
    }
    if (e.upper) {
      up = h.vertex_map[*e.upper];
      if (!up) continue;
    }
    std::optional<BerkPoint> leaf = e.lower ? std::nullopt : leaf_image(e);
    std::string name = S.edge_lower_point(e).str() + " -> " + (e.upper ? S.vertices[*e.upper].point.str() : "inf");
    auto k = target_edge(T, lo, leaf, up);
    if (!k) {
      fail_iso("edge " + name + " has no image edge");
      continue;
    }
    const CoreEdge& te = T.edges[*k];
    if (te.length != e.length)
      fail_iso("edge " + name + " has length " + e.length.str() + " but its image has length " + te.length.str());
    else if (te.degree != e.degree)
      fail_iso("edge " + name + " has degree " + std::to_string(e.degree) + " but its image has degree " + std::to_string(te.degree));
  }

  // equivariance on vertices
  rep.equivariance.verdict = Verdict::Pass;
  for (std::size_t i = 0; i < S.vertices.size() && rep.equivariance.verdict == Verdict::Pass; ++i) {
    if (!h.vertex_map[i]) {
      rep.equivariance = {Verdict::Fail, "vertex " + S.vertices[i].point.str() + " is unmapped"};
      break;
    }
    const auto& src_img = S.vertices[i].image;
    const auto& tgt_img = T.vertices[*h.vertex_map[i]].image;
    if (src_img.has_value() != tgt_img.has_value() || (src_img && h.vertex_map[*src_img] != tgt_img))
      rep.equivariance = {Verdict::Fail, "h(f(v)) differs from g(h(v)) at v = " + S.vertices[i].point.str()};
  }

  // locally a translation: tau_x sends every downward direction witness at x to the matching direction at h(x)
  rep.local_translation.verdict = Verdict::Pass;
  for (std::size_t i = 0; i < S.vertices.size() && rep.local_translation.verdict == Verdict::Pass; ++i) {
    if (!h.vertex_map[i]) continue;
    const BerkPoint& x = S.vertices[i].point;
    const BerkPoint& hx = T.vertices[*h.vertex_map[i]].point;
    const Scalar& shift = h.translation[i];
    auto check = [&](const Scalar& src_dir, const BerkPoint& target_point, const std::string& what) {
      if (rep.local_translation.verdict == Verdict::Fail) return;
      if (!(precedes_eq(target_point, hx) && target_point != hx)) {
        rep.local_translation = {Verdict::Fail, what + " is not below h(x) = " + hx.str()};
        return;
      }
      Val gap = (src_dir + shift - target_point.center).valuation();
      if (!(gap > x.radius_exp))
        rep.local_translation = {Verdict::Fail, "translation at " + x.str() + " sends the direction of " + what +
                                                    " away from the direction of its image " + target_point.str()};
    };
    for (std::size_t j = 0; j < S.vertices.size(); ++j)
      if (S.vertices[j].parent == i && h.vertex_map[j]) check(S.vertices[j].point.center, T.vertices[*h.vertex_map[j]].point, "vertex " + S.vertices[j].point.str());
    for (const auto& e : S.edges)
      if (!e.lower && e.upper == i) {
        auto leaf = leaf_image(e);
        if (leaf) check(e.boundary->center, *leaf, "boundary point " + e.boundary->str());
      }
  }

  // Boettcher coordinate change near infinity
  struct Probe {
    BerkPoint point;
    Witness witness;
    bool off_axis;
  };
  std::vector<Probe> probes;
  const Val qf(S.f.base_exp());
  auto source_orbits = orbits_for(S.f, S);
  auto consider = [&](const BerkPoint& x, const Witness& w) {
    if (x.radius_exp.is_inf()) return;
    const Scalar& a = orbit_at(source_orbits, w).value;
    Val va = a.valuation();
    if (!(va < qf)) return;
    probes.push_back({x, w, va < x.radius_exp});
  };
  for (const auto& v : S.vertices)
    for (const auto& w : v.witnesses) {
      std::size_t before = probes.size();
      consider(v.point, w);
      if (probes.size() > before) break;
    }
  for (const auto& e : S.edges)
    if (!e.lower && e.boundary_witness) consider(*e.boundary, *e.boundary_witness);
  std::stable_sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) {
    if (a.off_axis != b.off_axis) return a.off_axis;
    return a.point.radius_exp < b.point.radius_exp;
  });
  if (probes.empty()) {
    rep.boettcher = {Verdict::Skipped, "no tree point with center outside the base disk"};
  } else {
    rep.boettcher.verdict = Verdict::Pass;
    std::string checked;
    for (std::size_t k = 0; k < probes.size() && k < 2; ++k) {
      const Probe& pr = probes[k];
      Rational need = pr.point.radius_exp.value();
      Rational work = need > precision ? need : precision;
      Scalar a = orbit_at(source_orbits, pr.witness).value;
      Scalar b = orbit_at(h.target_orbits, pr.witness).value;
      Val gap = (phi_eval(S.f, a, work) - phi_eval(h.g, b, work)).valuation();
      checked += (checked.empty() ? "" : "; ") + pr.point.str();
      if (gap < Val(need)) {
        rep.boettcher = {Verdict::Fail, "phi_g^-1 o phi_f moves " + pr.point.str() + ": valuation of the Boettcher difference is " +
                                            gap.str() + " < " + rat_str(need)};
        break;
      }
    }
    if (rep.boettcher.verdict == Verdict::Pass) rep.boettcher.detail = "checked at " + checked;
  }
  if (rep.overall()) rep.verified_depth = S.depth;
  return rep;
}

ConjugacyMap corrupt_swap(const ConjugacyMap& h) {
  ConjugacyMap out = h;
  const auto& vs = h.source.vertices;
  std::optional<std::pair<std::size_t, std::size_t>> pick;
  for (std::size_t i = 0; i < vs.size() && !pick; ++i)
    for (std::size_t j = i + 1; j < vs.size() && !pick; ++j)
      if (vs[i].parent && vs[i].parent == vs[j].parent) pick = std::make_pair(i, j);
  if (!pick && vs.size() >= 2) pick = std::make_pair(std::size_t{0}, std::size_t{1});
  if (!pick) return out;
  auto [i, j] = *pick;
  std::swap(out.vertex_map[i], out.vertex_map[j]);
  std::swap(out.target_centers[i], out.target_centers[j]);
  out.translation[i] = out.target_centers[i] - out.source_centers[i];
  out.translation[j] = out.target_centers[j] - out.source_centers[j];
  out.report = VerificationReport{};
  return out;
}

}  // namespace tamedyn
