#include "tamedyn/core.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tamedyn {

bool operator==(const Witness& a, const Witness& b) {
  return a.mark == b.mark && a.iterate == b.iterate && a.q == b.q;
}

std::optional<std::size_t> CoreTree::find(const BerkPoint& x) const {
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i].point == x) return i;
  return std::nullopt;
}

BerkPoint CoreTree::top_point() const {
  if (top) return vertices[*top].point;
  return *edges.front().boundary;
}

bool CoreTree::in_region(const BerkPoint& x) const { return precedes_eq(x, top_point()); }

BerkPoint CoreTree::edge_lower_point(const CoreEdge& e) const {
  return e.lower ? vertices[*e.lower].point : *e.boundary;
}

namespace {

bool same_optional_point(const std::optional<BerkPoint>& a, const std::optional<BerkPoint>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || *a == *b;
}

}  // namespace

bool same_structure(const CoreTree& a, const CoreTree& b) {
  if (a.rho != b.rho || a.depth != b.depth || a.horizon != b.horizon) return false;
  if (!(a.f.poly() == b.f.poly())) return false;
  if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size()) return false;
  if (a.base != b.base || a.top != b.top) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    const auto& x = a.vertices[i];
    const auto& y = b.vertices[i];
    if (x.point != y.point || x.level != y.level || x.parent != y.parent || x.image != y.image) return false;
    if (x.witnesses != y.witnesses) return false;
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const auto& x = a.edges[i];
    const auto& y = b.edges[i];
    if (x.lower != y.lower || x.upper != y.upper || x.degree != y.degree || x.length != y.length || x.level != y.level)
      return false;
    if (!same_optional_point(x.boundary, y.boundary)) return false;
    if (x.boundary_witness.has_value() != y.boundary_witness.has_value()) return false;
    if (x.boundary_witness && !(*x.boundary_witness == *y.boundary_witness)) return false;
  }
  return true;
}

namespace {

std::string key_of(const BerkPoint& x) { return x.canonical().str(); }

struct Leaf {
  BerkPoint point;
  Witness witness;
};

class Builder {
 public:
  Builder(const MarkedPolynomial& f, Val rho, int budget) : f_(f), rho_(std::move(rho)), qf_(f.base_exp()), d_(f.degree()) {
    const auto& marks = f.marks();
    exit_.assign(marks.size(), -1);
    orbit_.resize(marks.size());
    step_.resize(marks.size());
    for (std::size_t i = 0; i < marks.size(); ++i) {
      EscapeRecord rec = classify_critical(f, marks[i], budget);
      if (rec.kind == EscapeKind::Escaping) {
        exit_[i] = rec.first_exit;
        escaping_.push_back(static_cast<int>(i));
      } else if (rec.kind == EscapeKind::Unknown) {
        warnings_.push_back("mark " + std::to_string(i) + " unresolved (" + rec.reason + "); its rays are excluded");
      }
    }
  }

  const std::vector<int>& escaping() const { return escaping_; }
  const std::vector<int>& exits() const { return exit_; }
  std::vector<std::string>& warnings() { return warnings_; }

  BerkPoint axis_point(const Rational& q) const { return BerkPoint(Scalar::zero(f_.field()), Val(q)); }
  BerkPoint base() const { return axis_point(qf_); }
  BerkPoint top(int levels) const {
    Rational q = qf_;
    for (int k = 0; k < levels; ++k) q *= d_;
    return axis_point(q);
  }

  int last_iterate(int i, int horizon, int extra) const { return exit_[static_cast<std::size_t>(i)] + horizon + extra; }

  void ensure_orbit(int i, int steps) {
    auto& orb = orbit_[static_cast<std::size_t>(i)];
    if (static_cast<int>(orb.size()) > steps) return;
    orb = iterate_orbit(f_, f_.marks()[static_cast<std::size_t>(i)].point, steps);
    auto& st = step_[static_cast<std::size_t>(i)];
    st.clear();
    for (int n = 0; n < steps; ++n) st.push_back(PLMap::from_segment(segment_dynamics(f_, orb[static_cast<std::size_t>(n)].value)));
  }

  const OrbitPoint& z(int i, int n) const { return orbit_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]; }
  const PLMap& step(int i, int n) const { return step_[static_cast<std::size_t>(i)][static_cast<std::size_t>(n)]; }

  // map on radius exponents from the ray at iterate `from` to the ray at iterate `to`
  PLMap compose(int i, int from, int to) const {
    PLMap m = PLMap::identity();
    for (int n = from; n < to; ++n) m = step(i, n).after(m);
    return m;
  }

  Val trim(int i, int n) const {
    int m = exit_[static_cast<std::size_t>(i)];
    Val at_exit = rho_.is_inf() ? Val::infinity() : Val(z(i, m).value.valuation().value()) + rho_;
    if (n >= m) return rho_.is_inf() ? Val::infinity() : Val(z(i, n).value.valuation().value()) + rho_;
    return compose(i, n, m).inverse(at_exit);
  }

  BerkPoint ray_point(int i, int n, const Val& q) const {
    const OrbitPoint& p = z(i, n);
    if (q > p.accuracy)
      throw Error(ErrorCode::PrecisionExhausted, "orbit point " + std::to_string(n) + " of mark " + std::to_string(i) +
                                                     " is not known to radius exponent " + q.str());
    return BerkPoint(p.value, q);
  }

  // whether x lies on ]f^n c_i, inf[
  bool on_ray(int i, int n, const BerkPoint& x) const {
    const OrbitPoint& p = z(i, n);
    Val gap = (p.value - x.center).valuation();
    if (x.radius_exp <= p.accuracy) return gap >= x.radius_exp;
    if (gap < p.accuracy) return false;
    throw Error(ErrorCode::PrecisionExhausted, "ray membership undecidable at the available orbit accuracy");
  }

  std::vector<Leaf> leaves(int horizon, int extra, const BerkPoint& region_top) const {
    std::vector<Leaf> out;
    std::set<std::string> seen;
    for (int i : escaping_) {
      for (int n = 0; n <= last_iterate(i, horizon, extra); ++n) {
        Val t = trim(i, n);
        // leaves above the region are skipped before touching their accuracy
        if (Val(z(i, n).value.valuation()) < region_top.radius_exp) continue;
        BerkPoint leaf = ray_point(i, n, t);
        if (!precedes_eq(leaf, region_top)) continue;
        if (!seen.insert(key_of(leaf)).second) continue;
        out.push_back({leaf, Witness{i, n, t}});
      }
    }
    return out;
  }

  std::map<std::string, BerkPoint> vertex_set(int horizon, int extra) const {
    BerkPoint region = top(horizon);
    BerkPoint wide = top(horizon + extra);
    std::vector<Leaf> ls = leaves(horizon, extra, wide);
    std::map<std::string, BerkPoint> branch;
    for (std::size_t a = 0; a < ls.size(); ++a)
      for (std::size_t b = a + 1; b < ls.size(); ++b) {
        BerkPoint j = join(ls[a].point, ls[b].point);
        if (j == ls[a].point || j == ls[b].point) continue;
        branch.emplace(key_of(j), j.canonical());
      }
    std::map<std::string, BerkPoint> out;
    auto add = [&](const BerkPoint& x) {
      if (precedes_eq(x, region)) out.emplace(key_of(x), x.canonical());
    };
    add(base());
    add(region);
    for (const auto& [k, b] : branch) {
      add(b);
      for (int i : escaping_) {
        for (int top_n = 1; top_n <= last_iterate(i, horizon, extra); ++top_n) {
          if (!on_ray(i, top_n, b)) continue;
          PLMap back = PLMap::identity();
          for (int n = top_n - 1; n >= 0; --n) {
            back = back.after(step(i, n));
            Val q = back.inverse(b.radius_exp);
            BerkPoint x = ray_point(i, n, q);
            add(x);
          }
        }
      }
    }
    return out;
  }

  bool closed(const std::map<std::string, BerkPoint>& vs, const BerkPoint& region) const {
    for (const auto& [k, v] : vs) {
      BerkPoint img = image_point(f_, v).point;
      if (precedes_eq(img, region) && !vs.count(key_of(img))) return false;
    }
    return true;
  }

  int level(const BerkPoint& x, const std::vector<BerkPoint>& all) const {
    BerkPoint xf = base();
    if (x == xf || x.abs_exp() < Val(qf_)) return 0;
    int count = 0;
    for (const auto& v : all)
      if (compare(x, v) == Order::Less && precedes_eq(v, xf)) ++count;
    return count;
  }

 private:
  const MarkedPolynomial& f_;
  Val rho_;
  Rational qf_;
  int d_;
  std::vector<int> escaping_;
  std::vector<int> exit_;
  std::vector<std::vector<OrbitPoint>> orbit_;
  std::vector<std::vector<PLMap>> step_;
  std::vector<std::string> warnings_;
};

std::optional<std::size_t> nearest_above(const std::vector<CoreVertex>& vs, const BerkPoint& x) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (compare(x, vs[i].point) != Order::Less) continue;
    if (!best || vs[*best].point.radius_exp < vs[i].point.radius_exp) best = i;
  }
  return best;
}

}  // namespace

CoreTree build_core(const MarkedPolynomial& f, const Val& rho, int depth, int budget, const CoreOptions& opt) {
  f.require_tame();
  if (rho.is_finite() && rho.value() <= 0) throw Error(ErrorCode::PreconditionViolated, "rho must be positive");
  if (depth < 0) throw Error(ErrorCode::PreconditionViolated, "depth must be non-negative");
  if (opt.horizon < 1) throw Error(ErrorCode::PreconditionViolated, "horizon must be at least 1");

  CoreTree tree;
  tree.f = f;
  tree.rho = rho;
  tree.depth = depth;
  tree.budget = budget;
  tree.horizon = opt.horizon;
  tree.first_exit.assign(f.marks().size(), -1);

  if (f.is_simple()) {
    CoreEdge ray;
    ray.boundary = f.base_point();
    ray.degree = f.degree();
    ray.length = Val::infinity();
    tree.edges.push_back(ray);
    return tree;
  }

  Builder B(f, rho, budget);
  tree.escaping_marks = B.escaping();
  tree.first_exit = B.exits();
  const BerkPoint region = B.top(opt.horizon);
  const BerkPoint xf = B.base();

  std::map<std::string, BerkPoint> vs;
  bool settled = false;
  for (int extra = 1; extra <= opt.max_extra; ++extra) {
    for (int i : B.escaping()) B.ensure_orbit(i, B.last_iterate(i, opt.horizon, extra));
    std::map<std::string, BerkPoint> next = B.vertex_set(opt.horizon, extra);
    bool same = extra > 1 && next.size() == vs.size() &&
                std::equal(next.begin(), next.end(), vs.begin(), [](const auto& a, const auto& b) { return a.first == b.first; });
    vs = std::move(next);
    tree.extra = extra;
    if (same && B.closed(vs, region)) {
      settled = true;
      break;
    }
  }
  tree.stable = settled;
  if (!settled) B.warnings().push_back("vertex set did not settle within the extra-iterate allowance");

  std::vector<BerkPoint> all;
  for (const auto& [k, v] : vs) all.push_back(v);
  std::sort(all.begin(), all.end(), point_less);

  for (const auto& v : all) {
    int lv = B.level(v, all);
    if (lv > depth) {
      tree.depth_truncated = true;
      continue;
    }
    CoreVertex cv;
    cv.point = v;
    cv.level = lv;
    tree.vertices.push_back(cv);
  }
  tree.base = tree.find(xf);
  tree.top = tree.find(region);

  const int last_extra = tree.extra;
  for (auto& cv : tree.vertices) {
    for (int i : B.escaping())
      for (int n = 0; n <= B.last_iterate(i, opt.horizon, last_extra); ++n)
        if (B.on_ray(i, n, cv.point)) cv.witnesses.push_back(Witness{i, n, cv.point.radius_exp});
  }

  for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
    auto& cv = tree.vertices[i];
    cv.parent = nearest_above(tree.vertices, cv.point);
    BerkPoint img = image_point(f, cv.point).point;
    cv.image = tree.find(img);
    if (!cv.image && precedes_eq(img, region))
      B.warnings().push_back("image of vertex " + cv.point.str() + " is missing from the truncation");
  }

  for (std::size_t i = 0; i < tree.vertices.size(); ++i) {
    const auto& cv = tree.vertices[i];
    CoreEdge e;
    e.lower = i;
    e.upper = cv.parent;
    BerkPoint mid;
    if (cv.parent) {
      const BerkPoint& up = tree.vertices[*cv.parent].point;
      Rational q = (cv.point.radius_exp.value() + up.radius_exp.value()) / 2;
      q.canonicalize();
      mid = BerkPoint(cv.point.center, Val(q));
      e.length = Val(hyp_dist(cv.point, up));
    } else {
      mid = BerkPoint(cv.point.center, Val(Rational(cv.point.radius_exp.value() - 1)));
      e.length = Val::infinity();
    }
    e.degree = local_degree_rh(f, mid);
    e.level = B.level(mid, all);
    tree.edges.push_back(e);
  }

  std::vector<Leaf> ls = B.leaves(opt.horizon, last_extra, region);
  for (const auto& leaf : ls) {
    bool interior = false;
    for (const auto& other : ls)
      if (compare(other.point, leaf.point) == Order::Less) interior = true;
    if (interior) continue;
    std::optional<std::size_t> up;
    std::optional<BerkPoint> up_point;
    for (const auto& v : all)
      if (compare(leaf.point, v) == Order::Less && (!up_point || up_point->radius_exp < v.radius_exp)) up_point = v;
    if (!up_point) continue;
    up = tree.find(*up_point);
    Rational qa = up_point->radius_exp.value();
    Rational qm = leaf.point.is_classical() ? Rational(qa + 1) : Rational((leaf.point.radius_exp.value() + qa) / 2);
    qm.canonicalize();
    BerkPoint mid(leaf.point.center, Val(qm));
    int lv = B.level(mid, all);
    if (lv > depth || !up) {
      tree.depth_truncated = true;
      continue;
    }
    CoreEdge e;
    e.boundary = leaf.point;
    e.boundary_witness = leaf.witness;
    e.upper = up;
    e.degree = local_degree_rh(f, mid);
    e.length = leaf.point.is_classical() ? Val::infinity() : Val(hyp_dist(leaf.point, *up_point));
    e.level = lv;
    tree.edges.push_back(e);
  }

  tree.warnings = B.warnings();
  return tree;
}

bool on_tree(const CoreTree& tree, const BerkPoint& x) {
  if (tree.find(x)) return true;
  for (const auto& e : tree.edges) {
    BerkPoint lo = tree.edge_lower_point(e);
    if (compare(lo, x) != Order::Less) continue;
    if (!e.upper) return true;
    if (compare(x, tree.vertices[*e.upper].point) == Order::Less) return true;
  }
  return false;
}

BerkPoint core_dynamics(const CoreTree& tree, const BerkPoint& x) {
  if (!on_tree(tree, x)) throw Error(ErrorCode::NotOnTree, x.str() + " is not on the core tree");
  BerkPoint img = image_point(tree.f, x).point;
  if (tree.in_region(img) && !on_tree(tree, img))
    throw Error(ErrorCode::NotOnTree, "image " + img.str() + " left the truncated tree");
  return img;
}

ExpansionCheck edge_expansion(const CoreTree& tree, std::size_t edge) {
  const CoreEdge& e = tree.edges.at(edge);
  BerkPoint lo = tree.edge_lower_point(e);
  BerkPoint a, b;
  if (e.upper) {
    b = tree.vertices[*e.upper].point;
    a = lo.is_classical() ? BerkPoint(lo.center, Val(Rational(b.radius_exp.value() + 1))) : lo;
  } else {
    a = lo;
    b = BerkPoint(lo.center, Val(Rational(lo.radius_exp.value() - 1)));
  }
  ExpansionCheck out;
  out.length = hyp_dist(a, b);
  out.image_length = hyp_dist(image_point(tree.f, a).point, image_point(tree.f, b).point);
  out.ok = out.image_length == out.length * e.degree;
  return out;
}

}  // namespace tamedyn
