#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tamedyn/escape.hpp"

namespace tamedyn {

// The point x_{f^n(c_i), q}.
struct Witness {
  int mark = 0;
  int iterate = 0;
  Val q;
};

bool operator==(const Witness& a, const Witness& b);

struct CoreVertex {
  BerkPoint point;
  std::vector<Witness> witnesses;
  int level = 0;
  std::optional<std::size_t> parent;  // nearest vertex above; none for the top vertex
  std::optional<std::size_t> image;   // none when f(point) leaves the truncation region
};

// ]lower, upper[ with lower below upper; a missing lower vertex means a boundary point of the core,
// a missing upper vertex means infinity.
struct CoreEdge {
  std::optional<std::size_t> lower;
  std::optional<BerkPoint> boundary;
  std::optional<Witness> boundary_witness;
  std::optional<std::size_t> upper;
  int degree = 1;
  Val length;
  int level = 0;  // level of interior points
};

struct CoreOptions {
  int horizon = 2;    // region is everything below f^horizon(x_f)
  int max_extra = 4;  // extra orbit iterates tried for vertex-set stability
};

struct CoreTree {
  MarkedPolynomial f;
  Val rho = Val::infinity();
  int depth = 0;
  int budget = kDefaultBudget;
  int horizon = 2;
  int extra = 0;
  std::vector<CoreVertex> vertices;
  std::vector<CoreEdge> edges;
  std::optional<std::size_t> base;
  std::optional<std::size_t> top;
  std::vector<int> escaping_marks;
  std::vector<int> first_exit;  // per mark, -1 when not escaping
  std::vector<std::string> warnings;
  bool depth_truncated = false;  // parts of the core below level `depth` were dropped
  bool stable = true;            // vertex set settled within the extra-iterate allowance

  std::optional<std::size_t> find(const BerkPoint& x) const;
  bool in_region(const BerkPoint& x) const;
  BerkPoint top_point() const;
  BerkPoint edge_lower_point(const CoreEdge& e) const;
};

bool same_structure(const CoreTree& a, const CoreTree& b);

CoreTree build_core(const MarkedPolynomial& f, const Val& rho, int depth, int budget = kDefaultBudget,
                    const CoreOptions& opt = {});

bool on_tree(const CoreTree& tree, const BerkPoint& x);
BerkPoint core_dynamics(const CoreTree& tree, const BerkPoint& x);

// hyp_dist of the image of an edge (or a unit sub-segment of an unbounded edge) against degree x length
struct ExpansionCheck {
  bool ok = false;
  Rational length;
  Rational image_length;
};
ExpansionCheck edge_expansion(const CoreTree& tree, std::size_t edge);

enum class ExportFormat { Dot, Json };
std::string export_core(const CoreTree& tree, ExportFormat format);
CoreTree import_core_json(const std::string& text);

}  // namespace tamedyn
