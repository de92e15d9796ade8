#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tamedyn/boettcher.hpp"

namespace tamedyn {

struct ParamDisk {
  Scalar center;
  Val radius_exp;  // closed disk v(lambda - center) >= radius_exp
  bool contains(const Scalar& lambda) const { return (lambda - center).valuation() >= radius_exp; }
};

// f_lambda with coefficients a_i(lambda) and marks c_i(lambda) polynomial in lambda
class Family {
 public:
  Family(FieldRef field, ParamDisk disk, std::vector<Poly> coeff_polys, std::vector<Poly> mark_polys, std::vector<int> mults);

  const FieldRef& field() const { return field_; }
  const ParamDisk& disk() const { return disk_; }
  int degree() const { return static_cast<int>(coeff_polys_.size()) - 1; }
  const std::vector<Poly>& coeff_polys() const { return coeff_polys_; }
  const std::vector<Poly>& mark_polys() const { return mark_polys_; }
  const std::vector<int>& mults() const { return mults_; }

  // throws InvalidMarks when the specialization is not a valid marked polynomial
  MarkedPolynomial at(const Scalar& lambda) const;

 private:
  FieldRef field_;
  ParamDisk disk_;
  std::vector<Poly> coeff_polys_;
  std::vector<Poly> mark_polys_;
  std::vector<int> mults_;
};

// {"backend", "disk": {"center", "radius_exp"}, "coeff_polys": [[c0, c1, ...], ...], "mark_polys": [...], "mults": [...]}
Family family_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json family_to_json(const Family& F);

struct FamilyDefect {
  Scalar lambda;
  std::string reason;
};

enum class PassivityKind { PassiveInBasin, PassiveBounded, Active, Unknown };
const char* passivity_name(PassivityKind k);

struct MarkPassivity {
  PassivityKind kind = PassivityKind::Unknown;
  std::optional<Scalar> witness_a;  // Active only
  std::optional<Scalar> witness_b;
  std::vector<EscapeKind> per_sample;  // aligned with PassivityReport::samples
};

struct PassivityReport {
  std::vector<Scalar> samples;  // samples that specialized to valid polynomials
  std::vector<MarkPassivity> marks;
  std::vector<FamilyDefect> defects;
  std::string note;
};

PassivityReport passivity_report(const Family& F, const std::vector<Scalar>& samples, int budget = kDefaultBudget);

struct Constancy {
  bool constant = true;
  std::optional<Rational> exp;  // common base exponent when constant
  std::optional<std::pair<Scalar, Rational>> first;  // witness pair when varying
  std::optional<std::pair<Scalar, Rational>> second;
  std::vector<FamilyDefect> defects;
};

Constancy base_point_constancy(const Family& F, const std::vector<Scalar>& samples);

struct FamilyRhoOptions {
  long slack = 8;       // extra relative digits kept in every truncated series
  int check_points = 3;  // sampled check set per sphere for the passivity precondition
  int budget = kDefaultBudget;
};

struct FamilyRho {
  RhoBound bound;
  std::vector<Val> main_term;  // per mark: Gauss valuation of phi - phi(center) from the kept terms
  std::vector<Val> tail;       // per mark: lower bound on the discarded remainder
  std::string note;
};

FamilyRho family_rho_bound(const Family& F, const ParamDisk& subdisk, int order, const Rational& precision,
                           const FamilyRhoOptions& opt = {});

struct PerturbResult {
  bool found = false;
  std::optional<Scalar> lambda;
  std::optional<JuliaReport> report;
  int tried = 0;
  std::vector<Scalar> visited;
  std::string note;
};

// lambda0 first, then spheres v(lambda - lambda0) = s for s = r, r + step, ... (trials spheres)
PerturbResult perturb_to_escape(const Family& F, const Scalar& lambda0, int budget = kDefaultBudget, int trials = 4);

// lambda0 plus a few points on the boundary sphere of the disk, deterministic
std::vector<Scalar> default_samples(const Family& F, const ParamDisk& disk, int count);

}  // namespace tamedyn
