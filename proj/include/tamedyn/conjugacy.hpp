#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tamedyn/boettcher.hpp"
#include "tamedyn/core.hpp"

namespace tamedyn {

enum class Verdict { Pass, Fail, Skipped };
const char* verdict_name(Verdict v);

struct ClauseResult {
  Verdict verdict = Verdict::Skipped;
  std::string detail;  // failure witness or skip reason
};

struct VerificationReport {
  ClauseResult isometry;
  ClauseResult equivariance;
  ClauseResult local_translation;
  ClauseResult boettcher;
  int verified_depth = -1;
  bool overall() const;
};

struct ConjugacyMap {
  CoreTree source;
  CoreTree target;
  MarkedPolynomial g;  // target polynomial with marks aligned to the source
  std::vector<std::optional<std::size_t>> vertex_map;
  std::vector<Scalar> translation;  // b_x per source vertex
  std::vector<Scalar> source_centers;
  std::vector<Scalar> target_centers;
  std::vector<std::vector<OrbitPoint>> target_orbits;  // g-orbits of aligned marks
  RhoBound rho_bound;
  VerificationReport report;
};

struct FailureWitness {
  Witness first;
  Witness second;
  int level = 0;
  std::string detail;
};

struct ConjugacyOutcome {
  std::optional<ConjugacyMap> map;
  std::optional<FailureWitness> failure;
};

struct ConjugacyOptions {
  bool try_permutations = false;  // search mark permutations of g (small k only)
  CoreOptions core;
};

ConjugacyOutcome build_conjugacy(const MarkedPolynomial& f, const MarkedPolynomial& g, const Val& rho, int depth,
                                 int budget, const Rational& precision, const ConjugacyOptions& opt = {});

VerificationReport verify_extendable(const ConjugacyMap& h, const Rational& precision);

// negative control: exchange the images of two sibling vertices (any two vertices if no siblings exist)
ConjugacyMap corrupt_swap(const ConjugacyMap& h);

}  // namespace tamedyn
