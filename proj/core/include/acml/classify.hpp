#pragma once

#include <optional>
#include <string>

#include "acml/connection.hpp"
#include "acml/sampling.hpp"

namespace acml {

/// Verdicts are always "max residual <= tolerance over the sample", never
/// symbolic statements; the witness is the first point attaining the max.
struct PredicateResult {
  bool verdict = false;
  double max_residual = 0.0;
  Point witness;
};

struct ClassificationReport {
  double tolerance = 1e-8;
  PredicateResult contact_metric;    // max |Omega_ab - d eta_ab|
  PredicateResult almost_hermitian;  // max |P(N_phi)|
  PredicateResult normal;            // max |N1|
  PredicateResult sasakian;          // normal and contact_metric
  PredicateResult ack_full;          // a.H. and ||d Omega|| == 0 (all slots)
  PredicateResult ack_horizontal;    // a.H. and horizontal components only
};

/// Evaluates every predicate residual at the sampled points. The |d Omega|
/// residual of a point is the frame-component Frobenius norm of the 3-form;
/// component-level predicates use the max-abs component.
ClassificationReport classify(const AlmostContactStructure& s,
                              const SampleSpec& spec, int threads = 1);

/// Normality vs omega(phi u, phi v) = omega(u, v), on almost Hermitian
/// structures; consistent when both residuals fall on the same side of the
/// tolerance.
struct TheoremN1Result {
  bool skipped = false;  // precondition (almost Hermitian) failed
  double precondition_residual = 0.0;
  double n1_residual = 0.0;
  double omega_invariance_residual = 0.0;
  bool consistent = false;
  Point witness;
};
TheoremN1Result check_theorem_N1(const AlmostContactStructure& s,
                                 const SampleSpec& spec, int threads = 1);

/// The six-term identity for 2 g((nabla~_x phi) y, z) over all frame triples
/// plus seeded random admissible triples; also evaluates the reduced form
/// that drops the N1 pairing (valid on almost-normal structures).
struct Q4Result {
  double max_residual = 0.0;       // full identity
  double max_residual_q5 = 0.0;    // reduced form
  double almost_normal_residual = 0.0;
  Point witness;
  int random_triples = 20;
};
Q4Result check_q4(const AlmostContactStructure& s, const SampleSpec& spec,
                  int threads = 1);

/// Closedness of the fundamental form vs nabla^1 phi = 0, measured, never
/// asserted; both closedness readings reported side by side.
struct Theorem7Result {
  double nabla1_phi = 0.0;
  double pn_residual = 0.0;
  double domega_full = 0.0;
  double domega_horizontal = 0.0;
  bool ack_full = false;
  bool ack_horizontal = false;
  bool consistent_full = false;        // (nabla1 phi == 0) <=> ack_full
  bool consistent_horizontal = false;  // (nabla1 phi == 0) <=> ack_horizontal
  bool convention_flag = false;        // readings disagree
  Point witness;
};
Theorem7Result check_theorem7(const AlmostContactStructure& s,
                              const SampleSpec& spec, int threads = 1);

/// The covariant-derivative display (q7 shape) on all frame pairs including
/// vertical slots, with the three proof conditions cross-reported.
struct Theorem8Result {
  double q7_residual = 0.0;
  double nabla_phi = 0.0;  // horizontal part only
  double dn_phi = 0.0;
  double dn_g = 0.0;
  bool consistent_full = false;
  bool consistent_horizontal = false;
  Point witness;
};
Theorem8Result check_theorem8(const AlmostContactStructure& s,
                              const SampleSpec& spec, int threads = 1);

/// Contorsion of the interior metric connection with prescribed torsion
/// P(N_phi)/4, plus the torsion-free evidence: whenever nabla^1 phi
/// vanishes, P(N_phi) must vanish too.
struct Theorem5Result {
  double torsion_match_residual = 0.0;
  double nabla1_phi = 0.0;
  double pn_residual = 0.0;
  bool evidence_consistent = false;
  Point witness;
};
Theorem5Result check_theorem5_torsion(const AlmostContactStructure& s,
                                      const SampleSpec& spec, int threads = 1);

}  // namespace acml
