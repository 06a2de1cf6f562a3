#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace acml;
using namespace testutil;

TEST_CASE("classification of the bundled structures") {
  const auto spec_b = spec_for(fixture_b(), 200, 42);
  const auto b = classify(fixture_b(), spec_b);
  CHECK(b.sasakian.verdict);
  CHECK(b.contact_metric.verdict);
  CHECK(b.normal.verdict);
  CHECK(b.ack_full.verdict);
  CHECK(b.sasakian.max_residual <= 1e-10);

  const auto c = classify(fixture_c(), spec_for(fixture_c(), 200, 42));
  CHECK(c.almost_hermitian.verdict);
  CHECK(c.ack_full.verdict);
  CHECK_FALSE(c.contact_metric.verdict);
  CHECK(c.contact_metric.max_residual == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(c.normal.verdict);  // omega is phi-invariant here
  CHECK_FALSE(c.sasakian.verdict);

  const auto f = classify(fixture_f(), spec_for(fixture_f(), 200, 42));
  CHECK(f.almost_hermitian.verdict);
  CHECK_FALSE(f.ack_horizontal.verdict);
  CHECK_FALSE(f.ack_full.verdict);
  CHECK_FALSE(f.contact_metric.verdict);

  const auto a = classify(fixture_a(), spec_for(fixture_a(), 200, 42));
  CHECK(a.almost_hermitian.verdict);
  CHECK(a.normal.verdict);
  CHECK(a.ack_full.verdict);
}

TEST_CASE("implication lattice holds on every report") {
  auto structures = all_fixtures();
  structures.push_back(random_structure(55));
  for (const auto& s : structures) {
    const auto rep = classify(s, spec_for(s, 60));
    if (rep.sasakian.verdict) {
      CHECK(rep.normal.verdict);
      CHECK(rep.contact_metric.verdict);
    }
    if (rep.ack_full.verdict) CHECK(rep.ack_horizontal.verdict);
    CHECK(rep.sasakian.verdict == (rep.normal.verdict && rep.contact_metric.verdict));
  }
}

TEST_CASE("normality vs omega invariance") {
  const auto rb = check_theorem_N1(fixture_b(), spec_for(fixture_b()));
  CHECK_FALSE(rb.skipped);
  CHECK(rb.consistent);
  CHECK(rb.n1_residual <= 1e-10);
  CHECK(rb.omega_invariance_residual <= 1e-10);

  const auto rc = check_theorem_N1(fixture_c(), spec_for(fixture_c()));
  CHECK_FALSE(rc.skipped);
  CHECK(rc.consistent);

  const auto rf = check_theorem_N1(fixture_f(), spec_for(fixture_f()));
  CHECK_FALSE(rf.skipped);
  CHECK(rf.consistent);
}

TEST_CASE("the six-term covariant identity") {
  const auto ra = check_q4(fixture_a(), spec_for(fixture_a(), 60));
  CHECK(ra.max_residual <= 1e-6);
  const auto rb = check_q4(fixture_b(), spec_for(fixture_b(), 60));
  CHECK(rb.max_residual <= 1e-6);

  // reduced form agrees wherever the almost-normal hypothesis holds
  for (const auto& s : all_fixtures()) {
    const auto r = check_q4(s, spec_for(s, 40));
    CHECK(std::isfinite(r.max_residual));
    if (r.almost_normal_residual <= 1e-10) CHECK(r.max_residual_q5 <= 1e-6);
  }
}

TEST_CASE("closedness vs nabla^1 phi") {
  const auto rc = check_theorem7(fixture_c(), spec_for(fixture_c()));
  CHECK(rc.nabla1_phi <= 1e-9);
  CHECK(rc.ack_full);
  CHECK(rc.consistent_full);
  CHECK(rc.consistent_horizontal);
  CHECK_FALSE(rc.convention_flag);

  const auto rf = check_theorem7(fixture_f(), spec_for(fixture_f()));
  CHECK(rf.nabla1_phi >= 0.04);
  CHECK_FALSE(rf.ack_horizontal);
  CHECK(rf.consistent_full);
  CHECK(rf.consistent_horizontal);
  CHECK_FALSE(rf.convention_flag);

  const auto rd = check_theorem7(fixture_d(), spec_for(fixture_d()));
  CHECK(rd.nabla1_phi <= 1e-9);
  CHECK(rd.domega_horizontal <= 1e-9);
  CHECK(rd.domega_full >= 0.05);
  CHECK(rd.convention_flag);
  CHECK(rd.consistent_horizontal);
  CHECK_FALSE(rd.consistent_full);
}

TEST_CASE("the covariant-derivative display") {
  const auto rb = check_theorem8(fixture_b(), spec_for(fixture_b()));
  CHECK(rb.q7_residual <= 1e-8);
  CHECK(rb.consistent_full);
  CHECK(rb.consistent_horizontal);

  const auto ra = check_theorem8(fixture_a(), spec_for(fixture_a()));
  CHECK(ra.q7_residual <= 1e-12);

  const auto rf = check_theorem8(fixture_f(), spec_for(fixture_f()));
  CHECK(rf.q7_residual > 1e-8);
  CHECK(rf.nabla_phi > 1e-8);  // at least one of the three conditions fails
  CHECK(rf.consistent_full);
  CHECK(rf.consistent_horizontal);
}

TEST_CASE("prescribed-torsion construction") {
  const auto rc = check_theorem5_torsion(fixture_c(), spec_for(fixture_c()));
  CHECK(rc.torsion_match_residual <= 1e-10);
  CHECK(rc.pn_residual <= 1e-10);  // target torsion vanishes here
  CHECK(rc.evidence_consistent);

  const auto rb = check_theorem5_torsion(fixture_b(), spec_for(fixture_b()));
  CHECK(rb.torsion_match_residual <= 1e-10);
  CHECK(rb.evidence_consistent);

  // a structure with d_n phi != 0 has a genuinely nonzero torsion target
  const auto rnd = random_structure(31);
  const auto rr = check_theorem5_torsion(rnd, spec_for(rnd));
  CHECK(rr.torsion_match_residual <= 1e-10);
}

TEST_CASE("reports are deterministic") {
  const auto s = fixture_d();
  const auto spec = spec_for(s, 80, 4242);
  const auto r1 = classify(s, spec, 1);
  const auto r2 = classify(s, spec, 1);
  const auto r4 = classify(s, spec, 4);
  auto same = [](const PredicateResult& x, const PredicateResult& y) {
    return x.verdict == y.verdict && x.max_residual == y.max_residual &&
           x.witness == y.witness;
  };
  CHECK(same(r1.contact_metric, r2.contact_metric));
  CHECK(same(r1.contact_metric, r4.contact_metric));
  CHECK(same(r1.ack_full, r4.ack_full));
  CHECK(same(r1.normal, r4.normal));
  CHECK(same(r1.almost_hermitian, r4.almost_hermitian));
}
