#include <cmath>
#include <numbers>

#include "floqryd/lindblad/evolver.hpp"
#include "floqryd/model/units.hpp"
#include "floqryd/observables/observables.hpp"
#include "support.hpp"

using namespace floqryd;
using core::cplx;

TEST(Populations, BasisStates) {
  const auto p = observables::populations(lindblad::DensityMatrix::ground(2));
  EXPECT_DOUBLE_EQ(p.at("gg"), 1.0);
  EXPECT_DOUBLE_EQ(p.at("ee"), 0.0);
  const auto w = observables::populations(lindblad::DensityMatrix::pure(observables::WReference::symmetric(2).state()));
  EXPECT_NEAR(w.at("ge"), 0.5, 1e-15);
  EXPECT_NEAR(w.at("eg"), 0.5, 1e-15);
  EXPECT_NEAR(w.at("ge+eg"), 1.0, 1e-15);
  const auto mixed = observables::populations(std::vector<double>(4, 0.25), 2);
  for (const auto& [label, v] : mixed)
    if (label != "ge+eg") EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Populations, ExcitationNumbersForThreeAtoms) {
  const auto p = observables::populations(lindblad::DensityMatrix::pure(observables::WReference::symmetric(3).state()));
  EXPECT_NEAR(p.at("P1"), 1.0, 1e-15);
  EXPECT_NEAR(p.at("P0"), 0.0, 1e-15);
}

TEST(WReference, NormalizedWithPhases) {
  const auto w = observables::WReference{{0.0, 1.3, -0.4}}.state();
  EXPECT_NEAR(w.norm(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(w[4]), 1.0 / std::sqrt(3.0), 1e-15);
}

TEST(Fidelity, SameAndOppositePhase) {
  const auto w = observables::WReference::symmetric(2);
  const auto rho = lindblad::DensityMatrix::pure(w.state());
  EXPECT_NEAR(observables::w_fidelity(rho, w), 1.0, 1e-14);
  EXPECT_NEAR(observables::w_fidelity(rho, observables::WReference{{0.0, std::numbers::pi}}), 0.0, 1e-14);
  EXPECT_NEAR(observables::w_fidelity(lindblad::DensityMatrix::ground(2), w), 0.0, 1e-15);
}

TEST(Spam, PaperDefaults) {
  const auto spam = model::paper_defaults().spam;
  const auto g = observables::apply_spam(1.0, 0.0, spam);
  EXPECT_NEAR(g[0], 0.97, 1e-12);
  const auto r = observables::apply_spam(0.0, 1.0, spam);
  EXPECT_NEAR(r[1], (1.0 - 0.03 + 0.03 * 0.03) * 0.991 + 0.009 * 0.03, 1e-12);
  EXPECT_NEAR(r[1], 0.9623, 2e-4);
}

TEST(Spam, IdentityAtZeroError) {
  const model::SpamModel none{};
  const auto p = observables::apply_spam(0.37, 0.63, none);
  EXPECT_DOUBLE_EQ(p[0], 0.37);
  EXPECT_DOUBLE_EQ(p[1], 0.63);
  const std::vector<double> joint = {0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(observables::apply_spam(joint, 2, none), joint);
}

TEST(Spam, JointChannelPreservesNormalization) {
  const auto spam = model::paper_defaults().spam;
  const auto out = observables::apply_spam(std::vector<double>{0.4, 0.1, 0.2, 0.3}, 2, spam);
  double s = 0.0;
  for (double x : out) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_CODE(observables::apply_spam(std::vector<double>{0.4, 0.1, 0.2, 0.2}, 2, spam), ErrorCode::NotNormalized);
}

TEST(GateError, FormulaAndScaling) {
  const double v = units::mhz_to_angular(10.0);
  const double e = observables::gate_error_bound(v, 106.5);
  EXPECT_NEAR(e, 3.0 * std::pow(7.0 * std::numbers::pi, 2.0 / 3.0) / 8.0 * std::pow(v * 106.5, -2.0 / 3.0), 1e-15);
  EXPECT_NEAR(e, 8.3e-3, 1.5e-3);
  EXPECT_NEAR(observables::gate_error_bound(2.0 * v, 106.5) / e, std::pow(2.0, -2.0 / 3.0), 1e-12);
  EXPECT_LT(observables::gate_error_bound(100.0 * v, 106.5), e);
}
