#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "capstek/errors.hpp"
#include "capstek/family.hpp"
#include "capstek/radial.hpp"
#include "oracles.hpp"

using namespace capstek;

namespace {
const double kPi = std::numbers::pi;
const double kHalfLen = kPi / (2 * std::sqrt(2.0));  // s0 of the a = 0 annulus
}  // namespace

TEST(CapModes, QuarterCapClosedValues) {
    EXPECT_NEAR(cap_mode_eigs(kPi / 4, 0, 1).eigenvalues.at(0), -1.0, 1e-8);
    EXPECT_NEAR(cap_mode_eigs(kPi / 4, 1, 1).eigenvalues.at(0), 1.0, 1e-8);
}

TEST(CapModes, TracksTangentAndCotangent) {
    for (double r : {0.3, 0.8, 1.2, 1.5}) {
        EXPECT_NEAR(cap_mode_eigs(r, 0, 1).eigenvalues[0] / -std::tan(r), 1.0, 1e-8) << r;
        EXPECT_NEAR(cap_mode_eigs(r, 1, 1).eigenvalues[0] * std::tan(r), 1.0, 1e-8) << r;
    }
}

TEST(CapModes, ProfilesAreCosineAndSine) {
    const auto m0 = cap_mode_eigs(1.0, 0, 1);
    const auto m1 = cap_mode_eigs(1.0, 1, 1);
    const auto& p0 = m0.radial_profiles.at(0);
    const auto& p1 = m1.radial_profiles.at(0);
    ASSERT_EQ(p0.t.size(), 401u);
    EXPECT_NEAR(p0.t.back(), 1.0, 1e-15);
    const double c0 = p0.value.back() / std::cos(1.0);
    const double c1 = p1.value.back() / std::sin(1.0);
    for (std::size_t i = 1; i < p0.t.size(); ++i) {
        EXPECT_NEAR(p0.value[i], c0 * std::cos(p0.t[i]), 1e-8 * std::abs(c0));
        EXPECT_NEAR(p1.value[i], c1 * std::sin(p1.t[i]), 1e-8 * std::abs(c1));
    }
}

TEST(CapModes, HigherModesMatchShootingAndExceedCotangent) {
    for (double r : {kPi / 4, 1.2}) {
        for (int k = 2; k <= 5; ++k) {
            const double s = cap_mode_eigs(r, k, 1).eigenvalues[0];
            EXPECT_NEAR(s / oracle::cap_mode_sigma(k, r), 1.0, 1e-5) << r << " " << k;
            EXPECT_GT(s, 1.0 / std::tan(r));
        }
    }
}

TEST(CapModes, OneEigenvaluePerMode) {
    const auto m = cap_mode_eigs(kPi / 3, 2, 2);
    EXPECT_EQ(m.eigenvalues.size(), 1u);
    EXPECT_EQ(m.parity.at(0), Parity::none);
}

TEST(CapModes, ProfilesSolveTheModeEquation) {
    for (int k = 0; k <= 3; ++k) {
        const auto m = cap_mode_eigs(1.1, k, 1);
        EXPECT_LT(mode_residual(m.problem, m.radial_profiles[0]), 1e-6) << k;
    }
}

TEST(CapModes, Errors) {
    EXPECT_THROW(cap_mode_eigs(0.0, 0, 1), InvalidArgument);
    EXPECT_THROW(cap_mode_eigs(-1.0, 0, 1), InvalidArgument);
    EXPECT_THROW(cap_mode_eigs(2.0, 0, 1), InvalidArgument);
    EXPECT_THROW(cap_mode_eigs(1.0, -1, 1), InvalidArgument);
    EXPECT_THROW(cap_mode_eigs(1.0, 0, 0), InvalidArgument);
    // cos t vanishes on the equator: the mode 0 ratio is infinite there
    EXPECT_THROW(cap_mode_eigs(kPi / 2, 0, 1), SolverFailure);
}

TEST(ClosedForms, Values) {
    const auto c = cap_closed_forms(kPi / 2);
    EXPECT_NEAR(c.cos_t, 0.0, 1e-15);
    EXPECT_NEAR(c.sin_t, 1.0, 1e-15);
    EXPECT_NEAR(c.y, 1.0, 1e-14);
    EXPECT_GT(std::abs(cap_closed_forms(0.01).z), 10.0);
    EXPECT_THROW(cap_closed_forms(0.0), InvalidArgument);
    EXPECT_THROW(cap_closed_forms(kPi), InvalidArgument);
}

TEST(ClosedForms, SingularPartnersSolveTheEquations) {
    const double h = 1e-4;
    for (double t : {0.4, 0.7, 1.3}) {
        auto y = [](double s) { return cap_closed_forms(s).y; };
        auto z = [](double s) { return cap_closed_forms(s).z; };
        const double cot = std::cos(t) / std::sin(t);
        const double s2 = std::sin(t) * std::sin(t);
        const double ry = (y(t + h) - 2 * y(t) + y(t - h)) / (h * h) + cot * (y(t + h) - y(t - h)) / (2 * h) + 2 * y(t);
        const double rz = (z(t + h) - 2 * z(t) + z(t - h)) / (h * h) + cot * (z(t + h) - z(t - h)) / (2 * h) +
                          (2 - 1 / s2) * z(t);
        EXPECT_NEAR(ry, 0.0, 1e-5) << t;
        EXPECT_NEAR(rz, 0.0, 1e-5) << t;
    }
}

TEST(AnnulusModes, CliffordAnnulus) {
    // the even k = 0 profile cos(sqrt2 s) vanishes on the boundary: no finite eigenvalue
    const auto m0 = annulus_mode_eigs(0.0, kHalfLen, 0, 2);
    ASSERT_EQ(m0.eigenvalues.size(), 1u);
    EXPECT_EQ(m0.parity[0], Parity::odd);
    EXPECT_NEAR(m0.eigenvalues[0], 0.0, 1e-9);
    const auto m1 = annulus_mode_eigs(0.0, kHalfLen, 1, 2);
    ASSERT_EQ(m1.eigenvalues.size(), 2u);
    EXPECT_NEAR(m1.eigenvalues[0], 0.0, 1e-9);
    EXPECT_NEAR(m1.eigenvalues[1], 2 * std::sqrt(2.0) / kPi, 1e-9);
}

TEST(AnnulusModes, FamilyMemberCarriesCoordinateEigenvalues) {
    const auto p = solve_family(1.2);
    const auto m0 = annulus_mode_eigs(p.a, p.s0, 0, 2);
    EXPECT_EQ(m0.parity[0], Parity::even);
    EXPECT_NEAR(m0.eigenvalues[0], -std::tan(1.2), 1e-8);
    EXPECT_NEAR(m0.eigenvalues[1], 1.0 / std::tan(1.2), 1e-8);
    const auto m1 = annulus_mode_eigs(p.a, p.s0, 1, 2);
    EXPECT_NEAR(m1.eigenvalues[0], 1.0 / std::tan(1.2), 1e-8);
    EXPECT_NEAR(m1.eigenvalues[1], 1.0 / std::tan(1.2) + p.mu, 1e-8);
}

TEST(AnnulusModes, MatchShooting) {
    const auto p = solve_family(0.9);
    for (int k = 0; k <= 3; ++k) {
        const auto m = annulus_mode_eigs(p.a, p.s0, k, 2);
        for (std::size_t i = 0; i < m.eigenvalues.size(); ++i) {
            const double ref = oracle::annulus_mode_sigma(p.a, p.s0, k, m.parity[i] == Parity::even);
            EXPECT_NEAR(m.eigenvalues[i], ref, 1e-7 * std::max(1.0, std::abs(ref))) << k;
        }
        EXPECT_LT(mode_residual(m.problem, m.radial_profiles[0]), 1e-6);
    }
}

TEST(AnnulusModes, CountTruncates) {
    const auto m = annulus_mode_eigs(-0.1, 1.0, 2, 1);
    ASSERT_EQ(m.eigenvalues.size(), 1u);
    const auto both = annulus_mode_eigs(-0.1, 1.0, 2, 5);
    ASSERT_EQ(both.eigenvalues.size(), 2u);
    EXPECT_EQ(m.eigenvalues[0], both.eigenvalues[0]);
    EXPECT_LT(both.eigenvalues[0], both.eigenvalues[1]);
}

TEST(AnnulusModes, Errors) {
    EXPECT_THROW(annulus_mode_eigs(0.1, 1.0, 0, 1), InvalidArgument);
    EXPECT_THROW(annulus_mode_eigs(-0.5, 1.0, 0, 1), InvalidArgument);
    EXPECT_THROW(annulus_mode_eigs(0.0, 0.0, 0, 1), InvalidArgument);
    EXPECT_THROW(annulus_mode_eigs(0.0, 1.0, -2, 1), InvalidArgument);
    EXPECT_THROW(annulus_mode_eigs(0.0, 1.0, 0, 0), InvalidArgument);
}

TEST(MergeModes, Empty) { EXPECT_TRUE(merge_modes({}, 5).empty()); }

TEST(MergeModes, CapThirdPi) {
    const auto merged = merge_modes({cap_mode_eigs(kPi / 3, 0, 1), cap_mode_eigs(kPi / 3, 1, 1)}, 3);
    ASSERT_EQ(merged.size(), 3u);
    EXPECT_NEAR(merged[0].value, -std::sqrt(3.0), 1e-8);
    EXPECT_EQ(merged[0].k, 0);
    for (int i : {1, 2}) {
        EXPECT_NEAR(merged[i].value, 1 / std::sqrt(3.0), 1e-8);
        EXPECT_EQ(merged[i].k, 1);
    }
}

TEST(MergeModes, AnnulusTriple) {
    const auto p = solve_family(1.2);
    std::vector<ModeSpectrum> modes;
    for (int k = 0; k <= 2; ++k) modes.push_back(annulus_mode_eigs(p.a, p.s0, k, 2));
    const auto merged = merge_modes(modes, 6);
    ASSERT_EQ(merged.size(), 6u);
    EXPECT_EQ(merged[0].parity, Parity::even);
    for (int i = 1; i <= 3; ++i) EXPECT_NEAR(merged[i].value, 1.0 / std::tan(1.2), 1e-8);
    EXPECT_GT(merged[4].value, merged[3].value + 0.1);
    EXPECT_TRUE(std::is_sorted(merged.begin(), merged.end(),
                               [](const auto& x, const auto& y) { return x.value < y.value; }));
}

TEST(MergeModes, RejectsMixedProblems) {
    EXPECT_THROW(merge_modes({cap_mode_eigs(1.0, 0, 1), cap_mode_eigs(1.1, 1, 1)}, 3), InvalidArgument);
    EXPECT_THROW(merge_modes({cap_mode_eigs(1.0, 0, 1), annulus_mode_eigs(0.0, 1.0, 1, 1)}, 3), InvalidArgument);
    EXPECT_THROW(merge_modes({cap_mode_eigs(1.0, 0, 1), cap_mode_eigs(1.0, 1, 1, 1.0)}, 3), InvalidArgument);
}

TEST(CapDirichlet, GroundState) {
    EXPECT_NEAR(cap_dirichlet_ground_state(kPi / 2), 2.0, 1e-8);
    EXPECT_NEAR(cap_dirichlet_ground_state(kPi / 4) / oracle::cap_dirichlet(kPi / 4), 1.0, 1e-6);
    // shrinking the cap raises the eigenvalue
    EXPECT_GT(cap_dirichlet_ground_state(0.5), cap_dirichlet_ground_state(0.6));
    EXPECT_THROW(cap_dirichlet_ground_state(0.0), InvalidArgument);
}

TEST(RadialJson, Shape) {
    const auto j = mode_spectrum_to_json(annulus_mode_eigs(-0.1, 1.0, 1, 2));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"domain", "k", "alpha", "eigenvalues", "parity"}));
    EXPECT_EQ(j["domain"]["type"], "annulus");
    EXPECT_EQ(j["parity"].size(), 2u);
    EXPECT_STREQ(parity_name(Parity::odd), "odd");
}
