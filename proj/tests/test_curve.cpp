#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "evp/curve.hpp"
#include "test_support.hpp"

using namespace evp;
using evp::testing::random_curve;

namespace {

PerturbationCurve make(const std::vector<std::pair<double, double>>& pts) {
    return PerturbationCurve::validate(pts);
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("validate accepts a well-formed curve") {
    auto curve = make({{0, 0.95}, {0.5, 0.80}, {1.0, 0.40}});
    CHECK(curve.size() == 3);
    CHECK(curve.clean_accuracy() == 0.95);
    CHECK(curve.max_epsilon() == 1.0);
}

TEST_CASE("validate rejects out-of-order epsilons") {
    CHECK_THROWS_AS(make({{0.5, 0.8}, {0, 0.95}}), Error);
    try {
        make({{0.5, 0.8}, {0, 0.95}});
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_monotone_epsilon);
    }
}

TEST_CASE("validate rejects accuracies outside [0,1]") {
    try {
        make({{0, 1.2}});
        FAIL("expected AccuracyOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == errc::accuracy_out_of_range);
    }
    CHECK_THROWS_AS(make({{0, -0.1}, {1, 0.5}}), Error);
}

TEST_CASE("validate demands the clean point and enough samples") {
    try {
        make({{0.1, 0.9}, {0.5, 0.8}});
        FAIL("expected MissingCleanPoint");
    } catch (const Error& e) {
        CHECK(e.code() == errc::missing_clean_point);
    }
    try {
        make({{0, 0.9}});
        FAIL("expected TooFewPoints");
    } catch (const Error& e) {
        CHECK(e.code() == errc::too_few_points);
    }
}

TEST_CASE("interpolation on segments and grid points") {
    CHECK(make({{0, 1.0}, {1, 0.0}}).interpolate(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(make({{0, 0.9}, {2, 0.9}}).interpolate(1.3) == doctest::Approx(0.9).epsilon(1e-15));
    auto curve = make({{0, 0.95}, {0.5, 0.80}, {1.0, 0.40}});
    CHECK(curve.interpolate(0.75) == doctest::Approx(0.60).epsilon(1e-15));
    CHECK(curve.interpolate(0.5) == 0.80);  // exact at samples
    CHECK(curve.interpolate(0.0) == 0.95);
    CHECK(curve.interpolate(1.0) == 0.40);
}

TEST_CASE("interpolation outside the sampled range fails") {
    auto curve = make({{0, 0.9}, {1, 0.5}});
    CHECK_THROWS_AS(curve.interpolate(1.5), Error);
    CHECK_THROWS_AS(curve.interpolate(-0.1), Error);
}

TEST_CASE("viability frontier on the spec curves") {
    auto curve = make({{0, 0.9}, {1, 0.6}, {2, 0.3}});
    ViabilityThreshold tau(0.5);
    CHECK(viability_frontier(curve, tau, CrossingMode::LastSample).d_tau == 1.0);
    CHECK(viability_frontier(curve, tau, CrossingMode::Interpolated).d_tau ==
          doctest::Approx(4.0 / 3.0).epsilon(1e-12));

    auto never_viable = make({{0, 0.4}, {1, 0.3}});
    CHECK(viability_frontier(never_viable, tau, CrossingMode::LastSample).d_tau == 0.0);
    CHECK(viability_frontier(never_viable, tau, CrossingMode::Interpolated).d_tau == 0.0);

    auto always_viable = make({{0, 0.9}, {1, 0.8}});
    CHECK(viability_frontier(always_viable, tau, CrossingMode::Interpolated).d_tau == 1.0);
}

TEST_CASE("ties at tau count as viable") {
    auto curve = make({{0, 0.9}, {1, 0.5}, {2, 0.2}});
    auto region = viability_frontier(curve, ViabilityThreshold(0.5), CrossingMode::LastSample);
    CHECK(region.d_tau == 1.0);
    auto interp = viability_frontier(curve, ViabilityThreshold(0.5), CrossingMode::Interpolated);
    CHECK(interp.d_tau == 1.0);  // crossing lands exactly on the tied sample
}

TEST_CASE("viable islands past the first crossing are flagged") {
    auto curve = make({{0, 0.9}, {1, 0.3}, {2, 0.8}, {3, 0.2}});
    auto region = viability_frontier(curve, ViabilityThreshold(0.5), CrossingMode::Interpolated);
    CHECK(region.discarded_viable_island);
    CHECK(region.d_tau < 1.0);  // first crossing, not the island
    auto plain = viability_frontier(make({{0, 0.9}, {1, 0.3}}), ViabilityThreshold(0.5),
                                    CrossingMode::Interpolated);
    CHECK_FALSE(plain.discarded_viable_island);
}

TEST_CASE("frontier is monotone non-increasing in tau") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        auto curve = random_curve(rng);
        auto mode = trial % 2 == 0 ? CrossingMode::LastSample : CrossingMode::Interpolated;
        double prev = curve.max_epsilon();
        for (double tau = 0.05; tau <= 1.0; tau += 0.05) {
            double d = viability_frontier(curve, ViabilityThreshold(tau), mode).d_tau;
            CHECK(d <= prev + 1e-15);
            CHECK(d <= curve.max_epsilon());
            prev = d;
        }
    }
}

TEST_CASE("interpolated frontier dominates the last-sample frontier") {
    Rng rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        auto curve = random_curve(rng);
        double tau = rng.uniform(0.05, 1.0);
        double last =
            viability_frontier(curve, ViabilityThreshold(tau), CrossingMode::LastSample).d_tau;
        double interp =
            viability_frontier(curve, ViabilityThreshold(tau), CrossingMode::Interpolated).d_tau;
        CHECK(interp >= last);
    }
}

TEST_CASE("frontier modes agree when tau sits exactly on a sample") {
    Rng rng(78);
    int exercised = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto curve = random_curve(rng);
        // pick tau = accuracy of the last viable sample before a drop
        const auto& pts = curve.points();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (pts[i].accuracy > pts[i + 1].accuracy && pts[i].accuracy > 0.0) {
                ViabilityThreshold tau(pts[i].accuracy);
                double last =
                    viability_frontier(curve, tau, CrossingMode::LastSample).d_tau;
                double interp =
                    viability_frontier(curve, tau, CrossingMode::Interpolated).d_tau;
                CHECK(interp == last);
                ++exercised;
                break;
            }
        }
    }
    CHECK(exercised > 100);
}

TEST_CASE("interpolation is Lipschitz with the max segment slope") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        auto curve = random_curve(rng);
        double max_slope = 0.0;
        const auto& pts = curve.points();
        for (std::size_t i = 1; i < pts.size(); ++i)
            max_slope = std::max(max_slope, std::abs(pts[i].accuracy - pts[i - 1].accuracy) /
                                                (pts[i].epsilon - pts[i - 1].epsilon));
        for (int probe = 0; probe < 20; ++probe) {
            double a = rng.uniform(0.0, curve.max_epsilon());
            double b = rng.uniform(0.0, curve.max_epsilon());
            CHECK(std::abs(curve.interpolate(a) - curve.interpolate(b)) <=
                  max_slope * std::abs(a - b) + 1e-12);
        }
    }
}

TEST_CASE("CSV round-trips bit-exactly") {
    Rng rng(4242);
    for (int trial = 0; trial < 100; ++trial) {
        auto curve = random_curve(rng);
        auto back = PerturbationCurve::from_csv(curve.to_csv());
        REQUIRE(back.size() == curve.size());
        for (std::size_t i = 0; i < curve.size(); ++i) {
            CHECK(bit_equal(back.points()[i].epsilon, curve.points()[i].epsilon));
            CHECK(bit_equal(back.points()[i].accuracy, curve.points()[i].accuracy));
        }
        CHECK(back.to_csv() == curve.to_csv());
    }
}

TEST_CASE("CSV carries optional sample counts") {
    std::vector<CurvePoint> pts = {{0.0, 0.9, 200, {}}, {0.5, 0.7, 200, {}}};
    auto curve = PerturbationCurve::validate(pts, NormKind::Linf, "sweep");
    std::string csv = curve.to_csv();
    CHECK(csv.rfind("epsilon,accuracy,n_samples\n", 0) == 0);
    auto back = PerturbationCurve::from_csv(csv);
    CHECK(back.points()[0].n_samples == 200);
}

TEST_CASE("JSON envelope round-trips every field") {
    std::vector<CurvePoint> pts = {{0.0, 0.9, 150, 0.0}, {0.25, 0.7, 150, 0.249}};
    auto curve = PerturbationCurve::validate(pts, NormKind::Linf, "model-a", "/255");
    auto back = PerturbationCurve::from_json(curve.to_json());
    CHECK(back.norm() == NormKind::Linf);
    CHECK(back.source() == "model-a");
    CHECK(back.scale_note() == "/255");
    REQUIRE(back.points().size() == 2);
    CHECK(bit_equal(*back.points()[1].mean_actual_norm, 0.249));
    CHECK(back.points()[0].n_samples == 150);
    CHECK(back.to_json() == curve.to_json());
}

TEST_CASE("malformed CSV is rejected") {
    CHECK_THROWS_AS(PerturbationCurve::from_csv(""), Error);
    CHECK_THROWS_AS(PerturbationCurve::from_csv("eps,acc\n0,0.9\n1,0.5\n"), Error);
    CHECK_THROWS_AS(PerturbationCurve::from_csv("epsilon,accuracy\n0,0.9,7\n"), Error);
    CHECK_THROWS_AS(PerturbationCurve::from_csv("epsilon,accuracy\n0,abc\n1,0.5\n"), Error);
}

TEST_CASE("threshold domain is (0, 1]") {
    CHECK_THROWS_AS(ViabilityThreshold(0.0), Error);
    CHECK_THROWS_AS(ViabilityThreshold(1.1), Error);
    CHECK(ViabilityThreshold(1.0).tau == 1.0);
}
