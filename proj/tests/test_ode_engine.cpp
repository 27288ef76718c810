#include <gtest/gtest.h>

#include <cmath>

#include "flrw_blowup/ode_engine.hpp"
#include "test_support.hpp"

using namespace flrw;

namespace {

ComparisonOde cubic(double w0, double w1) {
    ComparisonOde o;
    o.c = 1.0;
    o.p = 3.0;
    o.b = [](double) { return 1.0; };
    o.mass_sq = [](double) { return 0.0; };
    o.w0 = w0;
    o.w1 = w1;
    return o;
}

ComparisonOde oscillator(double k, double w0, double w1) {
    ComparisonOde o;
    o.c = 1.0;
    o.p = 2.0;
    o.b = [](double) { return 0.0; };
    o.mass_sq = [k](double) { return k * k; };
    o.w0 = w0;
    o.w1 = w1;
    return o;
}

}  // namespace

TEST(Integrate, CubicBenchmarkBlowsUpAtOne) {
    const auto traj = integrate(cubic(std::sqrt(2.0), std::sqrt(2.0)), 2.0);
    EXPECT_TRUE(traj.blowup_detected);
    const auto bt = detect_blowup_time(traj, 2.0);
    ASSERT_TRUE(bt.has_value());
    EXPECT_NEAR(*bt, 1.0, 0.01);
    EXPECT_LE(*bt, traj.samples.back().t + traj.last_step);
    for (std::size_t i = 0; i < traj.samples.size(); i += 50) {
        const auto& s = traj.samples[i];
        if (s.t > 0.99) break;
        EXPECT_NEAR(s.w, std::sqrt(2.0) / (1.0 - s.t), 1e-6 * std::abs(s.w));
    }
}

TEST(Integrate, ToleranceHalvingConverges) {
    StepControls a, b;
    a.rtol = 1e-9;
    a.atol = 1e-11;
    b.rtol = a.rtol / 2;
    b.atol = a.atol / 2;
    const auto ode = cubic(std::sqrt(2.0), std::sqrt(2.0));
    const auto t1 = detect_blowup_time(integrate(ode, 2.0, a), ode);
    const auto t2 = detect_blowup_time(integrate(ode, 2.0, b), ode);
    ASSERT_TRUE(t1 && t2);
    EXPECT_LT(std::abs(*t1 - *t2) / *t2, 1e-3);
}

TEST(Integrate, SamplesStartAtDataAndIncrease) {
    const auto traj = integrate(oscillator(2.0, 1.0, 0.5), 3.0);
    ASSERT_FALSE(traj.samples.empty());
    EXPECT_EQ(traj.samples[0].t, 0.0);
    EXPECT_EQ(traj.samples[0].w, 1.0);
    EXPECT_EQ(traj.samples[0].w_dot, 0.5);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) EXPECT_GT(traj.samples[i].t, traj.samples[i - 1].t);
}

TEST(Integrate, LinearOscillatorClosedForm) {
    const double k = 3.0, w0 = 0.7, w1 = -1.2;
    const auto traj = integrate(oscillator(k, w0, w1), 10.0);
    EXPECT_FALSE(traj.blowup_detected);
    EXPECT_FALSE(detect_blowup_time(traj, 2.0).has_value());
    for (const auto& s : traj.samples) EXPECT_NEAR(s.w, w0 * std::cos(k * s.t) + w1 * std::sin(k * s.t) / k, 1e-8);
}

TEST(Integrate, OscillatorTimeReversal) {
    const double k = 1.7, w0 = 0.3, w1 = 0.9, T = 4.0;
    const auto fwd = integrate(oscillator(k, w0, w1), T);
    const auto& end = fwd.samples.back();
    const auto back = integrate(oscillator(k, end.w, -end.w_dot), T);
    EXPECT_NEAR(back.samples.back().w, w0, 1e-8);
    EXPECT_NEAR(-back.samples.back().w_dot, w1, 1e-8);
}

TEST(Integrate, ZeroDataStaysZero) {
    const auto traj = integrate(cubic(0.0, 0.0), 5.0);
    for (const auto& s : traj.samples) {
        EXPECT_EQ(s.w, 0.0);
        EXPECT_EQ(s.w_dot, 0.0);
    }
}

TEST(Integrate, RejectsExcludedRegionAndHorizon) {
    CosmologyParams p;
    p.H = 1.0;
    p.sigma = -2.0;
    const auto in = make_inputs(p, 1.0, 1.0, 0.5, 0.5, 1.0, 3.0, 10.0, 10.0);
    EXPECT_THROW(integrate(in, 0.5), std::domain_error);
    CosmologyParams q;
    q.n = 3;
    q.H = -1.0;
    const auto in2 = make_inputs(q, 3.0, 1.0, 0.5, 0.5, 1.0, 3.0, 10.0, 10.0);
    EXPECT_THROW(integrate(in2, 1.0), std::domain_error);
}

TEST(ComparisonProperties, CertifiedBenchmarkPropertiesHold) {
    const auto in = fixtures::minkowski_benchmark();
    const auto traj = integrate(in, 0.5);
    ASSERT_TRUE(traj.blowup_detected);
    const auto rep = check_comparison_properties(traj, in);
    EXPECT_TRUE(rep.all_hold());
    ASSERT_EQ(rep.properties.size(), 4u);
}

TEST(ComparisonProperties, ZeroNReducesToW0Bound) {
    CosmologyParams p;
    p.H = -1.0;
    p.m_squared = 1.0;
    auto in = make_inputs(p, 3.0, 0.0, 0.5, 0.5, 1.0, 2.0, 1.0, 0.0);
    in.w0 = 1.5 * comparison_w0_bound(in);
    const auto traj = integrate(in, 1.5);
    const auto rep = check_comparison_properties(traj, in);
    EXPECT_TRUE(rep.properties[0].holds);
    for (const auto& s : traj.samples) EXPECT_GE(s.w, in.w0 * (1.0 - 1e-12));
}

TEST(ComparisonProperties, UndersizedW0IsPreconditionError) {
    const auto in = fixtures::minkowski_benchmark(1.0, 64.0);
    const auto traj = integrate(in, 0.5);
    try {
        check_comparison_properties(traj, in);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("w0"), std::string::npos);
    }
}

TEST(Envelope, ValuesAndPole) {
    const auto in = fixtures::minkowski_benchmark();
    const auto cert = certify(in);
    EXPECT_NEAR(envelope(in, cert, 0.0), in.w0, 1e-14);
    EXPECT_NEAR(envelope_pole(in, cert), cert.T_star, 1e-12);
    EXPECT_THROW(envelope(in, cert, cert.T_star), PoleError);
}

TEST(Envelope, LowerBoundsTheTrajectory) {
    const auto in = fixtures::minkowski_benchmark();
    const auto cert = certify(in);
    const auto traj = integrate(in, 0.5);
    const double pole = envelope_pole(in, cert);
    for (const auto& s : traj.samples) {
        if (s.t > 0.95 * pole) break;
        EXPECT_GE(s.w, envelope(in, cert, s.t) * (1.0 - 1e-4));
    }
    const auto bt = detect_blowup_time(traj, make_comparison_ode(in));
    ASSERT_TRUE(bt.has_value());
    EXPECT_LE(*bt, cert.T_star);
}

TEST(Envelope, DoubleThresholdBlowsUpBeforeTStar) {
    auto in = fixtures::minkowski_benchmark();
    const auto probe = certify(in);
    in.w0 = 2.0 * probe.w0_threshold;
    in.w1 = 2.0 * data_thresholds(in, probe.B, probe.Q).w1;
    const auto cert = certify(in);
    ASSERT_TRUE(cert.valid());
    const auto traj = integrate(in, std::min(2.0 * cert.T_star, 10.0));
    const auto bt = detect_blowup_time(traj, make_comparison_ode(in));
    ASSERT_TRUE(bt.has_value());
    EXPECT_LE(*bt, cert.T_star);
}

TEST(Energy, MonotoneAndGrowthAlongCertifiedTrajectories) {
    fixtures::CaseSampler rng(41);
    int runs = 0;
    for (auto tag : fixtures::kAllCases) {
        if (tag == CorollaryCase::V) continue;
        auto in = rng.draw(tag);
        in.p = 3.0;
        const auto probe = certify(in);
        if (!std::isfinite(probe.w0_threshold)) continue;
        in.w0 = 1.5 * probe.w0_threshold;
        in.w1 = 1.5 * data_thresholds(in, probe.B, probe.Q).w1;
        const auto cert = certify(in);
        if (!cert.valid()) continue;
        ++runs;
        const auto traj = integrate(in, std::min(cert.T_star, fixtures::time_cap(in.params(), 1e9)));
        const double C = std::sqrt(cert.C_squared);
        double prev = -kInf;
        for (const auto& s : traj.samples) {
            if (s.w > 1e6 * in.w0) break;
            const double e = comparison_energy(in, s.t, s.w, s.w_dot);
            EXPECT_GE(e, prev - 1e-6 * std::max(1.0, std::abs(prev))) << to_string(tag) << " t=" << s.t;
            prev = std::max(prev, e);
            const double bound = C * std::pow(s.w, cert.alpha);
            EXPECT_GE(s.w_dot, bound * (1.0 - 1e-6)) << to_string(tag) << " t=" << s.t;
        }
    }
    EXPECT_GE(runs, 5);
}

TEST(Trajectory, CsvColumns) {
    const auto in = fixtures::minkowski_benchmark();
    const auto cert = certify(in);
    const auto traj = integrate(in, 0.1);
    std::ostringstream os;
    write_trajectory_csv(os, traj, in, &cert);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "t,w,wdot,envelope,growth_bound");
}
