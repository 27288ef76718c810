#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flrw_blowup/cosmology.hpp"
#include "test_support.hpp"

using namespace flrw;

namespace {

CosmologyParams make(int n, double c, double a0, double H, double sigma, double m2) {
    CosmologyParams p;
    p.n = n;
    p.c = c;
    p.a0 = a0;
    p.H = H;
    p.sigma = sigma;
    p.m_squared = m2;
    return p;
}

}  // namespace

TEST(Horizon, Examples) {
    EXPECT_TRUE(std::isinf(horizon_end(make(3, 1, 1, 0.0, 7.0, 0))));
    EXPECT_NEAR(horizon_end(make(3, 1, 1, -1.0, 0.0, 0)), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(horizon_end(make(1, 1, 1, 1.0, -2.0, 0)), 2.0, 1e-15);
}

TEST(ScaleEval, ConstantScaleFactor) {
    const auto sv = scale_eval(ClosedFormFLRW{make(2, 1, 2.0, 0.0, 0.7, 0)}, 5.0);
    EXPECT_EQ(sv.a, 2.0);
    EXPECT_EQ(sv.a_dot, 0.0);
    EXPECT_EQ(sv.a_ddot, 0.0);
}

TEST(ScaleEval, PowerLawValue) {
    const auto sv = scale_eval(ClosedFormFLRW{make(3, 1, 1, 1.0, 1.0 / 3.0, 0)}, 1.5);
    EXPECT_NEAR(sv.a, 2.0, 1e-14);
}

TEST(ScaleEval, DeSitterDerivatives) {
    const auto sv = scale_eval(ClosedFormFLRW{make(1, 1, 1, 2.0, -1.0, 0)}, 1.0);
    const double e2 = std::exp(2.0);
    EXPECT_NEAR(sv.a, e2, 1e-13);
    EXPECT_NEAR(sv.a_dot, 2.0 * e2, 1e-12);
    EXPECT_NEAR(sv.a_ddot, 4.0 * e2, 1e-12);
}

TEST(ScaleEval, InitialValueIsExact) {
    const auto p = make(2, 1.3, 0.7, -0.4, 1.5, 0);
    const auto sv = scale_eval(ClosedFormFLRW{p}, 0.0);
    EXPECT_EQ(sv.a, 0.7);
    EXPECT_NEAR(sv.a_dot / sv.a, p.H, 1e-12 * std::abs(p.H));
}

TEST(ScaleEval, RejectsHorizonAndNegativeTimes) {
    const ClosedFormFLRW m{make(3, 1, 1, -1.0, 0.0, 0)};
    EXPECT_THROW(scale_eval(m, 2.0 / 3.0), std::domain_error);
    EXPECT_THROW(scale_eval(m, -0.1), std::domain_error);
}

TEST(CurvedMass, Examples) {
    EXPECT_EQ(curved_mass_sq(make(3, 1, 1, 1.7, 0.0, 4.0), 2.3), 4.0);
    EXPECT_NEAR(curved_mass_sq(make(3, 1, 1, 2.0, -1.0, 10.0), 0.8), 1.0, 1e-13);
    EXPECT_NEAR(curved_mass_sq(make(1, 1, 1, 2.0, 1.0, 0.0), 0.0), 1.0, 1e-15);
}

TEST(CurvedMass, FromScaleExamples) {
    const auto flat = make(2, 1, 1, 0.0, 0.0, 9.0);
    for (double t : {0.0, 1.0, 10.0}) EXPECT_EQ(curved_mass_sq_from_scale(ClosedFormFLRW{flat}, flat, t), 9.0);
    const auto ds = make(2, 1, 1, 1.0, -1.0, 2.0);
    EXPECT_NEAR(curved_mass_sq_from_scale(ClosedFormFLRW{ds}, ds, 0.7), 1.0, 1e-12);
}

TEST(CurvedMass, IdentityAcrossCases) {
    fixtures::CaseSampler rng(11);
    for (auto tag : fixtures::kAllCases) {
        for (int k = 0; k < 10; ++k) {
            const auto p = rng.draw(tag).params();
            const double cap = fixtures::time_cap(p, 5.0);
            for (int i = 0; i <= 50; ++i) {
                const double t = cap * i / 50.0;
                const double closed = curved_mass_sq(p, t);
                const double defn = curved_mass_sq_from_scale(ClosedFormFLRW{p}, p, t);
                EXPECT_LE(std::abs(closed - defn), 1e-10 * std::max(1.0, std::abs(closed)))
                    << to_string(tag) << " t=" << t;
            }
        }
    }
}

TEST(Hubble, IdentityAcrossCases) {
    fixtures::CaseSampler rng(12);
    for (auto tag : fixtures::kAllCases) {
        for (int k = 0; k < 10; ++k) {
            const auto p = rng.draw(tag).params();
            const double cap = fixtures::time_cap(p, 5.0);
            for (int i = 0; i <= 50; ++i) {
                const double t = cap * i / 50.0;
                const auto sv = scale_eval(ClosedFormFLRW{p}, t);
                const double expect = p.H * std::pow(sv.a / p.a0, -0.5 * p.n * (1.0 + p.sigma));
                EXPECT_LE(std::abs(sv.a_dot / sv.a - expect), 1e-10 * std::max(std::abs(expect), 1e-300));
            }
        }
    }
}

TEST(SignChange, Examples) {
    EXPECT_FALSE(mass_sign_change_time(make(2, 1, 1, -1.0, 0.0, 4.0)).has_value());
    const auto t1 = mass_sign_change_time(make(1, 1, 1, 1.0, -2.0, 4.0));
    ASSERT_TRUE(t1.has_value());
    EXPECT_NEAR(*t1, 2.0 * (1.0 - std::sqrt(2.0) / 4.0), 1e-12);
    EXPECT_FALSE(mass_sign_change_time(make(1, 1, 1, 1.0, -2.0, 0.1)).has_value());
}

TEST(SignChange, RootOfCurvedMass) {
    fixtures::CaseSampler rng(13);
    int found = 0;
    for (int k = 0; k < 200; ++k) {
        auto p = make(rng.dimension(), rng.uniform(0.5, 2), 1.0, 0, 0, 0);
        if (k % 2 == 0) {
            p.H = rng.uniform(0.1, 2.0);
            p.sigma = rng.uniform(-4.0, -1.1);
        } else {
            p.H = -rng.uniform(0.1, 2.0);
            p.sigma = rng.uniform(-0.9, -0.1);
        }
        p.m_squared = rng.uniform(0.0, 6.0);
        if (const auto t1 = mass_sign_change_time(p)) {
            ++found;
            EXPECT_NEAR(curved_mass_sq(p, *t1), 0.0, 1e-9);
        }
    }
    EXPECT_GT(found, 20);
}

TEST(MassBehavior, Tags) {
    EXPECT_EQ(classify_mass_behavior(make(2, 1, 1, 0.0, 3.0, 2.0)).tag, MassTag::ConstantM2);
    const auto plus = classify_mass_behavior(make(2, 1, 1, -1.0, 1.0, 0.5));
    EXPECT_EQ(plus.tag, MassTag::DivergesPlus);
    EXPECT_NEAR(plus.lower, 0.5 + 1.0, 1e-14);
    EXPECT_EQ(classify_mass_behavior(make(1, 1, 1, 1.0, -2.0, 0.0)).tag, MassTag::DivergesMinus);
    EXPECT_EQ(classify_mass_behavior(make(2, 1, 1, 1.0, 2.0, 0.0)).tag, MassTag::DecreasingBounded);
    EXPECT_EQ(classify_mass_behavior(make(2, 1, 1, 1.0, -0.5, 0.0)).tag, MassTag::IncreasingBounded);
    EXPECT_EQ(classify_mass_behavior(make(2, 1, 1, 1.0, -1.0, 0.0)).tag, MassTag::DeSitterConstant);
}

TEST(MassBehavior, SampledValuesRespectBounds) {
    fixtures::CaseSampler rng(14);
    for (int k = 0; k < 60; ++k) {
        auto p = make(rng.dimension(), rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(-2, 2),
                      rng.uniform(-3, 3), rng.uniform(-2, 2));
        if (k % 6 == 0) p.sigma = -1.0;
        const auto mb = classify_mass_behavior(p);
        const double cap = fixtures::time_cap(p, 20.0);
        for (int i = 0; i < 1000; ++i) {
            const double t = cap * i / 1000.0;
            const double m2 = curved_mass_sq(p, t);
            EXPECT_TRUE(mb.contains(m2, 1e-12 * std::max(1.0, std::abs(m2))))
                << to_string(mb.tag) << " t=" << t << " M2=" << m2;
        }
    }
}

TEST(Tabulated, MatchesClosedForm) {
    const auto p = make(3, 1, 1, 0.5, 0.5, 1.0);
    std::vector<double> ts, as;
    for (int i = 0; i <= 400; ++i) {
        ts.push_back(i * 0.01);
        as.push_back(scale_eval(ClosedFormFLRW{p}, i * 0.01).a);
    }
    const ScaleModel tab = TabulatedScale(ts, as, kInf);
    for (double t : {0.0, 0.5, 1.234, 3.0, 4.0}) {
        const auto ref = scale_eval(ClosedFormFLRW{p}, t);
        const auto got = scale_eval(tab, t);
        EXPECT_NEAR(got.a, ref.a, 1e-7);
        EXPECT_NEAR(got.a_dot, ref.a_dot, 1e-3);
        EXPECT_NEAR(curved_mass_sq_from_scale(tab, p, t), curved_mass_sq(p, t), 5e-2);
    }
}

TEST(Tabulated, RejectsBadTables) {
    EXPECT_THROW(TabulatedScale({0, 1, 2, 3}, {1, 1, -1, 1}, kInf), std::invalid_argument);
    EXPECT_THROW(TabulatedScale({0, 1, 1, 3}, {1, 1, 1, 1}, kInf), std::invalid_argument);
}

TEST(Params, Validation) {
    EXPECT_THROW(make(0, 1, 1, 0, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make(1, 0, 1, 0, 0, 0).validate(), std::invalid_argument);
    EXPECT_THROW(make(1, 1, -1, 0, 0, 0).validate(), std::invalid_argument);
    EXPECT_NO_THROW(make(1, 1, 1, 0, 0, -5).validate());
}
