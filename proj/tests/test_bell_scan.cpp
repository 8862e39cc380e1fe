#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "squeezebell/bell_scan.hpp"
#include "squeezebell/errors.hpp"
#include "support.hpp"

using namespace squeezebell;
using testsupport::pi;

namespace {

BellConfig uniform_config(double r, double ell) {
    BellConfig c;
    c.a = c.b = c.a_prime = c.b_prime = {r, 0.0, 0.0};
    c.ell = ell;
    return c;
}

EvaluationSettings settings() { return {}; }

SweepGrid small_grid(int n) {
    SweepGrid g;
    g.fixed = uniform_config(1.5, 3.2);
    g.axis1 = parse_axis("dtheta_apbp:-pi:pi:" + std::to_string(n));
    g.axis2 = parse_axis("dtheta_apb:-pi:pi:" + std::to_string(n));
    return g;
}

}  // namespace

TEST(ParseReal, AcceptsMultiplesOfPi) {
    EXPECT_DOUBLE_EQ(parse_real("pi"), pi);
    EXPECT_DOUBLE_EQ(parse_real("-pi"), -pi);
    EXPECT_DOUBLE_EQ(parse_real("0.5pi"), 0.5 * pi);
    EXPECT_DOUBLE_EQ(parse_real("pi/4"), pi / 4);
    EXPECT_DOUBLE_EQ(parse_real("-pi/2"), -pi / 2);
    EXPECT_DOUBLE_EQ(parse_real("1e-3"), 1e-3);
    EXPECT_DOUBLE_EQ(parse_real("-2.5"), -2.5);
}

TEST(ParseReal, RejectsGarbage) {
    for (const char* bad : {"", "abc", "2x", "pi/", "pi/0x", "1.0.0"}) {
        EXPECT_THROW(parse_real(bad), std::invalid_argument) << bad;
    }
}

TEST(ParseAxis, RoundTripsEndpoints) {
    const Axis a = parse_axis("dtheta_apb:-pi:pi:241");
    EXPECT_EQ(a.name, "dtheta_apb");
    EXPECT_EQ(a.count, 241);
    EXPECT_DOUBLE_EQ(a.value(0), -pi);
    EXPECT_DOUBLE_EQ(a.value(240), pi);
    EXPECT_NEAR(a.value(120), 0.0, 1e-15);
}

TEST(ParseAxis, RejectsMalformedSpecs) {
    for (const char* bad : {"foo:0:1:3", "phi_a:0:1", "phi_a:0:1:1", "phi_a:0:x:3", "phi_a:0:1:2.5", "r_c:0:1:3"}) {
        EXPECT_THROW(parse_axis(bad), std::invalid_argument) << bad;
    }
}

TEST(AxisNames, ValidSet) {
    for (const char* ok : {"r_a", "phi_bp", "theta_ap", "theta_b", "dtheta_ab", "dtheta_abp", "dtheta_apb",
                           "dtheta_apbp", "ell"}) {
        EXPECT_TRUE(is_valid_axis_name(ok)) << ok;
    }
    for (const char* bad : {"r_c", "dtheta_ba", "phi", "theta_a_", "", "ELL"}) {
        EXPECT_FALSE(is_valid_axis_name(bad)) << bad;
    }
}

TEST(ApplyAxes, DifferencesUseCanonicalOrder) {
    BellConfig base = uniform_config(1.0, 1.0);
    base.b.theta = 0.4;
    const BellConfig x = apply_axes(base, {{"dtheta_apbp", 0.2}, {"dtheta_apb", 0.5}});
    const BellConfig y = apply_axes(base, {{"dtheta_apb", 0.5}, {"dtheta_apbp", 0.2}});
    EXPECT_DOUBLE_EQ(x.a_prime.theta, 0.9);
    EXPECT_DOUBLE_EQ(x.b_prime.theta, 0.7);
    EXPECT_EQ(x.b_prime.theta, y.b_prime.theta);
    EXPECT_NEAR(x.apbp().delta_theta(), 0.2, 1e-15);
    EXPECT_NEAR(x.apb().delta_theta(), 0.5, 1e-15);
    const BellConfig z = apply_axes(base, {{"dtheta_abp", -0.3}, {"dtheta_ab", 1.1}});
    EXPECT_NEAR(z.ab().delta_theta(), 1.1, 1e-15);
    EXPECT_NEAR(z.abp().delta_theta(), -0.3, 1e-15);
}

TEST(ApplyAxes, PlainParameters) {
    const BellConfig c = apply_axes(uniform_config(1.0, 1.0), {{"r_bp", 2.5}, {"phi_ap", -0.3}, {"ell", 7.0}});
    EXPECT_EQ(c.b_prime.r, 2.5);
    EXPECT_EQ(c.a_prime.varphi, -0.3);
    EXPECT_EQ(c.ell, 7.0);
    EXPECT_EQ(c.a.r, 1.0);
    EXPECT_THROW(apply_axes(c, {{"r_q", 1.0}}), std::invalid_argument);
}

TEST(Bell, ChaslesResidualVanishes) {
    testsupport::Draws draws(31);
    for (int i = 0; i < 100; ++i) {
        BellConfig c = uniform_config(1.0, 1.0);
        c.a.theta = draws.angle();
        c.b.theta = draws.angle();
        c.a_prime.theta = draws.angle();
        c.b_prime.theta = draws.angle();
        EXPECT_LE(std::abs(c.chasles_residual()), 1e-14);
    }
}

TEST(Bell, CombinesFourTerms) {
    BellConfig c = uniform_config(5.0, 100.0);
    c.a.theta = 0.3;
    c.a_prime.theta = -0.4;
    c.b_prime.theta = 0.9;
    const BellResult b = bell_terms(c, settings());
    auto e = [](const TransitionSpec& t) { return correlator(t, {100.0}, Method::automatic).value; };
    const double want = e(c.ab()) + e(c.abp()) + e(c.apb()) - e(c.apbp());
    EXPECT_NEAR(b.value, want, 1e-14);
    EXPECT_EQ(bell_operator(c, settings()), b.value);
    EXPECT_EQ(term_name(BellTerm::apbp), "E(a',b')");
}

TEST(Bell, ErrorsNameTheTerm) {
    BellConfig c = uniform_config(1.0, 2.0);
    c.b_prime.theta = 0.5;  // a,b coincide; a,b' do not
    try {
        bell_terms(c, settings(), Method::equal_time);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("E(a,b'): ", 0), 0u) << e.what();
    }
}

TEST(Sweep, RejectsConflictingAxes) {
    SweepGrid g = small_grid(3);
    g.axis2 = parse_axis("theta_ap:0:1:3");
    g.axis1 = parse_axis("dtheta_apb:0:1:3");
    EXPECT_THROW(sweep_map(g, settings()), std::invalid_argument);
    g.axis1 = parse_axis("dtheta_abp:0:1:3");
    g.axis2 = parse_axis("dtheta_apbp:0:1:3");
    EXPECT_THROW(sweep_map(g, settings()), std::invalid_argument);
}

TEST(Sweep, IndependentOfWorkerCountAndCache) {
    SweepGrid g1 = small_grid(13), g3 = small_grid(13), gn = small_grid(13);
    SweepOptions one, three, plain;
    one.workers = 1;
    three.workers = 3;
    plain.workers = 2;
    plain.use_cache = false;
    long long last = 0;
    three.progress = [&](long long done, long long total) {
        EXPECT_EQ(total, 169);
        if (done == total) last = done;
    };
    sweep_map(g1, settings(), one);
    sweep_map(g3, settings(), three);
    sweep_map(gn, settings(), plain);
    EXPECT_EQ(last, 169);
    for (std::size_t i = 0; i < g1.results.size(); ++i) {
        EXPECT_EQ(g1.results[i].value, g3.results[i].value);
        EXPECT_EQ(g1.results[i].method, g3.results[i].method);
        EXPECT_NEAR(g1.results[i].value, gn.results[i].value, 1e-12);
    }
    EXPECT_EQ(g1.max_B, g3.max_B);
    EXPECT_EQ(g1.argmax, g3.argmax);
}

TEST(Sweep, NodesMatchDirectEvaluation) {
    SweepGrid g = small_grid(5);
    sweep_map(g, settings());
    for (int i1 = 0; i1 < 5; ++i1) {
        for (int i2 = 0; i2 < 5; ++i2) {
            const BellConfig c = g.config_at(g.axis1.value(i1), g.axis2.value(i2));
            EXPECT_NEAR(g.at(i1, i2).value, bell_operator(c, settings()), 1e-12);
        }
    }
}

TEST(Sweep, FailedNodesBecomeNaN) {
    SweepGrid g = small_grid(3);
    SweepOptions opt;
    opt.method = Method::equal_time;
    opt.observable = Observable::correlator;
    g.axis1 = parse_axis("dtheta_ab:-1:1:3");
    g.axis2 = parse_axis("phi_b:0:0.2:2");
    sweep_map(g, settings(), opt);
    int failed = 0;
    for (const auto& n : g.results) {
        if (std::isnan(n.value)) {
            ++failed;
            EXPECT_EQ(n.flags, "error");
            EXPECT_FALSE(n.error.empty());
        }
    }
    // Only (dtheta_ab = 0, phi_b = 0) is a coincident pair.
    EXPECT_EQ(failed, 5);
    EXPECT_FALSE(std::isnan(g.at(1, 0).value));
    EXPECT_EQ(g.argmax, std::make_pair(0.0, 0.0));
}

TEST(Sweep, CacheSnapsKeys) {
    CorrelatorCache cache;
    const TransitionSpec t = testsupport::spec(1.0, 0.2, 1.3, -0.1, 0.7);
    auto moved = t;
    moved.a.theta += 1e-15;
    const EvaluationSettings s{2.0};
    const CorrelatorResult x = cache.get(t, s, Method::automatic);
    const CorrelatorResult y = cache.get(moved, s, Method::automatic);
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_EQ(x.value, y.value);
    EXPECT_NEAR(x.value, correlator(t, s, Method::automatic).value, 1e-11);
}

TEST(FindMax, NeverBelowGridMaximum) {
    SweepGrid g = small_grid(9);
    sweep_map(g, settings());
    const MaxResult m = find_max(g, settings(), 12);
    EXPECT_EQ(m.grid_value, g.max_B);
    EXPECT_GE(m.value, g.max_B);
    EXPECT_GE(m.location.first, -pi);
    EXPECT_LE(m.location.first, pi);
    EXPECT_NEAR(bell_operator(g.config_at(m.location.first, m.location.second), settings()), m.value, 1e-12);
    SweepGrid empty = small_grid(9);
    EXPECT_THROW(find_max(empty, settings()), std::invalid_argument);
}
