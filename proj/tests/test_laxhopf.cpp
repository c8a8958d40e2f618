#include "doctest.h"

#include <cmath>
#include <random>

#include "rtc/laxhopf.hpp"

using namespace rtc;

namespace {

FundamentalDiagram freeway_fd() { return {30.0, -5.5, 0.0175, 0.2250}; }

// Triangle whose branches meet at rho_c; the closed forms coincide with the
// variational minimum only for such diagrams.
FundamentalDiagram make_continuous(double v_f, double rho_c, double rho_m) {
    FundamentalDiagram fd{v_f, 0.0, rho_c, rho_m};
    fd.w = -fd.capacity() / (fd.rho_m - fd.rho_c);
    return fd;
}

LinkState freeway_link1() {
    LinkState s;
    s.geometry.segment_length = 600.0;
    s.geometry.initial_density = {0.8 * 0.0175, 0.8 * 0.0175};
    s.geometry.fd = freeway_fd();
    s.T = 20.0;
    s.q_in.assign(25, 0.3);
    s.q_out.assign(25, 0.3);
    return s;
}

}  // namespace

// ===========================================================================
// Value conditions
// ===========================================================================

TEST_CASE("initial condition values") {
    auto s = freeway_link1();
    const auto& g = s.geometry;
    CHECK(value_initial(g, 1, 0.0, 0.0).value() == doctest::Approx(0.0));
    CHECK_FALSE(value_initial(g, 1, 0.1, 0.5 * 600).is_finite());
    // segment 2 at x = 900: half a segment past the left edge
    CHECK(value_initial(g, 2, 0.0, 900.0).value() == doctest::Approx(-12.6));
}

TEST_CASE("boundary condition values") {
    auto s = freeway_link1();
    s.q_in[0] = 0.5;
    CHECK(value_upstream(s, 1, 0.0, 0.0).value() == doctest::Approx(0.0));
    CHECK(value_upstream(s, 1, s.T, 0.0).value() == doctest::Approx(0.5 * s.T));
    CHECK_FALSE(value_upstream(s, 1, 0.0, 1.0).is_finite());
    // downstream at t = 0 carries minus the initial vehicle count
    const double D = s.geometry.total_initial_count();
    CHECK(value_downstream(s, 1, 0.0, 1200.0).value() == doctest::Approx(-D));
}

// ===========================================================================
// Closed forms: compatibility with their own value condition
// ===========================================================================

TEST_CASE("solution matches its value condition on the condition domain") {
    auto s = freeway_link1();
    const auto& g = s.geometry;
    for (double frac : {0.0, 0.25, 0.7, 1.0}) {
        for (int k = 1; k <= 2; ++k) {
            const double x = (k - 1 + frac) * g.segment_length;
            auto c = value_initial(g, k, 0.0, x);
            auto m = moskowitz_initial(g, k, 0.0, x);
            CHECK(m.value() == doctest::Approx(c.value()).epsilon(1e-12));
        }
        for (int n : {1, 3, 25}) {
            const double t = (n - 1 + frac) * s.T;
            CHECK(moskowitz_upstream(s, n, t, 0.0).value() ==
                  doctest::Approx(value_upstream(s, n, t, 0.0).value()));
            CHECK(moskowitz_downstream(s, n, t, 1200.0).value() ==
                  doctest::Approx(value_downstream(s, n, t, 1200.0).value()));
        }
    }
}

TEST_CASE("solutions are +inf outside the characteristic cone") {
    auto s = freeway_link1();
    const auto& g = s.geometry;
    const double t = 5.0;
    CHECK_FALSE(moskowitz_initial(g, 1, t, 600.0 + 30.0 * t + 1e-6).is_finite());
    CHECK_FALSE(moskowitz_initial(g, 1, t, -5.5 * t - 1e-6).is_finite());
    CHECK_FALSE(moskowitz_upstream(s, 1, 100.0 / 30.0 - 1e-9, 100.0).is_finite());
    CHECK_FALSE(moskowitz_downstream(s, 1, 100.0 / 5.5 - 1e-9, 1100.0).is_finite());
}

TEST_CASE("branches coincide at rho = rho_c") {
    auto fd = make_continuous(25.0, 0.02, 0.15);
    LinkGeometry g{400.0, {fd.rho_c, fd.rho_c, fd.rho_c}, fd};
    for (double t : {3.0, 11.0})
        for (double x : {0.0, 150.0, 770.0, 1200.0}) {
            auto m = moskowitz_initial(g, 2, t, x);
            // evaluate both families by nudging the density
            LinkGeometry lo = g, hi = g;
            lo.initial_density[1] = fd.rho_c - 1e-12;
            hi.initial_density[1] = fd.rho_c + 1e-12;
            auto a = moskowitz_initial(lo, 2, t, x);
            auto b = moskowitz_initial(hi, 2, t, x);
            CHECK(a.is_finite() == b.is_finite());
            CHECK(m.is_finite() == a.is_finite());
            if (m.is_finite()) {
                CHECK(a.value() == doctest::Approx(b.value()).epsilon(1e-9));
                CHECK(m.value() == doctest::Approx(a.value()).epsilon(1e-9));
            }
        }
}

// ===========================================================================
// Legendre transform
// ===========================================================================

TEST_CASE("legendre transform vertex values") {
    auto fd = make_continuous(30.0, 0.0175, 0.2250);
    // at zero speed the transform is the maximum flow
    CHECK(legendre_transform(fd, 0.0) == doctest::Approx(fd.capacity()));
    // at u = v_f the vertex candidates are 2C and rho_m v_f
    const double expected =
        std::max(2.0 * fd.capacity(), fd.rho_m * fd.v_f);
    CHECK(legendre_transform(fd, fd.v_f) == doctest::Approx(expected));
    CHECK_THROWS_AS(legendre_transform(fd, 2.0 * fd.v_f), std::domain_error);
}

TEST_CASE("legendre transform lower bound from the critical vertex") {
    auto fds = {freeway_fd(), make_continuous(20.0, 0.03, 0.2)};
    for (const auto& fd : fds)
        for (double u = -fd.v_f; u <= fd.v_f; u += fd.v_f / 7.0)
            CHECK(legendre_transform(fd, u) >=
                  fd.capacity() + fd.rho_c * std::min(u, 0.0) - 1e-12);
}

TEST_CASE("characteristic cost is exact against a fine grid") {
    auto fd = freeway_fd();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> du(-fd.v_f, fd.v_f);
    for (int it = 0; it < 50; ++it) {
        const double u = du(rng);
        double grid = 0.0;
        const int N = 200000;
        for (int i = 0; i <= N; ++i) {
            const double p = fd.rho_m * i / N;
            grid = std::max(grid, p * u + fd.flow(p));
        }
        CHECK(legendre_transform(fd, u) >= grid - 1e-9);
        CHECK(legendre_transform(fd, u) <= grid + 1e-3);  // grid undershoots sup
    }
}

// ===========================================================================
// Brute-force Lax-Hopf oracle
// ===========================================================================

TEST_CASE("oracle trivia") {
    auto s = freeway_link1();
    // t = 0: only the zero-elapsed candidate survives
    auto v = brute_force_lax_hopf(s, {ValueConditionRef::Kind::Initial, 1}, 0.0, 300.0, 16);
    CHECK(v.value() == doctest::Approx(value_initial(s.geometry, 1, 0.0, 300.0).value()));
    // unreachable condition
    auto inf = brute_force_lax_hopf(s, {ValueConditionRef::Kind::Upstream, 3},
                                    0.0, 600.0, 16);
    CHECK_FALSE(inf.is_finite());
}

namespace {

struct RandomInstance {
    LinkState s;
    double t, x;
};

RandomInstance random_instance(std::mt19937& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double v_f = 5.0 + 30.0 * u01(rng);
    const double rho_c = 0.01 + 0.04 * u01(rng);
    const double rho_m = rho_c * (2.0 + 8.0 * u01(rng));
    auto fd = make_continuous(v_f, rho_c, rho_m);

    RandomInstance ri;
    ri.s.geometry.fd = fd;
    ri.s.geometry.segment_length = 100.0 + 700.0 * u01(rng);
    const int k_max = 1 + static_cast<int>(3.0 * u01(rng));
    ri.s.geometry.initial_density.resize(k_max);
    for (auto& rho : ri.s.geometry.initial_density) rho = rho_m * u01(rng);
    ri.s.T = 5.0 + 25.0 * u01(rng);
    const int n_max = 1 + static_cast<int>(7.0 * u01(rng));
    ri.s.q_in.resize(n_max);
    ri.s.q_out.resize(n_max);
    for (auto& q : ri.s.q_in) q = fd.capacity() * u01(rng);
    for (auto& q : ri.s.q_out) q = fd.capacity() * u01(rng);
    ri.t = n_max * ri.s.T * u01(rng);
    ri.x = ri.s.geometry.length() * u01(rng);
    return ri;
}

void check_against_oracle(const LinkState& s, ValueConditionRef cond, double t,
                          double x) {
    ExtendedValue closed;
    switch (cond.kind) {
        case ValueConditionRef::Kind::Initial:
            closed = moskowitz_initial(s.geometry, cond.index, t, x);
            break;
        case ValueConditionRef::Kind::Upstream:
            closed = moskowitz_upstream(s, cond.index, t, x);
            break;
        case ValueConditionRef::Kind::Downstream:
            closed = moskowitz_downstream(s, cond.index, t, x);
            break;
    }
    auto grid = brute_force_lax_hopf_refined(s, cond, t, x, 64, 1e-9, 4);
    REQUIRE(closed.is_finite() == grid.is_finite());
    if (closed.is_finite()) {
        CHECK(closed.value() == doctest::Approx(grid.value()).epsilon(1e-7));
        // the grid minimum is over a subset, so it upper-bounds the infimum
        CHECK(closed.value() <= grid.value() + 1e-9);
    }
}

}  // namespace

TEST_CASE("closed forms agree with the variational oracle on random instances") {
    std::mt19937 rng(20240817);
    int finite_hits = 0;
    for (int it = 0; it < 300; ++it) {
        auto ri = random_instance(rng);
        const int k_max = ri.s.geometry.n_segments();
        const int n_max = ri.s.n_steps();
        std::uniform_int_distribution<int> dk(1, k_max), dn(1, n_max);
        check_against_oracle(ri.s, {ValueConditionRef::Kind::Initial, dk(rng)}, ri.t, ri.x);
        check_against_oracle(ri.s, {ValueConditionRef::Kind::Upstream, dn(rng)}, ri.t, ri.x);
        check_against_oracle(ri.s, {ValueConditionRef::Kind::Downstream, dn(rng)}, ri.t, ri.x);
        if (moskowitz_initial(ri.s.geometry, 1, ri.t, ri.x).is_finite()) ++finite_hits;
    }
    CHECK(finite_hits > 20);  // the sampling actually exercises finite regions
}

TEST_CASE("inf-morphism: combined solution equals oracle over combined conditions") {
    std::mt19937 rng(99);
    for (int it = 0; it < 40; ++it) {
        auto ri = random_instance(rng);
        const auto& s = ri.s;
        ExtendedValue closed = ExtendedValue::infinity();
        ExtendedValue grid = ExtendedValue::infinity();
        for (int k = 1; k <= s.geometry.n_segments(); ++k) {
            closed = min(closed, moskowitz_initial(s.geometry, k, ri.t, ri.x));
            grid = min(grid, brute_force_lax_hopf_refined(
                                 s, {ValueConditionRef::Kind::Initial, k}, ri.t, ri.x, 64));
        }
        for (int n = 1; n <= s.n_steps(); ++n) {
            closed = min(closed, moskowitz_upstream(s, n, ri.t, ri.x));
            closed = min(closed, moskowitz_downstream(s, n, ri.t, ri.x));
            grid = min(grid, brute_force_lax_hopf_refined(
                                 s, {ValueConditionRef::Kind::Upstream, n}, ri.t, ri.x, 64));
            grid = min(grid, brute_force_lax_hopf_refined(
                                 s, {ValueConditionRef::Kind::Downstream, n}, ri.t, ri.x, 64));
        }
        REQUIRE(closed.is_finite() == grid.is_finite());
        if (closed.is_finite())
            CHECK(closed.value() == doctest::Approx(grid.value()).epsilon(1e-7));
    }
}

TEST_CASE("monotonicity in the boundary flows") {
    auto s = freeway_link1();
    auto bumped = s;
    bumped.q_in[2] += 0.1;
    bumped.q_out[4] += 0.2;
    for (double t : {70.0, 130.0, 300.0})
        for (double x : {0.0, 455.0, 1200.0})
            for (int n = 1; n <= 25; ++n) {
                auto a = moskowitz_upstream(s, n, t, x);
                auto b = moskowitz_upstream(bumped, n, t, x);
                REQUIRE(a.is_finite() == b.is_finite());
                if (a.is_finite()) CHECK(b.value() >= a.value() - 1e-12);
                auto c = moskowitz_downstream(s, n, t, x);
                auto d = moskowitz_downstream(bumped, n, t, x);
                REQUIRE(c.is_finite() == d.is_finite());
                if (c.is_finite()) CHECK(d.value() >= c.value() - 1e-12);
            }
}
