#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "efda/numerics.hpp"
#include "efda/rng.hpp"
#include "efda/warp.hpp"
#include "test_util.hpp"

using namespace efda;
using testutil::sup_diff;
using testutil::throws_with;

TEST_CASE("warp construction pins exact boundaries and validates input") {
    const Grid g = unit_grid(5);
    Warp w(g, {-1e-11, 0.25, 0.5, 0.75, 1.0 + 1e-11});
    CHECK(w.values.front() == 0.0);
    CHECK(w.values.back() == 1.0);

    CHECK(throws_with([] { Warp(Grid(0.0, 2.0, 5), {0.0, 0.25, 0.5, 0.75, 1.0}); },
                      "Warp: domain must be [0, 1]"));
    CHECK(throws_with([&] { Warp(g, {0.0, 0.5, 1.0}); }, "Warp: value count must equal grid.n"));
    CHECK(throws_with([&] { Warp(g, {0.1, 0.25, 0.5, 0.75, 1.0}); },
                      "Warp: boundary values must be 0 and 1"));
    CHECK(throws_with([&] { Warp(g, {0.0, 0.5, 0.5, 0.75, 1.0}); },
                      "Warp: samples must be strictly increasing"));
    CHECK(throws_with([&] { Warp(g, {0.0, 0.6, 0.5, 0.75, 1.0}); },
                      "Warp: samples must be strictly increasing"));
}

TEST_CASE("identity warp equals the grid points") {
    const Grid g = unit_grid(11);
    const Warp id = identity_warp(g);
    for (int k = 0; k < g.n; ++k) CHECK(id.values[k] == g.point(k));
    CHECK(throws_with([] { identity_warp(Grid(0.0, 3.0, 5)); },
                      "identity_warp: domain must be [0, 1]"));
}

TEST_CASE("square-root density of t^2 is sqrt(2t)") {
    const Grid g = unit_grid(201);
    std::vector<double> v(g.n);
    for (int k = 0; k < g.n; ++k) v[k] = g.point(k) * g.point(k);
    const Psi p = to_psi(Warp(g, std::move(v)));
    // central differences are exact on quadratics, so this is near machine precision
    for (int k = 0; k < g.n; ++k)
        CHECK(std::abs(p.values[k] - std::sqrt(2.0 * g.point(k))) <= 1e-12);
    std::vector<double> sq(g.n);
    for (int k = 0; k < g.n; ++k) sq[k] = p.values[k] * p.values[k];
    CHECK(std::abs(trapz(sq, g.spacing()) - 1.0) <= 1e-12);
}

TEST_CASE("sphere points must carry unit trapezoid norm") {
    const Grid g = unit_grid(5);
    CHECK_NOTHROW(Psi(g, std::vector<double>(5, 1.0)));
    CHECK(throws_with([&] { Psi(g, std::vector<double>(5, 2.0)); },
                      "Psi: samples must have unit trapezoid norm"));
    CHECK(throws_with([&] { Psi(g, {1.0, 1.0, 1.0}); }, "Psi: value count must equal grid.n"));
    CHECK(throws_with([] { Psi(Grid(0.0, 2.0, 5), std::vector<double>(5, 1.0)); },
                      "Psi: domain must be [0, 1]"));
}

TEST_CASE("warp representation round trip") {
    const Grid g = unit_grid(201);
    Rng rng(3);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Warp w = testutil::random_warp(g, rng, 0.5);
        worst = std::max(worst, sup_diff(from_psi(to_psi(w)).values, w.values));
    }
    for (double a : {-1.5, -0.5, 0.7, 1.5}) {
        const Warp w = testutil::exp_warp(g, a);
        worst = std::max(worst, sup_diff(from_psi(to_psi(w)).values, w.values));
    }
    CHECK(worst <= 1e-3);
    // constant density integrates back to the identity
    const Warp id = from_psi(Psi(g, std::vector<double>(g.n, 1.0)));
    CHECK(sup_diff(id.values, identity_warp(g).values) <= 1e-12);
}

TEST_CASE("sphere distance is exactly symmetric and near zero on a point") {
    const Grid g = unit_grid(201);
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
        const Psi a = to_psi(testutil::random_warp(g, rng, 0.5));
        const Psi b = to_psi(testutil::random_warp(g, rng, 0.5));
        CHECK(sphere_distance(a, b) == sphere_distance(b, a));
        CHECK(sphere_distance(a, a) <= 1e-6);
        CHECK(sphere_distance(a, b) > 0.0);
    }
    const Psi u(unit_grid(5), std::vector<double>(5, 1.0));
    CHECK(throws_with([&] { sphere_distance(u, Psi(unit_grid(7), std::vector<double>(7, 1.0))); },
                      "sphere_distance: grids differ"));
}

TEST_CASE("log map: norm matches distance, tangent to the base point") {
    const Grid g = unit_grid(201);
    Rng rng(11);
    for (int i = 0; i < 25; ++i) {
        const Psi a = to_psi(testutil::random_warp(g, rng, 0.5));
        const Psi b = to_psi(testutil::random_warp(g, rng, 0.5));
        const ShootingVector v = sphere_log(a, b);
        const double d = sphere_distance(a, b);
        CHECK(std::abs(l2_norm(v.values, g.spacing()) - d) <= 1e-10);
        CHECK(std::abs(l2_inner(v.values, a.values, g.spacing())) <= 1e-8);
        CHECK(sup_diff(sphere_exp(a, v).values, b.values) <= 1e-8);
    }
}

TEST_CASE("log map at the base point is the exact zero vector") {
    const Grid g = unit_grid(101);
    const Psi a = to_psi(testutil::exp_warp(g, 0.8));
    const ShootingVector v = sphere_log(a, a);
    for (double x : v.values) CHECK(x == 0.0);
}

TEST_CASE("exponential map: zero velocity returns the base point bitwise") {
    const Grid g = unit_grid(101);
    const Psi a = to_psi(testutil::exp_warp(g, -1.1));
    const Psi out = sphere_exp(a, ShootingVector{g, std::vector<double>(g.n, 1e-12)});
    for (int k = 0; k < g.n; ++k) CHECK(out.values[k] == a.values[k]);
}

TEST_CASE("geodesics have constant speed") {
    const Grid g = unit_grid(201);
    Rng rng(21);
    const Psi a = to_psi(testutil::random_warp(g, rng, 0.5));
    const Psi b = to_psi(testutil::random_warp(g, rng, 0.5));
    const ShootingVector v = sphere_log(a, b);
    const double d = sphere_distance(a, b);
    REQUIRE(d > 0.01);
    for (double s : {0.25, 0.5, 0.75, 1.5}) {
        ShootingVector vs{g, v.values};
        for (double& x : vs.values) x *= s;
        CHECK(std::abs(sphere_distance(a, sphere_exp(a, vs)) - s * d) <= 1e-8);
    }
}

TEST_CASE("log map refuses antipodal and near-antipodal targets") {
    const Grid g = unit_grid(101);
    const Psi a = to_psi(testutil::exp_warp(g, 0.5));
    std::vector<double> neg(g.n);
    for (int k = 0; k < g.n; ++k) neg[k] = -a.values[k];
    const Psi anti(g, std::move(neg));
    CHECK(throws_with([&] { (void)sphere_log(a, anti); },
                      "sphere_log: undefined at antipodal points"));

    // rotate 1e-9 radians away from the antipode: still inside the excluded cap
    std::vector<double> tang(g.n);
    for (int k = 0; k < g.n; ++k) tang[k] = std::sin(2.0 * M_PI * g.point(k));
    const double along = l2_inner(tang, a.values, g.spacing());
    for (int k = 0; k < g.n; ++k) tang[k] -= along * a.values[k];
    const double tn = l2_norm(tang, g.spacing());
    for (double& x : tang) x /= tn;
    const double eps = 1e-9;
    std::vector<double> nudged(g.n);
    for (int k = 0; k < g.n; ++k) nudged[k] = -std::cos(eps) * a.values[k] + std::sin(eps) * tang[k];
    const double norm = l2_norm(nudged, g.spacing());
    for (double& x : nudged) x /= norm;
    const Psi near_anti(g, std::move(nudged));
    CHECK_THROWS_AS((void)sphere_log(a, near_anti), GeometryError);
}

TEST_CASE("intrinsic mean of a single warp converges immediately") {
    const Grid g = unit_grid(201);
    const Warp w = testutil::exp_warp(g, 1.2);
    const KarcherMean km = karcher_mean_warps({w});
    CHECK(km.converged);
    CHECK(km.iterations == 1);
    CHECK(km.cost_trace.size() == 1);
    REQUIRE(km.shooting.size() == 1);
    CHECK(l2_norm(km.shooting[0].values, g.spacing()) <= 1e-8);
    CHECK(sup_diff(km.mean.values, from_psi(to_psi(w)).values) <= 1e-12);
}

TEST_CASE("intrinsic mean of two warps is the geodesic midpoint") {
    const Grid g = unit_grid(201);
    std::vector<double> v1(g.n), v2(g.n);
    for (int k = 0; k < g.n; ++k) {
        const double t = g.point(k);
        v1[k] = t * t;
        v2[k] = 1.0 - (1.0 - t) * (1.0 - t);
    }
    const std::vector<Warp> pair{Warp(g, std::move(v1)), Warp(g, std::move(v2))};
    const KarcherMean km = karcher_mean_warps(pair);
    CHECK(km.converged);
    const double d1 = phase_distance(km.mean, pair[0]);
    const double d2 = phase_distance(km.mean, pair[1]);
    const double half = 0.5 * sphere_distance(to_psi(pair[0]), to_psi(pair[1]));
    CHECK(std::abs(d1 - d2) <= 1e-3);   // equidistant from both inputs
    CHECK(std::abs(d1 - half) <= 1e-3); // at the midpoint, not merely between
    for (size_t k = 1; k < km.cost_trace.size(); ++k)
        CHECK(km.cost_trace[k] <= km.cost_trace[k - 1] + 1e-12);
}

TEST_CASE("intrinsic mean cost trace never increases") {
    const Grid g = unit_grid(101);
    Rng rng(9);
    std::vector<Warp> warps;
    for (int i = 0; i < 5; ++i) warps.push_back(testutil::random_warp(g, rng, 0.6));
    const KarcherMean km = karcher_mean_warps(warps);
    REQUIRE(km.cost_trace.size() >= 2);
    for (size_t k = 1; k < km.cost_trace.size(); ++k)
        CHECK(km.cost_trace[k] <= km.cost_trace[k - 1] + 1e-12);
    CHECK(km.iterations == static_cast<int>(km.cost_trace.size()));
    CHECK(km.shooting.size() == warps.size());
}

TEST_CASE("intrinsic mean validates its options") {
    const Grid g = unit_grid(5);
    CHECK(throws_with([] { karcher_mean_warps({}); }, "karcher_mean_warps: empty input"));
    KarcherOptions bad;
    bad.step = 0.0;
    CHECK(throws_with([&] { karcher_mean_warps({identity_warp(g)}, bad); },
                      "karcher_mean_warps: step must be positive"));
    KarcherOptions bad2;
    bad2.max_iter = 0;
    CHECK(throws_with([&] { karcher_mean_warps({identity_warp(g)}, bad2); },
                      "karcher_mean_warps: max_iter must be positive"));
}

TEST_CASE("inverse and composition of warps") {
    const Grid g = unit_grid(201);
    Rng rng(17);
    const Warp id = identity_warp(g);
    for (int i = 0; i < 10; ++i) {
        const Warp w = testutil::random_warp(g, rng, 0.5);
        const Warp winv = invert_warp(w);
        CHECK(sup_diff(compose_warps(w, winv).values, id.values) <= 5e-3);
        CHECK(sup_diff(compose_warps(winv, w).values, id.values) <= 5e-3);
        CHECK(sup_diff(compose_warps(id, w).values, w.values) <= 1e-12);
        CHECK(sup_diff(compose_warps(w, id).values, w.values) <= 1e-12);
    }
    CHECK(throws_with(
        [&] { compose_warps(id, identity_warp(unit_grid(11))); }, "compose_warps: grids differ"));
}
