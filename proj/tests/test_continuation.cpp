#include <doctest.h>

#include <Eigen/LU>

#include "modelock/continuation.hpp"
#include "modelock/dynamics.hpp"
#include "oracles.hpp"

using namespace modelock;

namespace {

BoundMap mira(double B) { return BoundMap(mira_map(), mira_map().defaults().with("B", B)); }

// Newton on F^n(x) = x with finite-difference monodromy.
State3 oracle_cycle_point(const BoundMap& m, State3 x, int n) {
    for (int k = 0; k < 40; ++k) {
        State3 y = x;
        for (int i = 0; i < n; ++i) y = m(y);
        if ((y - x).norm() < 1e-13) break;
        const Matrix3 a = oracle::fd_monodromy(m, x, n) - Matrix3::Identity();
        x -= a.partialPivLu().solve(y - x);
    }
    return x;
}

double flip_function(const BoundMap& m, const State3& p, int n) {
    return (oracle::fd_monodromy(m, p, n) + Matrix3::Identity()).determinant();
}

// Parameter where det(M + I) of the cycle through `p` changes sign.
double oracle_flip(double from, double to, State3 p, int n) {
    const double step = (to - from) / 200.0;
    double a = from;
    p = oracle_cycle_point(mira(a), p, n);
    double fa = flip_function(mira(a), p, n);
    for (int k = 1; k <= 200; ++k) {
        const double b = from + k * step;
        const State3 q = oracle_cycle_point(mira(b), p, n);
        const double fb = flip_function(mira(b), q, n);
        if ((fa < 0) != (fb < 0)) {
            double lo = a, hi = b;
            State3 plo = p;
            for (int it = 0; it < 50; ++it) {
                const double mid = 0.5 * (lo + hi);
                const State3 pm = oracle_cycle_point(mira(mid), plo, n);
                if ((flip_function(mira(mid), pm, n) < 0) == (fa < 0)) {
                    lo = mid;
                    plo = pm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        a = b;
        p = q;
        fa = fb;
    }
    return std::nan("");
}

const BifurcationEvent* first_of(const std::vector<BifurcationEvent>& ev, EventKind k) {
    for (const auto& e : ev)
        if (e.kind == k) return &e;
    return nullptr;
}

}  // namespace

TEST_CASE("multiplier pairing follows values across a crossing") {
    const EigenTriple prev{{Complex(0.6, 0), Complex(-0.58, 0), Complex(0.1, 0)}};
    const EigenTriple next = sorted_triple({Complex(-0.62, 0), Complex(0.59, 0), Complex(0.1, 0)});
    REQUIRE(next[0].real() == -0.62);
    const auto perm = pair_eigenvalues(prev, next);
    CHECK(perm == std::array<int, 3>{1, 0, 2});
    const auto followed = apply_permutation(next, perm);
    CHECK(followed[0].real() == 0.59);
    CHECK(followed[1].real() == -0.62);
    CHECK(followed[2].real() == 0.1);

    const EigenTriple cplx = sorted_triple({Complex(0.5, 0.3), Complex(0.5, -0.3), Complex(0.2, 0)});
    const EigenTriple real3 = sorted_triple({Complex(0.6, 0), Complex(0.4, 0), Complex(0.2, 0)});
    CHECK(pair_eigenvalues(cplx, real3) == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("Mira node flip agrees with an independent bisection") {
    const auto m = mira(-0.58);
    const auto node = attracting_cycle(m, State3(0.544, -0.525, 0.091));
    REQUIRE(node);
    const auto branch = continue_cycle(m, *node, "B", -0.58, -0.54, 0.001);
    CHECK(branch.termination == Termination::range_end);
    CHECK(branch.records.back().param == doctest::Approx(-0.54));
    const auto events = detect_bifurcations(branch, 1e-7, "stable");
    const auto* flip = first_of(events, EventKind::flip);
    REQUIRE(flip);
    const double ref = oracle_flip(-0.58, -0.54, node->points[0], 5);
    CHECK(std::abs(flip->param - ref) <= 1e-5);
    CHECK(flip->hi - flip->lo <= 1e-7);
    CHECK(std::abs(flip->critical + 1.0) <= 1e-4);
    CHECK(flip->param == doctest::Approx(-0.55).epsilon(2e-3 / 0.55));
}

TEST_CASE("Mira saddle flip agrees with an independent bisection") {
    const auto m = mira(-0.58);
    const auto node = attracting_cycle(m, State3(0.544, -0.525, 0.091));
    REQUIRE(node);
    const auto saddle = find_saddle_cycle(m, node->points, 5);
    REQUIRE(saddle);
    const auto branch = continue_cycle(m, *saddle, "B", -0.58, -0.54, 0.001);
    const auto events = detect_bifurcations(branch, 1e-7, "saddle");
    const auto* flip = first_of(events, EventKind::flip);
    REQUIRE(flip);
    const double ref = oracle_flip(-0.58, -0.54, saddle->points[0], 5);
    CHECK(std::abs(flip->param - ref) <= 1e-5);
}

TEST_CASE("period-doubled cycle is born past the flip") {
    const auto start = attracting_cycle(mira(-0.58), State3(0.544, -0.525, 0.091));
    REQUIRE(start);
    const auto branch = continue_cycle(mira(-0.58), *start, "B", -0.58, -0.54, 0.001);
    const auto events = detect_bifurcations(branch, 1e-7, "stable");
    const auto* flip = first_of(events, EventKind::flip);
    REQUIRE(flip);
    const double past = flip->param + 2e-5;
    const auto m = mira(past);
    const auto node5 = find_cycle(m, flip->point, 5);
    REQUIRE(node5.period == 5);
    REQUIRE(classify_cycle(node5.multipliers).unstable_count == 1);
    REQUIRE(node5.multipliers[0].real() < -1.0);
    const auto doubled = start_doubled_branch(m, node5);
    REQUIRE(doubled);
    CHECK(doubled->period == 10);
    CHECK(classify_cycle(doubled->multipliers).unstable_count == 0);

    const auto followed = continue_cycle(m, *doubled, "B", past, -0.54, 0.001);
    REQUIRE(followed.termination == Termination::range_end);
    const auto there = attracting_cycle(mira(-0.54), followed.records.back().cycle.points[0]);
    REQUIRE(there);
    CHECK(same_orbit(*there, followed.records.back().cycle, 1e-8));
}

TEST_CASE("continuation rejects an invalid start") {
    const auto m = mira(-0.58);
    Cycle bogus;
    bogus.map_id = "mira";
    bogus.period = 5;
    bogus.points.assign(5, State3(10.0, -10.0, 3.0));
    CHECK_THROWS_AS(continue_cycle(m, bogus, "B", -0.58, -0.54, 0.001), StartInvalidError);
}

TEST_CASE("branch steps respect the requested range and direction") {
    const auto m = mira(-0.58);
    const auto node = attracting_cycle(m, State3(0.544, -0.525, 0.091));
    REQUIRE(node);
    const auto branch = continue_cycle(m, *node, "B", -0.58, -0.6, 0.002);
    REQUIRE(branch.records.size() >= 2);
    for (std::size_t i = 1; i < branch.records.size(); ++i) CHECK(branch.records[i].param < branch.records[i - 1].param);
    CHECK(branch.records.back().param >= -0.6 - 1e-12);
    for (const auto& r : branch.records) CHECK(r.cycle.period == 5);
}
