#include <doctest.h>

#include <random>

#include "modelock/maps.hpp"
#include "oracles.hpp"

using namespace modelock;

namespace {

BoundMap random_cubic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    ParamSet p;
    for (const auto& spec : cubic_map().schema) p.add(spec.name, u(rng));
    return BoundMap(cubic_map(), p);
}

double relative_error(const Matrix3& a, const Matrix3& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_CASE("analytic Jacobians match central differences on every smooth map") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
    std::vector<BoundMap> maps{BoundMap(mira_map(), mira_map().defaults()),
                               BoundMap(henon_map(), henon_map().defaults()),
                               BoundMap(lotka_volterra_map(), lotka_volterra_map().defaults()),
                               BoundMap(coupled_map(), coupled_map().defaults()), random_cubic(rng)};
    for (const auto& m : maps) {
        CAPTURE(m.id());
        double worst = 0.0;
        for (int k = 0; k < 200; ++k) {
            const State3 s = m.id() == "lv" || m.id() == "coupled" ? State3(pos(rng), pos(rng), pos(rng))
                                                                     : State3(u(rng), u(rng), u(rng));
            worst = std::max(worst, relative_error(m.jacobian(s), oracle::fd_jacobian(m, s)));
        }
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("border-collision Jacobian matches differences away from the border") {
    BoundMap m(border_collision_map(), border_collision_map().defaults());
    for (const State3& s : {State3(-0.3, 0.2, 0.1), State3(0.4, -0.1, 0.7)})
        CHECK(relative_error(m.jacobian(s), oracle::fd_jacobian(m, s)) <= 1e-9);
}

TEST_CASE("Mira Jacobian determinant equals B") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (double B : {-0.58, -0.54, -0.555, 0.3}) {
        BoundMap m(mira_map(), mira_map().defaults().with("B", B));
        for (int k = 0; k < 50; ++k) CHECK(std::abs(m.jacobian({u(rng), u(rng), u(rng)}).determinant() - B) <= 1e-12);
    }
    CHECK(orientation_class(mira_map(), mira_map().defaults()) == Orientation::reversing);
}

TEST_CASE("border-collision map is continuous across x = 0 and assigns the border to L") {
    BoundMap m(border_collision_map(), border_collision_map().defaults());
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double y = u(rng), z = u(rng);
        const State3 left = m(State3(-1e-13, y, z)), right = m(State3(1e-13, y, z)), on = m(State3(0.0, y, z));
        CHECK((left - right).norm() <= 1e-11);
        CHECK((on - left).norm() <= 1e-11);
    }
    CHECK(m.symbol(State3(0.0, 0.3, 0.1)) == 'L');
    CHECK(m.symbol(State3(1e-300, 0.3, 0.1)) == 'R');
    CHECK(m.piecewise());
}

TEST_CASE("coupled map with p = 1/2 commutes with exchanging the two units") {
    BoundMap m(coupled_map(), coupled_map().defaults());
    REQUIRE(m.param("p") == 0.5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const State3 s(u(rng), u(rng), u(rng));
        const State3 a = m(s), b = m(State3(s.y(), s.x(), s.z()));
        CHECK(std::abs(a.x() - b.y()) <= 1e-12);
        CHECK(std::abs(a.y() - b.x()) <= 1e-12);
        CHECK(a.z() == s.x());
    }
}

TEST_CASE("Lotka-Volterra map commutes with the cyclic shift of species") {
    BoundMap m(lotka_volterra_map(), lotka_volterra_map().defaults());
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const State3 s(u(rng), u(rng), u(rng));
        const State3 a = m(State3(s.y(), s.z(), s.x())), b = m(s);
        CHECK((a - State3(b.y(), b.z(), b.x())).norm() <= 1e-14);
    }
}

TEST_CASE("closed-form fixed points are fixed") {
    SUBCASE("Mira: x = y = z = A + B + C - 1") {
        BoundMap m(mira_map(), mira_map().defaults());
        const double x = m.param("A") + m.param("B") + m.param("C") - 1.0;
        CHECK((m(State3(x, x, x)) - State3(x, x, x)).norm() <= 1e-13);
    }
    SUBCASE("Henon: x^2 + (1 + b) x - a = 0") {
        BoundMap m(henon_map(), henon_map().defaults());
        const double a = m.param("a"), b = m.param("b");
        const double x = (-(1.0 + b) + std::sqrt((1.0 + b) * (1.0 + b) + 4.0 * a)) / 2.0;
        CHECK((m(State3(x, x, x)) - State3(x, x, x)).norm() <= 1e-13);
    }
    SUBCASE("Lotka-Volterra: coexistence point 1 / (1 + alpha + beta)") {
        BoundMap m(lotka_volterra_map(), lotka_volterra_map().defaults());
        const double x = 1.0 / (1.0 + m.param("alpha") + m.param("beta"));
        CHECK((m(State3(x, x, x)) - State3(x, x, x)).norm() <= 1e-13);
    }
}

TEST_CASE("parameter sets are validated against the schema") {
    CHECK_THROWS_AS(BoundMap(mira_map(), ParamSet{{"A", 1.0}}), SchemaError);
    CHECK_THROWS_AS(mira_map().complete(ParamSet{{"Q", 1.0}}), SchemaError);
    ParamSet p{{"A", 1.0}};
    CHECK_THROWS_AS(p.add("A", 2.0), SchemaError);
    CHECK_THROWS_AS(find_map("nope"), SchemaError);
    CHECK_THROWS_AS(eval_map(mira_map(), mira_map().defaults().with("B", std::nan("")), State3::Zero()),
                    SchemaError);
    const auto full = mira_map().complete(ParamSet{{"B", -0.54}});
    CHECK(full.at("B") == -0.54);
    CHECK(full.at("A") == -2.269);
    CHECK(registered_maps().size() == 6);
    CHECK(find_map("bcnf").smoothness == Smoothness::piecewise_linear);
}

TEST_CASE("checked evaluation reports overflow") {
    BoundMap m(henon_map(), henon_map().defaults());
    CHECK_THROWS_AS(m.apply_checked(State3(1e200, 1e200, 0.0)), OverflowError);
}
