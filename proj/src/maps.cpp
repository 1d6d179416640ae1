#include "modelock/maps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <Eigen/LU>

namespace modelock {

// ---------------------------------------------------------------------------
// ParamSet

ParamSet::ParamSet(std::initializer_list<std::pair<std::string, double>> entries) {
    for (const auto& [name, value] : entries) add(name, value);
}

void ParamSet::add(std::string name, double value) {
    if (contains(name)) throw SchemaError("parameter '" + name + "' bound twice");
    entries_.emplace_back(std::move(name), value);
}

void ParamSet::set(std::string_view name, double value) {
    for (auto& [n, v] : entries_) {
        if (n == name) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(std::string(name), value);
}

std::optional<double> ParamSet::get(std::string_view name) const {
    for (const auto& [n, v] : entries_)
        if (n == name) return v;
    return std::nullopt;
}

double ParamSet::at(std::string_view name) const {
    if (auto v = get(name)) return *v;
    throw SchemaError("parameter '" + std::string(name) + "' is not bound");
}

ParamSet ParamSet::with(std::string_view name, double value) const {
    ParamSet out = *this;
    out.set(name, value);
    return out;
}

// ---------------------------------------------------------------------------
// MapDef

ParamSet MapDef::defaults() const {
    ParamSet out;
    for (const auto& spec : schema) out.add(spec.name, spec.default_value);
    return out;
}

std::optional<std::size_t> MapDef::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (schema[i].name == name) return i;
    return std::nullopt;
}

ParamSet MapDef::complete(const ParamSet& overrides) const {
    ParamSet out = defaults();
    for (const auto& [name, value] : overrides.entries()) {
        if (!index_of(name)) throw SchemaError("map '" + id + "' has no parameter '" + name + "'");
        out.set(name, value);
    }
    return out;
}

std::vector<double> MapDef::bind_values(const ParamSet& params) const {
    std::vector<double> values(schema.size());
    std::vector<bool> seen(schema.size(), false);
    for (const auto& [name, value] : params.entries()) {
        auto idx = index_of(name);
        if (!idx) throw SchemaError("map '" + id + "' has no parameter '" + name + "'");
        if (seen[*idx]) throw SchemaError("parameter '" + name + "' bound twice");
        if (!std::isfinite(value)) throw SchemaError("parameter '" + name + "' is not finite");
        seen[*idx] = true;
        values[*idx] = value;
    }
    for (std::size_t i = 0; i < schema.size(); ++i)
        if (!seen[i])
            throw SchemaError("map '" + id + "' requires parameter '" + schema[i].name + "'");
    return values;
}

bool is_finite(const State3& s) {
    return std::isfinite(s.x()) && std::isfinite(s.y()) && std::isfinite(s.z());
}

namespace {

// Mira map: x' = y, y' = z, z' = Bx + Cy + Az - y^2.   params: A, B, C
State3 mira_eval(std::span<const double> p, const State3& s) {
    const double A = p[0], B = p[1], C = p[2];
    return {s.y(), s.z(), B * s.x() + C * s.y() + A * s.z() - s.y() * s.y()};
}

Matrix3 mira_jac(std::span<const double> p, const State3& s) {
    const double A = p[0], B = p[1], C = p[2];
    Matrix3 J;
    J << 0, 1, 0,
         0, 0, 1,
         B, C - 2.0 * s.y(), A;
    return J;
}

// Generalised Henon: x' = a - y^2 - bz, y' = x, z' = y.   params: a, b
State3 henon_eval(std::span<const double> p, const State3& s) {
    return {p[0] - s.y() * s.y() - p[1] * s.z(), s.x(), s.y()};
}

Matrix3 henon_jac(std::span<const double> p, const State3& s) {
    Matrix3 J;
    J << 0, -2.0 * s.y(), -p[1],
         1, 0, 0,
         0, 1, 0;
    return J;
}

// Lotka-Volterra: cyclic competition with rates (alpha, beta).   params: R, alpha, beta
State3 lv_eval(std::span<const double> p, const State3& s) {
    const double R = p[0], al = p[1], be = p[2];
    const double x = s.x(), y = s.y(), z = s.z();
    return {x + R * x * (1.0 - x - al * y - be * z),
            y + R * y * (1.0 - be * x - y - al * z),
            z + R * z * (1.0 - al * x - be * y - z)};
}

Matrix3 lv_jac(std::span<const double> p, const State3& s) {
    const double R = p[0], al = p[1], be = p[2];
    const double x = s.x(), y = s.y(), z = s.z();
    Matrix3 J;
    J << 1.0 + R * (1.0 - 2.0 * x - al * y - be * z), -R * al * x, -R * be * x,
         -R * be * y, 1.0 + R * (1.0 - be * x - 2.0 * y - al * z), -R * al * y,
         -R * al * z, -R * be * z, 1.0 + R * (1.0 - al * x - be * y - 2.0 * z);
    return J;
}

// Border-collision normal form.
// params: tau_L, tau_R, sigma_L, sigma_R, delta_L, delta_R, mu
Matrix3 bcnf_branch(std::span<const double> p, const State3& s) {
    const bool left = s.x() <= 0.0;
    const double tau = left ? p[0] : p[1];
    const double sigma = left ? p[2] : p[3];
    const double delta = left ? p[4] : p[5];
    Matrix3 A;
    A << tau, 1, 0,
         -sigma, 0, 1,
         delta, 0, 0;
    return A;
}

State3 bcnf_eval(std::span<const double> p, const State3& s) {
    State3 out = bcnf_branch(p, s) * s;
    out.x() += p[6];
    return out;
}

Matrix3 bcnf_jac(std::span<const double> p, const State3& s) { return bcnf_branch(p, s); }

// Globally coupled map with quartic local map
// f(x) = x(1-x)(a x^2 + (b^2 - d a) x + c).   params: p, epsilon, a, b, c, d
struct Quartic {
    double a, b, c, d;
    double operator()(double x) const {
        return x * (1.0 - x) * (a * x * x + (b * b - d * a) * x + c);
    }
    double derivative(double x) const {
        const double lin = b * b - d * a;
        const double g = a * x * x + lin * x + c;
        const double dg = 2.0 * a * x + lin;
        return (1.0 - 2.0 * x) * g + x * (1.0 - x) * dg;
    }
};

State3 coupled_eval(std::span<const double> p, const State3& s) {
    const double pw = p[0], eps = p[1];
    const Quartic f{p[2], p[3], p[4], p[5]};
    const double fx = f(s.x()), fy = f(s.y());
    return {fx + pw * eps * (fy - fx), fy + (1.0 - pw) * eps * (fx - fy), s.x()};
}

Matrix3 coupled_jac(std::span<const double> p, const State3& s) {
    const double pw = p[0], eps = p[1];
    const Quartic f{p[2], p[3], p[4], p[5]};
    const double dx = f.derivative(s.x()), dy = f.derivative(s.y());
    Matrix3 J;
    J << dx * (1.0 - pw * eps), pw * eps * dy, 0,
         (1.0 - pw) * eps * dx, dy * (1.0 - (1.0 - pw) * eps), 0,
         1, 0, 0;
    return J;
}

// Cubic user map: 20 monomials per output component.
constexpr auto cubic_exponents = [] {
    std::array<std::array<int, 3>, 20> e{};
    std::size_t k = 0;
    for (int deg = 0; deg <= 3; ++deg)
        for (int i = deg; i >= 0; --i)
            for (int j = deg - i; j >= 0; --j) e[k++] = {i, j, deg - i - j};
    return e;
}();

double ipow(double v, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= v;
    return r;
}

State3 cubic_eval(std::span<const double> p, const State3& s) {
    State3 out = State3::Zero();
    for (std::size_t m = 0; m < cubic_exponents.size(); ++m) {
        const auto& e = cubic_exponents[m];
        const double mono = ipow(s.x(), e[0]) * ipow(s.y(), e[1]) * ipow(s.z(), e[2]);
        for (int c = 0; c < 3; ++c) out[c] += p[c * 20 + m] * mono;
    }
    return out;
}

Matrix3 cubic_jac(std::span<const double> p, const State3& s) {
    Matrix3 J = Matrix3::Zero();
    for (std::size_t m = 0; m < cubic_exponents.size(); ++m) {
        const auto& e = cubic_exponents[m];
        for (int v = 0; v < 3; ++v) {
            if (e[v] == 0) continue;
            double d = e[v];
            for (int w = 0; w < 3; ++w) d *= ipow(s[w], w == v ? e[w] - 1 : e[w]);
            for (int c = 0; c < 3; ++c) J(c, v) += p[c * 20 + m] * d;
        }
    }
    return J;
}

std::vector<ParamSpec> cubic_schema() {
    std::vector<ParamSpec> schema;
    for (char c : {'x', 'y', 'z'})
        for (const auto& e : cubic_exponents)
            schema.push_back({std::string(1, c) + "_" + std::to_string(e[0]) +
                                  std::to_string(e[1]) + std::to_string(e[2]),
                              0.0});
    return schema;
}

}  // namespace

const MapDef& mira_map() {
    static const MapDef def{"mira", "Mira map x'=y, y'=z, z'=Bx+Cy+Az-y^2",
                            {{"A", -2.269}, {"B", -0.58}, {"C", -2.1}},
                            Smoothness::smooth, mira_eval, mira_jac};
    return def;
}

const MapDef& henon_map() {
    static const MapDef def{"henon", "generalised Henon map x'=a-y^2-bz, y'=x, z'=y",
                            {{"a", 1.2}, {"b", 0.1}},
                            Smoothness::smooth, henon_eval, henon_jac};
    return def;
}

const MapDef& lotka_volterra_map() {
    static const MapDef def{"lv", "3D Lotka-Volterra competition map",
                            {{"R", 1.0}, {"alpha", 1.0}, {"beta", -0.59}},
                            Smoothness::smooth, lv_eval, lv_jac};
    return def;
}

const MapDef& border_collision_map() {
    static const MapDef def{"bcnf", "3D border-collision normal form (x <= 0 uses A_L)",
                            {{"tau_L", 0.74}, {"tau_R", -0.5}, {"sigma_L", 0.5}, {"sigma_R", 1.1},
                             {"delta_L", 0.73}, {"delta_R", 1.4}, {"mu", 0.01}},
                            Smoothness::piecewise_linear, bcnf_eval, bcnf_jac};
    return def;
}

const MapDef& coupled_map() {
    static const MapDef def{"coupled", "globally coupled quartic map with delay coordinate",
                            {{"p", 0.5}, {"epsilon", -1.4}, {"a", 27.3}, {"b", 1.688},
                             {"c", 3.5}, {"d", 0.85}},
                            Smoothness::smooth, coupled_eval, coupled_jac};
    return def;
}

const MapDef& cubic_map() {
    static const MapDef def{"cubic", "general cubic polynomial map (coefficients c_ijk)",
                            cubic_schema(), Smoothness::smooth, cubic_eval, cubic_jac};
    return def;
}

std::span<const MapDef* const> registered_maps() {
    static const std::array<const MapDef*, 6> maps{&mira_map(),
                                                   &henon_map(),
                                                   &lotka_volterra_map(),
                                                   &border_collision_map(),
                                                   &coupled_map(),
                                                   &cubic_map()};
    return maps;
}

const MapDef& find_map(std::string_view id) {
    for (const MapDef* m : registered_maps())
        if (m->id == id) return *m;
    throw SchemaError("unknown map '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// BoundMap

BoundMap::BoundMap(const MapDef& def, ParamSet params)
    : def_(&def), params_(std::move(params)), values_(def.bind_values(params_)) {}

State3 BoundMap::apply_checked(const State3& s) const {
    if (!is_finite(s)) throw OverflowError(def_->id + ": non-finite input state", s);
    State3 out = def_->eval(values_, s);
    if (!is_finite(out)) throw OverflowError(def_->id + ": map produced a non-finite state", s);
    return out;
}

char BoundMap::symbol(const State3& s) const {
    if (!piecewise()) return '\0';
    return s.x() <= 0.0 ? 'L' : 'R';
}

double BoundMap::param(std::string_view name) const {
    auto idx = def_->index_of(name);
    if (!idx) throw SchemaError("map '" + def_->id + "' has no parameter '" + std::string(name) + "'");
    return values_[*idx];
}

BoundMap BoundMap::with(std::string_view name, double value) const {
    if (!def_->index_of(name))
        throw SchemaError("map '" + def_->id + "' has no parameter '" + std::string(name) + "'");
    return BoundMap(*def_, params_.with(name, value));
}

State3 eval_map(const MapDef& map, const ParamSet& params, const State3& s) {
    return BoundMap(map, params).apply_checked(s);
}

Matrix3 eval_jacobian(const MapDef& map, const ParamSet& params, const State3& s) {
    BoundMap bound(map, params);
    if (!is_finite(s)) throw OverflowError(map.id + ": non-finite input state", s);
    return bound.jacobian(s);
}

Orientation orientation_class(const MapDef& map, const ParamSet& params) {
    BoundMap bound(map, params);
    std::mt19937_64 rng(0x6f7269656e74ULL);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    bool positive = false, negative = false, zero = false;
    for (int i = 0; i < 2000; ++i) {
        State3 s(box(rng), box(rng), box(rng));
        if (bound.piecewise()) s.x() = (i % 2 == 0 ? -1.0 : 1.0) * std::abs(s.x());
        const double det = bound.jacobian(s).determinant();
        if (det > 0.0) positive = true;
        else if (det < 0.0) negative = true;
        else zero = true;
    }
    if (positive && !negative && !zero) return Orientation::preserving;
    if (negative && !positive && !zero) return Orientation::reversing;
    return Orientation::mixed;
}

std::string_view to_string(Orientation o) {
    switch (o) {
        case Orientation::preserving: return "preserving";
        case Orientation::reversing: return "reversing";
        case Orientation::mixed: return "mixed";
    }
    return "mixed";
}

}  // namespace modelock
