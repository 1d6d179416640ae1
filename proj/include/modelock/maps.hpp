#pragma once

// Registry of the three-dimensional maps studied by the toolkit.
//
// Every map ships a closed-form Jacobian. Evaluation is a plain function of
// (parameter values, state), so BoundMap objects are immutable and safe to
// share between threads.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "modelock/error.hpp"

namespace modelock {

using State3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Ordered name -> value bindings. Names are unique.
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(std::initializer_list<std::pair<std::string, double>> entries);

    /// Adds a new binding; throws SchemaError if `name` is already bound.
    void add(std::string name, double value);
    /// Inserts or overwrites.
    void set(std::string_view name, double value);

    std::optional<double> get(std::string_view name) const;
    double at(std::string_view name) const;
    bool contains(std::string_view name) const { return get(name).has_value(); }

    /// Copy with one binding overwritten (or appended).
    ParamSet with(std::string_view name, double value) const;

    const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    bool operator==(const ParamSet&) const = default;

private:
    std::vector<std::pair<std::string, double>> entries_;
};

struct ParamSpec {
    std::string name;
    double default_value = 0.0;
};

enum class Smoothness { smooth, piecewise_linear };

using EvalFn = State3 (*)(std::span<const double> params, const State3& s);
using JacobianFn = Matrix3 (*)(std::span<const double> params, const State3& s);

struct MapDef {
    std::string id;
    std::string description;
    std::vector<ParamSpec> schema;
    Smoothness smoothness = Smoothness::smooth;
    EvalFn eval = nullptr;
    JacobianFn jacobian = nullptr;

    ParamSet defaults() const;

    /// Defaults overridden by `overrides`; unknown names are rejected.
    ParamSet complete(const ParamSet& overrides) const;

    /// Parameter values in schema order. Requires an exact schema match.
    std::vector<double> bind_values(const ParamSet& params) const;

    std::optional<std::size_t> index_of(std::string_view name) const;
};

const MapDef& mira_map();
const MapDef& henon_map();
const MapDef& lotka_volterra_map();
const MapDef& border_collision_map();
const MapDef& coupled_map();
/// General cubic polynomial map; coefficient `c_ijk` multiplies x^i y^j z^k
/// in output component c (c in {x,y,z}, i+j+k <= 3). All default to zero.
const MapDef& cubic_map();

std::span<const MapDef* const> registered_maps();
/// Throws SchemaError for unknown ids.
const MapDef& find_map(std::string_view id);

/// A map with its parameters validated and resolved to schema order.
class BoundMap {
public:
    BoundMap(const MapDef& def, ParamSet params);

    /// One application without finiteness checks (hot loops).
    State3 operator()(const State3& s) const { return def_->eval(values_, s); }
    /// One application; throws OverflowError if the image is not finite.
    State3 apply_checked(const State3& s) const;
    Matrix3 jacobian(const State3& s) const { return def_->jacobian(values_, s); }

    /// Branch symbol of `s`: 'L' (x <= 0) or 'R' for piecewise maps, '\0'
    /// for smooth maps.
    char symbol(const State3& s) const;
    bool piecewise() const { return def_->smoothness == Smoothness::piecewise_linear; }

    double param(std::string_view name) const;
    BoundMap with(std::string_view name, double value) const;

    const MapDef& def() const { return *def_; }
    const std::string& id() const { return def_->id; }
    const ParamSet& params() const { return params_; }

private:
    const MapDef* def_;
    ParamSet params_;
    std::vector<double> values_;
};

/// Single checked evaluation; validates the parameter set on every call.
State3 eval_map(const MapDef& map, const ParamSet& params, const State3& s);
Matrix3 eval_jacobian(const MapDef& map, const ParamSet& params, const State3& s);

enum class Orientation { preserving, reversing, mixed };

/// Sign of det(J). Decided by sampling det(J) over [-2,2]^3 with a fixed
/// seed (both sides of x = 0 for piecewise maps), so state-dependent
/// determinants are classified heuristically.
Orientation orientation_class(const MapDef& map, const ParamSet& params);

std::string_view to_string(Orientation o);

bool is_finite(const State3& s);

}  // namespace modelock
