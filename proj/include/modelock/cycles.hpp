#pragma once

// Periodic orbits: Newton location on the n-th iterate, multipliers and
// stability classification.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelock/linalg.hpp"
#include "modelock/maps.hpp"

namespace modelock {

struct Cycle {
    std::string map_id;
    ParamSet params;
    int period = 0;
    std::vector<State3> points;  ///< ordered by iteration, points[i+1] = F(points[i])
    std::string symbols;         ///< one of L/R per point for piecewise maps, else empty
    double residual = 0.0;       ///< max_i |F(p_i) - p_{i+1 mod n}|_inf
    EigenTriple multipliers;
    int newton_iterations = 0;
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iterations = 50;
    double condition_limit = 1e14;
    double separation = 1e-8;  ///< minimal-period threshold
};

/// Solves F^n(x) = x by Newton with (DF^n - I) delta = -(F^n(x) - x).
///
/// Throws DivergenceError, NearBifurcationError, OverflowError, and for
/// piecewise maps SymbolFlipError when an iterate changes itinerary.
/// A solution of lower (divisor) period is returned relabelled with that
/// period.
Cycle find_cycle(const BoundMap& map, const State3& guess, int period,
                 const NewtonOptions& opts = {});

/// find_cycle that restarts from the flipped iterate up to `max_restarts`
/// times when a piecewise map changes itinerary.
Cycle find_cycle_restarting(const BoundMap& map, const State3& guess, int period,
                            const NewtonOptions& opts = {}, int max_restarts = 8);

/// Orbit of `x` under `period` applications together with the chain-rule
/// product J(p_{n-1}) ... J(p_0).
struct ShotResult {
    std::vector<State3> points;  ///< p_0 .. p_{n-1}
    State3 image;                ///< F^n(p_0)
    Matrix3 monodromy;
};
ShotResult shoot(const BoundMap& map, const State3& x, int period);

/// Product J(p_{base+n-1}) ... J(p_base) around the cycle (indices mod n).
Matrix3 cycle_matrix(const BoundMap& map, std::span<const State3> points, std::size_t base = 0);

/// Multipliers of the cycle. Throws OverflowError for non-finite products.
EigenTriple cycle_multipliers(const BoundMap& map, const Cycle& cycle, std::size_t base = 0);

enum class CycleTag { stable_node, stable_focus, saddle, flip_saddle, saddle_focus, repeller };

struct CycleClass {
    CycleTag tag = CycleTag::stable_node;
    int unstable_count = 0;
    bool complex_pair = false;
    bool near_bifurcation = false;  ///< some multiplier within 1e-9 of the unit circle
};

CycleClass classify_cycle(const EigenTriple& e);
std::string_view to_string(CycleTag tag);

struct CycleSeed {
    int period = 0;
    State3 guess;
    std::vector<State3> points;  ///< one representative per orbit point
};

/// Minimal recurrence period of a (transient-free) orbit: the smallest n
/// with |s_{k+n} - s_k|_inf < cluster_tol for every k. Empty when no such
/// n <= max_period exists.
std::vector<CycleSeed> seed_cycles_from_orbit(std::span<const State3> orbit, int max_period,
                                              double cluster_tol);

struct SaddleSearchOptions {
    int neighbours = 2;            ///< nearest stable points to interpolate towards
    int fractions = 9;             ///< interior grid points per segment
    bool require_positive_unstable = true;
    NewtonOptions newton;
};

/// Saddle of the given period on the loop through `stable_points`.
///
/// Newton is seeded on a grid of points between each stable point and its
/// nearest neighbours; among the converged cycles with exactly one unstable
/// multiplier the one closest to the stable set is returned.
std::optional<Cycle> find_saddle_cycle(const BoundMap& map, std::span<const State3> stable_points,
                                       int period, const SaddleSearchOptions& opts = {});

/// Minimum pairwise inf-norm distance between cycle points.
double min_separation(std::span<const State3> points);

/// Index of the cycle point nearest to `anchor`.
std::size_t nearest_point(std::span<const State3> points, const State3& anchor);

/// Cycle re-based so that points[0] is the point nearest `anchor`.
Cycle rotated(const Cycle& c, std::size_t base);

/// True if every point of `a` lies within tol of some point of `b` and periods agree.
bool same_orbit(const Cycle& a, const Cycle& b, double tol);

}  // namespace modelock
