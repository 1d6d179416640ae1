#pragma once

// Raw simulation: orbits, maximal Lyapunov exponent, brute-force
// bifurcation scans and the census of cyclic closed curves.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelock/cycles.hpp"
#include "modelock/maps.hpp"

namespace modelock {

inline constexpr double escape_radius = 1e6;

struct OrbitSample {
    std::string map_id;
    ParamSet params;
    State3 initial = State3::Zero();
    long transient = 0;
    std::vector<State3> points;
    bool escaped = false;
};

/// Discards `n_transient` iterates then keeps `n_keep`. Stops early with
/// `escaped` set when the state leaves |s|_inf <= 1e6 or becomes non-finite.
OrbitSample iterate_orbit(const BoundMap& map, const State3& x0, long n_transient, long n_keep);

/// Benettin estimate of the maximal Lyapunov exponent: a unit tangent vector
/// is pushed through the Jacobian, renormalised every step and the log
/// stretch averaged over `n_steps` after `transient` discarded steps.
/// Throws OverflowError when the orbit escapes.
double max_lyapunov(const BoundMap& map, const State3& x0, long n_steps, long transient = 10000);

enum class SeedPolicy { fixed, follow };

struct ScanPoint {
    double param = 0.0;
    long index = 0;
    State3 state;
};

struct ScanResult {
    std::string param_name;
    std::vector<ScanPoint> points;
    std::vector<double> escaped;  ///< grid values whose orbit escaped
};

/// One orbit per grid value; `follow` seeds each grid value with the final
/// state of the previous one. With `fixed` the grid is processed on
/// `threads` workers; output order never depends on the thread count.
ScanResult bifurcation_scan(const BoundMap& map, std::string_view param,
                            std::span<const double> grid, const State3& x0, SeedPolicy policy,
                            long n_transient, long n_keep, int threads = 1);

/// Number of clusters of `values` separated by more than `tol`.
std::size_t count_distinct(std::vector<double> values, double tol);

enum class LoopVerdict { periodic_points, cyclic_loops, merged_structure, chaotic };
std::string_view to_string(LoopVerdict v);

struct ResidueClass {
    std::size_t count = 0;
    double diameter = 0.0;     ///< max inf-norm extent over the class
    double curve_score = 0.0;  ///< fraction of points with nearly antipodal nearest neighbours
    State3 centroid = State3::Zero();
};

struct LoopCensus {
    int multiplicity = 0;
    std::vector<ResidueClass> classes;
    LoopVerdict verdict = LoopVerdict::merged_structure;
    std::optional<double> lyapunov;
};

struct CensusOptions {
    double point_tol = 1e-6;
    double curve_threshold = 0.7;
    double antipodal_cos = -0.8;
    double chaos_threshold = 1e-3;
    std::size_t max_score_points = 4000;  ///< larger classes are thinned before scoring
};

/// Partitions the sample by index mod n and scores each class.
///
/// Verdicts: chaotic if the supplied exponent exceeds chaos_threshold;
/// periodic-points if every class diameter is <= point_tol; cyclic-loops if
/// every class is extended and curve-like; merged-structure otherwise.
/// Throws PreconditionError for escaped samples or fewer than 100 n points.
LoopCensus count_cyclic_loops(const OrbitSample& sample, int n, std::optional<double> lyapunov,
                              const CensusOptions& opts = {});

struct ToggleReport {
    bool toggles = false;
    std::array<std::vector<int>, 2> groups;  ///< residue classes per big loop
    double separation_ratio = 0.0;           ///< between-group / within-group spread
};

/// Splits the class centroids into two groups (2-means on the principal
/// axis) and checks that consecutive residue classes alternate between them,
/// i.e. iterates toggle between two big loops.
ToggleReport two_loop_toggle(const LoopCensus& census);

/// Bounded attractor search from `trials` uniform random starts in the box
/// [lo, hi]^3. Returns the first start whose orbit stays bounded for
/// `n_check` steps.
std::optional<State3> find_bounded_start(const BoundMap& map, const State3& lo, const State3& hi,
                                         int trials, unsigned long long seed, long n_check = 20000);

/// Attracting cycle reached from `x0`: iterates `transient` steps, detects
/// the recurrence period (<= max_period, tolerance 1e-6) and polishes it
/// with find_cycle. Empty if the orbit escapes or does not recur.
std::optional<Cycle> attracting_cycle(const BoundMap& map, const State3& x0, long transient = 20000,
                                      int max_period = 64);

}  // namespace modelock
