#pragma once

// One-dimensional unstable manifolds of saddle cycles and the topology of
// the saddle -> node connections they form.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modelock/cycles.hpp"
#include "modelock/dynamics.hpp"

namespace modelock {

struct ManifoldSettings {
    double delta0 = 1e-4;       ///< offset of the first fundamental domain
    double h_max = 1e-3;        ///< maximal polyline spacing
    double angle_max = 0.2;     ///< maximal turning angle (rad)
    double length_max = 1e3;    ///< arclength budget
    double eps_att = 1e-6;      ///< attractor tolerance
    int max_domains = 5000;
    std::size_t max_domain_points = 400000;
};

enum class TerminalStatus { converged, budget_exhausted, escaped };
std::string_view to_string(TerminalStatus s);

struct BranchId {
    int point = 0;      ///< saddle point index
    int direction = 1;  ///< +1 or -1 along the unstable eigenvector
};

struct ManifoldCurve {
    BranchId branch;
    int saddle_period = 0;
    int iterate = 0;  ///< power of F used for growth (n, or 2n for a negative multiplier)
    std::vector<State3> polyline;
    double arclength = 0.0;
    TerminalStatus status = TerminalStatus::budget_exhausted;
    int attractor_index = -1;  ///< attractor point nearest the final point, -1 if unknown
    std::vector<int> attractor_set;  ///< attractor points touched by the final domain (sorted)
    bool doubled_iterate = false;  ///< first image fell on the wrong side; F^{2n} used
};

/// Grows one branch by the method of fundamental domains.
///
/// The segment [q0, G(q0)], q0 = p_i + delta0 v (v the unstable
/// eigenvector of the cycle product based at p_i, G = F^n), is
/// discretised and mapped forward domain by domain. Preimage parameters are
/// bisected wherever the image spacing exceeds h_max or the turning angle
/// exceeds angle_max. Growth stops when every point of a domain lies within
/// eps_att of an attractor point (or, without attractors, the domain
/// shrinks below eps_att; with attractors, below 1e-3 eps_att, which marks
/// an attractor missing from the list and leaves attractor_set empty),
/// when the arclength budget is used, or when the curve leaves |s| <= 1e6.
///
/// Throws UnsupportedBranchError unless the saddle has exactly one real
/// multiplier outside the unit circle.
ManifoldCurve grow_unstable_manifold(const BoundMap& map, const Cycle& saddle, BranchId branch,
                                     const ManifoldSettings& settings = {},
                                     std::span<const State3> attractors = {});

/// Both branches of every saddle point, ordered (point 0 +, point 0 -, ...).
std::vector<ManifoldCurve> grow_all_branches(const BoundMap& map, const Cycle& saddle,
                                             const ManifoldSettings& settings = {},
                                             std::span<const State3> attractors = {},
                                             int threads = 1);

enum class Topology {
    single_loop,
    disjoint_loops,
    length_doubled,
    saddle_focus_spiral,
    indeterminate
};
std::string_view to_string(Topology t);

struct ConnectionEdge {
    int saddle = 0;
    int direction = 1;
    int node = 0;
    double arclength = 0.0;
    double spiral_turns = 0.0;
};

struct ConnectionReport {
    Topology topology = Topology::indeterminate;
    int loops = 0;  ///< number of connected components
    int winding = 0;
    int saddle_count = 0;
    int node_count = 0;
    std::vector<ConnectionEdge> edges;
    std::vector<std::vector<int>> components;  ///< node (stable point) indices per component
    std::vector<int> node_degree;
    bool all_spiral = false;

    std::string tag() const;  ///< e.g. "disjoint-loops(2)"
};

/// Builds the saddle -> node graph (a branch whose final domain touches
/// several stable points contributes an edge to each) and classifies it:
///   saddle-focus-spiral  every branch spirals (>= 1.5 monotone turns) into a focus
///   disjoint-loops   k >= 2 components covering every saddle and node
///   single-loop      one simple alternating cycle through every saddle and node, winding 1
///   length-doubled   one component through every saddle and node, winding 2
///   indeterminate    anything else
/// Winding is the number of distinct strands of the manifold met by rays
/// from the centroid of the stable points, in their best-fit plane (median
/// over 36 rays).
/// Throws PreconditionError if a branch did not converge onto a stable point.
ConnectionReport classify_connection(const BoundMap& map, const Cycle& saddle, const Cycle& stable,
                                     std::span<const ManifoldCurve> curves);

/// Median number of distinct strands of `polylines` crossed by rays from
/// `centre` in the plane (u, w); crossings closer than merge_tol merge.
int strand_count(std::span<const std::vector<State3>> polylines, const State3& centre, const State3& u,
                 const State3& w, double merge_tol);

/// Net rotation (in turns) of the curve tail around `centre`, measured in
/// the tail's best-fit plane; zero unless the rotation is monotone.
double spiral_turns(std::span<const State3> polyline, const State3& centre);

enum class DoublingType { disjoint_loops, mobius_length_doubled, indeterminate };
std::string_view to_string(DoublingType t);

struct DoublingPrediction {
    DoublingType type = DoublingType::indeterminate;
    double node_lambda3 = 0.0;
    double saddle_lambda3 = 0.0;
};

/// Sign of the third multiplier: positive for both cycles predicts disjoint
/// loops, negative for both a length-doubled (Moebius) loop.
DoublingPrediction predict_doubling_type(const EigenTriple& node, const EigenTriple& saddle);

/// True when predicted and observed topologies agree.
bool prediction_matches(const DoublingPrediction& p, const ConnectionReport& r);

/// Sample of the closed curves formed by the manifolds, laid out so that
/// index mod `multiplicity` (a divisor of the saddle period) labels the
/// curve: class k holds the polylines of the branches at saddle points
/// i = k (mod multiplicity), resampled at uniform arclength `spacing` with
/// coincident strands (points closer than spacing / 2) merged; shorter classes repeat from their start up to
/// the size of the largest.
OrbitSample sample_along_manifolds(const BoundMap& map, const Cycle& saddle,
                                   std::span<const ManifoldCurve> curves, int multiplicity,
                                   double spacing);

/// Points at uniform arclength `spacing` along the polyline, starting at its first point.
std::vector<State3> resample_polyline(std::span<const State3> polyline, double spacing);

/// Distance from `q` to the polyline.
double distance_to_polyline(const State3& q, std::span<const State3> polyline);

}  // namespace modelock
