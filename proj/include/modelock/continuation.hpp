#pragma once

// Natural-parameter continuation of cycles with flip / fold /
// Neimark-Sacker detection.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelock/cycles.hpp"

namespace modelock {

enum class Termination { range_end, newton_failure, period_collapse, symbol_flip };
std::string_view to_string(Termination t);

struct BranchRecord {
    double param = 0.0;
    Cycle cycle;
    EigenTriple eigen;  ///< multipliers permuted to follow the previous record
};

struct ContinuationBranch {
    std::string map_id;
    ParamSet base_params;  ///< parameters at the start of the branch
    std::string param;
    std::vector<BranchRecord> records;
    std::vector<double> steps;  ///< step actually taken to reach records[i], i >= 1
    Termination termination = Termination::range_end;
    std::optional<double> failed_at;  ///< first parameter value that could not be reached

    BoundMap map_at(double value) const;
};

struct ContinuationOptions {
    NewtonOptions newton;
    int max_halvings = 10;  ///< minimum step = step0 / 2^max_halvings
    double jump_factor = 10.0;
};

/// Continues `start` in `param` from `from` to `to` with initial step
/// `step0`. Each step is predicted by secant extrapolation of the last two
/// records, corrected by find_cycle, and halved on failure down to
/// step0 / 1024. Throws StartInvalidError if `start` does not re-converge or
/// the first step cannot be taken.
ContinuationBranch continue_cycle(const BoundMap& map, const Cycle& start, std::string_view param,
                                  double from, double to, double step0,
                                  const ContinuationOptions& opts = {});

/// perm such that next[perm[i]] follows prev[i]. Minimises the summed
/// complex-plane distance; a conjugate pair is kept on the previous pair's
/// slots. When the number of complex pairs differs the identity (modulus
/// order) is returned.
std::array<int, 3> pair_eigenvalues(const EigenTriple& prev, const EigenTriple& next);
EigenTriple apply_permutation(const EigenTriple& e, const std::array<int, 3>& perm);

enum class EventKind { flip, fold, neimark_sacker, turn_complex };
std::string_view to_string(EventKind k);

struct BifurcationEvent {
    EventKind kind = EventKind::flip;
    double param = 0.0;
    double lo = 0.0;  ///< localisation interval
    double hi = 0.0;
    std::string cycle_tag;
    int period = 0;
    Complex critical;
    EigenTriple eigen;      ///< multipliers at the refined point
    State3 point;           ///< a cycle point at the refined parameter
    bool degraded = false;  ///< refinement stopped early on a Newton failure
    bool nondegenerate = true;
};

/// Scans flip (lambda + 1), fold (lambda - 1), Neimark-Sacker (|lambda| - 1,
/// complex pairs only) and real/complex transitions along the matched
/// multiplier paths and refines each sign change by bisection with fresh
/// Newton solves until the bracket is <= loc_tol. A branch that terminated
/// by Newton failure with a multiplier near +1 also yields a fold located
/// by bisection on existence of the cycle.
std::vector<BifurcationEvent> detect_bifurcations(const ContinuationBranch& branch, double loc_tol,
                                                  std::string_view cycle_tag = "");

/// Period-2n cycle born at a flip: Newton on F^{2n} seeded at
/// p_0 +- delta v_flip with delta = 1e-4, 1e-3, 1e-2 in turn. `cycle` must
/// be the period-n cycle past the flip (its multiplier < -1).
std::optional<Cycle> start_doubled_branch(const BoundMap& map, const Cycle& cycle,
                                          double delta = 1e-4, const NewtonOptions& opts = {});

}  // namespace modelock
