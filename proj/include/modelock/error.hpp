#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace modelock {

/// Base class for every error raised by the library. The CLI maps
/// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter set does not match a map's schema (missing, unknown or
/// duplicated names, non-finite values).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A map evaluation produced a non-finite value.
class OverflowError : public Error {
public:
    OverflowError(const std::string& what, const Eigen::Vector3d& state)
        : Error(what), state_(state) {}
    const Eigen::Vector3d& state() const noexcept { return state_; }

private:
    Eigen::Vector3d state_;
};

/// Newton iteration did not reach the requested tolerance.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// The Newton matrix (DF^n - I) is numerically singular.
class NearBifurcationError : public Error {
public:
    NearBifurcationError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A Newton iterate of a piecewise map left the symbolic itinerary of the
/// previous iterate. Restart from `restart_point()` with the new itinerary.
class SymbolFlipError : public Error {
public:
    SymbolFlipError(const std::string& what, std::string old_symbols, std::string new_symbols,
                    const Eigen::Vector3d& restart_point)
        : Error(what),
          old_symbols_(std::move(old_symbols)),
          new_symbols_(std::move(new_symbols)),
          restart_point_(restart_point) {}
    const std::string& old_symbols() const noexcept { return old_symbols_; }
    const std::string& new_symbols() const noexcept { return new_symbols_; }
    const Eigen::Vector3d& restart_point() const noexcept { return restart_point_; }

private:
    std::string old_symbols_;
    std::string new_symbols_;
    Eigen::Vector3d restart_point_;
};

/// Operation called with arguments outside its contract.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A 1D manifold was requested for a saddle whose unstable subspace is not
/// a single real direction.
class UnsupportedBranchError : public Error {
public:
    using Error::Error;
};

/// Continuation could not take a single step from its start cycle.
class StartInvalidError : public Error {
public:
    using Error::Error;
};

}  // namespace modelock
