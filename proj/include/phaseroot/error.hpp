#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phaseroot {

/// Failure categories raised by the library. Each error also names the
/// module that raised it so the CLI can report "module:kind".
enum class ErrorKind {
    invalid_argument,
    out_of_domain,
    resolution_failure,
    linear_solve_failure,
    nonpositive_coefficient,
    degenerate_phase,
    seed_failure,
    iterate_rejected,
    convergence_failure,
    inversion_failure,
    degenerate_solution,
    series_divergence,
    internal_bound_violation,
    oracle_failure,
    overflow,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::out_of_domain: return "out-of-domain";
    case ErrorKind::resolution_failure: return "resolution-failure";
    case ErrorKind::linear_solve_failure: return "linear-solve-failure";
    case ErrorKind::nonpositive_coefficient: return "nonpositive-coefficient";
    case ErrorKind::degenerate_phase: return "degenerate-phase";
    case ErrorKind::seed_failure: return "seed-failure";
    case ErrorKind::iterate_rejected: return "iterate-rejected";
    case ErrorKind::convergence_failure: return "convergence-failure";
    case ErrorKind::inversion_failure: return "inversion-failure";
    case ErrorKind::degenerate_solution: return "degenerate-solution";
    case ErrorKind::series_divergence: return "series-divergence";
    case ErrorKind::internal_bound_violation: return "internal-bound-violation";
    case ErrorKind::oracle_failure: return "oracle-failure";
    case ErrorKind::overflow: return "overflow";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(std::string_view module, ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(module) + ":" + std::string(to_string(kind)) + ": " + what),
          module_(module),
          kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
    ErrorKind kind_;
};

/// Resolution failure carrying the subinterval that could not be resolved.
class ResolutionError : public Error {
public:
    ResolutionError(std::string_view module, double lo, double hi, const std::string& what)
        : Error(module, ErrorKind::resolution_failure,
                what + " on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          lo_(lo),
          hi_(hi) {}

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// Linear solve failure carrying the reciprocal condition estimate.
class LinearSolveError : public Error {
public:
    LinearSolveError(std::string_view module, double rcond, const std::string& what)
        : Error(module, ErrorKind::linear_solve_failure, what + " (rcond " + std::to_string(rcond) + ")"),
          rcond_(rcond) {}

    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

}  // namespace phaseroot
