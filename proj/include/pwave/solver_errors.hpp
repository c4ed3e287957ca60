#pragma once

#include "pwave/errors.hpp"
#include "pwave/radial_core.hpp"

#include <tuple>
#include <vector>

namespace pwave {

/// Newton (or flow) did not reach its tolerance; carries the iteration report.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, SolveReport report)
        : Error(ErrorKind::solver_failure, what), report_(std::move(report)) {}
    const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

} // namespace pwave
