#include "pwave/errors.hpp"

namespace pwave {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_degree: return "unsupported-degree";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::solver_failure: return "solver-failure";
    case ErrorKind::numerical_breakdown: return "numerical-breakdown";
    case ErrorKind::continuation_stalled: return "continuation-stalled";
    case ErrorKind::step_size_failure: return "step-size-failure";
    case ErrorKind::ill_posed_boundary_data: return "ill-posed-boundary-data";
    }
    return "unknown";
}

} // namespace pwave
