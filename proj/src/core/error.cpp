#include "richstate/core/error.hpp"

namespace richstate {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_reference: return "invalid-reference";
    case ErrorKind::stale_action: return "stale-action";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::workflow: return "workflow";
    case ErrorKind::already_claimed: return "already-claimed";
    case ErrorKind::unclaimable: return "unclaimable";
    case ErrorKind::invalid_use: return "invalid-use";
    case ErrorKind::forbidden: return "forbidden";
    case ErrorKind::validation: return "validation";
    case ErrorKind::no_primary: return "no-primary";
    case ErrorKind::identity: return "identity";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::undefined_increase: return "undefined-increase";
    case ErrorKind::exhausted: return "exhausted";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace richstate
