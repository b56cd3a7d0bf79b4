#include "hlppl/error.hpp"

namespace hlppl {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::io: return "io";
        case ErrorKind::parse: return "parse";
        case ErrorKind::validation: return "validation";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::contract: return "contract";
        case ErrorKind::domain: return "domain";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::fit_failure: return "fit_failure";
        case ErrorKind::feature_unavailable: return "feature_unavailable";
    }
    return "unknown";
}

}  // namespace hlppl
