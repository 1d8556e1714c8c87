#include "mkdv/errors.hpp"

namespace mkdv {

const char* to_string(Breakdown kind) noexcept {
    switch (kind) {
        case Breakdown::Overflow: return "overflow";
        case Breakdown::IllConditioned: return "ill-conditioned";
        case Breakdown::NotPositiveDefinite: return "not-positive-definite";
        case Breakdown::Singular: return "singular";
        case Breakdown::RegimeTooEarly: return "regime-too-early";
        case Breakdown::NonConvergence: return "non-convergence";
        case Breakdown::UnderResolved: return "under-resolved";
        case Breakdown::BlowUp: return "blow-up";
    }
    return "unknown";
}

}  // namespace mkdv
