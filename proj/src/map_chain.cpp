#include "innerlab/map_chain.hpp"

#include <sstream>

namespace innerlab {

ArcUnion MapChain::preimage(const ArcUnion& target, std::size_t arc_budget) const {
    ArcUnion current = target;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
        if (current.is_empty()) return current;
        if (current.is_full()) continue;  // boundary map is onto
        std::size_t expected = current.size() * static_cast<std::size_t>(it->degree());
        if (expected > arc_budget) {
            std::ostringstream msg;
            msg << "preimage: arc budget exceeded (" << expected << " > " << arc_budget
                << ")";
            throw BudgetExceeded(msg.str());
        }
        std::vector<Arc> pulled;
        pulled.reserve(expected);
        for (const Arc& a : current.arcs()) {
            ArcUnion piece = it->arc_preimage(a);
            pulled.insert(pulled.end(), piece.arcs().begin(), piece.arcs().end());
        }
        current = ArcUnion(std::move(pulled));
    }
    return current;
}

}  // namespace innerlab
