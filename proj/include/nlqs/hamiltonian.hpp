#pragma once

#include <string>

#include "nlqs/graphs.hpp"
#include "nlqs/matrix.hpp"

namespace nlqs {

// How the walk term is represented. `adjacency` is -gamma*A; `projector` is
// -gamma*N|s><s|, which differs from the adjacency form on the complete graph
// only by a multiple of the identity.
enum class WalkForm { adjacency, projector };

std::string to_string(WalkForm w);
WalkForm parse_walk_form(const std::string& s);

// Reduced walk operator W (so H0 = -gamma*W - oracle).
Matrix walk_operator(const CollapsedGraph& cg, WalkForm form);

// -gamma*W - sum over marked classes of |m_i><m_i|; the degree term is dropped.
Matrix hamiltonian(const CollapsedGraph& cg, double gamma, WalkForm form = WalkForm::adjacency);

}  // namespace nlqs
