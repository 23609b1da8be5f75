#include "nlqs/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace nlqs {

std::string to_string(WalkForm w) { return w == WalkForm::adjacency ? "adjacency" : "projector"; }

WalkForm parse_walk_form(const std::string& s) {
    if (s == "adjacency") return WalkForm::adjacency;
    if (s == "projector") return WalkForm::projector;
    throw std::invalid_argument("unknown walk form: " + s);
}

Matrix walk_operator(const CollapsedGraph& cg, WalkForm form) {
    if (form == WalkForm::adjacency) return cg.reduced_adjacency;
    const int m = cg.size();
    Matrix w(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w(i, j) = std::sqrt(double(cg.class_sizes[i]) * double(cg.class_sizes[j]));
    return w;
}

Matrix hamiltonian(const CollapsedGraph& cg, double gamma, WalkForm form) {
    if (!std::isfinite(gamma)) throw std::invalid_argument("hamiltonian: gamma must be finite");
    Matrix h = walk_operator(cg, form);
    for (double& v : h.data()) v *= -gamma;
    for (int i = 0; i < cg.n_marked_classes; ++i) h(i, i) -= 1.0;
    return h;
}

}  // namespace nlqs
