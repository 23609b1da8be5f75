#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nlqs/graphs.hpp"
#include "nlqs/hamiltonian.hpp"
#include "nlqs/matrix.hpp"

namespace nlqs {

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j is the eigenvector of values[j]
    int sweeps = 0;
};

// Cyclic Jacobi. Each eigenvector is signed so its first nonzero entry is positive.
EigenDecomposition eig_sym(const Matrix& a);

struct SpectralSummary {
    double gamma = 0.0;
    std::vector<double> eigenvalues;
    double gap = 0.0;
    std::vector<double> overlaps_s;
    std::vector<double> overlaps_w;
};

SpectralSummary spectral_summary(const CollapsedGraph& cg, double gamma, WalkForm form = WalkForm::adjacency);
std::vector<SpectralSummary> overlap_sweep(const CollapsedGraph& cg, const std::vector<double>& gamma_grid,
                                           WalkForm form = WalkForm::adjacency);

struct GammaSearchResult {
    double gamma = 0.0;
    double imbalance = 0.0;  // | |<s|psi0>|^2 - |<s|psi1>|^2 | at gamma
    bool at_boundary = false;
    std::string warning;
};

// gamma minimizing the overlap imbalance of the two lowest eigenvectors with |s>,
// grid search followed by golden-section refinement.
GammaSearchResult find_gamma_numeric(const CollapsedGraph& cg, double gamma_lo, double gamma_hi, int n_grid = 400,
                                     WalkForm form = WalkForm::adjacency);

void write_sweep_csv(const std::vector<SpectralSummary>& rows, std::ostream& out);

}  // namespace nlqs
