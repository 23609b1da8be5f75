#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "nlqs/dynamics.hpp"
#include "nlqs/graphs.hpp"

namespace nlqs {

inline constexpr int kOracleMaxVertices = 5000;

struct FullState {
    double t = 0.0;
    std::vector<cplx> psi;
};

// Integrates the N-dimensional equation vertex by vertex. The gamma policy is evaluated on the
// class probabilities obtained by summing vertex probabilities over the equitable partition.
// Trajectory columns are vertices.
Trajectory full_integrate(const Graph& graph, const std::vector<int>& marked, const Nonlinearity& nl,
                          const GammaPolicy& policy, double t_end, const IntegrateControls& controls,
                          WalkForm walk = WalkForm::adjacency);

struct OracleComparison {
    double max_abs_dev = 0.0;
    std::vector<double> per_class_dev;
    std::size_t samples = 0;
};

// Both trajectories must share sample times; `vertex_class` maps full columns to reduced columns.
OracleComparison compare(const Trajectory& full, const Trajectory& reduced, const std::vector<int>& vertex_class);

struct OracleRun {
    CollapsedGraph collapsed;
    Trajectory full;
    Trajectory reduced;
    OracleComparison comparison;
};

// Collapses the graph, integrates both systems on the same sample grid and compares them.
OracleRun run_oracle(const Graph& graph, const std::vector<int>& marked, const Nonlinearity& nl,
                     const GammaPolicy& policy, double t_end, const IntegrateControls& controls,
                     WalkForm walk = WalkForm::adjacency);

void write_comparison_json(const OracleComparison& cmp, std::ostream& out);

}  // namespace nlqs
