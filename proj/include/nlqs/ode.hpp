#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlqs {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OdeControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0 picks a starting step automatically
    long max_steps = 50'000'000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_calls = 0;
};

// One accepted step with its continuous extension (4th order, Hairer's contd5).
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> coeffs;  // 5 blocks of length n

    std::size_t dim() const { return coeffs.size() / 5; }
    double t1() const { return t0 + h; }
    void interpolate(double t, std::vector<double>& out) const;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;
using StepObserver = std::function<void(const DenseStep& step)>;

// Dormand-Prince 5(4) with FSAL and an error-per-unit-step PI controller.
// Returns the final state; throws IntegrationError on underflow, NaN or step budget.
std::vector<double> dopri5(const OdeRhs& rhs, double t0, std::vector<double> y0, double t_end,
                           const OdeControls& controls, const StepObserver& observer, OdeStats* stats = nullptr);

}  // namespace nlqs
