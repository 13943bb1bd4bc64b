#ifndef EIDG_POISSON_HPP
#define EIDG_POISSON_HPP

#include "eidg/field.hpp"
#include "eidg/grid.hpp"

#include <map>
#include <string>
#include <vector>

namespace eidg {

/// Result of a flat-Laplacian inversion with cokernel bookkeeping.
/// The full solution is  u = chi(r) * sum tail_coeffs_{j,l} vhat_{j,l} + remainder,
/// where vhat_{j,l} = -Y_{j-1,l}/(4 pi (2j-1) r^j) is the decaying partner of
/// w_{j,l} in the fixed real-harmonic labeling, and the remainder lies in
/// H^2_{-q-delta} when the tail coefficients are subtracted.
struct ScalarPoissonSolution {
    ScalarField full;        // the decaying solution of Delta u = f
    ScalarField remainder;   // full minus chi * (tail expansion)
    std::map<std::pair<int, int>, double> tail_coeffs;  // (j,l) -> <f, w_{j,l}>
    int q = 0;
    double delta = 0.0;
    double residual_l2 = 0.0;      // ||Delta u - f||_{L2} over the grid
    double residual_rel = 0.0;     // relative to ||f||_{L2}
    bool tail_warning = false;     // power-law tail extrapolation was material
};

struct VectorPoissonSolution {
    VectorField full;
    VectorField remainder;
    // momentum-adapted tail bookkeeping: <Y, W_{1,0,k}>, <Y, Omega^{+-}_{ab}>,
    // and <Y, W_{j,l,k}> for 3 <= j <= q
    std::map<std::string, double> tail_coeffs;
    int q = 0;
    double delta = 0.0;
    double residual_l2 = 0.0;
    double residual_rel = 0.0;
    bool tail_warning = false;
};

struct PoissonOptions {
    bool check_decay = true;     // reject sources whose decay fit is too slow
    double decay_slack = 0.75;   // accept fitted exponent >= q+delta+2-slack
    int gauss_per_panel = 8;
};

/// Solve Delta u = f for the unique solution decaying at infinity, per-mode
/// radial Green quadrature.  q and delta fix the target space H^2_{-q-delta};
/// tail coefficients <f, w_{j,l}> are reported for 1 <= j <= q.
ScalarPoissonSolution solve_scalar(const ScalarField& f, int q, double delta,
                                   const PoissonOptions& opt = {});

/// Componentwise vector solve with the j = 2 tail block reported in the
/// Omega basis.
VectorPoissonSolution solve_vector(const VectorField& Y, int q, double delta,
                                   const PoissonOptions& opt = {});

/// Key helpers shared with the solver module.
std::string omega_key(int a, int b, int sign);
std::string W_key(int j, int ell, int k);

} // namespace eidg

#endif
