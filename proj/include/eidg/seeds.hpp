#ifndef EIDG_SEEDS_HPP
#define EIDG_SEEDS_HPP

#include "eidg/field.hpp"
#include "eidg/tensorcalc.hpp"

#include <string>

namespace eidg {

/// TT seed pair with its derived scalars.
struct SeedPair {
    SymTensorField g_hat, pi_hat;
    TensorDerivs dg_hat;      // first+second derivatives (spectral)
    TensorDerivs dpi_hat;     // first derivatives
    int q = 1;
    double delta = 0.5;
    double alpha = 1.0;
    double eta = 0.0;          // sqrt(1/4 ||grad ghat||^2 + ||pihat||^2)
    double J_value = 0.0;
    double tt_defect = 0.0;    // relative trace/divergence defect
    bool time_symmetric = false;
};

struct SeedSpec {
    std::string name = "gaussian-quadrupole";  // or "time-symmetric", "zero"
    double epsilon = 1e-3;
    int q = 1;
    double delta = 0.5;
    double alpha = 0.5;
};

struct TtDecomposition {
    ScalarField u;
    VectorField X;
    SymTensorField h_TT;
};

/// h = u e + grad(x)X + h_TT with h_TT transverse-traceless; q in {1, 2}.
TtDecomposition tt_decompose(const SymTensorField& h, int q, double delta);

/// TT projector P = (Delta - grad(x)div) curl with the symmetric-tensor curl
/// (curl h)_ij = eps_{iab} d_a h_bj symmetrized.
SymTensorField tt_project(const SymTensorField& h);

/// J(h, pi) = sqrt(sum_k (int pi^{ij} d_k h_ij)^2) / (1/4||grad h||^2 + ||pi||^2).
/// Throws ZeroSeed when the denominator is at round-off level.
double j_functional(const SymTensorField& h, const SymTensorField& pi);
double j_functional(const SymTensorField& h, const TensorDerivs& dh,
                    const SymTensorField& pi);

double eta_of(const SymTensorField& g_hat, const TensorDerivs& dg,
              const SymTensorField& pi_hat);

/// Built-in seed construction: TT-projected gaussian profiles scaled so the
/// pointwise decay bound max (1+r)^{q+d}|ghat|, (1+r)^{q+d+1}(|grad ghat|+|pihat|)
/// equals epsilon.  Checks the cone J <= 1 - alpha unless time-symmetric.
SeedPair make_seed(const SeedSpec& spec, GridPtr grid);

/// The saturating sequence fixture: (sqrt2 g_n, 2^{-1/2} d_3 g_n) with
/// g_n = phi''(x^3) chi(rho/n) ((dx^1)^2 - (dx^2)^2), including the exact
/// first-derivative kit for quadrature (the fields are deliberately not
/// band-limited).
struct B3Pair {
    SymTensorField h;
    TensorDerivs dh;  // first order
    SymTensorField pi;
};
B3Pair b3_pair(int n, GridPtr grid);

} // namespace eidg

#endif
