#ifndef EIDG_BASIS_HPP
#define EIDG_BASIS_HPP

#include "eidg/field.hpp"

#include <array>
#include <functional>
#include <map>

namespace eidg {

/// Sparse trivariate polynomial with double coefficients; exact arithmetic
/// for the harmonic-polynomial bases and the corrector tensors.
class Poly3 {
public:
    using Monomial = std::array<int, 3>;

    Poly3() = default;
    static Poly3 constant(double c);
    static Poly3 var(int axis);
    static Poly3 r2();  // x^2 + y^2 + z^2

    Poly3& operator+=(const Poly3& o);
    Poly3& operator-=(const Poly3& o);
    friend Poly3 operator+(Poly3 a, const Poly3& b) { a += b; return a; }
    friend Poly3 operator-(Poly3 a, const Poly3& b) { a -= b; return a; }
    Poly3 operator*(const Poly3& o) const;
    Poly3 operator*(double c) const;

    Poly3 derivative(int axis) const;
    double eval(double x, double y, double z) const;
    int degree() const;
    bool empty() const { return terms_.empty(); }
    const std::map<Monomial, double>& terms() const { return terms_; }

    /// int_{S^2} of the polynomial restricted to directions, per unit radius
    /// power: returns map degree -> angular integral of the homogeneous part.
    /// (Odd monomials integrate to zero; evens use double-factorial formula.)
    std::map<int, double> angular_moments() const;

private:
    std::map<Monomial, double> terms_;
    void prune();
};

using PolyVec = std::array<Poly3, 3>;
using PolySym = std::array<Poly3, 6>;  // symmetric storage, SymTensorField order

// ---------------------------------------------------------------------------
// spherical-harmonic / harmonic-polynomial families (Definition of the tools
// used to invert the Laplacian).  Index convention pinned by
// w_{2,-1} = sqrt(3) x^1, w_{2,0} = sqrt(3) x^3, w_{2,1} = sqrt(3) x^2.

/// r^l Y_{l,m} as an exact polynomial.
Poly3 solid_harmonic_poly(int l, int m);

/// w_{j,l} = r^{j-1} Y_{j-1,l} (harmonic polynomial), j >= 1.
Poly3 w_poly(int j, int ell);

/// W_{j,l,k} = w_{j,l} d_k as polynomial components.
PolyVec W_poly(int j, int ell, int k);

/// Omega^{+-}_{ab} = x^a d_b +- x^b d_a (axes 0-based).
PolyVec omega_poly(int a, int b, int sign);

/// Exact adjoint images of polynomial arguments:
///   DH*(f) = -(Delta f) e + Hess f ,  DM*(Z) = -1/2 (d_i Z_j + d_j Z_i).
PolySym adjoint_H_poly(const Poly3& f);
PolySym adjoint_M_poly(const PolyVec& Z);

/// Sample a polynomial symmetric tensor on a grid.
SymTensorField sample_sym_poly(GridPtr grid, const PolySym& P);

// Grid-sampled evaluations.
ScalarField eval_w(GridPtr grid, int j, int ell);
/// v_{j,l} = (-1)^{l+1} Y_{j-1,-l} / (4 pi (2j-1) r^j), as displayed.
ScalarField eval_v(GridPtr grid, int j, int ell);
/// Mode-matched decaying partner of w_{j,l}: -Y_{j-1,l}/(4 pi (2j-1) r^j).
/// This is the basis in which the Poisson tail reconstruction is exact with
/// the real-harmonic convention above; it agrees with eval_v for ell = 0.
ScalarField eval_v_dual(GridPtr grid, int j, int ell);
VectorField eval_W(GridPtr grid, int j, int ell, int k);
VectorField eval_V_dual(GridPtr grid, int j, int ell, int k);
VectorField eval_omega(GridPtr grid, int a, int b, int sign);

// ---------------------------------------------------------------------------
// cutoffs and corrector radial profiles

/// Smooth step: 0 for t<=0, 1 for t>=1, C^inf monotone in between.
double smooth_step(double t);
double smooth_step_prime(double t);

/// chi of the Laplacian toolbox: 0 for r<=1, 1 for r>=2.
double chi(double r);
double chi_prime(double r);

/// Cutoff chi_p(r) = chi(r/lambda); transition supported in [lambda, 2 lambda].
struct Cutoff {
    double lambda = 1.0;
    double operator()(double r) const { return chi(r / lambda); }
    double prime(double r) const { return chi_prime(r / lambda) / lambda; }
};

/// lambda = max(2|y|, 2|a|, 3).
Cutoff cutoff_for_scales(double y_norm, double a_norm);

/// Smooth bump profile with derivatives; supports the corrector spaces.
struct RadialProfile {
    std::function<double(double)> f, df, d2f;
    double support_lo = 0.0, support_hi = 0.0;
};

/// mu: smooth non-negative bump supported in [1,10], peak value 1.
RadialProfile corrector_mu();

/// mu^{(n)}_k: plateau bump, == 1 on [1+1/(kn), 2-1/(kn)], == 0 outside
/// [1+1/((k+1)n), 2-1/((k+1)n)].
RadialProfile corrector_mu_nk(int n, int k);

} // namespace eidg

#endif
