#ifndef EIDG_TENSORCALC_HPP
#define EIDG_TENSORCALC_HPP

#include "eidg/field.hpp"

#include <utility>

namespace eidg {

/// Initial data pair: Riemannian metric g and reduced second fundamental
/// form pi = k - (tr_g k) g.
struct DataSet {
    SymTensorField g;
    SymTensorField pi;
};

/// Conformal unknowns: uhat = u - 1 and the vector potential Xhat.
struct ConformalState {
    ScalarField u_hat;
    VectorField X_hat;
};

/// First and second Cartesian derivatives of a symmetric 2-tensor.
/// d1[k](i,j) = d_k T_ij ; d2[sym(k,l)](i,j) = d_k d_l T_ij.
/// Kits add componentwise, so analytic pieces (truncated black hole,
/// correctors) can be combined with spectral pieces (seeds, conformal
/// unknowns) before any constraint evaluation.
struct TensorDerivs {
    std::array<SymTensorField, 3> d1;
    std::array<SymTensorField, 6> d2;  // empty fields when only first order is carried

    TensorDerivs() = default;
    explicit TensorDerivs(GridPtr grid, bool second_order = true);
    TensorDerivs& operator+=(const TensorDerivs& o);
    bool has_second() const { return d2[0].component(0).size() > 0; }
};

/// Spectral derivative kits.
TensorDerivs spectral_derivs(const SymTensorField& T, bool second_order = true);
std::array<ScalarField, 3> spectral_gradient(const ScalarField& f);

/// Geometry bundle the constraint operators consume.
struct BaseGeometry {
    SymTensorField g;    // full metric
    TensorDerivs dg;     // derivatives of g (equivalently of g - e)
    SymTensorField pi;
    TensorDerivs dpi;    // first order is enough for pi
};

/// Convenience: build the bundle spectrally from a DataSet.
BaseGeometry make_geometry(const DataSet& d);

/// Scalar curvature R(g) from pointwise Christoffel assembly.
/// Throws SingularMetric when the metric fails positivity at a node.
ScalarField scalar_curvature(const SymTensorField& g, const TensorDerivs& dg);
ScalarField scalar_curvature(const SymTensorField& g);

/// Constraint operator Phi = (H, M):
///   H = R(g) + 1/2 (tr_g pi)^2 - |pi|_g^2 ,  M = div_g pi.
std::pair<ScalarField, VectorField> constraint_operator(const BaseGeometry& G);
std::pair<ScalarField, VectorField> constraint_operator(const DataSet& d);

/// Linearizations at (e, 0):
///   DH(h) = -Delta tr h + div div h ,   DM(pi) = div pi.
ScalarField linearized_H(const SymTensorField& h, const TensorDerivs& dh);
ScalarField linearized_H(const SymTensorField& h);
VectorField linearized_M(const SymTensorField& pi, const TensorDerivs& dpi);
VectorField linearized_M(const SymTensorField& pi);

/// Formal adjoints at (e, 0):
///   DH*(f) = -(Delta f) e + Hess f ,   DM*(X) = -1/2 (grad X + grad X^T).
SymTensorField adjoint_H(const ScalarField& f);
SymTensorField adjoint_M(const VectorField& X);

/// Exact second variations at (e, 0), one half of D^2.
std::pair<ScalarField, VectorField> second_variation(
    const SymTensorField& h, const TensorDerivs& dh,
    const SymTensorField& pi, const TensorDerivs& dpi);
std::pair<ScalarField, VectorField> second_variation(const SymTensorField& h,
                                                     const SymTensorField& pi);

/// Conformal Killing-style operator L_e X = grad(x)X + (grad X)^T - (div X) e.
SymTensorField lie_operator(const VectorField& X);

/// Right-hand sides of the semilinear system
///   8 Delta uhat = A ,  Delta Xhat = B ,
/// evaluated exactly from the displayed remainders:
///   A = H(gbar, pibar) + R_H(p, uhat, Xhat)
///   B = -M(gbar, pibar) + R_M(p, uhat, Xhat).
std::pair<ScalarField, VectorField> conformal_rhs(const BaseGeometry& base,
                                                  const ConformalState& c);

} // namespace eidg

#endif
