#ifndef EIDG_CORRECTORS_HPP
#define EIDG_CORRECTORS_HPP

#include "eidg/basis.hpp"
#include "eidg/field.hpp"
#include "eidg/tensorcalc.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace eidg {

/// One corrector basis tensor: a polynomial symmetric tensor times a smooth
/// compactly supported radial profile, with the polynomial derivatives kept
/// in closed form so supports and traces are exact.
struct CorrectorElement {
    PolySym K;                      // polynomial part (adjoint image)
    std::array<PolySym, 3> dK;      // d_k K
    std::array<PolySym, 6> d2K;     // d_k d_l K
    RadialProfile mu;
    double scale = 1.0;             // normalization folded into the element
    std::string label;
};

enum class CorrectorProfileMode {
    // single smooth mollifier on [1,10] for every element; invertibility is
    // verified numerically (the nested plateaux of the constructive proof
    // shrink below any practical grid resolution)
    Smooth,
    // the nested plateau family mu^{(n)}_k on [1,2]
    Nested,
};

struct CorrectorOptions {
    CorrectorProfileMode mode = CorrectorProfileMode::Smooth;
    double cond_threshold = 1e6;
    int n_max = 64;
};

/// The corrector spaces A_q (trace-free, from DH* images of w_{j,l}, 3<=j<=q)
/// and B_q (from DM* images of Z in Z_q), with the pairing matrices
///   gram_h(i,j)  = < h_i, DH*(w_j) > ,  gram_pi(i,j) = < varpi_i, DM*(Z_j) >
/// assembled by exact angular moments and 1D radial quadrature.
struct CorrectorBasis {
    int q = 0;
    std::vector<CorrectorElement> h;        // dim q^2 - 4 (empty for q <= 2)
    std::vector<std::pair<int, int>> h_idx; // (j, l) labels
    std::vector<CorrectorElement> pi;       // dim 3 q^2 - 6 (empty for q <= 1)
    std::vector<std::string> pi_labels;     // Z labels
    Eigen::MatrixXd gram_h, gram_pi;
    double cond_h = 0.0, cond_pi = 0.0;
    int n_used = 0;  // plateau index when the nested mode is active
};

CorrectorBasis build_basis(int q, const CorrectorOptions& opt = {});

/// Coefficients of corrector tensors in the basis above.
struct CorrectorCoeffs {
    Eigen::VectorXd g;   // in A_q
    Eigen::VectorXd pi;  // in B_q
};

/// Unique (g, pi) in A_q x B_q with <g, DH*(w_{j,l})> = G and
/// <pi, DM*(Z)> = P.  Targets are ordered like h_idx / pi_labels.
CorrectorCoeffs solve_corrector(const CorrectorBasis& basis,
                                const Eigen::VectorXd& targets_h,
                                const Eigen::VectorXd& targets_pi);

/// Sample a corrector combination on a grid; optionally produce the exact
/// derivative kit alongside.
SymTensorField corrector_field(const CorrectorBasis& basis, bool pi_family,
                               const Eigen::VectorXd& coeffs, GridPtr grid);
std::pair<SymTensorField, TensorDerivs> corrector_field_and_kit(
    const CorrectorBasis& basis, bool pi_family, const Eigen::VectorXd& coeffs,
    GridPtr grid);

/// Deterministic sup-type norm sum_{|alpha|<=k} sup |D^alpha T| on a fixed
/// sample of the support, k = 2 for the metric family and 1 for pi.
double corrector_sup_norm(const CorrectorBasis& basis, bool pi_family,
                          const Eigen::VectorXd& coeffs, int order);

/// Smallest singular values of the normalized Gram matrices of the derived
/// families {div h_i} and {(Delta tr + div div) varpi_i} (the linear
/// independence certificates).
double div_family_sigma_min(const CorrectorBasis& basis);
double ddtr_family_sigma_min(const CorrectorBasis& basis);

} // namespace eidg

#endif
