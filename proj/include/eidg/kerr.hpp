#ifndef EIDG_KERR_HPP
#define EIDG_KERR_HPP

#include "eidg/field.hpp"
#include "eidg/tensorcalc.hpp"

#include <array>
#include <string>
#include <vector>

namespace eidg {

using Vec3 = std::array<double, 3>;

inline double norm3(const Vec3& v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// Black-hole parameter: mass, center of mass, angular momentum vector,
/// boost velocity (|v| < 1).
struct BhParams {
    double m = 0.0;
    Vec3 y{0, 0, 0};
    Vec3 a{0, 0, 0};
    Vec3 v{0, 0, 0};

    double gamma() const { return 1.0 / std::sqrt(1.0 - norm3(v) * norm3(v)); }
    double lambda() const { return std::max({2.0 * norm3(y), 2.0 * norm3(a), 3.0}); }
    void validate() const;
};

/// Rest-frame Kerr-Schild 4-metric (spin |a| along the x3 axis) and its exact
/// first and second Cartesian derivatives at one spatial point.
/// comps are the 10 components in the order 00,01,02,03,11,12,13,22,23,33.
struct FourMetricJets {
    std::array<double, 10> g;
    std::array<std::array<double, 3>, 10> d1;   // d1[c][k] = d_k g_c
    std::array<std::array<double, 6>, 10> d2;   // d2[c][sym(k,l)]
};
FourMetricJets kerr_schild_4metric(double m, double a_abs, const Vec3& x);

/// Slice data of {x'^0 = 0} after rotation/translation/boost: induced metric,
/// its first and second derivatives, pi = K - (tr K) gamma, and its first
/// derivatives, all exact at the point.
struct SliceJets {
    std::array<double, 6> gamma;
    std::array<std::array<double, 3>, 6> dgamma;
    std::array<std::array<double, 6>, 6> ddgamma;
    std::array<double, 6> pi;
    std::array<std::array<double, 3>, 6> dpi;
};
SliceJets kerr_slice(const BhParams& p, const Vec3& xp);

/// Time-symmetric slice: translated isotropic Schwarzschild
/// g = (1 + m/(2|x-y|))^4 e, pi = 0, with exact derivatives.
SliceJets isotropic_slice(double m, const Vec3& y, const Vec3& xp);

/// Untruncated induced data (g_p, pi_p) sampled on the grid, with the
/// analytic derivative kit.
BaseGeometry induced_geometry(const BhParams& p, GridPtr grid,
                              bool time_symmetric = false);
DataSet induced_data(const BhParams& p, GridPtr grid, bool time_symmetric = false);

/// Truncated data (e + chi_p (g_p - e), chi_p pi_p) with analytic kit;
/// identically (e, 0) for r <= lambda.  When plain_chi is set the cutoff is
/// chi(r) itself (the q = 1 convention) instead of chi(r/lambda).
BaseGeometry truncated_geometry(const BhParams& p, GridPtr grid,
                                bool time_symmetric = false,
                                bool plain_chi = false);
DataSet truncated_data(const BhParams& p, GridPtr grid,
                       bool time_symmetric = false, bool plain_chi = false);

/// ADM charges by surface integrals at the given radii, extrapolated in 1/R
/// with a quadratic fit.  E: energy, P: linear momentum, J: angular momentum,
/// C: center of mass (normalized so that C(g_p, pi_p) = m y).
/// Raw surface charges plus the black-hole parameter reading.  For the
/// composed family the raw values satisfy exactly
///   E = gamma m,  P = -gamma m v,
///   J = m a + y x P,
///   C = m y_par + gamma m y_perp - a x P,
/// so the parameter block (m, v, a, y) is recovered by inverting the linear
/// (y, a) system; m a and m y are the paper's charge tuple.
struct ChargeTable {
    double E = 0.0;
    Vec3 P{0, 0, 0}, J{0, 0, 0}, C{0, 0, 0};
    // derived parameter reading
    double m_est = 0.0;
    Vec3 v_est{0, 0, 0}, a_est{0, 0, 0}, y_est{0, 0, 0};
    Vec3 ma() const { return {m_est * a_est[0], m_est * a_est[1], m_est * a_est[2]}; }
    Vec3 my() const { return {m_est * y_est[0], m_est * y_est[1], m_est * y_est[2]}; }
    std::vector<std::array<double, 11>> per_radius;  // R, E, P, J, C at each R
    std::string to_text() const;
};
ChargeTable adm_charges(const BaseGeometry& G, const std::vector<double>& radii);
ChargeTable adm_charges(const DataSet& d, const std::vector<double>& radii);

/// Constraint projections of truncated data against the ten charge partners:
///   <H,1>, <M,W_{1,0,k}> (3), <H,x^k> (3), <M,Omega^-_{ab}> (3; k with
///   eps_{kab} = 1).
struct ChargeProjections {
    double H_1 = 0.0;
    Vec3 M_W{0, 0, 0};
    Vec3 H_x{0, 0, 0};
    Vec3 M_Om{0, 0, 0};
};
ChargeProjections charge_projections(const BaseGeometry& trunc);

} // namespace eidg

#endif
