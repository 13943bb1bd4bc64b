#include "eidg/grid.hpp"

#include "eidg/errors.hpp"
#include "eidg/field.hpp"

#include <cmath>
#include <limits>

namespace eidg {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p1 = 0, dp = 0;
        for (int it = 0; it < 100; ++it) {
            p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * t * p2 - j * p3) / (j + 1.0);
            }
            dp = n * (t * p1 - p2) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[n - 1 - i] = t;  // ascending
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

// Associated Legendre P_l^m(cos theta) without Condon-Shortley phase, and
// d/dtheta, for all l <= l_max, m <= l, at a single theta.
void legendre_table(int l_max, double theta,
                    Eigen::MatrixXd& P, Eigen::MatrixXd& dP) {
    const double ct = std::cos(theta), st = std::sin(theta);
    P.setZero(l_max + 1, l_max + 1);
    dP.setZero(l_max + 1, l_max + 1);
    P(0, 0) = 1.0;
    for (int m = 1; m <= l_max; ++m)
        P(m, m) = (2.0 * m - 1.0) * st * P(m - 1, m - 1);
    for (int m = 0; m < l_max; ++m)
        P(m + 1, m) = (2.0 * m + 1.0) * ct * P(m, m);
    for (int m = 0; m <= l_max; ++m)
        for (int l = m + 2; l <= l_max; ++l)
            P(l, m) = ((2.0 * l - 1.0) * ct * P(l - 1, m) - (l + m - 1.0) * P(l - 2, m)) /
                      (l - m);
    // dP/dtheta = (l ct P_l^m - (l+m) P_{l-1}^m)/st  (nodes exclude poles)
    for (int m = 0; m <= l_max; ++m)
        for (int l = m; l <= l_max; ++l) {
            const double below = (l > 0 && l - 1 >= m) ? P(l - 1, m) : 0.0;
            dP(l, m) = (l * ct * P(l, m) - (l + m) * below) / st;
        }
}

double factorial_ratio(int l, int m) {  // (l-m)!/(l+m)!
    double r = 1.0;
    for (int k = l - m + 1; k <= l + m; ++k) r /= k;
    return r;
}

} // namespace

std::shared_ptr<const SphericalGrid>
SphericalGrid::compactified(int l_max, int n_r, double r_out, double map_param,
                            int n_theta, int n_phi) {
    auto g = std::shared_ptr<SphericalGrid>(new SphericalGrid());
    g->annulus_ = false;
    g->map_param_ = map_param;
    g->eps_map_ = 2.0 * map_param / r_out;
    g->build(l_max, n_r, n_theta, n_phi);
    return g;
}

std::shared_ptr<const SphericalGrid>
SphericalGrid::annulus(int l_max, int n_r, double r_min, double r_max,
                       int n_theta, int n_phi) {
    auto g = std::shared_ptr<SphericalGrid>(new SphericalGrid());
    g->annulus_ = true;
    // log map r = exp(r_offset + half_width * s): power-law profiles become
    // entire functions of s
    g->r_offset_ = 0.5 * (std::log(r_min) + std::log(r_max));
    g->half_width_ = 0.5 * (std::log(r_max) - std::log(r_min));
    g->map_param_ = g->half_width_;
    g->build(l_max, n_r, n_theta, n_phi);
    return g;
}

void SphericalGrid::build(int l_max, int n_r, int n_theta, int n_phi) {
    l_max_ = l_max;
    n_r_ = n_r;
    n_theta_ = n_theta > 0 ? n_theta : l_max + 1;
    n_phi_ = n_phi > 0 ? n_phi : 2 * l_max + 1;
    if (n_theta_ < l_max + 1 || n_phi_ < 2 * l_max + 1)
        throw OutOfRange("angular node counts too small for l_max");
    build_radial_tables();
    build_angular_tables();
}

void SphericalGrid::build_radial_tables() {
    const int n = n_r_;
    s_nodes_.resize(n);
    r_nodes_.resize(n);
    drds_.resize(n);
    w_fejer_.resize(n);
    bary_w_.resize(n);
    for (int k = 0; k < n; ++k) {
        const double th = M_PI * (k + 0.5) / n;
        s_nodes_[k] = -std::cos(th);
        // Fejer's first rule
        double acc = 0.0;
        for (int m2 = 1; m2 <= n / 2; ++m2)
            acc += std::cos(2.0 * m2 * th) / (4.0 * m2 * m2 - 1.0);
        w_fejer_[k] = (2.0 / n) * (1.0 - 2.0 * acc);
        bary_w_[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(th);
        const double s = s_nodes_[k];
        if (annulus_) {
            r_nodes_[k] = std::exp(r_offset_ + half_width_ * s);
            drds_[k] = half_width_ * r_nodes_[k];
        } else {
            r_nodes_[k] = map_param_ * (1.0 + s) / (1.0 - s + eps_map_);
            drds_[k] = map_param_ * (2.0 + eps_map_) /
                       ((1.0 - s + eps_map_) * (1.0 - s + eps_map_));
        }
    }
    w_r_ = w_fejer_.cwiseProduct(drds_);

    // Chebyshev value<->coefficient matrices on s in [-1,1].
    // T_j(s_k) with s_k = -cos(theta_k) -> (-1)^j cos(j theta_k).
    cheb_c2v_.resize(n, n);
    cheb_v2c_.resize(n, n);
    for (int k = 0; k < n; ++k) {
        const double th = M_PI * (k + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            cheb_c2v_(k, j) = sgn * std::cos(j * th);
            cheb_v2c_(j, k) = sgn * std::cos(j * th) * ((j == 0 ? 1.0 : 2.0) / n);
        }
    }
}

void SphericalGrid::build_angular_tables() {
    const int nt = n_theta_, np = n_phi_, nlm = n_lm();
    Eigen::VectorXd xg, wg;
    gauss_legendre(nt, xg, wg);  // nodes in cos(theta), ascending
    theta_.resize(nt);
    w_theta_.resize(nt);
    for (int i = 0; i < nt; ++i) {
        theta_[i] = std::acos(xg[nt - 1 - i]);  // theta ascending from ~0 to ~pi
        w_theta_[i] = wg[nt - 1 - i];
    }
    phi_.resize(np);
    for (int p = 0; p < np; ++p) phi_[p] = 2.0 * M_PI * p / np;
    const double w_phi = 2.0 * M_PI / np;

    const int na = nt * np;
    w_ang_.resize(na);
    nx_.resize(na);
    ny_.resize(na);
    nz_.resize(na);
    dtheta_dx_.resize(na, 3);
    dphi_dx_.resize(na, 3);
    Ymat_.resize(na, nlm);
    dY_dtheta_.resize(na, nlm);
    dY_dphi_.resize(na, nlm);

    Eigen::MatrixXd P, dP;
    for (int it = 0; it < nt; ++it) {
        const double th = theta_[it];
        const double ct = std::cos(th), st = std::sin(th);
        legendre_table(l_max_, th, P, dP);
        for (int ip = 0; ip < np; ++ip) {
            const int ia = it * np + ip;
            const double ph = phi_[ip];
            const double cp = std::cos(ph), sp = std::sin(ph);
            w_ang_[ia] = w_theta_[it] * w_phi;
            nx_[ia] = st * cp;
            ny_[ia] = st * sp;
            nz_[ia] = ct;
            // r * dtheta/dx^i and r sin(theta) * dphi/dx^i (the 1/r is applied
            // where derivatives are assembled)
            dtheta_dx_(ia, 0) = ct * cp;
            dtheta_dx_(ia, 1) = ct * sp;
            dtheta_dx_(ia, 2) = -st;
            dphi_dx_(ia, 0) = -sp;
            dphi_dx_(ia, 1) = cp;
            dphi_dx_(ia, 2) = 0.0;
            for (int l = 0; l <= l_max_; ++l) {
                for (int m = -l; m <= l; ++m) {
                    const int am = std::abs(m);
                    double nrm = std::sqrt((2.0 * l + 1.0) * factorial_ratio(l, am));
                    if (m != 0) nrm *= std::sqrt(2.0);
                    // m<0 <-> cos(|m| phi), m>0 <-> sin(m phi); pins
                    // w_{2,-1} = sqrt(3) x^1, w_{2,0} = sqrt(3) x^3,
                    // w_{2,1} = sqrt(3) x^2.
                    double azim, dazim;
                    if (m == 0) {
                        azim = 1.0;
                        dazim = 0.0;
                    } else if (m < 0) {
                        azim = std::cos(am * ph);
                        dazim = -am * std::sin(am * ph);
                    } else {
                        azim = std::sin(am * ph);
                        dazim = am * std::cos(am * ph);
                    }
                    const int j = lm_index(l, m);
                    Ymat_(ia, j) = nrm * P(l, am) * azim;
                    dY_dtheta_(ia, j) = nrm * dP(l, am) * azim;
                    dY_dphi_(ia, j) = nrm * P(l, am) * dazim;
                }
            }
        }
    }
    Yquad_ = (Ymat_.array().colwise() * w_ang_.array()).matrix().transpose() / kFourPi;
}

// ---------------------------------------------------------------------------
// radial helpers

Eigen::VectorXd SphericalGrid::radial_coeffs(const Eigen::VectorXd& values) const {
    return cheb_v2c_ * values;
}

Eigen::VectorXd SphericalGrid::radial_values(const Eigen::VectorXd& coeffs) const {
    return cheb_c2v_ * coeffs;
}

Eigen::VectorXd SphericalGrid::radial_derivative(const Eigen::VectorXd& values) const {
    const int n = n_r_;
    Eigen::VectorXd a = cheb_v2c_ * values;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 2);
    for (int j = n - 1; j >= 1; --j)
        b[j - 1] = b[j + 1] + 2.0 * j * a[j];
    b[0] *= 0.5;
    Eigen::VectorXd ds = cheb_c2v_ * b.head(n);
    return ds.cwiseQuotient(drds_);
}

double SphericalGrid::map_r_of_s(double s) const {
    if (annulus_) return std::exp(r_offset_ + half_width_ * s);
    return map_param_ * (1.0 + s) / (1.0 - s + eps_map_);
}

double SphericalGrid::map_drds_of_s(double s) const {
    if (annulus_) return half_width_ * std::exp(r_offset_ + half_width_ * s);
    return map_param_ * (2.0 + eps_map_) / ((1.0 - s + eps_map_) * (1.0 - s + eps_map_));
}

double SphericalGrid::s_of_r(double rr) const {
    if (annulus_) return (std::log(rr) - r_offset_) / half_width_;
    // invert r = L(1+s)/(1-s+eps): s = (r(1+eps) - L)/(r + L)
    return (rr * (1.0 + eps_map_) - map_param_) / (rr + map_param_);
}

// Local barycentric interpolation window: keeps huge off-window values (e.g.
// 1/r^2 profiles near the origin) from polluting evaluations at moderate radii.
void SphericalGrid::interp_window(double s, int& k0, int& kw) const {
    const int W = std::min(12, n_r_);
    int lo = 0, hi = n_r_ - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (s_nodes_[mid] <= s ? lo : hi) = mid;
    }
    k0 = std::clamp(lo - W / 2 + 1, 0, n_r_ - W);
    kw = W;
}

double SphericalGrid::radial_interpolate(const Eigen::VectorXd& values, double rr) const {
    const double s = s_of_r(rr);
    int k0, W;
    interp_window(s, k0, W);
    double num = 0.0, den = 0.0;
    for (int k = k0; k < k0 + W; ++k) {
        const double d = s - s_nodes_[k];
        if (std::abs(d) < 1e-14) return values[k];
        double w = 1.0;
        for (int j = k0; j < k0 + W; ++j)
            if (j != k) w /= (s_nodes_[k] - s_nodes_[j]);
        const double t = w / d;
        num += t * values[k];
        den += t;
    }
    return num / den;
}

// ---------------------------------------------------------------------------
// transforms and derivatives

HarmonicCoefficients SphericalGrid::forward_transform(const ScalarField& f) const {
    HarmonicCoefficients out;
    out.l_max = l_max_;
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    out.c = (Yquad_ * F).transpose();  // n_r x n_lm
    return out;
}

ScalarField SphericalGrid::inverse_transform(const HarmonicCoefficients& coef) const {
    ScalarField f(shared_from_this());
    const int na = n_ang();
    Eigen::Map<Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    F = Ymat_ * coef.c.transpose();
    return f;
}

std::array<ScalarField, 3> SphericalGrid::gradient(const ScalarField& f) const {
    const int na = n_ang();
    HarmonicCoefficients coef = forward_transform(f);

    // radial derivative of every mode profile
    Eigen::MatrixXd dc(n_r_, n_lm());
    for (int j = 0; j < n_lm(); ++j)
        dc.col(j) = radial_derivative(coef.c.col(j));

    Eigen::MatrixXd f_r = Ymat_ * dc.transpose();                 // na x n_r
    Eigen::MatrixXd f_th = dY_dtheta_ * coef.c.transpose();       // na x n_r
    Eigen::MatrixXd f_ph = dY_dphi_ * coef.c.transpose();

    std::array<ScalarField, 3> out{ScalarField(shared_from_this()),
                                   ScalarField(shared_from_this()),
                                   ScalarField(shared_from_this())};
    for (int axis = 0; axis < 3; ++axis) {
        Eigen::Map<Eigen::MatrixXd> D(out[axis].values().data(), na, n_r_);
        for (int ir = 0; ir < n_r_; ++ir) {
            const double inv_r = 1.0 / r_nodes_[ir];
            for (int ia = 0; ia < na; ++ia) {
                const double st = std::sin(theta_[ia / n_phi_]);
                double dir_r;
                switch (axis) {
                    case 0: dir_r = nx_[ia]; break;
                    case 1: dir_r = ny_[ia]; break;
                    default: dir_r = nz_[ia]; break;
                }
                D(ia, ir) = f_r(ia, ir) * dir_r +
                            f_th(ia, ir) * dtheta_dx_(ia, axis) * inv_r +
                            f_ph(ia, ir) * dphi_dx_(ia, axis) * inv_r / st;
            }
        }
    }
    return out;
}

ScalarField SphericalGrid::partial_derivative(const ScalarField& f, int axis) const {
    return gradient(f)[axis];
}

ScalarField SphericalGrid::laplacian(const ScalarField& f) const {
    HarmonicCoefficients coef = forward_transform(f);
    Eigen::MatrixXd lap(n_r_, n_lm());
    for (int l = 0; l <= l_max_; ++l) {
        for (int m = -l; m <= l; ++m) {
            const int j = lm_index(l, m);
            Eigen::VectorXd u = coef.c.col(j);
            Eigen::VectorXd du = radial_derivative(u);
            Eigen::VectorXd d2u = radial_derivative(du);
            for (int ir = 0; ir < n_r_; ++ir) {
                const double rr = r_nodes_[ir];
                lap(ir, j) = d2u[ir] + 2.0 * du[ir] / rr -
                             l * (l + 1.0) * u[ir] / (rr * rr);
            }
        }
    }
    HarmonicCoefficients lc{std::move(lap), l_max_};
    return inverse_transform(lc);
}

// ---------------------------------------------------------------------------
// quadrature

double SphericalGrid::volume_integral(const ScalarField& f) const {
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    // fixed evaluation order: angular reduction per radius, then radial sum
    double total = 0.0;
    for (int ir = 0; ir < n_r_; ++ir) {
        double ang = 0.0;
        for (int ia = 0; ia < na; ++ia) ang += w_ang_[ia] * F(ia, ir);
        total += w_r_[ir] * r_nodes_[ir] * r_nodes_[ir] * ang;
    }
    return total;
}

double SphericalGrid::volume_integral_decaying(const ScalarField& f) const {
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    Eigen::VectorXd shell(n_r_);
    for (int ir = 0; ir < n_r_; ++ir) {
        double ang = 0.0;
        for (int ia = 0; ia < na; ++ia) ang += w_ang_[ia] * F(ia, ir);
        shell[ir] = w_r_[ir] * r_nodes_[ir] * r_nodes_[ir] * ang;
    }
    int peak = 0;
    for (int ir = 1; ir < n_r_; ++ir)
        if (std::abs(shell[ir]) > std::abs(shell[peak])) peak = ir;
    const double floor_shell = 1e-9 * std::abs(shell[peak]);
    double total = 0.0;
    int quiet = 0;
    for (int ir = 0; ir < n_r_; ++ir) {
        total += shell[ir];
        if (ir <= peak) continue;
        if (std::abs(shell[ir]) < floor_shell) {
            if (++quiet >= 6) break;
        } else {
            quiet = 0;
        }
    }
    return total;
}

IntegralResult SphericalGrid::volume_integral_checked(const ScalarField& f,
                                                      double tail_threshold) const {
    IntegralResult res;
    res.value = volume_integral(f);
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    const double boundary = F.col(n_r_ - 1).cwiseAbs().maxCoeff();
    const double scale = std::abs(res.value) + 1e-300;
    // |f(r_out)| * r_out^3 as a crude measure of what the missing tail could hold
    res.boundary_ratio = boundary * std::pow(r_out(), 3) / scale;
    res.tail_warning = res.boundary_ratio > tail_threshold;
    return res;
}

double SphericalGrid::surface_integral(const ScalarField& f, double R) const {
    if (R < r_min() || R > r_out())
        throw OutOfRange("surface_integral: radius outside grid range");
    Eigen::VectorXd slice = angular_slice(f, R);
    double ang = 0.0;
    for (int ia = 0; ia < n_ang(); ++ia) ang += w_ang_[ia] * slice[ia];
    return R * R * ang;
}

Eigen::VectorXd SphericalGrid::angular_slice(const ScalarField& f, double R) const {
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    const double s = s_of_r(R);
    int k0, W;
    interp_window(s, k0, W);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(W);
    double den = 0.0;
    for (int k = k0; k < k0 + W; ++k) {
        const double d = s - s_nodes_[k];
        if (std::abs(d) < 1e-14) return F.col(k);
        double w = 1.0;
        for (int j = k0; j < k0 + W; ++j)
            if (j != k) w /= (s_nodes_[k] - s_nodes_[j]);
        t[k - k0] = w / d;
        den += t[k - k0];
    }
    return (F.middleCols(k0, W) * t) / den;
}

double SphericalGrid::weighted_sobolev_norm(const ScalarField& f, int k,
                                            double delta) const {
    if (k > 2) throw OutOfRange("weighted_sobolev_norm: order k > 2 unsupported");
    // weight field (1+r)^{-delta-3/2+|a|}
    auto weighted_l2 = [&](const ScalarField& g, int order) {
        ScalarField w2(shared_from_this());
        const int na = n_ang();
        Eigen::Map<Eigen::MatrixXd> W(w2.values().data(), na, n_r_);
        Eigen::Map<const Eigen::MatrixXd> G(g.values().data(), na, n_r_);
        for (int ir = 0; ir < n_r_; ++ir) {
            const double wr = std::pow(1.0 + r_nodes_[ir], -delta - 1.5 + order);
            W.col(ir) = (G.col(ir).array() * wr).square().matrix();
        }
        return std::sqrt(std::max(0.0, volume_integral(w2)));
    };
    double total = weighted_l2(f, 0);
    if (k >= 1) {
        auto g1 = gradient(f);
        for (int i = 0; i < 3; ++i) total += weighted_l2(g1[i], 1);
        if (k >= 2) {
            for (int i = 0; i < 3; ++i) {
                auto g2 = gradient(g1[i]);
                for (int j = i; j < 3; ++j) total += weighted_l2(g2[j], 2);
            }
        }
    }
    return total;
}

Eigen::VectorXd SphericalGrid::radial_profile(const ScalarField& f) const {
    const int na = n_ang();
    Eigen::Map<const Eigen::MatrixXd> F(f.values().data(), na, n_r_);
    Eigen::VectorXd prof(n_r_);
    for (int ir = 0; ir < n_r_; ++ir) {
        double acc = 0.0;
        for (int ia = 0; ia < na; ++ia)
            acc += w_ang_[ia] * F(ia, ir) * F(ia, ir);
        prof[ir] = std::sqrt(acc / kFourPi);
    }
    return prof;
}

double SphericalGrid::decay_exponent(const ScalarField& f, double r_lo,
                                     double r_hi) const {
    Eigen::VectorXd prof = radial_profile(f);
    const double floor_val = prof.maxCoeff() * 1e-13 + 1e-300;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int ir = 0; ir < n_r_; ++ir) {
        const double rr = r_nodes_[ir];
        if (rr < r_lo || rr > r_hi) continue;
        if (prof[ir] < floor_val) continue;
        const double x = std::log(rr), y = std::log(prof[ir]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 3) return std::numeric_limits<double>::infinity();
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

} // namespace eidg
