#include "eidg/kerr.hpp"

#include "eidg/basis.hpp"
#include "eidg/errors.hpp"
#include "eidg/jets.hpp"

#include <cmath>
#include <sstream>

namespace eidg {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

int ten_index(int mu, int nu) {
    // order 00,01,02,03,11,12,13,22,23,33
    if (mu > nu) std::swap(mu, nu);
    static constexpr int base[4] = {0, 4, 7, 9};
    return base[mu] + (nu - mu);
}

// ---------------------------------------------------------------------------
// first-order jets over the three slice coordinates, used for the ADM algebra

struct J1 {
    double v = 0.0;
    std::array<double, 3> g{0, 0, 0};
};

J1 jc(double c) { return J1{c, {0, 0, 0}}; }

J1 operator+(const J1& a, const J1& b) {
    return J1{a.v + b.v, {a.g[0] + b.g[0], a.g[1] + b.g[1], a.g[2] + b.g[2]}};
}
J1 operator-(const J1& a, const J1& b) {
    return J1{a.v - b.v, {a.g[0] - b.g[0], a.g[1] - b.g[1], a.g[2] - b.g[2]}};
}
J1 operator-(const J1& a) { return J1{-a.v, {-a.g[0], -a.g[1], -a.g[2]}}; }
J1 operator*(const J1& a, const J1& b) {
    return J1{a.v * b.v,
              {a.g[0] * b.v + a.v * b.g[0], a.g[1] * b.v + a.v * b.g[1],
               a.g[2] * b.v + a.v * b.g[2]}};
}
J1 operator*(double c, const J1& a) { return J1{c * a.v, {c * a.g[0], c * a.g[1], c * a.g[2]}}; }
J1 inverse(const J1& a) {
    const double iv = 1.0 / a.v;
    return J1{iv, {-a.g[0] * iv * iv, -a.g[1] * iv * iv, -a.g[2] * iv * iv}};
}
J1 operator/(const J1& a, const J1& b) { return a * inverse(b); }
J1 sqrtj(const J1& a) {
    const double s = std::sqrt(a.v);
    return J1{s, {a.g[0] / (2 * s), a.g[1] / (2 * s), a.g[2] / (2 * s)}};
}

// 4x4 constant matrices
using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity4() {
    Mat4 I{};
    for (int i = 0; i < 4; ++i) I[i][i] = 1.0;
    return I;
}

Mat4 mul(const Mat4& A, const Mat4& B) {
    Mat4 C{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += A[i][k] * B[k][j];
            C[i][j] = s;
        }
    return C;
}

// Lorentz boost of velocity v: x'^0 = gamma(x^0 + v.x), x'^i = x^i +
// [(gamma-1)/v^2 v.x + gamma x^0] v^i.  The t = 0 slice of the primed frame
// then carries momentum P = -gamma m v for Kerr data, matching the
// charge-integral identities.
Mat4 boost_matrix(const Vec3& v) {
    Mat4 L = identity4();
    const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (v2 < 1e-30) return L;
    const double gam = 1.0 / std::sqrt(1.0 - v2);
    L[0][0] = gam;
    for (int i = 0; i < 3; ++i) {
        L[0][i + 1] = gam * v[i];
        L[i + 1][0] = gam * v[i];
        for (int j = 0; j < 3; ++j)
            L[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + (gam - 1.0) * v[i] * v[j] / v2;
    }
    return L;
}

Mat4 boost_inverse(const Vec3& v) {
    Vec3 mv{-v[0], -v[1], -v[2]};
    return boost_matrix(mv);
}

// rotation with R e3 = a/|a| (identity when a is along e3 or zero)
std::array<std::array<double, 3>, 3> rotation_to(const Vec3& a) {
    std::array<std::array<double, 3>, 3> R{};
    for (int i = 0; i < 3; ++i) R[i][i] = 1.0;
    const double an = norm3(a);
    if (an < 1e-30) return R;
    const Vec3 u{a[0] / an, a[1] / an, a[2] / an};
    const Vec3 e3{0, 0, 1};
    // Rodrigues: rotate e3 onto u about axis e3 x u
    Vec3 w{e3[1] * u[2] - e3[2] * u[1], e3[2] * u[0] - e3[0] * u[2],
           e3[0] * u[1] - e3[1] * u[0]};
    const double s = norm3(w), c = u[2];
    if (s < 1e-14) {
        if (c > 0) return R;
        // antiparallel: rotate by pi about e1
        R[1][1] = -1.0;
        R[2][2] = -1.0;
        return R;
    }
    const Vec3 k{w[0] / s, w[1] / s, w[2] / s};
    const double K[3][3] = {{0, -k[2], k[1]}, {k[2], 0, -k[0]}, {-k[1], k[0], 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double kk = 0.0;
            for (int l = 0; l < 3; ++l) kk += K[i][l] * K[l][j];
            R[i][j] = (i == j ? 1.0 : 0.0) + s * K[i][j] + (1.0 - c) * kk;
        }
    return R;
}

} // namespace

void BhParams::validate() const {
    if (m < 0.0) throw OutOfRange("BhParams: mass must be nonnegative");
    if (norm3(v) >= 1.0) throw BoostOutOfRange("BhParams: |v| must be < 1");
}

FourMetricJets kerr_schild_4metric(double m, double a_abs, const Vec3& x) {
    const double rho2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    {
        const double rt2 =
            0.5 * (rho2 - a_abs * a_abs +
                   std::sqrt((rho2 - a_abs * a_abs) * (rho2 - a_abs * a_abs) +
                             4.0 * a_abs * a_abs * x[2] * x[2]));
        if (std::sqrt(std::max(rt2, 0.0)) < std::max(0.9 * a_abs, 0.1)) {
            std::ostringstream os;
            os << "kerr_schild_4metric: point too close to the ring singularity"
               << " (rtilde = " << std::sqrt(std::max(rt2, 0.0)) << ")";
            throw NearSingularity(os.str());
        }
    }
    const Jet2 X = Jet2::seed(x[0], 0), Y = Jet2::seed(x[1], 1), Z = Jet2::seed(x[2], 2);
    const Jet2 R2 = X * X + Y * Y + Z * Z;
    const double a2 = a_abs * a_abs;
    const Jet2 D = (R2 - a2) * (R2 - a2) + (4.0 * a2) * (Z * Z);
    const Jet2 rt2 = 0.5 * (R2 - a2 + sqrt(D));
    const Jet2 rt = sqrt(rt2);
    const Jet2 H = (2.0 * m) * rt * rt2 / (rt2 * rt2 + a2 * (Z * Z));
    const Jet2 denom = inverse(rt2 + a2);
    std::array<Jet2, 4> k;
    k[0] = Jet2::constant(1.0);
    k[1] = (rt * X + a_abs * Y) * denom;
    k[2] = (rt * Y - a_abs * X) * denom;
    k[3] = Z / rt;

    FourMetricJets out;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu; nu < 4; ++nu) {
            Jet2 comp = H * k[mu] * k[nu];
            if (mu == nu) comp = comp + Jet2::constant(mu == 0 ? -1.0 : 1.0);
            const int c = ten_index(mu, nu);
            out.g[c] = comp.v;
            out.d1[c] = comp.g;
            out.d2[c] = comp.h;
        }
    return out;
}

namespace {

// generic slice extraction from a 4-metric-with-jets provider
template <typename Provider>
SliceJets slice_from_provider(const Provider& metric_at, const Mat4& M,
                              const std::array<double, 4>& x0, const Vec3& xp) {
    // original coordinates of the slice point
    std::array<double, 4> xx{};
    for (int s = 0; s < 4; ++s) {
        xx[s] = x0[s];
        for (int i = 0; i < 3; ++i) xx[s] += M[s][i + 1] * xp[i];
    }
    FourMetricJets rest = metric_at(Vec3{xx[1], xx[2], xx[3]});

    // transform value/first/second derivatives to the primed frame;
    // the rest metric is stationary, so original time derivatives vanish
    double gp[4][4];
    double dgp[4][4][4];     // dgp[sigma][mu][nu] = d'_sigma g'_{mu nu}
    double ddgp[4][4][3][3]; // dd[mu][nu][k][l] spatial second derivatives
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double v = 0.0;
            for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be)
                    v += M[al][mu] * M[be][nu] * rest.g[ten_index(al, be)];
            gp[mu][nu] = v;
            for (int sig = 0; sig < 4; ++sig) {
                double d = 0.0;
                for (int al = 0; al < 4; ++al)
                    for (int be = 0; be < 4; ++be) {
                        double t = 0.0;
                        for (int rho = 1; rho < 4; ++rho)
                            t += M[rho][sig] * rest.d1[ten_index(al, be)][rho - 1];
                        d += M[al][mu] * M[be][nu] * t;
                    }
                dgp[sig][mu][nu] = d;
            }
            for (int k = 0; k < 3; ++k)
                for (int l = k; l < 3; ++l) {
                    double d = 0.0;
                    for (int al = 0; al < 4; ++al)
                        for (int be = 0; be < 4; ++be) {
                            double t = 0.0;
                            for (int rho = 1; rho < 4; ++rho)
                                for (int lam = 1; lam < 4; ++lam)
                                    t += M[rho][k + 1] * M[lam][l + 1] *
                                         rest.d2[ten_index(al, be)][Jet2::hidx(rho - 1, lam - 1)];
                            d += M[al][mu] * M[be][nu] * t;
                        }
                    ddgp[mu][nu][k][l] = d;
                    ddgp[mu][nu][l][k] = d;
                }
        }

    SliceJets out;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const int c = SymTensorField::sym_index(i, j);
            out.gamma[c] = gp[i + 1][j + 1];
            for (int k = 0; k < 3; ++k) out.dgamma[c][k] = dgp[k + 1][i + 1][j + 1];
            for (int k = 0; k < 3; ++k)
                for (int l = k; l < 3; ++l)
                    out.ddgamma[c][SymTensorField::sym_index(k, l)] =
                        ddgp[i + 1][j + 1][k][l];
        }

    // ADM algebra in first-order jets over the slice coordinates
    J1 G[4][4], dG0[4][4];
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            G[mu][nu].v = gp[mu][nu];
            dG0[mu][nu].v = dgp[0][mu][nu];
            for (int k = 0; k < 3; ++k) {
                G[mu][nu].g[k] = dgp[k + 1][mu][nu];
                // spatial gradient of d'_0 g': mixed second derivatives; the
                // stationarity reduction gives them from spatial rest data
                double t = 0.0;
                for (int al = 0; al < 4; ++al)
                    for (int be = 0; be < 4; ++be) {
                        double s = 0.0;
                        for (int rho = 1; rho < 4; ++rho)
                            for (int lam = 1; lam < 4; ++lam)
                                s += M[rho][0] * M[lam][k + 1] *
                                     rest.d2[ten_index(al, be)][Jet2::hidx(rho - 1, lam - 1)];
                        t += M[al][mu] * M[be][nu] * s;
                    }
                dG0[mu][nu].g[k] = t;
            }
        }

    // inverse spatial metric via adjugate
    J1 gam[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gam[i][j] = G[i + 1][j + 1];
    J1 det = gam[0][0] * (gam[1][1] * gam[2][2] - gam[1][2] * gam[2][1]) -
             gam[0][1] * (gam[1][0] * gam[2][2] - gam[1][2] * gam[2][0]) +
             gam[0][2] * (gam[1][0] * gam[2][1] - gam[1][1] * gam[2][0]);
    J1 idet = inverse(det);
    J1 gi[3][3];
    gi[0][0] = (gam[1][1] * gam[2][2] - gam[1][2] * gam[2][1]) * idet;
    gi[0][1] = (gam[0][2] * gam[2][1] - gam[0][1] * gam[2][2]) * idet;
    gi[0][2] = (gam[0][1] * gam[1][2] - gam[0][2] * gam[1][1]) * idet;
    gi[1][1] = (gam[0][0] * gam[2][2] - gam[0][2] * gam[2][0]) * idet;
    gi[1][2] = (gam[0][2] * gam[1][0] - gam[0][0] * gam[1][2]) * idet;
    gi[2][2] = (gam[0][0] * gam[1][1] - gam[0][1] * gam[1][0]) * idet;
    gi[1][0] = gi[0][1];
    gi[2][0] = gi[0][2];
    gi[2][1] = gi[1][2];

    // lapse and shift
    J1 beta[3];  // beta_i = g'_{0i}
    for (int i = 0; i < 3; ++i) beta[i] = G[0][i + 1];
    J1 beta2 = jc(0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) beta2 = beta2 + gi[i][j] * beta[i] * beta[j];
    J1 N = sqrtj(beta2 - G[0][0]);

    // Christoffels of gamma
    J1 Gam[3][3][3];
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                J1 s = jc(0.0);
                for (int l = 0; l < 3; ++l) {
                    // d_i gamma_jl + d_j gamma_il - d_l gamma_ij as J1
                    J1 dij;
                    dij.v = dgp[i + 1][j + 1][l + 1] + dgp[j + 1][i + 1][l + 1] -
                            dgp[l + 1][i + 1][j + 1];
                    for (int kk = 0; kk < 3; ++kk)
                        dij.g[kk] = ddgp[j + 1][l + 1][i][kk] + ddgp[i + 1][l + 1][j][kk] -
                                    ddgp[i + 1][j + 1][l][kk];
                    s = s + gi[k][l] * dij;
                }
                Gam[k][i][j] = 0.5 * s;
                Gam[k][j][i] = Gam[k][i][j];
            }

    // K_ij = (D_i beta_j + D_j beta_i - d_t gamma_ij) / (2N)
    J1 K[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            J1 dib;  // d_i beta_j
            dib.v = dgp[i + 1][0][j + 1];
            for (int kk = 0; kk < 3; ++kk) dib.g[kk] = ddgp[0][j + 1][i][kk];
            J1 djb;
            djb.v = dgp[j + 1][0][i + 1];
            for (int kk = 0; kk < 3; ++kk) djb.g[kk] = ddgp[0][i + 1][j][kk];
            J1 cov = dib + djb;
            for (int k = 0; k < 3; ++k) cov = cov - 2.0 * (Gam[k][i][j] * beta[k]);
            K[i][j] = (cov - dG0[i + 1][j + 1]) / (2.0 * N);
            K[j][i] = K[i][j];
        }
    J1 trK = jc(0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trK = trK + gi[i][j] * K[i][j];

    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const int c = SymTensorField::sym_index(i, j);
            J1 pi = K[i][j] - trK * gam[i][j];
            out.pi[c] = pi.v;
            out.dpi[c] = pi.g;
        }
    return out;
}

} // namespace

SliceJets kerr_slice(const BhParams& p, const Vec3& xp) {
    p.validate();
    const auto R3 = rotation_to(p.a);
    Mat4 R4 = identity4(), R4inv = identity4();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            R4[i + 1][j + 1] = R3[i][j];
            R4inv[i + 1][j + 1] = R3[j][i];
        }
    const Mat4 Linv = boost_matrix(p.v);
    const Mat4 M = mul(R4inv, Linv);  // dx/dx'
    std::array<double, 4> x0{};       // M x'(=0) - R^{-1} y
    for (int s = 0; s < 4; ++s) {
        x0[s] = 0.0;
        if (s > 0) {
            for (int j = 0; j < 3; ++j) x0[s] -= R3[j][s - 1] * p.y[j];
        }
    }
    const double m = p.m, aa = norm3(p.a);
    return slice_from_provider(
        [m, aa](const Vec3& x) { return kerr_schild_4metric(m, aa, x); }, M, x0, xp);
}

SliceJets isotropic_slice(double m, const Vec3& y, const Vec3& xp) {
    SliceJets out{};
    const Jet2 X = Jet2::seed(xp[0] - y[0], 0), Y = Jet2::seed(xp[1] - y[1], 1),
               Z = Jet2::seed(xp[2] - y[2], 2);
    const Jet2 s = sqrt(X * X + Y * Y + Z * Z);
    if (s.v < 1e-10) throw NearSingularity("isotropic_slice: at the puncture");
    const Jet2 phi = 1.0 + (0.5 * m) / s;
    const Jet2 phi2 = phi * phi;
    const Jet2 conf = phi2 * phi2;
    for (int i = 0; i < 3; ++i) {
        const int c = SymTensorField::sym_index(i, i);
        out.gamma[c] = conf.v;
        out.dgamma[c] = conf.g;
        out.ddgamma[c] = conf.h;
    }
    for (int c : {1, 2, 4}) {
        out.gamma[c] = 0.0;
        out.dgamma[c] = {0, 0, 0};
        out.ddgamma[c] = {0, 0, 0, 0, 0, 0};
    }
    // pi = 0 identically on the static slice
    return out;
}

namespace {

BaseGeometry assemble_geometry(GridPtr grid, const BhParams& p, bool time_symmetric,
                               bool truncate, bool plain_chi) {
    BaseGeometry G;
    G.g = SymTensorField(grid);
    G.pi = SymTensorField(grid);
    G.dg = TensorDerivs(grid, true);
    G.dpi = TensorDerivs(grid, false);
    const double lam = plain_chi ? 1.0 : p.lambda();
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir) {
        const double rr = grid->r(ir);
        const double cv = truncate ? chi(rr / lam) : 1.0;
        if (truncate && cv == 0.0) {
            for (int ia = 0; ia < na; ++ia) {
                const int idx = ir * na + ia;
                for (int i = 0; i < 3; ++i) G.g(i, i).values()[idx] = 1.0;
            }
            continue;
        }
        const double cp = truncate ? chi_prime(rr / lam) / lam : 0.0;
        // second derivative of the cutoff profile by exact differentiation of
        // the smooth step
        const double h = 1e-6;
        const double cpp = truncate
                               ? (chi_prime((rr + h) / lam) - chi_prime((rr - h) / lam)) /
                                     (2.0 * h * lam)
                               : 0.0;
        for (int ia = 0; ia < na; ++ia) {
            const int idx = ir * na + ia;
            const auto pt = grid->point(ir, ia);
            const Vec3 x{pt[0], pt[1], pt[2]};
            const Vec3 n{pt[0] / rr, pt[1] / rr, pt[2] / rr};
            SliceJets S = time_symmetric ? isotropic_slice(p.m, p.y, x)
                                         : kerr_slice(p, x);
            for (int c = 0; c < 6; ++c) {
                const int i = c < 3 ? 0 : (c < 5 ? 1 : 2);
                const int j = c == 0 ? 0 : (c == 1 ? 1 : (c == 2 ? 2 : (c == 3 ? 1 : (c == 4 ? 2 : 2))));
                const double eij = (i == j) ? 1.0 : 0.0;
                const double dev = S.gamma[c] - eij;
                G.g.component(c).values()[idx] = eij + cv * dev;
                G.pi.component(c).values()[idx] = cv * S.pi[c];
                for (int k = 0; k < 3; ++k) {
                    G.dg.d1[k].component(c).values()[idx] =
                        cp * n[k] * dev + cv * S.dgamma[c][k];
                    G.dpi.d1[k].component(c).values()[idx] =
                        cp * n[k] * S.pi[c] + cv * S.dpi[c][k];
                }
                for (int k = 0; k < 3; ++k)
                    for (int l = k; l < 3; ++l) {
                        const int kl = SymTensorField::sym_index(k, l);
                        const double nknl = n[k] * n[l];
                        const double proj = ((k == l ? 1.0 : 0.0) - nknl) / rr;
                        G.dg.d2[kl].component(c).values()[idx] =
                            cpp * nknl * dev + cp * proj * dev +
                            cp * (n[k] * S.dgamma[c][l] + n[l] * S.dgamma[c][k]) +
                            cv * S.ddgamma[c][kl];
                    }
            }
        }
    }
    return G;
}

} // namespace

BaseGeometry induced_geometry(const BhParams& p, GridPtr grid, bool time_symmetric) {
    return assemble_geometry(grid, p, time_symmetric, false, false);
}

DataSet induced_data(const BhParams& p, GridPtr grid, bool time_symmetric) {
    auto G = induced_geometry(p, grid, time_symmetric);
    return DataSet{std::move(G.g), std::move(G.pi)};
}

BaseGeometry truncated_geometry(const BhParams& p, GridPtr grid, bool time_symmetric,
                                bool plain_chi) {
    if (p.m == 0.0) {
        BaseGeometry G;
        G.g = SymTensorField::euclidean(grid);
        G.pi = SymTensorField(grid);
        G.dg = TensorDerivs(grid, true);
        G.dpi = TensorDerivs(grid, false);
        return G;
    }
    return assemble_geometry(grid, p, time_symmetric, true, plain_chi);
}

DataSet truncated_data(const BhParams& p, GridPtr grid, bool time_symmetric,
                       bool plain_chi) {
    auto G = truncated_geometry(p, grid, time_symmetric, plain_chi);
    return DataSet{std::move(G.g), std::move(G.pi)};
}

// ---------------------------------------------------------------------------
// charges

namespace {

struct ChargeAtRadius {
    double E;
    Vec3 P, J, C;
};

ChargeAtRadius charges_at(const BaseGeometry& G, double R) {
    GridPtr grid = G.g.grid();
    const int na = grid->n_ang();
    // slice all needed fields to radius R
    std::array<Eigen::VectorXd, 6> gs, pis;
    std::array<std::array<Eigen::VectorXd, 6>, 3> dgs;
    for (int c = 0; c < 6; ++c) {
        gs[c] = grid->angular_slice(G.g.component(c), R);
        pis[c] = grid->angular_slice(G.pi.component(c), R);
        for (int k = 0; k < 3; ++k)
            dgs[k][c] = grid->angular_slice(G.dg.d1[k].component(c), R);
    }
    ChargeAtRadius out{0.0, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    const auto& w = grid->w_ang();
    for (int ia = 0; ia < na; ++ia) {
        const auto n = grid->direction(ia);
        const Vec3 x{R * n[0], R * n[1], R * n[2]};
        auto gv = [&](int i, int j) { return gs[SymTensorField::sym_index(i, j)][ia]; };
        auto piv = [&](int i, int j) { return pis[SymTensorField::sym_index(i, j)][ia]; };
        auto dgv = [&](int k, int i, int j) {
            return dgs[k][SymTensorField::sym_index(i, j)][ia];
        };
        // nu . (div g - grad tr g)
        double flux = 0.0;
        for (int j = 0; j < 3; ++j) {
            double divg = 0.0, dtr = 0.0;
            for (int i = 0; i < 3; ++i) {
                divg += dgv(i, i, j);
                dtr += dgv(j, i, i);
            }
            flux += n[j] * (divg - dtr);
        }
        const double dA = w[ia] * R * R;
        out.E += flux * dA;
        double trg = gv(0, 0) + gv(1, 1) + gv(2, 2);
        for (int i = 0; i < 3; ++i) {
            double pin = 0.0, gn = 0.0;
            for (int j = 0; j < 3; ++j) {
                pin += piv(i, j) * n[j];
                gn += gv(i, j) * n[j];
            }
            out.P[i] += pin * dA;
            out.C[i] += (x[i] * flux - (gn - n[i] * trg)) * dA;
        }
        // J_k = (1/8pi) oint pi(Omega^-_{ab}, nu), eps_{kab} = 1
        static constexpr int ax[3][2] = {{1, 2}, {2, 0}, {0, 1}};
        for (int k = 0; k < 3; ++k) {
            const int a = ax[k][0], b = ax[k][1];
            double rot = 0.0;
            for (int j = 0; j < 3; ++j)
                rot += (x[a] * piv(b, j) - x[b] * piv(a, j)) * n[j];
            out.J[k] += rot * dA;
        }
    }
    out.E /= 16.0 * M_PI;
    for (int i = 0; i < 3; ++i) {
        out.P[i] /= 8.0 * M_PI;
        out.J[i] /= 8.0 * M_PI;
        out.C[i] /= 16.0 * M_PI;
    }
    return out;
}

// least-squares fit c0 + c1/R + c2/R^2, returning c0
double extrapolate(const std::vector<double>& Rs, const std::vector<double>& vals) {
    const int n = static_cast<int>(Rs.size());
    if (n == 1) return vals[0];
    const int terms = std::min(3, n);
    Eigen::MatrixXd A(n, terms);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        double t = 1.0;
        for (int j = 0; j < terms; ++j) {
            A(i, j) = t;
            t /= Rs[i];
        }
        b[i] = vals[i];
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    return c[0];
}

} // namespace

std::string ChargeTable::to_text() const {
    std::ostringstream os;
    os.precision(12);
    os << "E: " << E << "\n";
    os << "P: " << P[0] << " " << P[1] << " " << P[2] << "\n";
    os << "J: " << J[0] << " " << J[1] << " " << J[2] << "\n";
    os << "C: " << C[0] << " " << C[1] << " " << C[2] << "\n";
    return os.str();
}

ChargeTable adm_charges(const BaseGeometry& G, const std::vector<double>& radii) {
    GridPtr grid = G.g.grid();
    ChargeTable out;
    std::vector<double> Rs;
    std::vector<std::array<double, 10>> rows;
    for (double R : radii) {
        if (R < grid->r_min() || R > grid->r_out())
            throw OutOfRange("adm_charges: radius outside grid");
        auto c = charges_at(G, R);
        Rs.push_back(R);
        rows.push_back({c.E, c.P[0], c.P[1], c.P[2], c.J[0], c.J[1], c.J[2],
                        c.C[0], c.C[1], c.C[2]});
        out.per_radius.push_back({R, c.E, c.P[0], c.P[1], c.P[2], c.J[0], c.J[1],
                                  c.J[2], c.C[0], c.C[1], c.C[2]});
    }
    auto col = [&](int j) {
        std::vector<double> v;
        for (const auto& r : rows) v.push_back(r[j]);
        return v;
    };
    out.E = extrapolate(Rs, col(0));
    for (int i = 0; i < 3; ++i) {
        out.P[i] = extrapolate(Rs, col(1 + i));
        out.J[i] = extrapolate(Rs, col(4 + i));
        out.C[i] = extrapolate(Rs, col(7 + i));
    }
    // parameter reading
    if (std::abs(out.E) > 1e-300) {
        for (int i = 0; i < 3; ++i) out.v_est[i] = -out.P[i] / out.E;
        const double v2 = out.v_est[0] * out.v_est[0] + out.v_est[1] * out.v_est[1] +
                          out.v_est[2] * out.v_est[2];
        if (v2 < 1.0) {
            const double gam = 1.0 / std::sqrt(1.0 - v2);
            out.m_est = out.E / gam;
            // solve the linear system for (y, a)
            Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
            Eigen::Matrix<double, 6, 1> b;
            auto eps = [](int i, int j, int k) {
                return (i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
                               (i == 2 && j == 0 && k == 1)
                           ? 1.0
                           : ((i == 2 && j == 1 && k == 0) || (i == 0 && j == 2 && k == 1) ||
                                      (i == 1 && j == 0 && k == 2)
                                  ? -1.0
                                  : 0.0);
            };
            // exact composition laws of the boosted spinning translated slice:
            //   J = m a_par + gamma m a_perp + y x P
            //   C = m y_par + gamma m y_perp + gamma m (a x v)
            for (int k = 0; k < 3; ++k) {
                for (int i = 0; i < 3; ++i) {
                    double proj = 0.0;
                    if (v2 > 1e-28) proj = out.v_est[k] * out.v_est[i] / v2;
                    const double idm = (k == i) ? 1.0 : 0.0;
                    const double mblock = out.m_est * proj + gam * out.m_est * (idm - proj);
                    // J row: y cross P  +  m-block a
                    double yxp = 0.0, axv = 0.0;
                    for (int j = 0; j < 3; ++j) {
                        yxp += eps(k, i, j) * out.P[j];
                        axv += eps(k, i, j) * out.v_est[j];
                    }
                    A(k, i) += yxp;
                    A(k, 3 + i) += mblock;
                    // C row: m-block y  +  gamma m (a x v)
                    A(3 + k, i) += mblock;
                    A(3 + k, 3 + i) += gam * out.m_est * axv;
                }
                b(k) = out.J[k];
                b(3 + k) = out.C[k];
            }
            Eigen::Matrix<double, 6, 1> sol = A.colPivHouseholderQr().solve(b);
            for (int i = 0; i < 3; ++i) {
                out.y_est[i] = sol(i);
                out.a_est[i] = sol(3 + i);
            }
        }
    }
    return out;
}

ChargeTable adm_charges(const DataSet& d, const std::vector<double>& radii) {
    return adm_charges(make_geometry(d), radii);
}

ChargeProjections charge_projections(const BaseGeometry& trunc) {
    GridPtr grid = trunc.g.grid();
    auto [H, M] = constraint_operator(trunc);
    ChargeProjections out;
    ScalarField one(grid);
    one.values().setOnes();
    out.H_1 = grid->volume_integral_decaying(H * one);
    for (int k = 0; k < 3; ++k)
        out.M_W[k] = grid->volume_integral_decaying(M[k] * one);
    for (int k = 0; k < 3; ++k) {
        ScalarField xk = ScalarField::sample(grid, [k](double x, double y, double z) {
            const double p[3] = {x, y, z};
            return p[k];
        });
        out.H_x[k] = grid->volume_integral_decaying(H * xk);
    }
    static constexpr int ax[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (int k = 0; k < 3; ++k) {
        const int a = ax[k][0], b = ax[k][1];
        auto om = eval_omega(grid, a, b, -1);
        ScalarField prod = M[0] * om[0] + M[1] * om[1] + M[2] * om[2];
        out.M_Om[k] = grid->volume_integral_decaying(prod);
    }
    return out;
}

} // namespace eidg
