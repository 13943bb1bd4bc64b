#include "eidg/correctors.hpp"

#include "eidg/errors.hpp"
#include "eidg/poisson.hpp"

#include <cmath>
#include <functional>

namespace eidg {

namespace {

// composite Gauss-Legendre quadrature of w(r) r^p over [lo, hi]
double radial_moment(const std::function<double(double)>& w, double lo, double hi,
                     int p) {
    static const std::array<double, 10> gx = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
        -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
        0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
        0.9739065285171717};
    static const std::array<double, 10> gw = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
        0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
        0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
        0.0666713443086881};
    const int panels = 80;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double a = lo + (hi - lo) * k / panels;
        const double b = lo + (hi - lo) * (k + 1) / panels;
        for (int i = 0; i < 10; ++i) {
            const double r = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
            total += 0.5 * (b - a) * gw[i] * w(r) * std::pow(r, p);
        }
    }
    return total;
}

// int w(r) P(x) r^{extra} dx over R^3, with P polynomial and w supported in
// [lo, hi]; exact in the angular directions
double weighted_poly_integral(const std::function<double(double)>& w, double lo,
                              double hi, const Poly3& P, int extra) {
    auto moments = P.angular_moments();
    double total = 0.0;
    for (const auto& [deg, ang] : moments) {
        if (ang == 0.0) continue;
        total += ang * radial_moment(w, lo, hi, deg + extra + 2);
    }
    return total;
}

Poly3 double_dot(const PolySym& A, const PolySym& B) {
    Poly3 out;
    for (int c = 0; c < 6; ++c) {
        const double mult = (c == 0 || c == 3 || c == 5) ? 1.0 : 2.0;
        out += (A[c] * B[c]) * mult;
    }
    return out;
}

std::array<PolySym, 3> poly_d1(const PolySym& K) {
    std::array<PolySym, 3> d;
    for (int k = 0; k < 3; ++k)
        for (int c = 0; c < 6; ++c) d[k][c] = K[c].derivative(k);
    return d;
}

std::array<PolySym, 6> poly_d2(const PolySym& K) {
    std::array<PolySym, 6> d;
    for (int k = 0; k < 3; ++k)
        for (int l = k; l < 3; ++l)
            for (int c = 0; c < 6; ++c)
                d[SymTensorField::sym_index(k, l)][c] =
                    K[c].derivative(k).derivative(l);
    return d;
}

double cond_number(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

// Distinct smooth radial profiles on [1,10]: mu(r) ((r-1)/9)^d.  A shared
// profile makes the (Delta tr + div div) images of the xyz-permuted
// divergence-free elements exactly collinear, which would break the
// uniqueness pairings; per-element modulation restores independence while
// staying wide enough for the collocation grid.
RadialProfile modulated_mu(int degree) {
    RadialProfile base = corrector_mu();
    if (degree == 0) return base;
    RadialProfile p;
    p.support_lo = base.support_lo;
    p.support_hi = base.support_hi;
    const double w = base.support_hi - base.support_lo;
    const double lo = base.support_lo;
    auto tpow = [degree](double t) { return std::pow(t, degree); };
    auto dtpow = [degree](double t) { return degree * std::pow(t, degree - 1); };
    auto ddtpow = [degree](double t) {
        return degree <= 1 ? 0.0 : degree * (degree - 1) * std::pow(t, degree - 2);
    };
    p.f = [=](double r) { return base.f(r) * tpow((r - lo) / w); };
    p.df = [=](double r) {
        const double t = (r - lo) / w;
        return base.df(r) * tpow(t) + base.f(r) * dtpow(t) / w;
    };
    p.d2f = [=](double r) {
        const double t = (r - lo) / w;
        return base.d2f(r) * tpow(t) + 2.0 * base.df(r) * dtpow(t) / w +
               base.f(r) * ddtpow(t) / (w * w);
    };
    return p;
}

std::vector<std::string> z_labels(int q) {
    std::vector<std::string> out;
    if (q >= 2) {
        for (int a = 0; a < 3; ++a) out.push_back(omega_key(a, a, +1));
        out.push_back(omega_key(0, 1, +1));
        out.push_back(omega_key(0, 2, +1));
        out.push_back(omega_key(1, 2, +1));
    }
    for (int j = 3; j <= q; ++j)
        for (int ell = -(j - 1); ell <= j - 1; ++ell)
            for (int k = 0; k < 3; ++k) out.push_back(W_key(j, ell, k));
    return out;
}

PolyVec z_field(const std::string& label, int q) {
    // reconstruct the vector field from its label position
    std::vector<std::string> labels = z_labels(q);
    int pos = -1;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) pos = static_cast<int>(i);
    if (pos < 0) throw OutOfRange("z_field: unknown label " + label);
    if (pos < 6) {
        static constexpr int ab[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
        return omega_poly(ab[pos][0], ab[pos][1], +1);
    }
    int idx = pos - 6;
    for (int j = 3; j <= q; ++j)
        for (int ell = -(j - 1); ell <= j - 1; ++ell)
            for (int k = 0; k < 3; ++k) {
                if (idx == 0) return W_poly(j, ell, k);
                --idx;
            }
    throw OutOfRange("z_field: label out of range");
}

} // namespace

CorrectorBasis build_basis(int q, const CorrectorOptions& opt) {
    if (q < 1) throw OutOfRange("build_basis: q must be >= 1");
    CorrectorBasis B;
    B.q = q;
    const RadialProfile mu = corrector_mu();

    // A_q family: h_{j,l} = mu DH*(w_{j,l}) = mu Hess w_{j,l}, 3 <= j <= q
    for (int j = 3; j <= q; ++j)
        for (int ell = -(j - 1); ell <= j - 1; ++ell) {
            CorrectorElement e;
            e.K = adjoint_H_poly(w_poly(j, ell));
            e.dK = poly_d1(e.K);
            e.d2K = poly_d2(e.K);
            e.mu = mu;
            e.label = "h_" + std::to_string(j) + "," + std::to_string(ell);
            const double nrm = weighted_poly_integral(mu.f, mu.support_lo,
                                                      mu.support_hi,
                                                      double_dot(e.K, e.K), 0);
            e.scale = 1.0 / std::sqrt(nrm);
            B.h.push_back(std::move(e));
            B.h_idx.push_back({j, ell});
        }

    // B_q family: varpi_Z = profile * DM*(Z)
    B.pi_labels = z_labels(q);
    const int N = static_cast<int>(B.pi_labels.size());

    auto assemble_pi = [&](int n_plateau) {
        B.pi.clear();
        for (int i = 0; i < N; ++i) {
            CorrectorElement e;
            e.K = adjoint_M_poly(z_field(B.pi_labels[i], q));
            e.dK = poly_d1(e.K);
            e.d2K = poly_d2(e.K);
            e.mu = (opt.mode == CorrectorProfileMode::Nested)
                       ? corrector_mu_nk(n_plateau, i + 1)
                       : modulated_mu(i % 7);
            e.label = B.pi_labels[i];
            const double nrm = weighted_poly_integral(
                e.mu.f, e.mu.support_lo, e.mu.support_hi, double_dot(e.K, e.K), 0);
            e.scale = 1.0 / std::sqrt(nrm);
            B.pi.push_back(std::move(e));
        }
        // gram_pi(i,j) = <varpi_i, DM*(Z_j)>, each column normalized by the
        // same element scale to keep the matrix near unit diagonal
        B.gram_pi.resize(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                const Poly3 dd = double_dot(B.pi[i].K, B.pi[j].K);
                B.gram_pi(i, j) = B.pi[i].scale * B.pi[j].scale *
                                  weighted_poly_integral(B.pi[i].mu.f,
                                                         B.pi[i].mu.support_lo,
                                                         B.pi[i].mu.support_hi, dd, 0);
            }
        B.cond_pi = cond_number(B.gram_pi);
    };

    // gram_h
    const int Nh = static_cast<int>(B.h.size());
    B.gram_h.resize(Nh, Nh);
    for (int i = 0; i < Nh; ++i)
        for (int j = 0; j < Nh; ++j) {
            const Poly3 dd = double_dot(B.h[i].K, B.h[j].K);
            B.gram_h(i, j) = B.h[i].scale * B.h[j].scale *
                             weighted_poly_integral(mu.f, mu.support_lo,
                                                    mu.support_hi, dd, 0);
        }
    B.cond_h = cond_number(B.gram_h);
    if (B.cond_h > opt.cond_threshold)
        throw ConditioningFailure("build_basis: A_q Gram condition " +
                                  std::to_string(B.cond_h));

    if (N > 0) {
        if (opt.mode == CorrectorProfileMode::Smooth) {
            assemble_pi(0);
            if (B.cond_pi > opt.cond_threshold)
                throw ConditioningFailure("build_basis: B_q Gram condition " +
                                          std::to_string(B.cond_pi));
        } else {
            bool ok = false;
            for (int n = 4; n <= opt.n_max; n *= 2) {
                assemble_pi(n);
                if (B.cond_pi <= opt.cond_threshold) {
                    B.n_used = n;
                    ok = true;
                    break;
                }
            }
            if (!ok)
                throw ConditioningFailure(
                    "build_basis: no plateau index reached the target condition");
        }
    }
    return B;
}

CorrectorCoeffs solve_corrector(const CorrectorBasis& basis,
                                const Eigen::VectorXd& targets_h,
                                const Eigen::VectorXd& targets_pi) {
    CorrectorCoeffs out;
    const int Nh = static_cast<int>(basis.h.size());
    const int Np = static_cast<int>(basis.pi.size());
    if (targets_h.size() != Nh || targets_pi.size() != Np)
        throw OutOfRange("solve_corrector: target sizes do not match the basis");
    // gram columns carry the normalization scale of the adjoint target, so
    // the raw targets are scaled onto the same footing before solving
    //   sum_i c_i gram(i,j) = scale_j * target_j .
    if (Nh > 0) {
        Eigen::VectorXd rhs(Nh);
        for (int j = 0; j < Nh; ++j) rhs[j] = basis.h[j].scale * targets_h[j];
        out.g = basis.gram_h.transpose().partialPivLu().solve(rhs);
    } else {
        out.g.resize(0);
    }
    if (Np > 0) {
        Eigen::VectorXd rhs(Np);
        for (int j = 0; j < Np; ++j) rhs[j] = basis.pi[j].scale * targets_pi[j];
        out.pi = basis.gram_pi.transpose().partialPivLu().solve(rhs);
    } else {
        out.pi.resize(0);
    }
    return out;
}

namespace {

const std::vector<CorrectorElement>& family(const CorrectorBasis& b, bool pi_family) {
    return pi_family ? b.pi : b.h;
}

} // namespace

SymTensorField corrector_field(const CorrectorBasis& basis, bool pi_family,
                               const Eigen::VectorXd& coeffs, GridPtr grid) {
    SymTensorField out(grid);
    const auto& els = family(basis, pi_family);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir) {
        const double rr = grid->r(ir);
        bool active = false;
        for (const auto& e : els)
            if (rr > e.mu.support_lo && rr < e.mu.support_hi) active = true;
        if (!active) continue;
        for (int ia = 0; ia < na; ++ia) {
            const auto p = grid->point(ir, ia);
            for (size_t i = 0; i < els.size(); ++i) {
                const auto& e = els[i];
                const double muv = e.mu.f(rr);
                if (muv == 0.0) continue;
                const double cs = coeffs[i] * e.scale * muv;
                for (int c = 0; c < 6; ++c)
                    out.component(c).values()[ir * na + ia] +=
                        cs * e.K[c].eval(p[0], p[1], p[2]);
            }
        }
    }
    return out;
}

std::pair<SymTensorField, TensorDerivs> corrector_field_and_kit(
    const CorrectorBasis& basis, bool pi_family, const Eigen::VectorXd& coeffs,
    GridPtr grid) {
    SymTensorField F(grid);
    TensorDerivs D(grid, true);
    const auto& els = family(basis, pi_family);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir) {
        const double rr = grid->r(ir);
        bool active = false;
        for (const auto& e : els)
            if (rr > e.mu.support_lo && rr < e.mu.support_hi) active = true;
        if (!active) continue;
        for (int ia = 0; ia < na; ++ia) {
            const auto p = grid->point(ir, ia);
            const double n[3] = {p[0] / rr, p[1] / rr, p[2] / rr};
            const int idx = ir * na + ia;
            for (size_t i = 0; i < els.size(); ++i) {
                const auto& e = els[i];
                if (rr <= e.mu.support_lo || rr >= e.mu.support_hi) continue;
                const double cs = coeffs[i] * e.scale;
                const double muv = e.mu.f(rr), mud = e.mu.df(rr), mudd = e.mu.d2f(rr);
                for (int c = 0; c < 6; ++c) {
                    const double Kv = e.K[c].eval(p[0], p[1], p[2]);
                    double dK[3];
                    for (int k = 0; k < 3; ++k)
                        dK[k] = e.dK[k][c].eval(p[0], p[1], p[2]);
                    F.component(c).values()[idx] += cs * muv * Kv;
                    for (int k = 0; k < 3; ++k)
                        D.d1[k].component(c).values()[idx] +=
                            cs * (mud * n[k] * Kv + muv * dK[k]);
                    for (int k = 0; k < 3; ++k)
                        for (int l = k; l < 3; ++l) {
                            const int kl = SymTensorField::sym_index(k, l);
                            const double proj =
                                ((k == l ? 1.0 : 0.0) - n[k] * n[l]) / rr;
                            D.d2[kl].component(c).values()[idx] +=
                                cs * (mudd * n[k] * n[l] * Kv + mud * proj * Kv +
                                      mud * (n[k] * dK[l] + n[l] * dK[k]) +
                                      muv * e.d2K[kl][c].eval(p[0], p[1], p[2]));
                        }
                }
            }
        }
    }
    return {std::move(F), std::move(D)};
}

double corrector_sup_norm(const CorrectorBasis& basis, bool pi_family,
                          const Eigen::VectorXd& coeffs, int order) {
    const auto& els = family(basis, pi_family);
    if (els.empty() || coeffs.size() == 0) return 0.0;
    // fixed deterministic sample: 160 radii x 14 directions
    static const std::array<std::array<double, 3>, 14> dirs = {{
        {1, 0, 0},   {-1, 0, 0},  {0, 1, 0},   {0, -1, 0},  {0, 0, 1},
        {0, 0, -1},  {0.5773502691896258, 0.5773502691896258, 0.5773502691896258},
        {-0.5773502691896258, 0.5773502691896258, 0.5773502691896258},
        {0.5773502691896258, -0.5773502691896258, 0.5773502691896258},
        {0.5773502691896258, 0.5773502691896258, -0.5773502691896258},
        {0.7071067811865476, 0.7071067811865476, 0},
        {0.7071067811865476, 0, 0.7071067811865476},
        {0, 0.7071067811865476, 0.7071067811865476},
        {0.6, 0.48, 0.64},
    }};
    double lo = 1e300, hi = -1e300;
    for (const auto& e : els) {
        lo = std::min(lo, e.mu.support_lo);
        hi = std::max(hi, e.mu.support_hi);
    }
    double worst = 0.0;
    for (int irr = 0; irr <= 160; ++irr) {
        const double rr = lo + (hi - lo) * irr / 160.0;
        for (const auto& d : dirs) {
            const double x = rr * d[0], y = rr * d[1], z = rr * d[2];
            double v0 = 0.0, v1 = 0.0, v2 = 0.0;
            for (size_t i = 0; i < els.size(); ++i) {
                const auto& e = els[i];
                if (rr <= e.mu.support_lo || rr >= e.mu.support_hi) continue;
                const double cs = coeffs[i] * e.scale;
                const double muv = e.mu.f(rr), mud = e.mu.df(rr), mudd = e.mu.d2f(rr);
                for (int c = 0; c < 6; ++c) {
                    const double Kv = e.K[c].eval(x, y, z);
                    v0 = std::max(v0, std::abs(cs * muv * Kv));
                    if (order >= 1)
                        for (int k = 0; k < 3; ++k) {
                            const double dK = e.dK[k][c].eval(x, y, z);
                            v1 = std::max(v1, std::abs(cs * (mud * d[k] * Kv +
                                                             muv * dK)));
                        }
                    if (order >= 2)
                        for (int k = 0; k < 3; ++k)
                            for (int l = k; l < 3; ++l) {
                                const int kl = SymTensorField::sym_index(k, l);
                                const double proj =
                                    ((k == l ? 1.0 : 0.0) - d[k] * d[l]) / rr;
                                const double dKl = e.dK[l][c].eval(x, y, z);
                                const double dKk = e.dK[k][c].eval(x, y, z);
                                const double v =
                                    cs * (mudd * d[k] * d[l] * Kv + mud * proj * Kv +
                                          mud * (d[k] * dKl + d[l] * dKk) +
                                          muv * e.d2K[kl][c].eval(x, y, z));
                                v2 = std::max(v2, std::abs(v));
                            }
                }
            }
            worst = std::max(worst, v0 + v1 + v2);
        }
    }
    return worst;
}

double div_family_sigma_min(const CorrectorBasis& basis) {
    const int N = static_cast<int>(basis.h.size());
    if (N == 0) return 1.0;
    // div h_i = mu' (K_i . n)   (div K_i = grad(Delta w) = 0)
    // <div h_i, div h_j> = int mu'^2 [K_i^T K_j](x,x)/r^2 dx
    Eigen::MatrixXd G(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            Poly3 P;
            for (int aa = 0; aa < 3; ++aa)
                for (int bb = 0; bb < 3; ++bb) {
                    Poly3 t;
                    for (int cc = 0; cc < 3; ++cc)
                        t += basis.h[i].K[SymTensorField::sym_index(cc, aa)] *
                             basis.h[j].K[SymTensorField::sym_index(cc, bb)];
                    P += t * Poly3::var(aa) * Poly3::var(bb);
                }
            const auto& mu = basis.h[i].mu;
            auto w2 = [&mu](double r) { return mu.df(r) * mu.df(r); };
            G(i, j) = basis.h[i].scale * basis.h[j].scale *
                      weighted_poly_integral(w2, mu.support_lo, mu.support_hi, P, -2);
        }
    // normalize rows/cols by the diagonal
    for (int i = 0; i < N; ++i)
        if (G(i, i) <= 0) return 0.0;
    Eigen::VectorXd d = G.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd Gn = d.asDiagonal() * G * d.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Gn);
    return svd.singularValues()(N - 1);
}

double ddtr_family_sigma_min(const CorrectorBasis& basis) {
    const int N = static_cast<int>(basis.pi.size());
    if (N == 0) return 1.0;
    // (Delta tr + div div)(mu K) with Delta tr K = div div K = 0:
    //   F = mu' [ 2 x.grad(trK) + 2 x.divK + 3 trK ] / r  -  mu' (xKx)/r^3
    //     + mu'' [ trK + (xKx)/r^2 ]
    // assembled as numerator polynomials against radial powers
    struct Parts {
        Poly3 q1;  // weight mu'(r)/r
        Poly3 q3;  // weight mu'(r)/r^3
        Poly3 p0;  // weight mu''(r)
        Poly3 p2;  // weight mu''(r)/r^2
    };
    std::vector<Parts> parts(N);
    for (int i = 0; i < N; ++i) {
        const auto& K = basis.pi[i].K;
        Poly3 trK = K[0] + K[3] + K[5];
        Poly3 xgrad;
        for (int k = 0; k < 3; ++k) xgrad += Poly3::var(k) * trK.derivative(k);
        Poly3 xdiv;
        for (int k = 0; k < 3; ++k) {
            Poly3 divk;
            for (int j = 0; j < 3; ++j)
                divk += K[SymTensorField::sym_index(j, k)].derivative(j);
            xdiv += Poly3::var(k) * divk;
        }
        Poly3 xKx;
        for (int aa = 0; aa < 3; ++aa)
            for (int bb = 0; bb < 3; ++bb)
                xKx += K[SymTensorField::sym_index(aa, bb)] * Poly3::var(aa) *
                       Poly3::var(bb);
        parts[i].q1 = xgrad * 2.0 + xdiv * 2.0 + trK * 3.0;
        parts[i].q3 = xKx * (-1.0);
        parts[i].p0 = trK;
        parts[i].p2 = xKx;
    }
    Eigen::MatrixXd G(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const auto& mi = basis.pi[i].mu;
            const auto& mj = basis.pi[j].mu;
            const double lo = std::max(mi.support_lo, mj.support_lo);
            const double hi = std::min(mi.support_hi, mj.support_hi);
            double acc = 0.0;
            if (lo < hi) {
                auto term = [&](const Poly3& A, const Poly3& B, int pa, int pb,
                                bool da, bool dda, bool db, bool ddb) {
                    auto w = [&](double r) {
                        const double wa = dda ? mi.d2f(r) : (da ? mi.df(r) : mi.f(r));
                        const double wb = ddb ? mj.d2f(r) : (db ? mj.df(r) : mj.f(r));
                        return wa * wb;
                    };
                    acc += weighted_poly_integral(w, lo, hi, A * B, pa + pb);
                };
                // (mu' q1/r + mu' q3/r^3 + mu'' p0 + mu'' p2/r^2) x same for j
                term(parts[i].q1, parts[j].q1, -1, -1, true, false, true, false);
                term(parts[i].q1, parts[j].q3, -1, -3, true, false, true, false);
                term(parts[i].q3, parts[j].q1, -3, -1, true, false, true, false);
                term(parts[i].q3, parts[j].q3, -3, -3, true, false, true, false);
                term(parts[i].q1, parts[j].p0, -1, 0, true, false, false, true);
                term(parts[i].q1, parts[j].p2, -1, -2, true, false, false, true);
                term(parts[i].q3, parts[j].p0, -3, 0, true, false, false, true);
                term(parts[i].q3, parts[j].p2, -3, -2, true, false, false, true);
                term(parts[i].p0, parts[j].q1, 0, -1, false, true, true, false);
                term(parts[i].p0, parts[j].q3, 0, -3, false, true, true, false);
                term(parts[i].p2, parts[j].q1, -2, -1, false, true, true, false);
                term(parts[i].p2, parts[j].q3, -2, -3, false, true, true, false);
                term(parts[i].p0, parts[j].p0, 0, 0, false, true, false, true);
                term(parts[i].p0, parts[j].p2, 0, -2, false, true, false, true);
                term(parts[i].p2, parts[j].p0, -2, 0, false, true, false, true);
                term(parts[i].p2, parts[j].p2, -2, -2, false, true, false, true);
            }
            G(i, j) = acc;
        }
    for (int i = 0; i < N; ++i)
        if (G(i, i) <= 0) return 0.0;
    Eigen::VectorXd d = G.diagonal().array().sqrt().inverse();
    Eigen::MatrixXd Gn = d.asDiagonal() * G * d.asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Gn);
    return svd.singularValues()(N - 1);
}

} // namespace eidg
