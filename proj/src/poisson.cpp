#include "eidg/poisson.hpp"

#include "eidg/basis.hpp"
#include "eidg/errors.hpp"

#include <cmath>
#include <sstream>

namespace eidg {

namespace {

constexpr double kFourPi = 4.0 * M_PI;

struct GaussRule {
    Eigen::VectorXd x, w;  // on [-1,1]
};

GaussRule gauss_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
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
        r.x[i] = t;
        r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return r;
}

// power-law fit |f| ~ |f_end| (r/r_end)^{-p} over the last decade of radii
struct TailFit {
    double p = 0.0;
    double f_end = 0.0;
    bool negligible = true;
};

TailFit fit_tail(const SphericalGrid& g, const Eigen::VectorXd& prof) {
    TailFit tf;
    const double r_hi = g.r_out(), r_lo = r_hi / 10.0;
    const double fmax = prof.cwiseAbs().maxCoeff();
    tf.f_end = prof[g.n_r() - 1];
    if (fmax <= 0.0 || std::abs(tf.f_end) < 1e-14 * fmax) return tf;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int ir = 0; ir < g.n_r(); ++ir) {
        const double rr = g.r(ir);
        if (rr < r_lo || rr > r_hi) continue;
        const double a = std::abs(prof[ir]);
        if (a < 1e-14 * fmax) continue;
        const double x = std::log(rr), y = std::log(a);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 4) return tf;
    tf.p = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    tf.p = std::clamp(tf.p, 0.5, 40.0);
    tf.negligible = false;
    return tf;
}

struct ModeSolve {
    Eigen::VectorXd u;
    double inner_moment = 0.0;  // int_0^{r_out} f s^{l+2} ds
    double tail_q = 0.0;        // magnitude of the extrapolated outer tail
};

// Radial Green quadrature for the decaying solution of
//   u'' + 2u'/r - l(l+1)u/r^2 = f :
//   u = -(2l+1)^{-1}[ r^{-l-1} int_0^r f s^{l+2} ds + r^l int_r^inf f s^{1-l} ds ].
// Shell recurrences keep every radial power as a ratio <= 1 so high l stays
// well scaled on the full radial range.
ModeSolve solve_mode(const SphericalGrid& g, int l, const Eigen::VectorXd& prof,
                     const GaussRule& gr) {
    const int n = g.n_r();
    ModeSolve out;
    out.u.setZero(n);

    std::vector<double> edges(n + 2);
    edges[0] = -1.0;
    for (int k = 0; k < n; ++k) edges[k + 1] = g.s_of_r(g.r(k));
    edges[n + 1] = 1.0;
    const int ng = static_cast<int>(gr.x.size());

    auto panel_sum = [&](int e0, const std::function<double(double, double)>& term) {
        // integrate over the panel [edges[e0], edges[e0+1]]
        const double s0 = edges[e0], s1 = edges[e0 + 1];
        double acc = 0.0;
        for (int q = 0; q < ng; ++q) {
            const double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * gr.x[q];
            const double w = 0.5 * (s1 - s0) * gr.w[q];
            const double rr = g.map_r_of_s(s);
            const double fv = g.radial_interpolate(prof, rr);
            acc += w * g.map_drds_of_s(s) * term(rr, fv);
        }
        return acc;
    };

    // P(r_k) = r_k^{-l-1} int_0^{r_k} f s^{l+2} ds, upward shells
    Eigen::VectorXd P(n);
    double P_prev = 0.0, r_prev = 0.0;
    for (int k = 0; k < n; ++k) {
        const double rk = g.r(k);
        const double panel = panel_sum(k, [&](double rr, double fv) {
            return fv * std::pow(rr / rk, l + 1) * rr;
        });
        P[k] = (r_prev > 0.0 ? P_prev * std::pow(r_prev / rk, l + 1) : 0.0) + panel;
        P_prev = P[k];
        r_prev = rk;
    }
    out.inner_moment = P_prev * std::pow(r_prev, l + 1) +
                       panel_sum(n, [&](double rr, double fv) {
                           return fv * std::pow(rr, l + 2);
                       });

    // Q(r_k) = r_k^l int_{r_k}^inf f s^{1-l} ds, downward shells
    Eigen::VectorXd Q(n);
    const TailFit tf = fit_tail(g, prof);
    const double r_edge = g.map_r_of_s(1.0);
    double Q_edge = 0.0;  // Q at the outer map boundary
    if (!tf.negligible && tf.p + l > 2.0 + 1e-6) {
        const double f_edge =
            tf.f_end * std::pow(r_edge / g.r(n - 1), -tf.p);
        Q_edge = f_edge * r_edge * r_edge / (tf.p + l - 2.0);
        out.tail_q = std::abs(Q_edge);
    }
    {
        const double rk = g.r(n - 1);
        const double panel = panel_sum(n, [&](double rr, double fv) {
            return fv * std::pow(rk / rr, l) * rr;
        });
        Q[n - 1] = Q_edge * std::pow(rk / r_edge, l) + panel;
    }
    for (int k = n - 2; k >= 0; --k) {
        const double rk = g.r(k);
        const double panel = panel_sum(k + 1, [&](double rr, double fv) {
            return fv * std::pow(rk / rr, l) * rr;
        });
        Q[k] = Q[k + 1] * std::pow(rk / g.r(k + 1), l) + panel;
    }

    for (int k = 0; k < n; ++k)
        out.u[k] = -(P[k] + Q[k]) / (2.0 * l + 1.0);
    return out;
}

int ell_of_axis(int axis) {
    // x^1 = w_{2,-1}/sqrt3, x^2 = w_{2,1}/sqrt3, x^3 = w_{2,0}/sqrt3
    static constexpr int table[3] = {-1, 1, 0};
    return table[axis];
}

} // namespace

std::string omega_key(int a, int b, int sign) {
    std::ostringstream os;
    os << "Omega" << (sign > 0 ? "+" : "-") << "_" << a + 1 << b + 1;
    return os.str();
}

std::string W_key(int j, int ell, int k) {
    std::ostringstream os;
    os << "W_" << j << "," << ell << "," << k + 1;
    return os.str();
}

ScalarPoissonSolution solve_scalar(const ScalarField& f, int q, double delta,
                                   const PoissonOptions& opt) {
    const auto& g = *f.grid();
    if (opt.check_decay && f.max_abs() > 0.0) {
        const double p = g.decay_exponent(f, g.r_out() / 20.0, g.r_out());
        if (p < q + delta + 2.0 - opt.decay_slack) {
            std::ostringstream os;
            os << "solve_scalar: source decay exponent " << p
               << " too slow for the target space (needs about "
               << q + delta + 2.0 << ")";
            throw DecayViolation(os.str());
        }
    }
    const GaussRule gr = gauss_rule(opt.gauss_per_panel);
    HarmonicCoefficients coef = g.forward_transform(f);

    ScalarPoissonSolution sol;
    sol.q = q;
    sol.delta = delta;
    Eigen::MatrixXd ucoef(g.n_r(), g.n_lm());
    Eigen::MatrixXd rescoef(g.n_r(), g.n_lm());
    double tailq = 0.0, uscale = 0.0;

    for (int l = 0; l <= g.l_max(); ++l) {
        for (int m = -l; m <= l; ++m) {
            const int jc = lm_index(l, m);
            ModeSolve ms = solve_mode(g, l, coef.c.col(jc), gr);
            ucoef.col(jc) = ms.u;
            tailq = std::max(tailq, ms.tail_q);
            uscale = std::max(uscale, ms.u.cwiseAbs().maxCoeff());
            if (l <= q - 1) sol.tail_coeffs[{l + 1, m}] = kFourPi * ms.inner_moment;
            Eigen::VectorXd du = g.radial_derivative(ms.u);
            Eigen::VectorXd d2u = g.radial_derivative(du);
            for (int ir = 0; ir < g.n_r(); ++ir) {
                const double rr = g.r(ir);
                rescoef(ir, jc) = d2u[ir] + 2.0 * du[ir] / rr -
                                  l * (l + 1.0) * ms.u[ir] / (rr * rr) -
                                  coef.c(ir, jc);
            }
        }
    }
    sol.tail_warning = tailq > 1e-12 * std::max(uscale, 1e-300);

    HarmonicCoefficients uc{ucoef, g.l_max()};
    sol.full = g.inverse_transform(uc);

    // remainder: subtract chi * sum c_{j,l} vhat_{j,l}, mode by mode
    Eigen::MatrixXd rem = ucoef;
    for (const auto& [jl, c] : sol.tail_coeffs) {
        const int j = jl.first, m = jl.second;
        const int jc = lm_index(j - 1, m);
        for (int ir = 0; ir < g.n_r(); ++ir) {
            const double rr = g.r(ir);
            const double vhat = -1.0 / (kFourPi * (2.0 * j - 1.0) * std::pow(rr, j));
            rem(ir, jc) -= chi(rr) * c * vhat;
        }
    }
    HarmonicCoefficients rc{rem, g.l_max()};
    sol.remainder = g.inverse_transform(rc);

    double acc = 0.0, f2 = 0.0;
    for (int jc = 0; jc < g.n_lm(); ++jc)
        for (int ir = 0; ir < g.n_r(); ++ir) {
            const double wv = g.w_r()[ir] * g.r(ir) * g.r(ir) * kFourPi;
            acc += wv * rescoef(ir, jc) * rescoef(ir, jc);
            f2 += wv * coef.c(ir, jc) * coef.c(ir, jc);
        }
    sol.residual_l2 = std::sqrt(std::max(0.0, acc));
    sol.residual_rel = sol.residual_l2 / std::max(std::sqrt(std::max(0.0, f2)), 1e-300);
    return sol;
}

VectorPoissonSolution solve_vector(const VectorField& Y, int q, double delta,
                                   const PoissonOptions& opt) {
    VectorPoissonSolution out;
    out.q = q;
    out.delta = delta;
    out.full = VectorField(Y.grid());
    out.remainder = VectorField(Y.grid());
    std::array<ScalarPoissonSolution, 3> comp;
    double res2 = 0.0, f2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        comp[k] = solve_scalar(Y[k], q, delta, opt);
        out.full[k] = comp[k].full;
        out.remainder[k] = comp[k].remainder;
        out.tail_warning = out.tail_warning || comp[k].tail_warning;
        res2 += comp[k].residual_l2 * comp[k].residual_l2;
        const double fl2 = comp[k].residual_l2 / std::max(comp[k].residual_rel, 1e-300);
        f2 += fl2 * fl2;
    }
    out.residual_l2 = std::sqrt(res2);
    out.residual_rel = out.residual_l2 / std::max(std::sqrt(f2), 1e-300);

    auto cjl = [&](int k, int j, int ell) {
        auto it = comp[k].tail_coeffs.find({j, ell});
        return it == comp[k].tail_coeffs.end() ? 0.0 : it->second;
    };

    if (q >= 1)
        for (int k = 0; k < 3; ++k) out.tail_coeffs[W_key(1, 0, k)] = cjl(k, 1, 0);
    // the j = 2 block in the Omega basis:
    // <Y, Omega^pm_{ab}> = <Y_b, x^a> pm <Y_a, x^b>, x^a = w_{2,l(a)}/sqrt3
    if (q >= 2) {
        const double s3 = std::sqrt(3.0);
        for (int a = 0; a < 3; ++a)
            for (int b = a; b < 3; ++b) {
                const double yb_xa = cjl(b, 2, ell_of_axis(a)) / s3;
                const double ya_xb = cjl(a, 2, ell_of_axis(b)) / s3;
                out.tail_coeffs[omega_key(a, b, +1)] = yb_xa + ya_xb;
                if (a != b) out.tail_coeffs[omega_key(a, b, -1)] = yb_xa - ya_xb;
            }
    }
    for (int j = 3; j <= q; ++j)
        for (int ell = -(j - 1); ell <= j - 1; ++ell)
            for (int k = 0; k < 3; ++k)
                out.tail_coeffs[W_key(j, ell, k)] = cjl(k, j, ell);
    return out;
}

} // namespace eidg
