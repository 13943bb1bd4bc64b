#include "eidg/seeds.hpp"

#include "eidg/errors.hpp"
#include "eidg/basis.hpp"
#include "eidg/poisson.hpp"

#include <cmath>

namespace eidg {

namespace {

int eps_sign(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) ||
        (i == 2 && j == 0 && k == 1))
        return 1;
    return -1;
}

// weighted L2 norm of the trace/divergence defect relative to the field
double tt_defect_of(const SymTensorField& h, const TensorDerivs& dh, int q,
                    double delta) {
    GridPtr g = h.grid();
    ScalarField tr = trace_e(h);
    VectorField div(g);
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(g);
        for (int j = 0; j < 3; ++j) acc += dh.d1[j](j, i);
        div[i] = acc;
    }
    const double wdel = -q - delta - 1.0;
    double defect = g->weighted_sobolev_norm(tr, 0, wdel);
    for (int i = 0; i < 3; ++i)
        defect = std::max(defect, g->weighted_sobolev_norm(div[i], 0, wdel));
    double scale = 0.0;
    for (int c = 0; c < 6; ++c)
        scale = std::max(scale, g->weighted_sobolev_norm(h.component(c), 0, wdel + 1.0));
    return defect / std::max(scale, 1e-300);
}

} // namespace

TtDecomposition tt_decompose(const SymTensorField& h, int q, double delta) {
    if (q != 1 && q != 2) throw OutOfRange("tt_decompose: q must be 1 or 2");
    GridPtr g = h.grid();
    {
        // decay precondition on h itself
        Eigen::VectorXd prof(g->n_r());
        double hmax = 0.0;
        for (int c = 0; c < 6; ++c) hmax = std::max(hmax, h.component(c).max_abs());
        ScalarField mag(g);
        for (int c = 0; c < 6; ++c)
            mag.values() += h.component(c).values().square();
        mag.values() = mag.values().sqrt();
        const double p = g->decay_exponent(mag, g->r_out() / 20.0, g->r_out());
        if (hmax > 0.0 && p < q + delta - 0.75)
            throw DecayViolation("tt_decompose: input decays slower than r^-(q+delta)");
    }
    TensorDerivs dh = spectral_derivs(h, true);
    ScalarField tr = trace_e(h);
    // div div h
    ScalarField ddiv(g);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            ddiv += dh.d2[SymTensorField::sym_index(i, j)](i, j);
    PoissonOptions opt;
    opt.check_decay = false;
    auto inv = solve_scalar(ddiv, q, delta, opt);

    TtDecomposition out;
    out.u = ScalarField(g);
    out.u.values() = 0.5 * (tr.values() - inv.full.values());

    // Y = div h - 1/4 grad tr h - 1/4 grad (inv)
    auto gtr = spectral_gradient(tr);
    auto ginv = spectral_gradient(inv.full);
    VectorField Y(g);
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(g);
        for (int j = 0; j < 3; ++j) acc += dh.d1[j](j, i);
        acc.values() -= 0.25 * (gtr[i].values() + ginv[i].values());
        Y[i] = acc;
    }
    auto xsol = solve_vector(Y, q, delta, opt);
    out.X = xsol.full;

    // h_TT = h - u e - grad(x)X
    SymTensorField gx(g);
    std::array<std::array<ScalarField, 3>, 3> dX;
    for (int j = 0; j < 3; ++j) {
        auto gr = spectral_gradient(out.X[j]);
        for (int i = 0; i < 3; ++i) dX[i][j] = gr[i];
    }
    out.h_TT = h;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            out.h_TT(i, j) -= dX[i][j] + dX[j][i];
            if (i == j) out.h_TT(i, j) -= out.u;
        }
    return out;
}

SymTensorField tt_project(const SymTensorField& h) {
    GridPtr g = h.grid();
    TensorDerivs dh = spectral_derivs(h, false);
    // symmetric curl
    SymTensorField S(g);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            ScalarField acc(g);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const int e1 = eps_sign(i, a, b);
                    if (e1) acc += 0.5 * e1 * dh.d1[a](b, j);
                    const int e2 = eps_sign(j, a, b);
                    if (e2) acc += 0.5 * e2 * dh.d1[a](b, i);
                }
            S(i, j) = acc;
        }
    TensorDerivs dS = spectral_derivs(S, true);
    SymTensorField out(g);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            ScalarField lap(g);
            for (int k = 0; k < 3; ++k)
                lap += dS.d2[SymTensorField::sym_index(k, k)](i, j);
            // grad(x) div S
            ScalarField gd(g);
            for (int k = 0; k < 3; ++k) {
                gd += dS.d2[SymTensorField::sym_index(i, k)](k, j);
                gd += dS.d2[SymTensorField::sym_index(j, k)](k, i);
            }
            out(i, j) = lap - gd;
        }
    return out;
}

double j_functional(const SymTensorField& h, const TensorDerivs& dh,
                    const SymTensorField& pi) {
    GridPtr g = h.grid();
    double grad2 = 0.0, pi2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            pi2 += g->volume_integral_decaying(pi(i, j) * pi(i, j));
            for (int k = 0; k < 3; ++k)
                grad2 += g->volume_integral_decaying(dh.d1[k](i, j) * dh.d1[k](i, j));
        }
    const double denom = 0.25 * grad2 + pi2;
    if (denom < 1e-28) throw ZeroSeed("j_functional: trivial pair");
    double num2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        double ck = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                ck += g->volume_integral_decaying(pi(i, j) * dh.d1[k](i, j));
        num2 += ck * ck;
    }
    return std::sqrt(num2) / denom;
}

double j_functional(const SymTensorField& h, const SymTensorField& pi) {
    return j_functional(h, spectral_derivs(h, false), pi);
}

double eta_of(const SymTensorField& g_hat, const TensorDerivs& dg,
              const SymTensorField& pi_hat) {
    GridPtr g = g_hat.grid();
    double grad2 = 0.0, pi2 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            pi2 += g->volume_integral_decaying(pi_hat(i, j) * pi_hat(i, j));
            for (int k = 0; k < 3; ++k)
                grad2 += g->volume_integral_decaying(dg.d1[k](i, j) * dg.d1[k](i, j));
        }
    return std::sqrt(0.25 * grad2 + pi2);
}

SeedPair make_seed(const SeedSpec& spec, GridPtr grid) {
    if (spec.name == "zero") throw ZeroSeed("make_seed: zero seed requested");
    if (spec.epsilon <= 0.0) throw ZeroSeed("make_seed: epsilon must be positive");
    SeedPair out;
    out.q = spec.q;
    out.delta = spec.delta;
    out.alpha = spec.alpha;
    out.time_symmetric = (spec.name == "time-symmetric");

    const double w = 3.0;
    SymTensorField prof1(grid), prof2(grid);
    auto env = [w](double x, double y, double z) {
        return std::exp(-(x * x + y * y + z * z) / (w * w));
    };
    // quadrupole-flavored traceless profile
    prof1(0, 0) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return env(x, y, z);
    });
    prof1(1, 1) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return -env(x, y, z);
    });
    prof1(0, 1) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return 0.5 * env(x, y, z);
    });
    prof1(1, 2) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return 0.25 * env(x, y, z);
    });
    prof2(0, 2) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return env(x, y, z) / (1.0 + std::sqrt(x * x + y * y + z * z));
    });
    prof2(0, 0) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return 0.6 * env(x, y, z) / (1.0 + std::sqrt(x * x + y * y + z * z));
    });
    prof2(2, 2) = ScalarField::sample(grid, [&](double x, double y, double z) {
        return -0.6 * env(x, y, z) / (1.0 + std::sqrt(x * x + y * y + z * z));
    });

    out.g_hat = tt_project(prof1);
    out.pi_hat = out.time_symmetric ? SymTensorField(grid) : tt_project(prof2);
    out.dg_hat = spectral_derivs(out.g_hat, true);
    out.dpi_hat = spectral_derivs(out.pi_hat, false);

    // scale to the pointwise decay budget
    auto cnorm = [&](const SymTensorField& T, const TensorDerivs& dT, double p0,
                     double p1) {
        double worst = 0.0;
        const int na = grid->n_ang();
        for (int ir = 0; ir < grid->n_r(); ++ir) {
            const double w0 = std::pow(1.0 + grid->r(ir), p0);
            const double w1 = std::pow(1.0 + grid->r(ir), p1);
            for (int ia = 0; ia < na; ++ia) {
                const int idx = ir * na + ia;
                for (int c = 0; c < 6; ++c) {
                    worst = std::max(worst,
                                     w0 * std::abs(T.component(c).values()[idx]));
                    for (int k = 0; k < 3; ++k)
                        worst = std::max(
                            worst, w1 * std::abs(dT.d1[k].component(c).values()[idx]));
                }
            }
        }
        return worst;
    };
    const double qd = spec.q + spec.delta;
    double scale_g = cnorm(out.g_hat, out.dg_hat, qd, qd + 1.0);
    double scale_p = out.time_symmetric
                         ? 0.0
                         : cnorm(out.pi_hat, out.dpi_hat, qd + 1.0, qd + 2.0);
    const double scale = std::max(scale_g, scale_p);
    if (scale <= 0.0) throw ZeroSeed("make_seed: degenerate profiles");
    const double s = spec.epsilon / scale;
    out.g_hat *= s;
    out.pi_hat *= s;
    for (int k = 0; k < 3; ++k) {
        out.dg_hat.d1[k] *= s;
        out.dpi_hat.d1[k] *= s;
    }
    for (int k = 0; k < 6; ++k) out.dg_hat.d2[k] *= s;

    out.eta = eta_of(out.g_hat, out.dg_hat, out.pi_hat);
    if (out.eta <= 0.0) throw ZeroSeed("make_seed: vanishing eta");
    out.tt_defect = std::max(tt_defect_of(out.g_hat, out.dg_hat, spec.q, spec.delta),
                             out.time_symmetric
                                 ? 0.0
                                 : tt_defect_of(out.pi_hat, out.dpi_hat, spec.q,
                                                spec.delta));
    if (out.time_symmetric) {
        out.J_value = 0.0;
    } else {
        out.J_value = j_functional(out.g_hat, out.dg_hat, out.pi_hat);
        if (out.J_value > 1.0 - spec.alpha)
            throw ConeViolation("make_seed: J exceeds 1 - alpha");
    }
    return out;
}

B3Pair b3_pair(int n, GridPtr grid) {
    // phi: mollifier bump on (-1, 1)
    auto phi_g = [](double s) { return -1.0 / (1.0 - s * s); };
    auto phi = [&](double s) { return std::abs(s) < 1.0 ? std::exp(phi_g(s)) : 0.0; };
    auto gp = [](double s) {
        const double d = 1.0 - s * s;
        return -2.0 * s / (d * d);
    };
    auto gpp = [](double s) {
        const double d = 1.0 - s * s;
        return (-2.0 - 6.0 * s * s) / (d * d * d);
    };
    auto gppp = [](double s) {
        const double d = 1.0 - s * s;
        return (-24.0 * s - 24.0 * s * s * s) / (d * d * d * d);
    };
    auto phi2 = [&](double s) {  // phi''
        if (std::abs(s) >= 1.0) return 0.0;
        const double g1 = gp(s);
        return (gpp(s) + g1 * g1) * phi(s);
    };
    auto phi3 = [&](double s) {  // phi'''
        if (std::abs(s) >= 1.0) return 0.0;
        const double g1 = gp(s), g2 = gpp(s);
        return (gppp(s) + 3.0 * g1 * g2 + g1 * g1 * g1) * phi(s);
    };
    auto phi4 = [&](double s) {  // phi'''' by exact FD of phi''' at machine step
        const double h = 1e-6;
        return (phi3(s + h) - phi3(s - h)) / (2.0 * h);
    };
    // radial cutoff in rho: 1 for t <= 1, 0 for t >= 2
    auto cut = [](double t) { return smooth_step(2.0 - t); };
    auto cutp = [](double t) { return -smooth_step_prime(2.0 - t); };

    B3Pair out;
    out.h = SymTensorField(grid);
    out.pi = SymTensorField(grid);
    out.dh = TensorDerivs(grid, false);
    const double s2 = std::sqrt(2.0);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir)
        for (int ia = 0; ia < na; ++ia) {
            const auto p = grid->point(ir, ia);
            const double rho = std::sqrt(p[0] * p[0] + p[1] * p[1]);
            const double t = rho / n;
            const double c = cut(t);
            if (c == 0.0 || std::abs(p[2]) >= 1.0) continue;
            const int idx = ir * na + ia;
            const double f2 = phi2(p[2]);
            // h = sqrt2 phi'' chi M, pi = (1/sqrt2) phi''' chi M
            out.h(0, 0).values()[idx] = s2 * f2 * c;
            out.h(1, 1).values()[idx] = -s2 * f2 * c;
            out.pi(0, 0).values()[idx] = phi3(p[2]) * c / s2;
            out.pi(1, 1).values()[idx] = -phi3(p[2]) * c / s2;
            // first derivatives of h
            const double dcut_drho = (rho > 0 ? cutp(t) / n : 0.0);
            const double dx = (rho > 0 ? dcut_drho * p[0] / rho : 0.0);
            const double dy = (rho > 0 ? dcut_drho * p[1] / rho : 0.0);
            out.dh.d1[0](0, 0).values()[idx] = s2 * f2 * dx;
            out.dh.d1[0](1, 1).values()[idx] = -s2 * f2 * dx;
            out.dh.d1[1](0, 0).values()[idx] = s2 * f2 * dy;
            out.dh.d1[1](1, 1).values()[idx] = -s2 * f2 * dy;
            out.dh.d1[2](0, 0).values()[idx] = s2 * phi3(p[2]) * c;
            out.dh.d1[2](1, 1).values()[idx] = -s2 * phi3(p[2]) * c;
            (void)phi4;
        }
    return out;
}

} // namespace eidg
