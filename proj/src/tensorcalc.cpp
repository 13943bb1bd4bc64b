#include "eidg/tensorcalc.hpp"

#include "eidg/errors.hpp"

#include <cmath>

namespace eidg {

namespace {

// pointwise views: symmetric storage order (00,01,02,11,12,22)
struct Sym3 {
    double m[6];
    double operator()(int i, int j) const { return m[SymTensorField::sym_index(i, j)]; }
    double& at(int i, int j) { return m[SymTensorField::sym_index(i, j)]; }
};

Sym3 load(const SymTensorField& T, int idx) {
    Sym3 s;
    for (int k = 0; k < 6; ++k) s.m[k] = T.component(k).values()[idx];
    return s;
}

// inverse of a symmetric 3x3 with positivity check via leading minors
Sym3 invert_metric(const Sym3& g, int idx) {
    const double a = g(0, 0), b = g(0, 1), c = g(0, 2);
    const double d = g(1, 1), e = g(1, 2), f = g(2, 2);
    const double m1 = a;
    const double m2 = a * d - b * b;
    const double det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d);
    if (m1 <= 0.0 || m2 <= 0.0 || det <= 0.0)
        throw SingularMetric("metric loses positivity at node " + std::to_string(idx));
    Sym3 inv;
    inv.at(0, 0) = (d * f - e * e) / det;
    inv.at(0, 1) = (c * e - b * f) / det;
    inv.at(0, 2) = (b * e - c * d) / det;
    inv.at(1, 1) = (a * f - c * c) / det;
    inv.at(1, 2) = (b * c - a * e) / det;
    inv.at(2, 2) = (a * d - b * b) / det;
    return inv;
}

} // namespace

TensorDerivs::TensorDerivs(GridPtr grid, bool second_order) {
    for (auto& t : d1) t = SymTensorField(grid);
    if (second_order)
        for (auto& t : d2) t = SymTensorField(grid);
}

TensorDerivs& TensorDerivs::operator+=(const TensorDerivs& o) {
    for (int k = 0; k < 3; ++k) d1[k] += o.d1[k];
    if (has_second() && o.has_second())
        for (int k = 0; k < 6; ++k) d2[k] += o.d2[k];
    return *this;
}

std::array<ScalarField, 3> spectral_gradient(const ScalarField& f) {
    return f.grid()->gradient(f);
}

TensorDerivs spectral_derivs(const SymTensorField& T, bool second_order) {
    GridPtr grid = T.grid();
    TensorDerivs out(grid, second_order);
    for (int c = 0; c < 6; ++c) {
        auto g1 = grid->gradient(T.component(c));
        for (int k = 0; k < 3; ++k) out.d1[k].component(c) = g1[k];
        if (second_order) {
            for (int k = 0; k < 3; ++k) {
                auto g2 = grid->gradient(g1[k]);
                for (int l = k; l < 3; ++l)
                    out.d2[SymTensorField::sym_index(k, l)].component(c) = g2[l];
            }
        }
    }
    return out;
}

BaseGeometry make_geometry(const DataSet& d) {
    BaseGeometry G;
    G.g = d.g;
    SymTensorField dev = d.g - SymTensorField::euclidean(d.g.grid());
    G.dg = spectral_derivs(dev, true);
    G.pi = d.pi;
    G.dpi = spectral_derivs(d.pi, false);
    return G;
}

ScalarField scalar_curvature(const SymTensorField& g, const TensorDerivs& dg) {
    GridPtr grid = g.grid();
    ScalarField R(grid);
    const int n = grid->n_nodes();
    for (int idx = 0; idx < n; ++idx) {
        const Sym3 gm = load(g, idx);
        const Sym3 gi = invert_metric(gm, idx);
        double d1[3][6], d2[6][6];
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 6; ++c) d1[k][c] = dg.d1[k].component(c).values()[idx];
        for (int kl = 0; kl < 6; ++kl)
            for (int c = 0; c < 6; ++c) d2[kl][c] = dg.d2[kl].component(c).values()[idx];
        auto D1 = [&](int k, int i, int j) { return d1[k][SymTensorField::sym_index(i, j)]; };
        auto D2 = [&](int k, int l, int i, int j) {
            return d2[SymTensorField::sym_index(k, l)][SymTensorField::sym_index(i, j)];
        };
        // Gamma^k_ij and their derivatives
        double Gam[3][3][3];
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 3; ++l)
                        s += gi(k, l) * (D1(i, j, l) + D1(j, i, l) - D1(l, i, j));
                    Gam[k][i][j] = 0.5 * s;
                    Gam[k][j][i] = Gam[k][i][j];
                }
        // d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
        double dgi[3][3][3];
        for (int m = 0; m < 3; ++m)
            for (int k = 0; k < 3; ++k)
                for (int l = k; l < 3; ++l) {
                    double s = 0.0;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b)
                            s -= gi(k, a) * D1(m, a, b) * gi(b, l);
                    dgi[m][k][l] = s;
                    dgi[m][l][k] = s;
                }
        auto dGam = [&](int m, int k, int i, int j) {
            double s = 0.0;
            for (int l = 0; l < 3; ++l) {
                s += dgi[m][k][l] * (D1(i, j, l) + D1(j, i, l) - D1(l, i, j));
                s += gi(k, l) * (D2(m, i, j, l) + D2(m, j, i, l) - D2(m, l, i, j));
            }
            return 0.5 * s;
        };
        // R = g^{ij}( d_k Gam^k_ij - d_i Gam^k_kj + Gam^k_kl Gam^l_ij - Gam^k_il Gam^l_kj )
        double Rv = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double ric = 0.0;
                for (int k = 0; k < 3; ++k) {
                    ric += dGam(k, k, i, j) - dGam(i, k, k, j);
                    for (int l = 0; l < 3; ++l)
                        ric += Gam[k][k][l] * Gam[l][i][j] - Gam[k][i][l] * Gam[l][k][j];
                }
                Rv += gi(i, j) * ric;
            }
        R.values()[idx] = Rv;
    }
    return R;
}

ScalarField scalar_curvature(const SymTensorField& g) {
    SymTensorField dev = g - SymTensorField::euclidean(g.grid());
    return scalar_curvature(g, spectral_derivs(dev, true));
}

std::pair<ScalarField, VectorField> constraint_operator(const BaseGeometry& G) {
    GridPtr grid = G.g.grid();
    ScalarField H = scalar_curvature(G.g, G.dg);
    VectorField M(grid);
    const int n = grid->n_nodes();
    for (int idx = 0; idx < n; ++idx) {
        const Sym3 gm = load(G.g, idx);
        const Sym3 gi = invert_metric(gm, idx);
        const Sym3 pi = load(G.pi, idx);
        double d1g[3][6], d1p[3][6];
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 6; ++c) {
                d1g[k][c] = G.dg.d1[k].component(c).values()[idx];
                d1p[k][c] = G.dpi.d1[k].component(c).values()[idx];
            }
        auto Dg = [&](int k, int i, int j) { return d1g[k][SymTensorField::sym_index(i, j)]; };
        auto Dp = [&](int k, int i, int j) { return d1p[k][SymTensorField::sym_index(i, j)]; };
        double Gam[3][3][3];
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 3; ++l)
                        s += gi(k, l) * (Dg(i, j, l) + Dg(j, i, l) - Dg(l, i, j));
                    Gam[k][i][j] = 0.5 * s;
                    Gam[k][j][i] = Gam[k][i][j];
                }
        // tr_g pi and |pi|_g^2
        double trpi = 0.0, pi2 = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                trpi += gi(i, j) * pi(i, j);
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l)
                        pi2 += gi(i, k) * gi(j, l) * pi(i, j) * pi(k, l);
            }
        H.values()[idx] += 0.5 * trpi * trpi - pi2;
        // (div_g pi)_i = g^{jk}( d_j pi_ki - Gam^l_jk pi_li - Gam^l_ji pi_kl )
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    double t = Dp(j, k, i);
                    for (int l = 0; l < 3; ++l)
                        t -= Gam[l][j][k] * pi(l, i) + Gam[l][j][i] * pi(k, l);
                    s += gi(j, k) * t;
                }
            M[i].values()[idx] = s;
        }
    }
    return {std::move(H), std::move(M)};
}

std::pair<ScalarField, VectorField> constraint_operator(const DataSet& d) {
    return constraint_operator(make_geometry(d));
}

ScalarField linearized_H(const SymTensorField& h, const TensorDerivs& dh) {
    GridPtr grid = h.grid();
    ScalarField out(grid);
    const int n = grid->n_nodes();
    for (int idx = 0; idx < n; ++idx) {
        double lap_tr = 0.0, divdiv = 0.0;
        for (int k = 0; k < 3; ++k) {
            const auto& dkk = dh.d2[SymTensorField::sym_index(k, k)];
            for (int i = 0; i < 3; ++i) lap_tr += dkk(i, i).values()[idx];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                divdiv += dh.d2[SymTensorField::sym_index(i, j)](i, j).values()[idx];
        out.values()[idx] = -lap_tr + divdiv;
    }
    return out;
}

ScalarField linearized_H(const SymTensorField& h) {
    return linearized_H(h, spectral_derivs(h, true));
}

VectorField linearized_M(const SymTensorField& pi, const TensorDerivs& dpi) {
    GridPtr grid = pi.grid();
    VectorField out(grid);
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(grid);
        for (int j = 0; j < 3; ++j) acc += dpi.d1[j](j, i);
        out[i] = acc;
    }
    return out;
}

VectorField linearized_M(const SymTensorField& pi) {
    return linearized_M(pi, spectral_derivs(pi, false));
}

SymTensorField adjoint_H(const ScalarField& f) {
    GridPtr grid = f.grid();
    auto g1 = grid->gradient(f);
    SymTensorField out(grid);
    std::array<std::array<ScalarField, 3>, 3> hess;
    for (int i = 0; i < 3; ++i) {
        auto g2 = grid->gradient(g1[i]);
        for (int j = 0; j < 3; ++j) hess[i][j] = g2[j];
    }
    ScalarField lap = hess[0][0] + hess[1][1] + hess[2][2];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            // symmetrize the mixed spectral Hessian
            out(i, j) = 0.5 * (hess[i][j] + hess[j][i]);
            if (i == j) out(i, j) -= lap;
        }
    return out;
}

SymTensorField adjoint_M(const VectorField& X) {
    GridPtr grid = X.grid();
    SymTensorField out(grid);
    std::array<std::array<ScalarField, 3>, 3> dX;
    for (int j = 0; j < 3; ++j) {
        auto g1 = grid->gradient(X[j]);
        for (int i = 0; i < 3; ++i) dX[i][j] = g1[i];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) out(i, j) = -0.5 * (dX[i][j] + dX[j][i]);
    return out;
}

std::pair<ScalarField, VectorField> second_variation(
    const SymTensorField& h, const TensorDerivs& dh,
    const SymTensorField& pi, const TensorDerivs& dpi) {
    GridPtr grid = h.grid();
    ScalarField outH(grid);
    VectorField outM(grid);
    const int n = grid->n_nodes();
    for (int idx = 0; idx < n; ++idx) {
        double hv[3][3], pv[3][3], d1h[3][3][3], d1p[3][3][3], d2h[3][3][3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                hv[i][j] = h(i, j).values()[idx];
                pv[i][j] = pi(i, j).values()[idx];
                for (int k = 0; k < 3; ++k) {
                    d1h[k][i][j] = dh.d1[k](i, j).values()[idx];
                    d1p[k][i][j] = dpi.d1[k](i, j).values()[idx];
                    for (int l = 0; l < 3; ++l)
                        d2h[k][l][i][j] =
                            dh.d2[SymTensorField::sym_index(k, l)](i, j).values()[idx];
                }
            }
        double trh = hv[0][0] + hv[1][1] + hv[2][2];
        (void)trh;
        double divh[3], gradtr[3];
        for (int i = 0; i < 3; ++i) {
            divh[i] = 0.0;
            gradtr[i] = 0.0;
            for (int j = 0; j < 3; ++j) {
                divh[i] += d1h[j][j][i];
                gradtr[i] += d1h[i][j][j];
            }
        }
        // Hamiltonian part
        double t = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                // -2 h^{ij} d_i (div h)_j
                double didivhj = 0.0;
                for (int k = 0; k < 3; ++k) didivhj += d2h[i][k][k][j];
                t += -2.0 * hv[i][j] * didivhj;
                // + h^{ij} Delta h_ij
                double laph = 0.0;
                for (int k = 0; k < 3; ++k) laph += d2h[k][k][i][j];
                t += hv[i][j] * laph;
                // + h^{ij} d_i d_j tr h
                double ddtr = 0.0;
                for (int k = 0; k < 3; ++k) ddtr += d2h[i][j][k][k];
                t += hv[i][j] * ddtr;
            }
        for (int i = 0; i < 3; ++i) {
            t -= divh[i] * divh[i];                 // -|div h|^2
            t += divh[i] * gradtr[i];               // + div h . grad tr h
            t -= 0.25 * gradtr[i] * gradtr[i];      // - 1/4 |grad tr h|^2
        }
        double grad2 = 0.0, cross = 0.0;
        for (int b = 0; b < 3; ++b)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    grad2 += d1h[b][j][k] * d1h[b][j][k];
                    cross += d1h[b][j][k] * d1h[j][k][b];
                }
        t += 0.75 * grad2 - 0.5 * cross;
        double trp = pv[0][0] + pv[1][1] + pv[2][2], p2 = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) p2 += pv[i][j] * pv[i][j];
        t += 0.5 * trp * trp - p2;
        outH.values()[idx] = t;
        // momentum part
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                for (int l = 0; l < 3; ++l) {
                    s -= hv[k][l] * d1p[k][l][i];
                    s -= 0.5 * pv[k][l] * d1h[i][k][l];
                }
                s -= pv[i][k] * (divh[k] - 0.5 * gradtr[k]);
            }
            outM[i].values()[idx] = s;
        }
    }
    return {std::move(outH), std::move(outM)};
}

std::pair<ScalarField, VectorField> second_variation(const SymTensorField& h,
                                                     const SymTensorField& pi) {
    return second_variation(h, spectral_derivs(h, true), pi, spectral_derivs(pi, false));
}

SymTensorField lie_operator(const VectorField& X) {
    GridPtr grid = X.grid();
    SymTensorField out(grid);
    std::array<std::array<ScalarField, 3>, 3> dX;
    for (int j = 0; j < 3; ++j) {
        auto g1 = grid->gradient(X[j]);
        for (int i = 0; i < 3; ++i) dX[i][j] = g1[i];
    }
    ScalarField div = dX[0][0] + dX[1][1] + dX[2][2];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            out(i, j) = dX[i][j] + dX[j][i];
            if (i == j) out(i, j) -= div;
        }
    return out;
}

std::pair<ScalarField, VectorField> conformal_rhs(const BaseGeometry& base,
                                                  const ConformalState& c) {
    GridPtr grid = base.g.grid();
    const int n = grid->n_nodes();

    // constraint of the base data
    auto [Hbar, Mbar] = constraint_operator(base);
    // scalar curvature alone (reconstructed from Hbar by removing pi terms
    // would duplicate work; evaluate the pi part pointwise below instead)
    ScalarField Rbar = scalar_curvature(base.g, base.dg);

    // conformal factor
    Eigen::ArrayXd u = 1.0 + c.u_hat.values();
    if ((u <= 0.0).any())
        throw ConformalFactorNonpositive("1 + uhat must stay positive");

    auto du = spectral_gradient(c.u_hat);
    std::array<std::array<ScalarField, 3>, 3> d2u;
    for (int i = 0; i < 3; ++i) {
        auto gi = spectral_gradient(du[i]);
        for (int j = 0; j < 3; ++j) d2u[i][j] = gi[j];
    }
    SymTensorField L = lie_operator(c.X_hat);
    TensorDerivs dL = spectral_derivs(L, false);

    ScalarField A(grid);
    VectorField B(grid);

    for (int idx = 0; idx < n; ++idx) {
        const Sym3 gm = load(base.g, idx);
        const Sym3 gi = invert_metric(gm, idx);
        const Sym3 pib = load(base.pi, idx);
        const Sym3 Lv = load(L, idx);
        double d1g[3][6];
        for (int k = 0; k < 3; ++k)
            for (int cc = 0; cc < 6; ++cc)
                d1g[k][cc] = base.dg.d1[k].component(cc).values()[idx];
        auto Dg = [&](int k, int i, int j) {
            return d1g[k][SymTensorField::sym_index(i, j)];
        };
        double Gam[3][3][3];
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < 3; ++l)
                        s += gi(k, l) * (Dg(i, j, l) + Dg(j, i, l) - Dg(l, i, j));
                    Gam[k][i][j] = 0.5 * s;
                    Gam[k][j][i] = Gam[k][i][j];
                }

        auto tr_g = [&](const Sym3& T) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s += gi(i, j) * T(i, j);
            return s;
        };
        auto dot_g = [&](const Sym3& S, const Sym3& T) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            s += gi(i, k) * gi(j, l) * S(i, j) * T(k, l);
            return s;
        };

        const double uv = u[idx];
        const double um3 = 1.0 / (uv * uv * uv);
        const double trL = tr_g(Lv), trPi = tr_g(pib);

        // (Delta_g - Delta) uhat
        double lap_flat = 0.0, lap_g = 0.0;
        for (int i = 0; i < 3; ++i) {
            lap_flat += d2u[i][i].values()[idx];
            for (int j = 0; j < 3; ++j) {
                double t = d2u[i][j].values()[idx];
                for (int k = 0; k < 3; ++k) t -= Gam[k][i][j] * du[k].values()[idx];
                lap_g += gi(i, j) * t;
            }
        }

        double RH = um3 * (0.5 * trL * trL + trPi * trL - dot_g(Lv, Lv) -
                           2.0 * dot_g(pib, Lv)) +
                    (um3 - 1.0) * (0.5 * trPi * trPi - dot_g(pib, pib)) +
                    c.u_hat.values()[idx] * Rbar.values()[idx] -
                    8.0 * (lap_g - lap_flat);
        A.values()[idx] = Hbar.values()[idx] + RH;

        // momentum remainder
        // pibar + L
        Sym3 piL;
        for (int k = 0; k < 6; ++k) piL.m[k] = pib.m[k] + Lv.m[k];
        const double trPiL = tr_g(piL);
        for (int i = 0; i < 3; ++i) {
            double s = 2.0 / uv * du[i].values()[idx] * trPiL;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    s -= 2.0 / uv * gi(j, k) * du[k].values()[idx] * piL(i, j);
            // div_g L - div_e L
            double divg = 0.0, dive = 0.0;
            for (int j = 0; j < 3; ++j) {
                dive += dL.d1[j](j, i).values()[idx];
                for (int k = 0; k < 3; ++k) {
                    double t = dL.d1[j](k, i).values()[idx];
                    for (int l = 0; l < 3; ++l)
                        t -= Gam[l][j][k] * Lv(l, i) + Gam[l][j][i] * Lv(k, l);
                    divg += gi(j, k) * t;
                }
            }
            s -= (divg - dive);
            B[i].values()[idx] = -Mbar[i].values()[idx] + s;
        }
    }
    return {std::move(A), std::move(B)};
}

} // namespace eidg
