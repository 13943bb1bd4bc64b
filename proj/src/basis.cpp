#include "eidg/basis.hpp"

#include "eidg/errors.hpp"

#include <cmath>

namespace eidg {

namespace {
constexpr double kFourPi = 4.0 * M_PI;
}

// ---------------------------------------------------------------------------
// Poly3

Poly3 Poly3::constant(double c) {
    Poly3 p;
    if (c != 0.0) p.terms_[{0, 0, 0}] = c;
    return p;
}

Poly3 Poly3::var(int axis) {
    Poly3 p;
    Monomial m{0, 0, 0};
    m[axis] = 1;
    p.terms_[m] = 1.0;
    return p;
}

Poly3 Poly3::r2() {
    Poly3 p;
    p.terms_[{2, 0, 0}] = 1.0;
    p.terms_[{0, 2, 0}] = 1.0;
    p.terms_[{0, 0, 2}] = 1.0;
    return p;
}

void Poly3::prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second == 0.0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

Poly3& Poly3::operator+=(const Poly3& o) {
    for (const auto& [m, c] : o.terms_) terms_[m] += c;
    prune();
    return *this;
}

Poly3& Poly3::operator-=(const Poly3& o) {
    for (const auto& [m, c] : o.terms_) terms_[m] -= c;
    prune();
    return *this;
}

Poly3 Poly3::operator*(const Poly3& o) const {
    Poly3 out;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) {
            Monomial m{m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]};
            out.terms_[m] += c1 * c2;
        }
    out.prune();
    return out;
}

Poly3 Poly3::operator*(double c) const {
    Poly3 out = *this;
    for (auto& [m, v] : out.terms_) v *= c;
    out.prune();
    return out;
}

Poly3 Poly3::derivative(int axis) const {
    Poly3 out;
    for (const auto& [m, c] : terms_) {
        if (m[axis] == 0) continue;
        Monomial d = m;
        d[axis] -= 1;
        out.terms_[d] += c * m[axis];
    }
    out.prune();
    return out;
}

double Poly3::eval(double x, double y, double z) const {
    double acc = 0.0;
    for (const auto& [m, c] : terms_)
        acc += c * std::pow(x, m[0]) * std::pow(y, m[1]) * std::pow(z, m[2]);
    return acc;
}

int Poly3::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[0] + m[1] + m[2]);
    return d;
}

std::map<int, double> Poly3::angular_moments() const {
    // int_{S^2} n_x^a n_y^b n_z^c dOmega
    //   = 4 pi (a-1)!!(b-1)!!(c-1)!!/(a+b+c+1)!!   (all even, else 0)
    auto dfac = [](int n) {
        double r = 1.0;
        for (int k = n; k > 1; k -= 2) r *= k;
        return r;
    };
    std::map<int, double> out;
    for (const auto& [m, c] : terms_) {
        if (m[0] % 2 || m[1] % 2 || m[2] % 2) continue;
        const int deg = m[0] + m[1] + m[2];
        const double val = kFourPi * dfac(m[0] - 1) * dfac(m[1] - 1) *
                           dfac(m[2] - 1) / dfac(deg + 1);
        out[deg] += c * val;
    }
    return out;
}

// ---------------------------------------------------------------------------
// solid harmonics

namespace {

// Legendre P_l coefficients in u.
std::vector<double> legendre_coeffs(int l) {
    std::vector<double> pm1{1.0}, p{0.0, 1.0};
    if (l == 0) return pm1;
    if (l == 1) return p;
    for (int k = 2; k <= l; ++k) {
        std::vector<double> nxt(k + 1, 0.0);
        for (size_t i = 0; i < p.size(); ++i) nxt[i + 1] += (2.0 * k - 1.0) * p[i] / k;
        for (size_t i = 0; i < pm1.size(); ++i) nxt[i] -= (k - 1.0) * pm1[i] / k;
        pm1 = p;
        p = nxt;
    }
    return p;
}

std::vector<double> poly1_derivative(std::vector<double> c, int times) {
    for (int t = 0; t < times; ++t) {
        std::vector<double> d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * i;
        c = d;
    }
    return c;
}

double norm_factor(int l, int am, bool zonal) {
    double fr = 1.0;
    for (int k = l - am + 1; k <= l + am; ++k) fr /= k;
    double n = std::sqrt((2.0 * l + 1.0) * fr);
    if (!zonal) n *= std::sqrt(2.0);
    return n;
}

} // namespace

Poly3 solid_harmonic_poly(int l, int m) {
    const int am = std::abs(m);
    // azimuthal factor: Re/Im (x+iy)^am  (cos for m<0, sin for m>0)
    Poly3 A = Poly3::constant(1.0);
    if (am > 0) {
        // (x+iy)^am expanded; Re collects even powers of i, Im odd
        Poly3 re = Poly3::constant(0.0), im = Poly3::constant(0.0);
        const Poly3 x = Poly3::var(0), y = Poly3::var(1);
        // binomial expansion
        double binom = 1.0;
        for (int k = 0; k <= am; ++k) {
            // term: C(am,k) x^{am-k} (iy)^k
            Poly3 t = Poly3::constant(binom);
            for (int i = 0; i < am - k; ++i) t = t * x;
            for (int i = 0; i < k; ++i) t = t * y;
            switch (k % 4) {
                case 0: re += t; break;
                case 1: im += t; break;
                case 2: re -= t; break;
                case 3: im -= t; break;
            }
            binom = binom * (am - k) / (k + 1);
        }
        A = (m < 0) ? re : im;
    }
    // radial-polar factor: r^{l-am} * Q(z/r) with Q = d^am/du^am P_l
    std::vector<double> Q = poly1_derivative(legendre_coeffs(l), am);
    Poly3 B;
    const Poly3 z = Poly3::var(2), R2 = Poly3::r2();
    for (size_t k = 0; k < Q.size(); ++k) {
        if (Q[k] == 0.0) continue;
        const int pow_r = l - am - static_cast<int>(k);
        if (pow_r < 0 || pow_r % 2) continue;  // parity guarantees even
        Poly3 t = Poly3::constant(Q[k]);
        for (size_t i = 0; i < k; ++i) t = t * z;
        for (int i = 0; i < pow_r / 2; ++i) t = t * R2;
        B += t;
    }
    return (A * B) * norm_factor(l, am, m == 0);
}

Poly3 w_poly(int j, int ell) {
    if (j < 1 || std::abs(ell) > j - 1) throw DegreeOverflow("w_{j,l}: bad index");
    return solid_harmonic_poly(j - 1, ell);
}

PolyVec W_poly(int j, int ell, int k) {
    PolyVec v{Poly3::constant(0.0), Poly3::constant(0.0), Poly3::constant(0.0)};
    v[k] = w_poly(j, ell);
    return v;
}

PolyVec omega_poly(int a, int b, int sign) {
    PolyVec v{Poly3::constant(0.0), Poly3::constant(0.0), Poly3::constant(0.0)};
    v[b] += Poly3::var(a);
    if (sign > 0)
        v[a] += Poly3::var(b);
    else
        v[a] -= Poly3::var(b);
    return v;
}

PolySym adjoint_H_poly(const Poly3& f) {
    PolySym out;
    Poly3 lap;
    for (int ax = 0; ax < 3; ++ax) lap += f.derivative(ax).derivative(ax);
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Poly3 t = f.derivative(i).derivative(j);
            if (i == j) t -= lap;
            out[SymTensorField::sym_index(i, j)] = t;
        }
    return out;
}

PolySym adjoint_M_poly(const PolyVec& Z) {
    PolySym out;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Poly3 t = (Z[j].derivative(i) + Z[i].derivative(j)) * (-0.5);
            out[SymTensorField::sym_index(i, j)] = t;
        }
    return out;
}

SymTensorField sample_sym_poly(GridPtr grid, const PolySym& P) {
    SymTensorField T(grid);
    for (int k = 0; k < 6; ++k)
        T.component(k) = ScalarField::sample(grid, [&](double x, double y, double z) {
            return P[k].eval(x, y, z);
        });
    return T;
}

namespace {
ScalarField sample_poly(GridPtr grid, const Poly3& p) {
    return ScalarField::sample(grid, [&](double x, double y, double z) {
        return p.eval(x, y, z);
    });
}

void check_degree(GridPtr grid, int j) {
    if (j - 1 > grid->l_max())
        throw DegreeOverflow("basis degree j-1 exceeds grid l_max");
}
} // namespace

ScalarField eval_w(GridPtr grid, int j, int ell) {
    check_degree(grid, j);
    return sample_poly(grid, w_poly(j, ell));
}

ScalarField eval_v(GridPtr grid, int j, int ell) {
    check_degree(grid, j);
    const int l = j - 1;
    const double sgn = (std::abs(ell) % 2 == 0) ? -1.0 : 1.0;  // (-1)^{l+1}
    ScalarField f(grid);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir) {
        const double rmj = std::pow(grid->r(ir), -j);
        for (int ia = 0; ia < na; ++ia)
            f.values()[ir * na + ia] =
                sgn * grid->Y(ia, l, -ell) * rmj / (kFourPi * (2.0 * j - 1.0));
    }
    return f;
}

ScalarField eval_v_dual(GridPtr grid, int j, int ell) {
    check_degree(grid, j);
    const int l = j - 1;
    ScalarField f(grid);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir) {
        const double rmj = std::pow(grid->r(ir), -j);
        for (int ia = 0; ia < na; ++ia)
            f.values()[ir * na + ia] =
                -grid->Y(ia, l, ell) * rmj / (kFourPi * (2.0 * j - 1.0));
    }
    return f;
}

VectorField eval_W(GridPtr grid, int j, int ell, int k) {
    VectorField v(grid);
    v[k] = eval_w(grid, j, ell);
    return v;
}

VectorField eval_V_dual(GridPtr grid, int j, int ell, int k) {
    VectorField v(grid);
    v[k] = eval_v_dual(grid, j, ell);
    return v;
}

VectorField eval_omega(GridPtr grid, int a, int b, int sign) {
    VectorField v(grid);
    const auto p = omega_poly(a, b, sign);
    for (int i = 0; i < 3; ++i) v[i] = sample_poly(grid, p[i]);
    return v;
}

// ---------------------------------------------------------------------------
// cutoffs

namespace {
double sigma(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double sigma_prime(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
} // namespace

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = sigma(t), b = sigma(1.0 - t);
    return a / (a + b);
}

double smooth_step_prime(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double a = sigma(t), b = sigma(1.0 - t);
    const double da = sigma_prime(t), db = sigma_prime(1.0 - t);
    return (da * b + a * db) / ((a + b) * (a + b));
}

double chi(double r) { return smooth_step(r - 1.0); }
double chi_prime(double r) { return smooth_step_prime(r - 1.0); }

Cutoff cutoff_for_scales(double y_norm, double a_norm) {
    return Cutoff{std::max({2.0 * y_norm, 2.0 * a_norm, 3.0})};
}

// ---------------------------------------------------------------------------
// corrector radial profiles

RadialProfile corrector_mu() {
    RadialProfile p;
    p.support_lo = 1.0;
    p.support_hi = 10.0;
    auto g = [](double t) { return -1.0 / (t - t * t); };
    auto gp = [](double t) {
        const double d = t - t * t;
        return (1.0 - 2.0 * t) / (d * d);
    };
    auto gpp = [](double t) {
        const double d = t - t * t;
        const double u = 1.0 - 2.0 * t;
        return (-2.0 * d - 2.0 * u * u) / (d * d * d);
    };
    p.f = [g](double r) {
        const double t = (r - 1.0) / 9.0;
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp(4.0 + g(t));
    };
    p.df = [g, gp](double r) {
        const double t = (r - 1.0) / 9.0;
        if (t <= 0.0 || t >= 1.0) return 0.0;
        return std::exp(4.0 + g(t)) * gp(t) / 9.0;
    };
    p.d2f = [g, gp, gpp](double r) {
        const double t = (r - 1.0) / 9.0;
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double dg = gp(t);
        return std::exp(4.0 + g(t)) * (gpp(t) + dg * dg) / 81.0;
    };
    return p;
}

RadialProfile corrector_mu_nk(int n, int k) {
    if (n * k <= 2)
        throw OutOfRange("corrector_mu_nk: windows degenerate unless k*n > 2");
    const double a_out = 1.0 + 1.0 / (static_cast<double>(k + 1) * n);
    const double a_in = 1.0 + 1.0 / (static_cast<double>(k) * n);
    const double b_in = 2.0 - 1.0 / (static_cast<double>(k) * n);
    const double b_out = 2.0 - 1.0 / (static_cast<double>(k + 1) * n);
    const double wl = a_in - a_out, wr = b_out - b_in;
    RadialProfile p;
    p.support_lo = a_out;
    p.support_hi = b_out;
    auto value = [=](double r) {
        return smooth_step((r - a_out) / wl) * smooth_step((b_out - r) / wr);
    };
    // derivative supports are disjoint (rise before plateau, fall after)
    auto deriv = [=](double r) {
        const double sl = smooth_step((r - a_out) / wl);
        const double sr = smooth_step((b_out - r) / wr);
        return smooth_step_prime((r - a_out) / wl) / wl * sr -
               sl * smooth_step_prime((b_out - r) / wr) / wr;
    };
    p.f = value;
    p.df = deriv;
    const double h = 1e-6 * std::min(wl, wr);
    p.d2f = [deriv, h](double r) { return (deriv(r + h) - deriv(r - h)) / (2.0 * h); };
    return p;
}

} // namespace eidg
