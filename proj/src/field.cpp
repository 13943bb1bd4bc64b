#include "eidg/field.hpp"

namespace eidg {

ScalarField ScalarField::sample(GridPtr grid,
                                const std::function<double(double, double, double)>& fxyz) {
    ScalarField f(grid);
    const int na = grid->n_ang();
    for (int ir = 0; ir < grid->n_r(); ++ir)
        for (int ia = 0; ia < na; ++ia) {
            const auto p = grid->point(ir, ia);
            f.values()[ir * na + ia] = fxyz(p[0], p[1], p[2]);
        }
    return f;
}

SymTensorField SymTensorField::euclidean(GridPtr grid) {
    SymTensorField e(grid);
    for (int i = 0; i < 3; ++i) e(i, i).values().setOnes();
    return e;
}

ScalarField trace_e(const SymTensorField& T) {
    ScalarField t = T(0, 0);
    t += T(1, 1);
    t += T(2, 2);
    return t;
}

double dot_L2(const ScalarField& a, const ScalarField& b) {
    return a.grid()->volume_integral(a * b);
}

double dot_L2(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += dot_L2(a[i], b[i]);
    return s;
}

double dot_L2(const SymTensorField& a, const SymTensorField& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += dot_L2(a(i, j), b(i, j));
    return s;
}

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, dot_L2(f, f))); }
double l2_norm(const VectorField& f) { return std::sqrt(std::max(0.0, dot_L2(f, f))); }
double l2_norm(const SymTensorField& f) { return std::sqrt(std::max(0.0, dot_L2(f, f))); }

} // namespace eidg
