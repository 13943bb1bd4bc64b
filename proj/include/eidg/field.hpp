#ifndef EIDG_FIELD_HPP
#define EIDG_FIELD_HPP

#include "eidg/grid.hpp"

#include <Eigen/Dense>
#include <array>
#include <functional>

namespace eidg {

/// Real scalar samples on every (r, theta, phi) node of a SphericalGrid.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid) : grid_(std::move(grid)) {
        v_ = Eigen::ArrayXd::Zero(grid_->n_nodes());
    }
    ScalarField(GridPtr grid, Eigen::ArrayXd values)
        : grid_(std::move(grid)), v_(std::move(values)) {}

    static ScalarField sample(GridPtr grid,
                              const std::function<double(double, double, double)>& fxyz);

    const GridPtr& grid() const { return grid_; }
    Eigen::ArrayXd& values() { return v_; }
    const Eigen::ArrayXd& values() const { return v_; }
    double operator()(int ir, int it, int ip) const { return v_[grid_->node_index(ir, it, ip)]; }
    double& at(int ir, int it, int ip) { return v_[grid_->node_index(ir, it, ip)]; }
    int size() const { return static_cast<int>(v_.size()); }
    bool all_finite() const { return v_.isFinite().all(); }
    double max_abs() const { return v_.size() ? v_.abs().maxCoeff() : 0.0; }

    ScalarField& operator+=(const ScalarField& o) { v_ += o.v_; return *this; }
    ScalarField& operator-=(const ScalarField& o) { v_ -= o.v_; return *this; }
    ScalarField& operator*=(double c) { v_ *= c; return *this; }

    friend ScalarField operator+(ScalarField a, const ScalarField& b) { a += b; return a; }
    friend ScalarField operator-(ScalarField a, const ScalarField& b) { a -= b; return a; }
    friend ScalarField operator*(double c, ScalarField a) { a *= c; return a; }
    friend ScalarField operator*(ScalarField a, double c) { a *= c; return a; }
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
        return ScalarField(a.grid_, a.v_ * b.v_);
    }

private:
    GridPtr grid_;
    Eigen::ArrayXd v_;
};

/// Three Cartesian components.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(GridPtr grid) {
        for (auto& c : comp_) c = ScalarField(grid);
    }
    ScalarField& operator[](int i) { return comp_[i]; }
    const ScalarField& operator[](int i) const { return comp_[i]; }
    const GridPtr& grid() const { return comp_[0].grid(); }

    VectorField& operator+=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) comp_[i] += o.comp_[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        for (int i = 0; i < 3; ++i) comp_[i] -= o.comp_[i];
        return *this;
    }
    VectorField& operator*=(double c) {
        for (auto& f : comp_) f *= c;
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { a += b; return a; }
    friend VectorField operator-(VectorField a, const VectorField& b) { a -= b; return a; }
    friend VectorField operator*(double c, VectorField a) { a *= c; return a; }
    double max_abs() const {
        double m = 0;
        for (const auto& f : comp_) m = std::max(m, f.max_abs());
        return m;
    }

private:
    std::array<ScalarField, 3> comp_;
};

/// Symmetric 2-tensor, six independent components, T(i,j)==T(j,i) by storage.
class SymTensorField {
public:
    SymTensorField() = default;
    explicit SymTensorField(GridPtr grid) {
        for (auto& c : comp_) c = ScalarField(grid);
    }
    static int sym_index(int i, int j) {
        static constexpr int k[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
        return k[i][j];
    }
    ScalarField& operator()(int i, int j) { return comp_[sym_index(i, j)]; }
    const ScalarField& operator()(int i, int j) const { return comp_[sym_index(i, j)]; }
    ScalarField& component(int k) { return comp_[k]; }
    int size() const { return comp_[0].size(); }
    const ScalarField& component(int k) const { return comp_[k]; }
    const GridPtr& grid() const { return comp_[0].grid(); }

    SymTensorField& operator+=(const SymTensorField& o) {
        for (int k = 0; k < 6; ++k) comp_[k] += o.comp_[k];
        return *this;
    }
    SymTensorField& operator-=(const SymTensorField& o) {
        for (int k = 0; k < 6; ++k) comp_[k] -= o.comp_[k];
        return *this;
    }
    SymTensorField& operator*=(double c) {
        for (auto& f : comp_) f *= c;
        return *this;
    }
    friend SymTensorField operator+(SymTensorField a, const SymTensorField& b) { a += b; return a; }
    friend SymTensorField operator-(SymTensorField a, const SymTensorField& b) { a -= b; return a; }
    friend SymTensorField operator*(double c, SymTensorField a) { a *= c; return a; }
    double max_abs() const {
        double m = 0;
        for (const auto& f : comp_) m = std::max(m, f.max_abs());
        return m;
    }

    /// Euclidean identity metric on the given grid.
    static SymTensorField euclidean(GridPtr grid);

private:
    std::array<ScalarField, 6> comp_;
};

// Convenience pointwise helpers used across modules.
ScalarField trace_e(const SymTensorField& T);                       // delta^{ij} T_ij
double dot_L2(const ScalarField& a, const ScalarField& b);          // int a b dx
double dot_L2(const VectorField& a, const VectorField& b);
double dot_L2(const SymTensorField& a, const SymTensorField& b);    // full index sum
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& f);
double l2_norm(const SymTensorField& f);

} // namespace eidg

#endif
