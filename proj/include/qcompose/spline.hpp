#pragma once

#include <string>
#include <vector>

#include "qcompose/grid.hpp"

namespace qcompose {

// Regularized 2-D fit of a cell-resolved field. The discretized energy is
// solved on the cell lattice (membrane and thin-plate difference operators,
// natural boundaries, direct sparse solve); a tensor-product quadratic
// B-spline collocated through the fitted lattice provides continuum
// evaluation and derivatives.
class SplineModel2D {
public:
    SplineModel2D() = default;

    const ScalarField& fitted() const { return fitted_; }
    const GridSpec& grid() const { return fitted_.grid; }
    double tension() const { return tension_; }
    double stiffness() const { return stiffness_; }

    double value(Point2 p) const { return eval(p, 0, 0); }
    double dx(Point2 p) const { return eval(p, 1, 0); }
    double dy(Point2 p) const { return eval(p, 0, 1); }
    double dxx(Point2 p) const { return eval(p, 2, 0); }
    double dyy(Point2 p) const { return eval(p, 0, 2); }
    double dxy(Point2 p) const { return eval(p, 1, 1); }

    friend SplineModel2D fit2d(const ScalarField& field, double tension,
                               double stiffness,
                               const std::vector<double>& weights);

private:
    double eval(Point2 p, int dx_order, int dy_order) const;

    ScalarField fitted_;
    std::vector<double> coefs_; // (res+2)^2 tensor B-spline coefficients
    double tension_ = 0.0;
    double stiffness_ = 0.0;
};

// Minimizes the weighted fit energy with tension (first differential) and
// stiffness (second differential) penalties. Empty weights mean unit
// weights. Throws on an all-zero weight vector.
SplineModel2D fit2d(const ScalarField& field, double tension,
                    double stiffness,
                    const std::vector<double>& weights = {});

struct DerivativeField {
    GridSpec grid;
    std::vector<double> gx, gy, gxx, gyy, gxy;

    std::size_t index(int cx, int cy) const {
        return static_cast<std::size_t>(cy) * grid.resolution + cx;
    }
};

// Cell-center samples of the model derivatives.
DerivativeField sample_derivatives(const SplineModel2D& model);

struct EdgeEnergy {
    ScalarField energy;  // -|grad Q|^2
    ScalarField diff_x;  // d(-|grad Q|^2)/dx = -2 (Qx Qxx + Qy Qxy)
    ScalarField diff_y;  // -2 (Qx Qxy + Qy Qyy)
};

EdgeEnergy edge_energy(const DerivativeField& d);
EdgeEnergy edge_energy(const SplineModel2D& model);

inline constexpr double kNormalizeFloor = 1e-3;

// Divides every derivative component by the heavy-smoothed field value
// (floored), so ridge size does not depend on where it occurs in the
// exponential-decay function.
DerivativeField normalize_gradient(const DerivativeField& raw,
                                   const ScalarField& smooth);

// Adds an outward first-derivative ridge of the given magnitude on the
// state-square border and refreshes the second differentials there, so
// snakes treat the boundary as a wall.
DerivativeField add_boundary_gradient(const DerivativeField& raw,
                                      double magnitude = 1.0);

// Vector magnitude of the Eq-style differential, per cell.
ScalarField differential_magnitude(const EdgeEnergy& e);

// Binarizes |differential| at the threshold and fits the weighted smoothing
// spline (weights 200 on ones, 1 elsewhere); local minima of the result sit
// inside rooms.
ScalarField bowls(const ScalarField& diff_mag, double threshold);

std::vector<std::pair<int, int>> local_minima(const ScalarField& f);

// Median absolute differential over the sample lattice; robust noise level
// used to scale gradient height for early feature detection.
double noise_scale(const SplineModel2D& model);
double noise_scale(const EdgeEnergy& e);

// Periodic weighted 1-D smoothing spline over samples on [0, 1).
class Spline1D {
public:
    double value(double t) const; // t in [0,1), periodic
    double deriv(double t) const;
    int size() const { return static_cast<int>(fitted_.size()); }
    const std::vector<double>& fitted() const { return fitted_; }

    // positions (in [0,1)) where the spline derivative changes sign
    std::vector<double> derivative_sign_changes() const;

    // steepest-descent local minima from the sign-change start points:
    // (position, value) pairs
    std::vector<std::pair<double, double>> descend_minima() const;

    friend Spline1D fit1d(const std::vector<double>& samples, double tension,
                          const std::vector<double>& weights);

private:
    std::vector<double> fitted_;
    std::vector<double> coefs_; // periodic cubic B-spline coefficients
};

// Weighted periodic fit; weights default to the inverse square of the
// sample values (floored), per the doorway-locating procedure.
Spline1D fit1d(const std::vector<double>& samples, double tension = 0.15,
               const std::vector<double>& weights = {});

std::string field_to_text(const ScalarField& f);
ScalarField field_from_text(const std::string& text);

} // namespace qcompose
