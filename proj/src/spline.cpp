#include "qcompose/spline.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qcompose {

namespace {

// The published tension/stiffness coefficients are interpreted on a knot
// lattice of spacing 1/2, which makes the difference operators
// 4 * membrane and 16 * thin-plate on the unit cell lattice. This keeps the
// omega_t = 0.2 fit free of overshoot while staying sharp at sub-cell scale.
constexpr double kMembraneScale = 4.0;
constexpr double kPlateScale = 16.0;

// Uniform quadratic B-spline on [0,3), right-continuous in its pieces so
// knot-line derivatives take the right-sided value.
double bq(double t, int order) {
    if (t < 0.0 || t >= 3.0) return 0.0;
    switch (order) {
    case 0:
        if (t < 1.0) return 0.5 * t * t;
        if (t < 2.0) return 0.5 * (-2.0 * t * t + 6.0 * t - 3.0);
        return 0.5 * (3.0 - t) * (3.0 - t);
    case 1:
        if (t < 1.0) return t;
        if (t < 2.0) return -2.0 * t + 3.0;
        return t - 3.0;
    case 2:
        if (t < 1.0) return 1.0;
        if (t < 2.0) return -2.0;
        return 1.0;
    default:
        return 0.0;
    }
}

} // namespace

SplineModel2D fit2d(const ScalarField& field, double tension,
                    double stiffness, const std::vector<double>& weights) {
    const int res = field.grid.resolution;
    const int n = res * res;
    if (!weights.empty() && static_cast<int>(weights.size()) != n)
        throw std::invalid_argument("weight vector size mismatch");
    double wsum = 0.0;
    if (!weights.empty())
        for (double w : weights) wsum += std::abs(w);
    if (!weights.empty() && wsum == 0.0)
        throw std::invalid_argument("all-zero weights: singular system");

    auto weight = [&](int i) { return weights.empty() ? 1.0 : weights[i]; };
    auto idx = [res](int cx, int cy) { return cy * res + cx; };

    // stage 1: (W + wt*4*L1 + ws*16*L2) f = W d on the cell lattice
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(n) * 14);
    const double wt = kMembraneScale * tension;
    const double ws = kPlateScale * stiffness;

    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    auto add = [&](int r, int c, double v) {
        if (r == c)
            diag[static_cast<std::size_t>(r)] += v;
        else
            trips.emplace_back(r, c, v);
    };

    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            add(idx(cx, cy), idx(cx, cy), weight(idx(cx, cy)));
        }
    }
    if (wt != 0.0) {
        // Gram of forward differences in x and y
        for (int cy = 0; cy < res; ++cy) {
            for (int cx = 0; cx + 1 < res; ++cx) {
                const int a = idx(cx, cy), b = idx(cx + 1, cy);
                add(a, a, wt);
                add(b, b, wt);
                add(a, b, -wt);
                add(b, a, -wt);
            }
        }
        for (int cy = 0; cy + 1 < res; ++cy) {
            for (int cx = 0; cx < res; ++cx) {
                const int a = idx(cx, cy), b = idx(cx, cy + 1);
                add(a, a, wt);
                add(b, b, wt);
                add(a, b, -wt);
                add(b, a, -wt);
            }
        }
    }
    if (ws != 0.0) {
        // Gram of [Dxx; sqrt(2) Dxy; Dyy]
        auto add_row = [&](const int* ids, const double* co, int m, double s) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    add(ids[i], ids[j], s * co[i] * co[j]);
        };
        const double cxx[3] = {1.0, -2.0, 1.0};
        for (int cy = 0; cy < res; ++cy) {
            for (int cx = 1; cx + 1 < res; ++cx) {
                const int ids[3] = {idx(cx - 1, cy), idx(cx, cy),
                                    idx(cx + 1, cy)};
                add_row(ids, cxx, 3, ws);
            }
        }
        for (int cy = 1; cy + 1 < res; ++cy) {
            for (int cx = 0; cx < res; ++cx) {
                const int ids[3] = {idx(cx, cy - 1), idx(cx, cy),
                                    idx(cx, cy + 1)};
                add_row(ids, cxx, 3, ws);
            }
        }
        const double cxy[4] = {1.0, -1.0, -1.0, 1.0};
        for (int cy = 0; cy + 1 < res; ++cy) {
            for (int cx = 0; cx + 1 < res; ++cx) {
                const int ids[4] = {idx(cx, cy), idx(cx + 1, cy),
                                    idx(cx, cy + 1), idx(cx + 1, cy + 1)};
                add_row(ids, cxy, 4, 2.0 * ws);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        trips.emplace_back(i, i, diag[static_cast<std::size_t>(i)]);

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i)
        rhs[i] = weight(i) * field.values[static_cast<std::size_t>(i)];

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("fit2d: factorization failed");
    const Eigen::VectorXd f = solver.solve(rhs);

    SplineModel2D model;
    model.tension_ = tension;
    model.stiffness_ = stiffness;
    model.fitted_ = ScalarField(field.grid);
    for (int i = 0; i < n; ++i)
        model.fitted_.values[static_cast<std::size_t>(i)] = f[i];

    // stage 2: tensor quadratic collocation through the fitted lattice.
    // 1-D system: rows 1..res are center collocation, rows 0 and res+1 are
    // natural ends (vanishing second difference of coefficients).
    const int m = res + 2;
    Eigen::MatrixXd C1 = Eigen::MatrixXd::Zero(m, m);
    C1(0, 0) = 1.0;
    C1(0, 1) = -2.0;
    C1(0, 2) = 1.0;
    C1(m - 1, m - 3) = 1.0;
    C1(m - 1, m - 2) = -2.0;
    C1(m - 1, m - 1) = 1.0;
    for (int i = 0; i < res; ++i) {
        C1(i + 1, i) = 0.125;
        C1(i + 1, i + 1) = 0.75;
        C1(i + 1, i + 2) = 0.125;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(C1);

    // rows first (x direction), then columns (y direction)
    Eigen::MatrixXd inter(res, m);
    Eigen::VectorXd line(m);
    for (int cy = 0; cy < res; ++cy) {
        line.setZero();
        for (int cx = 0; cx < res; ++cx) line[cx + 1] = f[idx(cx, cy)];
        inter.row(cy) = lu.solve(line).transpose();
    }
    Eigen::MatrixXd coefs(m, m);
    for (int jx = 0; jx < m; ++jx) {
        line.setZero();
        for (int cy = 0; cy < res; ++cy) line[cy + 1] = inter(cy, jx);
        coefs.col(jx) = lu.solve(line);
    }
    model.coefs_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int jy = 0; jy < m; ++jy)
        for (int jx = 0; jx < m; ++jx)
            model.coefs_[static_cast<std::size_t>(jy) * m + jx] = coefs(jy, jx);
    return model;
}

double SplineModel2D::eval(Point2 p, int dx_order, int dy_order) const {
    const int res = fitted_.grid.resolution;
    const int m = res + 2;
    const double w = fitted_.grid.cell_width();
    // lattice coordinates in [0, res]
    const double u = std::clamp((p.x + 1.0) / w, 0.0, double(res));
    const double v = std::clamp((p.y + 1.0) / w, 0.0, double(res));
    // basis j covers u in (j-1, j+2)
    const int ju0 = std::clamp(static_cast<int>(std::floor(u)) - 1, -1, res);
    const int jv0 = std::clamp(static_cast<int>(std::floor(v)) - 1, -1, res);
    double out = 0.0;
    for (int jv = jv0; jv < jv0 + 3; ++jv) {
        if (jv < -1 || jv > res) continue;
        const double by = bq(v - (jv - 1), dy_order);
        if (by == 0.0) continue;
        for (int ju = ju0; ju < ju0 + 3; ++ju) {
            if (ju < -1 || ju > res) continue;
            const double bx = bq(u - (ju - 1), dx_order);
            if (bx == 0.0) continue;
            out += coefs_[static_cast<std::size_t>(jv + 1) * m + (ju + 1)] *
                   bx * by;
        }
    }
    const double scale = std::pow(1.0 / w, dx_order + dy_order);
    return out * scale;
}

DerivativeField sample_derivatives(const SplineModel2D& model) {
    const GridSpec g = model.grid();
    const int res = g.resolution;
    DerivativeField d;
    d.grid = g;
    const std::size_t n = static_cast<std::size_t>(res) * res;
    d.gx.resize(n);
    d.gy.resize(n);
    d.gxx.resize(n);
    d.gyy.resize(n);
    d.gxy.resize(n);
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            const Point2 p = g.cell_center(cx, cy);
            const std::size_t i = d.index(cx, cy);
            d.gx[i] = model.dx(p);
            d.gy[i] = model.dy(p);
            d.gxx[i] = model.dxx(p);
            d.gyy[i] = model.dyy(p);
            d.gxy[i] = model.dxy(p);
        }
    }
    return d;
}

EdgeEnergy edge_energy(const DerivativeField& d) {
    EdgeEnergy e;
    e.energy = ScalarField(d.grid);
    e.diff_x = ScalarField(d.grid);
    e.diff_y = ScalarField(d.grid);
    const std::size_t n = d.gx.size();
    for (std::size_t i = 0; i < n; ++i) {
        e.energy.values[i] = -(d.gx[i] * d.gx[i] + d.gy[i] * d.gy[i]);
        e.diff_x.values[i] =
            -2.0 * (d.gx[i] * d.gxx[i] + d.gy[i] * d.gxy[i]);
        e.diff_y.values[i] =
            -2.0 * (d.gx[i] * d.gxy[i] + d.gy[i] * d.gyy[i]);
    }
    return e;
}

EdgeEnergy edge_energy(const SplineModel2D& model) {
    return edge_energy(sample_derivatives(model));
}

DerivativeField normalize_gradient(const DerivativeField& raw,
                                   const ScalarField& smooth) {
    DerivativeField out = raw;
    const std::size_t n = raw.gx.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::max(smooth.values[i], kNormalizeFloor);
        out.gx[i] /= s;
        out.gy[i] /= s;
        out.gxx[i] /= s;
        out.gyy[i] /= s;
        out.gxy[i] /= s;
    }
    return out;
}

DerivativeField add_boundary_gradient(const DerivativeField& raw,
                                      double magnitude) {
    DerivativeField out = raw;
    const int res = raw.grid.resolution;
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            const std::size_t i = out.index(cx, cy);
            if (cx == 0) out.gx[i] -= magnitude;
            if (cx == res - 1) out.gx[i] += magnitude;
            if (cy == 0) out.gy[i] -= magnitude;
            if (cy == res - 1) out.gy[i] += magnitude;
        }
    }
    // refresh second differentials near the border by central differences of
    // the modified first derivatives (cell units scaled to state units)
    const double w = raw.grid.cell_width();
    auto central = [&](const std::vector<double>& f, int cx, int cy,
                       bool in_x) {
        const int xm = in_x ? std::max(cx - 1, 0) : cx;
        const int xp = in_x ? std::min(cx + 1, res - 1) : cx;
        const int ym = in_x ? cy : std::max(cy - 1, 0);
        const int yp = in_x ? cy : std::min(cy + 1, res - 1);
        const double span = in_x ? (xp - xm) * w : (yp - ym) * w;
        if (span == 0.0) return 0.0;
        return (f[out.index(xp, yp)] - f[out.index(xm, ym)]) / span;
    };
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            if (cx > 2 && cx < res - 3 && cy > 2 && cy < res - 3) continue;
            const std::size_t i = out.index(cx, cy);
            out.gxx[i] = central(out.gx, cx, cy, true);
            out.gyy[i] = central(out.gy, cx, cy, false);
            out.gxy[i] = central(out.gx, cx, cy, false);
        }
    }
    return out;
}

ScalarField differential_magnitude(const EdgeEnergy& e) {
    ScalarField m(e.energy.grid);
    for (std::size_t i = 0; i < m.values.size(); ++i)
        m.values[i] =
            std::hypot(e.diff_x.values[i], e.diff_y.values[i]);
    return m;
}

ScalarField bowls(const ScalarField& diff_mag, double threshold) {
    const std::size_t n = diff_mag.values.size();
    ScalarField binary(diff_mag.grid);
    std::vector<double> weights(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(diff_mag.values[i]) >= threshold) {
            binary.values[i] = 1.0;
            weights[i] = 200.0;
        }
    }
    SplineModel2D model = fit2d(binary, 1.0, 0.5, weights);
    return model.fitted();
}

std::vector<std::pair<int, int>> local_minima(const ScalarField& f) {
    const int res = f.grid.resolution;
    std::vector<std::pair<int, int>> candidates;
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            const double v = f.at(cx, cy);
            bool is_min = true;
            for (int dy = -1; dy <= 1 && is_min; ++dy) {
                for (int dx = -1; dx <= 1 && is_min; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = cx + dx, ny = cy + dy;
                    if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
                    if (f.at(nx, ny) < v) is_min = false;
                }
            }
            if (is_min) candidates.emplace_back(cx, cy);
        }
    }
    // merge minima that share a shallow basin: keep a candidate only when it
    // is not reachable from a deeper accepted one through near-floor terrain
    double lo = 1e300, hi = -1e300;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double tol = 0.02 * std::max(hi - lo, 1e-12);
    std::sort(candidates.begin(), candidates.end(),
              [&](auto a, auto b) {
                  return f.at(a.first, a.second) < f.at(b.first, b.second);
              });
    std::vector<std::pair<int, int>> accepted;
    for (auto [cx, cy] : candidates) {
        const double level = f.at(cx, cy) + tol;
        // flood fill below `level` from the candidate
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(res) * res, 0);
        std::vector<std::pair<int, int>> stack{{cx, cy}};
        seen[static_cast<std::size_t>(cy) * res + cx] = 1;
        bool merged = false;
        while (!stack.empty() && !merged) {
            auto [x, y] = stack.back();
            stack.pop_back();
            for (const auto& acc : accepted)
                if (acc.first == x && acc.second == y) merged = true;
            for (int dy = -1; dy <= 1 && !merged; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
                    const std::size_t id =
                        static_cast<std::size_t>(ny) * res + nx;
                    if (seen[id] || f.at(nx, ny) > level) continue;
                    seen[id] = 1;
                    stack.emplace_back(nx, ny);
                }
            }
        }
        if (!merged) accepted.emplace_back(cx, cy);
    }
    return accepted;
}

double noise_scale(const EdgeEnergy& e) {
    std::vector<double> samples;
    samples.reserve(e.diff_x.values.size() * 2);
    for (double v : e.diff_x.values) samples.push_back(std::abs(v));
    for (double v : e.diff_y.values) samples.push_back(std::abs(v));
    if (samples.empty()) return 0.0;
    const std::size_t mid = samples.size() / 2;
    std::nth_element(samples.begin(), samples.begin() + mid, samples.end());
    return samples[mid];
}

double noise_scale(const SplineModel2D& model) {
    return noise_scale(edge_energy(model));
}

// --- 1-D periodic spline ---

namespace {

// Uniform cubic B-spline on [0,4).
double bc(double t, int order) {
    if (t <= 0.0 || t >= 4.0) return 0.0;
    double s;
    switch (order) {
    case 0:
        if (t < 1.0) return t * t * t / 6.0;
        if (t < 2.0) {
            s = t - 1.0;
            return (-3.0 * s * s * s + 3.0 * s * s + 3.0 * s + 1.0) / 6.0;
        }
        if (t < 3.0) {
            s = t - 2.0;
            return (3.0 * s * s * s - 6.0 * s * s + 4.0) / 6.0;
        }
        s = t - 3.0;
        return (1.0 - s) * (1.0 - s) * (1.0 - s) / 6.0;
    case 1:
        if (t < 1.0) return 0.5 * t * t;
        if (t < 2.0) {
            s = t - 1.0;
            return (-9.0 * s * s + 6.0 * s + 3.0) / 6.0;
        }
        if (t < 3.0) {
            s = t - 2.0;
            return (9.0 * s * s - 12.0 * s) / 6.0;
        }
        s = t - 3.0;
        return -0.5 * (1.0 - s) * (1.0 - s);
    default:
        return 0.0;
    }
}

} // namespace

Spline1D fit1d(const std::vector<double>& samples, double tension,
               const std::vector<double>& weights) {
    const int n = static_cast<int>(samples.size());
    if (n < 8) throw std::invalid_argument("fit1d needs at least 8 samples");
    std::vector<double> w(weights);
    if (w.empty()) {
        // inverse square of the values, preventing large values from
        // overwhelming the fit
        w.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double v = std::max(std::abs(samples[i]), 0.05);
            w[static_cast<std::size_t>(i)] = 1.0 / (v * v);
        }
    }
    if (static_cast<int>(w.size()) != n)
        throw std::invalid_argument("fit1d weight size mismatch");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs(n);
    const double wt = kMembraneScale * tension;
    for (int i = 0; i < n; ++i) {
        A(i, i) += w[static_cast<std::size_t>(i)];
        rhs(i) = w[static_cast<std::size_t>(i)] * samples[static_cast<std::size_t>(i)];
        const int j = (i + 1) % n;
        A(i, i) += wt;
        A(j, j) += wt;
        A(i, j) -= wt;
        A(j, i) -= wt;
    }
    Eigen::VectorXd g = A.partialPivLu().solve(rhs);

    // periodic cubic collocation through the fitted values
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        C(i, (i + n - 1) % n) += 1.0 / 6.0;
        C(i, i) += 4.0 / 6.0;
        C(i, (i + 1) % n) += 1.0 / 6.0;
    }
    Eigen::VectorXd c = C.partialPivLu().solve(g);

    Spline1D sp;
    sp.fitted_.assign(g.data(), g.data() + n);
    sp.coefs_.assign(c.data(), c.data() + n);
    return sp;
}

double Spline1D::value(double t) const {
    const int n = static_cast<int>(coefs_.size());
    double u = (t - std::floor(t)) * n; // periodic, in knot units
    const int base = static_cast<int>(std::floor(u));
    double out = 0.0;
    for (int j = base - 1; j <= base + 2; ++j) {
        const double b = bc(u - (j - 2), 0);
        if (b != 0.0)
            out += coefs_[static_cast<std::size_t>(((j % n) + n) % n)] * b;
    }
    return out;
}

double Spline1D::deriv(double t) const {
    const int n = static_cast<int>(coefs_.size());
    double u = (t - std::floor(t)) * n;
    const int base = static_cast<int>(std::floor(u));
    double out = 0.0;
    for (int j = base - 1; j <= base + 2; ++j) {
        const double b = bc(u - (j - 2), 1);
        if (b != 0.0)
            out += coefs_[static_cast<std::size_t>(((j % n) + n) % n)] * b;
    }
    return out * n; // chain rule: d/dt = n * d/du
}

std::vector<double> Spline1D::derivative_sign_changes() const {
    const int n = static_cast<int>(coefs_.size());
    double span = 0.0;
    for (double v : fitted_) span = std::max(span, std::abs(v));
    const double eps = 1e-9 * std::max(span, 1.0) * n;
    std::vector<double> starts;
    for (int i = 0; i < n; ++i) {
        const double t0 = static_cast<double>(i) / n;
        const double t1 = static_cast<double>(i + 1) / n;
        const double d0 = deriv(t0), d1 = deriv(t1);
        if (std::abs(d0) > eps && std::abs(d1) > eps && d0 * d1 < 0.0)
            starts.push_back(t0);
    }
    return starts;
}

std::vector<std::pair<double, double>> Spline1D::descend_minima() const {
    const int n = static_cast<int>(coefs_.size());
    const double knot = 1.0 / n;
    std::vector<std::pair<double, double>> mins;
    for (double start : derivative_sign_changes()) {
        double x = start;
        double step = 1.25 * knot; // slightly larger than a knot spacing
        for (int it = 0; it < 200 && step > 1e-6; ++it) {
            const double d = deriv(x);
            const double cand = x - (d > 0.0 ? step : -step);
            if (value(cand) < value(x)) {
                x = cand - std::floor(cand);
            } else {
                step *= 0.5;
            }
        }
        const double v = value(x);
        bool dup = false;
        for (auto& m : mins) {
            double sep = std::abs(m.first - x);
            sep = std::min(sep, 1.0 - sep);
            if (sep < knot) {
                dup = true;
                if (v < m.second) m = {x, v};
            }
        }
        if (!dup) mins.emplace_back(x, v);
    }
    return mins;
}

std::string field_to_text(const ScalarField& f) {
    std::ostringstream os;
    os << "FIELD v1 " << f.grid.resolution << "\n";
    char buf[32];
    const int res = f.grid.resolution;
    for (int cy = 0; cy < res; ++cy) {
        for (int cx = 0; cx < res; ++cx) {
            std::snprintf(buf, sizeof(buf), "%.17g", f.at(cx, cy));
            os << buf << (cx + 1 == res ? "\n" : " ");
        }
    }
    return os.str();
}

ScalarField field_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string tag, version;
    int res = 0;
    is >> tag >> version >> res;
    if (tag != "FIELD" || version != "v1" || res <= 0)
        throw std::runtime_error("bad field header");
    ScalarField f(GridSpec{res});
    for (int cy = 0; cy < res; ++cy)
        for (int cx = 0; cx < res; ++cx)
            if (!(is >> f.at(cx, cy)))
                throw std::runtime_error("truncated field data");
    return f;
}

} // namespace qcompose
