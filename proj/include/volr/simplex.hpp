#pragma once

#include <algorithm>
#include <vector>

#include "volr/linalg.hpp"

namespace volr {

struct SimplexResult {
    bool feasible = false;
    double value = 0.0;
    Vector x;  // primal solution over the original columns
};

/// Dense two-phase primal simplex for  min c'x  s.t.  Ax = b, x >= 0.
/// Bland's rule throughout: deterministic and cycle-free. Built for the
/// small, well-scaled tableaus the gauge LPs produce (rows <= ~20).
class SimplexSolver {
public:
    static SimplexResult minimize(const Matrix& a, const Vector& b, const Vector& c,
                                  int max_pivots = 200000) {
        const int m = static_cast<int>(a.rows());
        const int n = static_cast<int>(a.cols());
        if (b.size() != m || c.size() != n)
            throw DimensionMismatch("simplex: inconsistent input sizes");

        // Tableau: [A | I_artificial | rhs], rows flipped so rhs >= 0.
        Matrix t(m, n + m + 1);
        for (int i = 0; i < m; ++i) {
            const double s = b(i) < 0 ? -1.0 : 1.0;
            t.row(i).head(n) = s * a.row(i);
            t.row(i).segment(n, m).setZero();
            t(i, n + i) = 1.0;
            t(i, n + m) = s * b(i);
        }
        std::vector<int> basis(m);
        for (int i = 0; i < m; ++i) basis[i] = n + i;

        // Phase 1: min sum of artificials.
        Vector cost1 = Vector::Zero(n + m);
        cost1.segment(n, m).setOnes();
        int pivots = 0;
        const double phase1 = run(t, basis, cost1, n + m, max_pivots, pivots);
        if (phase1 > 1e-7) return {};  // infeasible

        drive_out_artificials(t, basis, n);

        // Phase 2 over the original columns only.
        Vector cost2 = Vector::Zero(n + m);
        cost2.head(n) = c;
        const double value = run(t, basis, cost2, n, max_pivots, pivots);

        SimplexResult res;
        res.feasible = true;
        res.value = value;
        res.x = Vector::Zero(n);
        for (int i = 0; i < m; ++i)
            if (basis[i] < n) res.x(basis[i]) = t(i, n + m);
        return res;
    }

private:
    static constexpr double kPivotEps = 1e-10;
    static constexpr double kCostEps = 1e-9;

    // Runs Bland pivoting for the given cost vector, allowing entering
    // columns in [0, enter_limit). Returns the objective value.
    static double run(Matrix& t, std::vector<int>& basis, const Vector& cost, int enter_limit,
                      int max_pivots, int& pivots) {
        const int m = static_cast<int>(t.rows());
        const int rhs = static_cast<int>(t.cols()) - 1;

        // Reduced cost row r_j = c_j - c_B' T_j, objective = c_B' rhs.
        Vector r(rhs);
        double obj = 0.0;
        auto recompute = [&]() {
            r = cost;
            obj = 0.0;
            for (int i = 0; i < m; ++i) {
                const double cb = cost(basis[i]);
                if (cb != 0.0) {
                    r -= cb * t.row(i).head(rhs).transpose();
                    obj += cb * t(i, rhs);
                }
            }
        };
        recompute();

        while (true) {
            int enter = -1;
            for (int j = 0; j < enter_limit; ++j) {
                if (r(j) < -kCostEps) {
                    enter = j;
                    break;  // Bland: smallest index
                }
            }
            if (enter < 0) break;

            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                const double aij = t(i, enter);
                if (aij > kPivotEps) {
                    const double ratio = t(i, rhs) / aij;
                    if (leave < 0 || ratio < best_ratio - 1e-14 ||
                        (ratio <= best_ratio + 1e-14 && basis[i] < basis[leave])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) break;  // unbounded; cannot happen for gauge LPs

            const double re = r(enter);
            pivot(t, basis, leave, enter);
            // Incremental update: r <- r - r_enter * (new pivot row).
            r -= re * t.row(leave).head(rhs).transpose();
            obj += re * t(leave, rhs);
            if (++pivots > max_pivots) {
                recompute();  // safety net; Bland should terminate long before
                break;
            }
        }
        recompute();
        return obj;
    }

    static void pivot(Matrix& t, std::vector<int>& basis, int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i < t.rows(); ++i) {
            if (i == row) continue;
            const double f = t(i, col);
            if (f != 0.0) t.row(i) -= f * t.row(row);
        }
        basis[row] = col;
    }

    // After phase 1, swap any artificial still basic (at level ~0) for an
    // original column where possible; redundant rows keep a zero artificial.
    static void drive_out_artificials(Matrix& t, std::vector<int>& basis, int n) {
        const int m = static_cast<int>(t.rows());
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (std::abs(t(i, j)) > 1e-9) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) pivot(t, basis, i, col);
        }
    }
};

/// Gauge of absconv(columns of V) at x: optimal value of
///   min sum(a+ + a-)  s.t.  V(a+ - a-) = x, a+- >= 0.
inline double polytope_gauge_lp(const Matrix& v, const Vector& x) {
    const int n = static_cast<int>(v.rows());
    const int m = static_cast<int>(v.cols());
    require_dim(n, static_cast<int>(x.size()), "polytope_gauge_lp");
    const double scale = x.norm();
    if (scale == 0.0) return 0.0;

    Matrix a(n, 2 * m);
    a.leftCols(m) = v;
    a.rightCols(m) = -v;
    const Vector c = Vector::Ones(2 * m);
    SimplexResult res = SimplexSolver::minimize(a, x / scale, c);
    if (!res.feasible) throw RankDeficient("polytope_gauge_lp: generators do not span");
    return res.value * scale;
}

/// Exact boundary parameter along a ray inside absconv(columns of V):
///   max t  s.t.  V(a+ - a-) = x + t*dir, sum(a+ + a-) + s = 1, all >= 0.
/// Requires x strictly inside; one LP instead of a gauge root find.
inline double polytope_ray_exit_lp(const Matrix& v, const Vector& x, const Vector& dir) {
    const int n = static_cast<int>(v.rows());
    const int m = static_cast<int>(v.cols());
    Matrix a = Matrix::Zero(n + 1, 2 * m + 2);
    a.block(0, 0, n, m) = v;
    a.block(0, m, n, m) = -v;
    a.col(2 * m).head(n) = -dir;
    a.row(n).head(2 * m).setOnes();
    a(n, 2 * m + 1) = 1.0;  // slack for the simplex-weight budget
    Vector b(n + 1);
    b.head(n) = x;
    b(n) = 1.0;
    Vector c = Vector::Zero(2 * m + 2);
    c(2 * m) = -1.0;
    SimplexResult res = SimplexSolver::minimize(a, b, c);
    if (!res.feasible) throw RankDeficient("polytope_ray_exit_lp: infeasible");
    return -res.value;
}

}  // namespace volr
