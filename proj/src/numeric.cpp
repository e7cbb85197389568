#include "monolasso/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "monolasso/errors.hpp"

namespace monolasso {

namespace {

[[noreturn]] void throw_degenerate(Index column, const char* where) {
    throw DegenerateDesignError(
        column, std::string(where) + ": column " + std::to_string(column) +
                    " is numerically dependent on the preceding columns");
}

// Generic Lawson-Hanson loop. `subsolve(passive)` returns the unconstrained minimizer
// restricted to the passive set (zeros elsewhere); `negative_gradient(x)` returns the
// KKT multipliers with sign flipped (positive entries can still improve the objective).
template <class SubSolve, class NegGrad>
Vector lawson_hanson(Index n, SubSolve&& subsolve, NegGrad&& negative_gradient, double tol,
                     int max_pivots) {
    Vector x = Vector::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    std::vector<bool> blocked(static_cast<std::size_t>(n), false);
    const int cap = max_pivots > 0 ? max_pivots : static_cast<int>(10 * std::max<Index>(n, 1));
    int pivots = 0;

    Vector w = negative_gradient(x);
    while (true) {
        Index entering = -1;
        double best = tol;
        for (Index j = 0; j < n; ++j) {
            if (!passive[j] && !blocked[j] && w[j] > best) {
                best = w[j];
                entering = j;
            }
        }
        if (entering < 0) break;
        passive[entering] = true;
        if (++pivots > cap) throw SolverStallError("nnls: active-set pivot budget exhausted");

        bool first_pass = true;
        while (true) {
            Vector s;
            bool singular = false;
            try {
                s = subsolve(passive);
            } catch (const DegenerateDesignError&) {
                if (!first_pass) throw;
                singular = true;
            }
            if (first_pass && (singular || s[entering] <= 0.0)) {
                // Roundoff made the entering variable useless; skip it this round.
                passive[entering] = false;
                blocked[entering] = true;
                break;
            }
            first_pass = false;

            bool feasible = true;
            for (Index j = 0; j < n; ++j) {
                if (passive[j] && s[j] <= 0.0) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                x = s;
                std::fill(blocked.begin(), blocked.end(), false);
                break;
            }

            double alpha = 1.0;
            Index limiting = -1;
            for (Index j = 0; j < n; ++j) {
                if (passive[j] && s[j] <= 0.0) {
                    const double a = x[j] / (x[j] - s[j]);
                    if (a < alpha) {
                        alpha = a;
                        limiting = j;
                    }
                }
            }
            x += alpha * (s - x);
            for (Index j = 0; j < n; ++j) {
                if (passive[j] && (j == limiting || x[j] <= 0.0)) {
                    passive[j] = false;
                    x[j] = 0.0;
                    if (++pivots > cap) {
                        throw SolverStallError("nnls: active-set pivot budget exhausted");
                    }
                }
            }
        }
        w = negative_gradient(x);
    }
    return x;
}

}  // namespace

Vector solve_least_squares(const Matrix& A, const Vector& b) {
    const Index n = A.cols();
    if (n == 0) return Vector(0);
    if (A.rows() != b.size()) throw ConfigError("solve_least_squares: dimension mismatch");

    const double max_norm2 = A.colwise().squaredNorm().maxCoeff();
    if (!(max_norm2 > 0.0)) throw_degenerate(0, "solve_least_squares");
    if (A.rows() < n) throw_degenerate(A.rows(), "solve_least_squares");

    Eigen::HouseholderQR<Matrix> qr(A);
    const Matrix& packed = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const double pivot = packed(j, j);
        if (pivot * pivot < kRankTolerance * max_norm2) throw_degenerate(j, "solve_least_squares");
    }
    Vector qtb = qr.householderQ().transpose() * b;
    return packed.topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(qtb.head(n));
}

Vector solve_nnls(const Matrix& A, const Vector& b, const NnlsOptions& options) {
    const Index n = A.cols();
    if (n == 0) throw ConfigError("solve_nnls: empty design");
    if (A.rows() != b.size()) throw ConfigError("solve_nnls: dimension mismatch");

    const double scale = std::max(b.norm() * A.colwise().norm().maxCoeff(), 1e-300);
    const double tol = options.tolerance * scale;

    auto subsolve = [&](const std::vector<bool>& passive) {
        std::vector<Index> cols;
        for (Index j = 0; j < n; ++j)
            if (passive[j]) cols.push_back(j);
        Matrix sub(A.rows(), static_cast<Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = A.col(cols[k]);
        Vector s = Vector::Zero(n);
        Vector theta;
        try {
            theta = solve_least_squares(sub, b);
        } catch (const DegenerateDesignError& e) {
            throw_degenerate(cols[static_cast<std::size_t>(e.column)], "solve_nnls");
        }
        for (std::size_t k = 0; k < cols.size(); ++k) s[cols[k]] = theta[static_cast<Index>(k)];
        return s;
    };
    auto negative_gradient = [&](const Vector& x) -> Vector { return A.transpose() * (b - A * x); };
    return lawson_hanson(n, subsolve, negative_gradient, tol, options.max_pivots);
}

Vector solve_nnls_gram(const Matrix& gram, const Vector& q, const NnlsOptions& options) {
    const Index n = gram.cols();
    if (n == 0) throw ConfigError("solve_nnls_gram: empty problem");
    if (gram.rows() != n || q.size() != n) throw ConfigError("solve_nnls_gram: dimension mismatch");

    const double scale = std::max(q.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = options.tolerance * scale;

    auto subsolve = [&](const std::vector<bool>& passive) {
        std::vector<Index> cols;
        for (Index j = 0; j < n; ++j)
            if (passive[j]) cols.push_back(j);
        const auto m = static_cast<Index>(cols.size());
        Matrix sub(m, m);
        Vector rhs(m);
        for (Index a = 0; a < m; ++a) {
            rhs[a] = q[cols[a]];
            for (Index c = 0; c < m; ++c) sub(a, c) = gram(cols[a], cols[c]);
        }
        Vector theta;
        try {
            theta = CholeskyFactor::from_gram(sub).solve(rhs);
        } catch (const DegenerateDesignError& e) {
            throw_degenerate(cols[static_cast<std::size_t>(e.column)], "solve_nnls_gram");
        }
        Vector s = Vector::Zero(n);
        for (Index a = 0; a < m; ++a) s[cols[a]] = theta[a];
        return s;
    };
    auto negative_gradient = [&](const Vector& x) -> Vector { return q - gram * x; };
    return lawson_hanson(n, subsolve, negative_gradient, tol, options.max_pivots);
}

CholeskyFactor CholeskyFactor::from_gram(const Matrix& gram) {
    if (gram.rows() != gram.cols()) throw ConfigError("CholeskyFactor: Gram matrix must be square");
    CholeskyFactor f;
    for (Index j = 0; j < gram.cols(); ++j) f.append(gram.col(j).head(j + 1));
    return f;
}

void CholeskyFactor::append(const Vector& gram_row) {
    const Index k = dimension();
    if (gram_row.size() != k + 1) throw ConfigError("CholeskyFactor::append: wrong row length");
    const double diag = gram_row[k];

    Vector l = Vector::Zero(k);
    if (k > 0) l = lower_.triangularView<Eigen::Lower>().solve(gram_row.head(k));
    const double pivot = diag - l.squaredNorm();

    double largest = diag;
    for (Index j = 0; j < k; ++j) largest = std::max(largest, lower_.row(j).squaredNorm());
    if (!(pivot > kRankTolerance * largest) || !std::isfinite(pivot)) {
        throw DegenerateDesignError(k, "Cholesky update: column " + std::to_string(k) +
                                           " makes the Gram matrix singular");
    }

    lower_.conservativeResize(k + 1, k + 1);
    lower_.row(k).head(k) = l.transpose();
    lower_.col(k).setZero();
    lower_(k, k) = std::sqrt(pivot);
}

void CholeskyFactor::remove(Index k) {
    const Index n = dimension();
    if (k < 0 || k >= n) throw ConfigError("CholeskyFactor::remove: index out of range");

    // Drop row k; rows below it keep one entry above the diagonal which rotations clear.
    Matrix m(n - 1, n);
    m.topRows(k) = lower_.topRows(k);
    m.bottomRows(n - 1 - k) = lower_.bottomRows(n - 1 - k);
    for (Index j = k; j < n - 1; ++j) {
        Eigen::JacobiRotation<double> rot;
        rot.makeGivens(m(j, j), m(j, j + 1));
        m.applyOnTheRight(j, j + 1, rot);
        m(j, j + 1) = 0.0;
        if (m(j, j) < 0.0) m.col(j) = -m.col(j);
    }
    lower_ = m.leftCols(n - 1);
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
    Vector y = lower_.triangularView<Eigen::Lower>().solve(rhs);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(y);
}

CholeskyFactor factor_update(CholeskyFactor factor, const Vector& new_column_gram_row) {
    factor.append(new_column_gram_row);
    return factor;
}

CholeskyFactor factor_downdate(CholeskyFactor factor, Index column) {
    factor.remove(column);
    return factor;
}

}  // namespace monolasso
