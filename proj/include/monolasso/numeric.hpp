#pragma once

#include <Eigen/Dense>

namespace monolasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Pivots smaller than this fraction of the largest Gram diagonal are treated as rank loss.
inline constexpr double kRankTolerance = 1e-12;

/// Least squares via Householder QR. Throws DegenerateDesignError naming the first
/// column whose pivot falls below kRankTolerance.
Vector solve_least_squares(const Matrix& A, const Vector& b);

struct NnlsOptions {
    /// Cap on active-set pivots (additions plus removals); 0 selects 10 * cols.
    int max_pivots = 0;
    /// KKT tolerance relative to the problem scale.
    double tolerance = 1e-11;
};

/// Lawson-Hanson active-set NNLS: argmin ||b - A theta||^2 subject to theta >= 0.
Vector solve_nnls(const Matrix& A, const Vector& b, const NnlsOptions& options = {});

/// Same problem posed through its normal equations:
/// argmin 1/2 theta' G theta - q' theta subject to theta >= 0, with G positive semidefinite.
Vector solve_nnls_gram(const Matrix& gram, const Vector& q, const NnlsOptions& options = {});

/// Lower-triangular Cholesky factor of a Gram matrix, maintained under column
/// insertions and deletions so that active-set solvers never refactor from scratch.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    /// Factor a full Gram matrix column by column (through append).
    static CholeskyFactor from_gram(const Matrix& gram);

    Index dimension() const { return lower_.rows(); }
    const Matrix& lower() const { return lower_; }

    /// Append one column. gram_row holds the inner products of the new column with the
    /// existing ones followed by its squared norm (length dimension() + 1).
    void append(const Vector& gram_row);

    /// Delete column k and restore triangularity with Givens rotations.
    void remove(Index k);

    /// Solve (L L') x = rhs.
    Vector solve(const Vector& rhs) const;

    Matrix gram() const { return lower_ * lower_.transpose(); }

private:
    Matrix lower_;
};

CholeskyFactor factor_update(CholeskyFactor factor, const Vector& new_column_gram_row);
CholeskyFactor factor_downdate(CholeskyFactor factor, Index column);

}  // namespace monolasso
