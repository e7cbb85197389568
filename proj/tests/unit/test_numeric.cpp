#include <gtest/gtest.h>

#include <random>

#include "monolasso/errors.hpp"
#include "monolasso/numeric.hpp"
#include "oracles.hpp"

using namespace monolasso;

namespace {

Matrix gaussian(std::mt19937_64& gen, Index rows, Index cols) {
    std::normal_distribution<double> z;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = z(gen);
    return m;
}

Vector gaussian(std::mt19937_64& gen, Index n) { return gaussian(gen, n, 1).col(0); }

}  // namespace

TEST(LeastSquares, Identity) {
    const Vector theta = solve_least_squares(Matrix::Identity(1, 1), Vector::Constant(1, 3.0));
    EXPECT_DOUBLE_EQ(theta[0], 3.0);
}

TEST(LeastSquares, OrthonormalColumnsGiveProjection) {
    std::mt19937_64 gen(1);
    const Matrix q = Eigen::HouseholderQR<Matrix>(gaussian(gen, 4, 2)).householderQ() * Matrix::Identity(4, 2);
    const Vector b = gaussian(gen, 4);
    const Vector theta = solve_least_squares(q, b);
    EXPECT_LE((theta - q.transpose() * b).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(LeastSquares, MatchesNormalEquationsOracle) {
    std::mt19937_64 gen(2024);
    const auto inst = oracle::random_instance(7, 20, 5);
    const Vector theta = solve_least_squares(inst.x, inst.y);
    EXPECT_LE((theta - oracle::normal_equations(inst.x, inst.y)).lpNorm<Eigen::Infinity>(), 1e-9);
    const Vector residual = inst.y - inst.x * theta;
    EXPECT_LE((inst.x.transpose() * residual).lpNorm<Eigen::Infinity>(),
              1e-9 * inst.y.norm() * inst.x.colwise().norm().maxCoeff());
}

TEST(LeastSquares, RankDeficiencyNamesColumn) {
    Matrix a(5, 3);
    a << 1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 0, 1, 2, 1, 3;
    a.col(2) = a.col(0) + a.col(1);
    try {
        solve_least_squares(a, Vector::Ones(5));
        FAIL() << "expected a degenerate-design error";
    } catch (const DegenerateDesignError& e) {
        EXPECT_EQ(e.column, 2);
        EXPECT_EQ(e.exit_code(), 4);
    }
}

TEST(Nnls, BindingConstraint) {
    EXPECT_DOUBLE_EQ(solve_nnls(Matrix::Identity(1, 1), Vector::Constant(1, -2.0))[0], 0.0);
}

TEST(Nnls, SlackConstraint) {
    EXPECT_DOUBLE_EQ(solve_nnls(Matrix::Identity(1, 1), Vector::Constant(1, 2.0))[0], 2.0);
}

TEST(Nnls, MixedSignsMatchEnumeration) {
    std::mt19937_64 gen(15);
    const Matrix a = gaussian(gen, 15, 4);
    Vector truth(4);
    truth << 1.5, -1.0, 0.7, -0.4;
    const Vector b = a * truth + 0.1 * gaussian(gen, 15);
    const Vector unconstrained = oracle::normal_equations(a, b);
    ASSERT_LT(unconstrained.minCoeff(), 0.0);
    ASSERT_GT(unconstrained.maxCoeff(), 0.0);
    EXPECT_LE((solve_nnls(a, b) - oracle::nnls_enumerate(a, b)).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(Nnls, KktAndOracleDominanceOnRandomInstances) {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const Index cols = dim(gen);
        const Index rows = cols + dim(gen) + 1;
        const Matrix a = gaussian(gen, rows, cols);
        const Vector b = gaussian(gen, rows);
        const Vector theta = solve_nnls(a, b);
        ASSERT_GE(theta.minCoeff(), 0.0);
        const Vector nu = -a.transpose() * (b - a * theta);
        const double scale = b.norm();
        for (Index j = 0; j < cols; ++j) {
            ASSERT_GE(nu[j], -1e-8 * scale) << "trial " << trial;
            ASSERT_LE(std::abs(nu[j] * theta[j]), 1e-8 * scale) << "trial " << trial;
        }
        const Vector reference = oracle::nnls_enumerate(a, b);
        ASSERT_LE((b - a * theta).squaredNorm(), (b - a * reference).squaredNorm() + 1e-10 * b.squaredNorm())
            << "trial " << trial;
    }
}

TEST(Nnls, GramFormAgreesWithDesignForm) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix a = gaussian(gen, 12, 5);
        const Vector b = gaussian(gen, 12);
        const Vector direct = solve_nnls(a, b);
        const Vector gram = solve_nnls_gram(a.transpose() * a, a.transpose() * b);
        ASSERT_LE((direct - gram).lpNorm<Eigen::Infinity>(), 1e-9) << "trial " << trial;
    }
}

TEST(Nnls, WideDesignSatisfiesKkt) {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = gaussian(gen, 6, 15);
        const Vector b = gaussian(gen, 6);
        const Vector x = solve_nnls(a, b);
        const Vector w = a.transpose() * (b - a * x);
        const double tol = 1e-9 * b.norm() * a.colwise().norm().maxCoeff();
        EXPECT_GE(x.minCoeff(), 0.0);
        EXPECT_LE(w.maxCoeff(), tol) << "trial " << trial;
        for (Index j = 0; j < x.size(); ++j)
            if (x[j] > 0.0) EXPECT_NEAR(w[j], 0.0, tol);
    }
}

TEST(Nnls, StallsWhenPivotBudgetIsTiny) {
    std::mt19937_64 gen(8);
    const Matrix a = gaussian(gen, 10, 6);
    const Vector b = a * Vector::Ones(6);
    NnlsOptions opts;
    opts.max_pivots = 1;
    EXPECT_THROW(solve_nnls(a, b, opts), SolverStallError);
}

TEST(Cholesky, OrthogonalUpdateIsBlockDiagonal) {
    CholeskyFactor f = CholeskyFactor::from_gram(Matrix::Identity(2, 2));
    Vector row(3);
    row << 0.0, 0.0, 4.0;
    f = factor_update(f, row);
    Matrix expected = Matrix::Identity(3, 3);
    expected(2, 2) = 2.0;
    EXPECT_LE((f.lower() - expected).lpNorm<Eigen::Infinity>(), 1e-15);
}

TEST(Cholesky, DowndateThenUpdateRestoresFactor) {
    std::mt19937_64 gen(3);
    const Matrix x = gaussian(gen, 20, 5);
    const Matrix g = x.transpose() * x;
    const CholeskyFactor original = CholeskyFactor::from_gram(g);
    CholeskyFactor f = factor_downdate(original, 4);
    f = factor_update(f, g.col(4));
    EXPECT_LE((f.lower() - original.lower()).lpNorm<Eigen::Infinity>(), 1e-10 * g.norm());
}

TEST(Cholesky, IncrementalMatchesFromScratch) {
    std::mt19937_64 gen(4);
    const Matrix x = gaussian(gen, 20, 5);
    const Matrix g = x.transpose() * x;
    CholeskyFactor f;
    for (Index k = 0; k < 5; ++k) f = factor_update(f, g.col(k).head(k + 1));
    const Matrix scratch = Eigen::LLT<Matrix>(g).matrixL();
    EXPECT_LE((f.lower() - scratch).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((f.gram() - g).norm(), 1e-10 * g.norm());
}

TEST(Cholesky, MiddleDowndateMatchesReducedGram) {
    std::mt19937_64 gen(6);
    const Matrix x = gaussian(gen, 20, 5);
    const Matrix g = x.transpose() * x;
    const CholeskyFactor f = factor_downdate(CholeskyFactor::from_gram(g), 1);
    std::vector<Index> keep{0, 2, 3, 4};
    Matrix reduced(4, 4);
    for (Index a = 0; a < 4; ++a)
        for (Index b = 0; b < 4; ++b) reduced(a, b) = g(keep[a], keep[b]);
    EXPECT_LE((f.gram() - reduced).norm(), 1e-10 * g.norm());
    for (Index k = 0; k < 4; ++k) EXPECT_GT(f.lower()(k, k), 0.0);
}

TEST(Cholesky, LossOfDefinitenessIsDegenerate) {
    Matrix g(2, 2);
    g << 1.0, 1.0, 1.0, 1.0;
    EXPECT_THROW(CholeskyFactor::from_gram(g), DegenerateDesignError);
}
