#include <gtest/gtest.h>

#include "monolasso/data.hpp"
#include "monolasso/errors.hpp"
#include "monolasso/experiments.hpp"
#include "monolasso/lars.hpp"

using namespace monolasso;

namespace {

Dataset small_dataset() {
    Dataset d;
    d.x.resize(3, 1);
    d.x << 1, 2, 3;
    d.y = Vector::LinSpaced(3, 0.0, 2.0);
    return d;
}

}  // namespace

TEST(Standardize, ThreePointColumn) {
    const StandardizedDesign s = standardize(small_dataset());
    EXPECT_NEAR(s.x(0, 0), -1.2247, 1e-4);
    EXPECT_NEAR(s.x(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(s.x(2, 0), 1.2247, 1e-4);
    EXPECT_DOUBLE_EQ(s.y_mean, 1.0);
}

TEST(Standardize, Idempotent) {
    const StandardizedDesign once = standardize(small_dataset());
    Dataset again{once.x, once.y_centered, {}};
    const StandardizedDesign twice = standardize(again);
    EXPECT_LE((twice.x - once.x).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Standardize, SineDesignColumnsSatisfyInvariants) {
    const StandardizedDesign s = standardize(gen_sine({}).data);
    ASSERT_EQ(s.p(), 10);
    for (Index j = 0; j < s.p(); ++j) {
        EXPECT_LE(std::abs(s.x.col(j).mean()), 1e-12);
        EXPECT_LE(std::abs(s.x.col(j).squaredNorm() / s.n() - 1.0), 1e-10);
    }
}

TEST(Standardize, ConstantColumnNamed) {
    Dataset d = small_dataset();
    d.x.conservativeResize(3, 2);
    d.x.col(1).setConstant(4.0);
    try {
        standardize(d);
        FAIL();
    } catch (const ZeroVarianceError& e) {
        EXPECT_EQ(e.column, 1);
        EXPECT_EQ(e.exit_code(), 3);
    }
}

TEST(Standardize, InvertibleThroughStoredStatistics) {
    Dataset d;
    d.x.resize(4, 2);
    d.x << 1, 10, 2, 30, 4, 20, 7, 60;
    d.y.resize(4);
    d.y << 1, 2, 0, 5;
    const StandardizedDesign s = standardize(d);
    const Matrix back = (s.x.array().rowwise() * s.scales.transpose().array()).rowwise() + s.centers.transpose().array();
    EXPECT_LE((back - d.x).lpNorm<Eigen::Infinity>(), 1e-12);
    Vector beta(2);
    beta << 0.3, -0.2;
    EXPECT_LE((s.predict(d.x, beta) - (s.x * beta).array().matrix() - Vector::Constant(4, s.y_mean)).norm(), 1e-12);
}

TEST(Collapse, PositiveHalf) {
    Vector b(4);
    b << 1, 0, 0, 0;
    const Vector c = collapse(b);
    EXPECT_EQ(c[0], 1.0);
    EXPECT_EQ(c[1], 0.0);
}

TEST(Collapse, MixedHalves) {
    Vector b(4);
    b << 0, 2, 3, 0;
    const Vector c = collapse(b);
    EXPECT_EQ(c[0], -3.0);
    EXPECT_EQ(c[1], 2.0);
}

TEST(Collapse, ExpandRoundTrip) {
    Vector b(3);
    b << -1.5, 0.0, 2.0;
    EXPECT_EQ(collapse(expand(b)), b);
    EXPECT_EQ(l1_norm(expand(b)), l1_norm(b));
}

TEST(ExpandedDesign, NegatedColumnsAreExact) {
    const ExpandedDesign e(standardize(gen_sine({}).data));
    for (Index j = 0; j < e.p(); ++j) EXPECT_EQ(e.column(j + e.p()), (-e.column(j)).eval());
    EXPECT_EQ(e.partner(3), 3 + e.p());
    EXPECT_EQ(e.base_index(3 + e.p()), 3);
}

namespace {

PiecewiseLinearPath bump_path() {
    PiecewiseLinearPath path(2, Parametrization::l1_arc_length);
    Vector up(2), down(2);
    up << 1.0, 0.0;
    down << 0.0, 0.0;
    path.append(1.0, up);
    path.append(2.0, down);
    return path;
}

}  // namespace

TEST(PathEvaluate, StartIsOrigin) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_TRUE(evaluate_path(path, 0.0).isZero(0.0));
}

TEST(PathEvaluate, BreakpointReturnsVertex) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_EQ(evaluate_path(path, 1.0), path.vertices()[1]);
}

TEST(PathEvaluate, MidpointAverages) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_DOUBLE_EQ(evaluate_path(path, 0.5)[0], 0.5);
    EXPECT_DOUBLE_EQ(evaluate_path(path, 1.5)[0], 0.5);
}

TEST(PathEvaluate, OutOfRangeThrows) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_THROW(evaluate_path(path, 2.5), RangeError);
    EXPECT_THROW(evaluate_path(path, -0.1), RangeError);
}

TEST(ArcLength, UpAndDown) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_DOUBLE_EQ(arc_length(path, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(l1_norm(evaluate_path(path, 2.0)), 0.0);
    EXPECT_DOUBLE_EQ(arc_length(path, 1.25), 1.25);
}

TEST(ArcLength, MonotonePathEqualsNorm) {
    const ExpandedDesign e(standardize(gen_sine({}).data));
    const PiecewiseLinearPath path = solve_path(e, {PathMode::fs0});
    for (double ell = 0.0; ell < path.length(); ell += path.length() / 37.0)
        EXPECT_NEAR(arc_length(path, ell), l1_norm(evaluate_path(path, ell)), 1e-10);
}

TEST(ArcLength, LassoSineExampleStrictAfterSignReversal) {
    const ExpandedDesign e(standardize(gen_sine({}).data));
    const PiecewiseLinearPath path = solve_path(e, {PathMode::lasso});
    bool reversed = false;
    for (std::size_t k = 0; k < path.breakpoints().size(); ++k) {
        const double ell = path.breakpoints()[k];
        const double arc = arc_length(path, ell);
        const double norm = l1_norm(evaluate_path(path, ell));
        EXPECT_GE(arc, norm - 1e-10);
        if (reversed) EXPECT_GT(arc, norm + 1e-10) << "vertex " << k;
        if (k > 0 && path.events()[k - 1].kind == EventKind::zero_crossing) reversed = true;
    }
    EXPECT_TRUE(reversed);
}

TEST(FirstPassage, NormIndexOnBumpPath) {
    const PiecewiseLinearPath path = bump_path();
    EXPECT_DOUBLE_EQ(first_passage(path, IndexBy::norm, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(first_passage(path, IndexBy::arc_length, 1.5), 1.5);
    EXPECT_DOUBLE_EQ(index_extent(path, IndexBy::norm), 1.0);
}

TEST(PathContainer, RejectsNonIncreasingBreakpoints) {
    PiecewiseLinearPath path = bump_path();
    EXPECT_THROW(path.append(2.0, Vector::Zero(2)), ConfigError);
}
