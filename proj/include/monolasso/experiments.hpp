#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monolasso/data.hpp"
#include "monolasso/random.hpp"

namespace monolasso {

enum class SineBasis { piecewise_linear, piecewise_constant };

const char* to_string(SineBasis basis);
SineBasis parse_sine_basis(const std::string& name);

struct SineSpec {
    long n = 300;
    SineBasis basis = SineBasis::piecewise_linear;
    std::vector<double> knots{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    double noise_scale = 0.25;
    std::uint64_t seed = 0;
};

struct SineData {
    Dataset data;
    Vector x;                     // the n grid points in [0, 1]
    std::vector<double> knots;    // knots backing the columns (after tie collapse)
    std::vector<std::string> warnings;
};

/// y = sin(6x)/(1+x) + noise_scale * Z on n equally spaced x, with truncated linear
/// (x - t)_+ or indicator I(x > t) columns.
SineData gen_sine(const SineSpec& spec);

/// n_j = #{x_i > t_j}.
std::vector<long> knot_counts(const Vector& x, const std::vector<double>& knots);

struct BlockSpec {
    long n = 60;
    long p = 1000;
    long block = 20;
    double rho = 0.95;
    double sigma2 = 36.0;
    long nonzero_per_block = 1;
    std::uint64_t seed = 0;

    long blocks() const { return p / block; }
    void validate() const;
};

struct BlockData {
    Dataset data;
    Vector beta;    // true coefficients
    Vector signal;  // X beta
};

/// Rows i.i.d. N(0, Sigma), Sigma block diagonal with (1 - rho) I + rho 11' blocks;
/// the first nonzero_per_block slots of each block carry N(0, 1) coefficients.
BlockData gen_block(const BlockSpec& spec);

/// Fresh rows from the same design distribution (for holdout evaluation).
Matrix sample_block_rows(const BlockSpec& spec, long rows, Rng& rng);

/// sigma2 / E(beta' Sigma beta).
double block_noise_to_signal(const BlockSpec& spec);

struct NoiseToSignalEstimate {
    double ratio = 0.0;            // mean var(eps) / mean var(X beta)
    double signal_variance = 0.0;  // mean var(X beta)
    long replications = 0;
};

/// Pooled Monte Carlo estimate over seeds first_seed .. first_seed + count - 1.
NoiseToSignalEstimate monte_carlo_noise_to_signal(const BlockSpec& spec, std::uint64_t first_seed, long count,
                                                  unsigned threads = 1);

struct Curve {
    std::string method;
    std::vector<double> index;
    std::vector<double> value;
};

/// Residual sum of squares ||y_c - X~ beta||^2.
double rss(const ExpandedDesign& design, const Vector& beta_expanded);

/// RSS where the chosen index first reaches `value`.
double rss_at(const ExpandedDesign& design, const PiecewiseLinearPath& path, IndexBy by, double value);

/// RSS on `grid` equally spaced index values spanning [0, extent].
Curve rss_profile(const ExpandedDesign& design, const PiecewiseLinearPath& path, IndexBy by, int grid,
                  std::string method = {});

struct PathComparison {
    double sup_difference = 0.0;
    std::optional<double> divergence;  // first index value where the gap exceeds threshold
    double common_extent = 0.0;
};

/// Sup of ||a - b||_inf (collapsed coefficients) over the common index range.
PathComparison compare_paths(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, IndexBy by,
                             double threshold = 1e-8);

/// Total variation (L1 arc-length) up to the point where the L1 norm first reaches s.
double total_variation_at_norm(const PiecewiseLinearPath& path, double s);

/// Holdout MSE of predictions against `truth` at `grid` fractions of the final L1 norm.
Curve test_mse(const StandardizedDesign& train, const Matrix& holdout_x, const Vector& truth,
               const PiecewiseLinearPath& path, int grid, std::string method = {});

}  // namespace monolasso
