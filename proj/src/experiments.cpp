#include "monolasso/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "monolasso/errors.hpp"

namespace monolasso {

const char* to_string(SineBasis basis) {
    return basis == SineBasis::piecewise_linear ? "piecewise-linear" : "piecewise-constant";
}

SineBasis parse_sine_basis(const std::string& name) {
    if (name == "piecewise-linear" || name == "pl" || name == "linear") return SineBasis::piecewise_linear;
    if (name == "piecewise-constant" || name == "pc" || name == "constant") return SineBasis::piecewise_constant;
    throw ConfigError("unknown basis '" + name + "' (expected piecewise-linear or piecewise-constant)");
}

std::vector<long> knot_counts(const Vector& x, const std::vector<double>& knots) {
    std::vector<long> counts;
    counts.reserve(knots.size());
    for (double t : knots) counts.push_back(static_cast<long>((x.array() > t).count()));
    return counts;
}

SineData gen_sine(const SineSpec& spec) {
    if (spec.n < 2) throw ConfigError("sine example needs n >= 2");
    if (!(spec.noise_scale >= 0.0)) throw ConfigError("noise scale must be non-negative");
    if (spec.knots.empty()) throw ConfigError("sine example needs at least one knot");

    SineData out;
    out.x = Vector::LinSpaced(spec.n, 0.0, 1.0);
    const double lo = out.x.minCoeff();
    const double hi = out.x.maxCoeff();
    for (double t : spec.knots) {
        if (!(t >= lo && t < hi)) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g", t);
            throw DataError(std::string("knot ") + buf + " leaves an empty column (outside [min x, max x))");
        }
    }

    std::vector<double> knots = spec.knots;
    if (spec.basis == SineBasis::piecewise_constant) {
        std::vector<double> kept;
        std::vector<long> seen;
        for (double t : knots) {
            const long count = static_cast<long>((out.x.array() > t).count());
            if (std::find(seen.begin(), seen.end(), count) != seen.end()) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "knot %g duplicates an earlier indicator column; dropped", t);
                out.warnings.emplace_back(buf);
                continue;
            }
            seen.push_back(count);
            kept.push_back(t);
        }
        knots = std::move(kept);
    }

    const Index k = static_cast<Index>(knots.size());
    out.data.x.resize(spec.n, k);
    for (Index j = 0; j < k; ++j) {
        const double t = knots[static_cast<std::size_t>(j)];
        for (Index i = 0; i < spec.n; ++i) {
            const double xi = out.x[i];
            out.data.x(i, j) = spec.basis == SineBasis::piecewise_linear ? (xi > t ? xi - t : 0.0)
                                                                         : (xi > t ? 1.0 : 0.0);
        }
        char name[48];
        std::snprintf(name, sizeof name, "%s%g", spec.basis == SineBasis::piecewise_linear ? "pl_" : "pc_", t);
        out.data.feature_names.emplace_back(name);
    }

    Rng rng(spec.seed);
    out.data.y.resize(spec.n);
    for (Index i = 0; i < spec.n; ++i) {
        const double xi = out.x[i];
        out.data.y[i] = std::sin(6.0 * xi) / (1.0 + xi) + spec.noise_scale * rng.normal();
    }
    out.knots = std::move(knots);
    return out;
}

void BlockSpec::validate() const {
    if (n < 2) throw ConfigError("block simulation needs n >= 2");
    if (block < 1 || p < 1) throw ConfigError("block size and p must be positive");
    if (p % block != 0)
        throw ConfigError("p = " + std::to_string(p) + " is not divisible by the block size " + std::to_string(block));
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
    if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be non-negative");
    if (nonzero_per_block < 0 || nonzero_per_block > block)
        throw ConfigError("nonzero_per_block must lie in [0, block]");
}

Matrix sample_block_rows(const BlockSpec& spec, long rows, Rng& rng) {
    spec.validate();
    const double own = std::sqrt(1.0 - spec.rho);
    const double shared = std::sqrt(spec.rho);
    Matrix x(rows, spec.p);
    for (long i = 0; i < rows; ++i) {
        for (long b = 0; b < spec.blocks(); ++b) {
            const double w = rng.normal();
            for (long j = 0; j < spec.block; ++j) x(i, b * spec.block + j) = own * rng.normal() + shared * w;
        }
    }
    return x;
}

BlockData gen_block(const BlockSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    BlockData out;
    out.beta = Vector::Zero(spec.p);
    for (long b = 0; b < spec.blocks(); ++b)
        for (long j = 0; j < spec.nonzero_per_block; ++j) out.beta[b * spec.block + j] = rng.normal();

    out.data.x = sample_block_rows(spec, spec.n, rng);
    out.signal = out.data.x * out.beta;
    const double sd = std::sqrt(spec.sigma2);
    out.data.y.resize(spec.n);
    for (long i = 0; i < spec.n; ++i) out.data.y[i] = out.signal[i] + sd * rng.normal();
    for (long j = 0; j < spec.p; ++j) out.data.feature_names.push_back("x" + std::to_string(j));
    return out;
}

double block_noise_to_signal(const BlockSpec& spec) {
    spec.validate();
    const double nonzeros = static_cast<double>(spec.blocks() * spec.nonzero_per_block);
    if (nonzeros == 0.0) throw ConfigError("no nonzero coefficients: signal variance is zero");
    return spec.sigma2 / nonzeros;
}

namespace {

double sample_variance(const Vector& v) {
    const double mean = v.mean();
    return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

NoiseToSignalEstimate monte_carlo_noise_to_signal(const BlockSpec& spec, std::uint64_t first_seed, long count,
                                                  unsigned threads) {
    spec.validate();
    if (count < 1) throw ConfigError("Monte Carlo needs at least one replication");
    std::vector<double> signal(static_cast<std::size_t>(count));
    std::vector<double> noise(static_cast<std::size_t>(count));
    auto run = [&](unsigned worker, unsigned stride) {
        for (long r = worker; r < count; r += stride) {
            BlockSpec s = spec;
            s.seed = first_seed + static_cast<std::uint64_t>(r);
            const BlockData d = gen_block(s);
            signal[static_cast<std::size_t>(r)] = sample_variance(d.signal);
            noise[static_cast<std::size_t>(r)] = sample_variance(d.data.y - d.signal);
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run, t, threads);
        for (auto& th : pool) th.join();
    }
    NoiseToSignalEstimate est;
    double s = 0.0, e = 0.0;
    for (long r = 0; r < count; ++r) {
        s += signal[static_cast<std::size_t>(r)];
        e += noise[static_cast<std::size_t>(r)];
    }
    est.signal_variance = s / static_cast<double>(count);
    est.ratio = e / s;
    est.replications = count;
    return est;
}

double rss(const ExpandedDesign& design, const Vector& beta_expanded) {
    return design.residual(beta_expanded).squaredNorm();
}

double rss_at(const ExpandedDesign& design, const PiecewiseLinearPath& path, IndexBy by, double value) {
    return rss(design, path.evaluate(first_passage(path, by, value)));
}

Curve rss_profile(const ExpandedDesign& design, const PiecewiseLinearPath& path, IndexBy by, int grid,
                  std::string method) {
    if (grid < 2) throw ConfigError("grid needs at least two points");
    Curve curve{std::move(method), {}, {}};
    const double extent = index_extent(path, by);
    for (int k = 0; k < grid; ++k) {
        const double g = k == grid - 1 ? extent : extent * k / (grid - 1);
        curve.index.push_back(g);
        curve.value.push_back(rss_at(design, path, by, g));
    }
    return curve;
}

namespace {

double gap(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, IndexBy by, double g) {
    const Vector ca = collapse(a.evaluate(first_passage(a, by, g)));
    const Vector cb = collapse(b.evaluate(first_passage(b, by, g)));
    return (ca - cb).lpNorm<Eigen::Infinity>();
}

}  // namespace

PathComparison compare_paths(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b, IndexBy by,
                             double threshold) {
    if (a.dimension() != b.dimension()) throw ConfigError("paths live in different dimensions");
    if (by == IndexBy::native && a.parametrization() != b.parametrization())
        throw ConfigError("native comparison needs paths with the same parametrization");

    PathComparison out;
    out.common_extent = std::min(index_extent(a, by), index_extent(b, by));
    std::vector<double> grid{0.0, out.common_extent};
    for (const PiecewiseLinearPath* path : {&a, &b}) {
        for (double ell : path->breakpoints()) {
            const double g = index_value(*path, ell, by);
            if (g <= out.common_extent) grid.push_back(g);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t coarse = grid.size();
    for (std::size_t k = 0; k + 1 < coarse; ++k) grid.push_back(0.5 * (grid[k] + grid[k + 1]));
    std::sort(grid.begin(), grid.end());

    double previous = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double d = gap(a, b, by, grid[k]);
        out.sup_difference = std::max(out.sup_difference, d);
        if (!out.divergence && d > threshold) {
            if (k == 0) {
                out.divergence = grid[0];
            } else {
                double lo = previous, hi = grid[k];
                for (int it = 0; it < 60 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (gap(a, b, by, mid) > threshold ? hi : lo) = mid;
                }
                out.divergence = hi;
            }
        }
        previous = grid[k];
    }
    return out;
}

double total_variation_at_norm(const PiecewiseLinearPath& path, double s) {
    return path.arc_length(first_passage(path, IndexBy::norm, s));
}

Curve test_mse(const StandardizedDesign& train, const Matrix& holdout_x, const Vector& truth,
               const PiecewiseLinearPath& path, int grid, std::string method) {
    if (grid < 2) throw ConfigError("grid needs at least two points");
    if (holdout_x.rows() != truth.size()) throw ConfigError("holdout rows and truth length differ");
    if (holdout_x.cols() != train.p()) throw ConfigError("holdout has the wrong number of columns");
    Curve curve{std::move(method), {}, {}};
    const double final_norm = path.segments() > 0 ? l1_norm(collapse(path.vertices().back())) : 0.0;
    for (int k = 0; k < grid; ++k) {
        const double fraction = static_cast<double>(k) / (grid - 1);
        const double ell = final_norm > 0.0 ? first_passage(path, IndexBy::norm, fraction * final_norm) : 0.0;
        const Vector beta = collapse(path.evaluate(ell));
        const Vector pred = train.predict(holdout_x, beta);
        curve.index.push_back(fraction);
        curve.value.push_back((pred - truth).squaredNorm() / static_cast<double>(truth.size()));
    }
    return curve;
}

}  // namespace monolasso
