#include "monolasso/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "monolasso/errors.hpp"
#include "monolasso/numeric.hpp"

namespace monolasso {

void SignedSubset::validate(Index p) const {
    if (indices.empty()) throw ConfigError("signed subset is empty");
    if (indices.size() != signs.size()) throw ConfigError("signed subset needs one sign per index");
    std::vector<Index> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("signed subset indices must be distinct");
    if (sorted.front() < 0 || sorted.back() >= p)
        throw RangeError("signed subset index out of range [0, " + std::to_string(p) + ")");
    for (int s : signs)
        if (s != 1 && s != -1) throw ConfigError("signs must be +1 or -1");
}

Matrix correlation_gram(const StandardizedDesign& design) {
    return (design.x.transpose() * design.x) / static_cast<double>(design.n());
}

namespace {

Matrix subset_inverse(const Matrix& gram, const std::vector<Index>& indices) {
    const Index k = static_cast<Index>(indices.size());
    Matrix sub(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) sub(a, b) = gram(indices[a], indices[b]);
    CholeskyFactor factor;
    try {
        factor = CholeskyFactor::from_gram(sub);
    } catch (const DegenerateDesignError& e) {
        throw DegenerateDesignError(indices[static_cast<std::size_t>(e.column)],
                                    "subset Gram is singular at column " +
                                        std::to_string(indices[static_cast<std::size_t>(e.column)]));
    }
    Matrix inverse(k, k);
    for (Index a = 0; a < k; ++a) inverse.col(a) = factor.solve(Vector::Unit(k, a));
    return inverse;
}

Vector condition_vector(const Matrix& inverse, const std::vector<int>& signs) {
    const Index k = inverse.rows();
    Vector v(k);
    for (Index a = 0; a < k; ++a) {
        double sum = 0.0;
        for (Index b = 0; b < k; ++b) sum += inverse(a, b) * signs[b];
        v[a] = signs[a] * sum;
    }
    return v;
}

std::vector<int> signs_from_pattern(unsigned long pattern, std::size_t k) {
    std::vector<int> signs(k);
    for (std::size_t a = 0; a < k; ++a) signs[a] = (pattern >> (k - 1 - a)) & 1UL ? -1 : 1;
    return signs;
}

bool next_combination(std::vector<Index>& c, Index p) {
    const Index k = static_cast<Index>(c.size());
    Index i = k - 1;
    while (i >= 0 && c[i] == p - k + i) --i;
    if (i < 0) return false;
    ++c[i];
    for (Index j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    return true;
}

struct Hit {
    long rank = std::numeric_limits<long>::max();
    unsigned long pattern = 0;
    std::vector<Index> indices;
    Vector v;
};

// Scans subsets of size k whose lexicographic rank is congruent to worker mod stride.
Hit scan_size(const Matrix& gram, Index k, unsigned worker, unsigned stride) {
    Hit hit;
    std::vector<Index> combo(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) combo[i] = i;
    const unsigned long patterns = 1UL << k;
    long rank = 0;
    do {
        if (rank % stride == worker) {
            const Matrix inverse = subset_inverse(gram, combo);
            for (unsigned long pattern = 0; pattern < patterns; ++pattern) {
                Vector v = condition_vector(inverse, signs_from_pattern(pattern, combo.size()));
                if (v.minCoeff() < -kConditionTolerance) {
                    hit = {rank, pattern, combo, std::move(v)};
                    return hit;
                }
            }
        }
        ++rank;
    } while (next_combination(combo, gram.rows()));
    return hit;
}

}  // namespace

ConditionResult check_condition(const Matrix& correlation_gram, const SignedSubset& subset) {
    subset.validate(correlation_gram.rows());
    ConditionResult out;
    out.v = condition_vector(subset_inverse(correlation_gram, subset.indices), subset.signs);
    out.pass = out.v.minCoeff() >= -kConditionTolerance;
    return out;
}

ConditionResult check_condition(const StandardizedDesign& design, const SignedSubset& subset) {
    subset.validate(design.p());
    const Index k = static_cast<Index>(subset.indices.size());
    Matrix cols(design.n(), k);
    for (Index a = 0; a < k; ++a) cols.col(a) = design.x.col(subset.indices[a]);
    const Matrix gram = cols.transpose() * cols / static_cast<double>(design.n());
    SignedSubset local{{}, subset.signs};
    for (Index a = 0; a < k; ++a) local.indices.push_back(a);
    try {
        return check_condition(gram, local);
    } catch (const DegenerateDesignError& e) {
        const Index col = subset.indices[static_cast<std::size_t>(e.column)];
        throw DegenerateDesignError(col, "subset Gram is singular at column " + std::to_string(col));
    }
}

double signed_subset_count(Index p, int max_size) {
    double total = 0.0;
    double binom = 1.0;
    for (Index k = 1; k <= std::min<Index>(max_size, p); ++k) {
        binom = binom * static_cast<double>(p - k + 1) / static_cast<double>(k);
        total += binom * std::ldexp(1.0, static_cast<int>(k));
    }
    return total;
}

ExhaustiveReport exhaustive_check(const Matrix& gram, const ExhaustiveOptions& options) {
    const Index p = gram.rows();
    if (gram.cols() != p) throw ConfigError("Gram matrix must be square");
    if (p == 0) throw ConfigError("design has no columns");
    const int max_size = options.max_subset_size > 0 ? std::min<int>(options.max_subset_size, static_cast<int>(p))
                                                     : static_cast<int>(p);
    if (p > 12 && !options.allow_large) {
        throw ConfigError("exhaustive check on p = " + std::to_string(p) +
                          " columns needs explicit opt-in (" +
                          std::to_string(signed_subset_count(p, max_size)) + " signed subsets)");
    }
    const double budget = signed_subset_count(p, max_size);
    if (budget > options.max_checks) {
        throw ConfigError("exhaustive check refused: " + std::to_string(budget) + " signed subsets exceed the limit of " +
                          std::to_string(options.max_checks));
    }

    const unsigned threads = std::max(1u, options.threads);
    ExhaustiveReport report;
    double binom = 1.0;
    for (Index k = 1; k <= max_size; ++k) {
        binom = binom * static_cast<double>(p - k + 1) / static_cast<double>(k);
        std::vector<Hit> hits(threads);
        if (threads == 1) {
            hits[0] = scan_size(gram, k, 0, 1);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&, t] { hits[t] = scan_size(gram, k, t, threads); });
            for (auto& th : pool) th.join();
        }
        auto first = std::min_element(hits.begin(), hits.end(),
                                      [](const Hit& a, const Hit& b) { return a.rank < b.rank; });
        if (first->rank != std::numeric_limits<long>::max()) {
            report.checks += static_cast<double>(first->rank) * std::ldexp(1.0, static_cast<int>(k)) +
                             static_cast<double>(first->pattern + 1);
            report.pass = false;
            report.violation = SignedSubset{first->indices, signs_from_pattern(first->pattern, first->indices.size())};
            report.v = first->v;
            return report;
        }
        report.checks += binom * std::ldexp(1.0, static_cast<int>(k));
    }
    return report;
}

ExhaustiveReport exhaustive_check(const StandardizedDesign& design, const ExhaustiveOptions& options) {
    return exhaustive_check(correlation_gram(design), options);
}

namespace {

void validate_counts(const std::vector<long>& counts, long n) {
    if (counts.empty()) throw ConfigError("no knots given");
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] <= 0 || counts[j] >= n)
            throw ZeroVarianceError(static_cast<long>(j), "indicator column " + std::to_string(j) +
                                                              " is constant (count " + std::to_string(counts[j]) +
                                                              " of " + std::to_string(n) + ")");
        if (j > 0 && counts[j] > counts[j - 1])
            throw ConfigError("knot counts must be non-increasing");
    }
}

}  // namespace

Matrix pc_gram(const std::vector<long>& counts, long n) {
    validate_counts(counts, n);
    const Index k = static_cast<Index>(counts.size());
    const double total = static_cast<double>(n);
    Matrix g(k, k);
    for (Index i = 0; i < k; ++i) {
        g(i, i) = 1.0;
        for (Index j = i + 1; j < k; ++j) {
            const double ni = static_cast<double>(counts[i]);
            const double nj = static_cast<double>(counts[j]);
            g(i, j) = g(j, i) = std::sqrt((total - ni) / ni * nj / (total - nj));
        }
    }
    return g;
}

Matrix pc_inverse_gram(const std::vector<long>& counts, long n) {
    validate_counts(counts, n);
    const Index k = static_cast<Index>(counts.size());
    // Work in increasing-count order, v_0 = 0 < v_1 < ... < v_k (v_{k+1} = infinity).
    std::vector<double> v(static_cast<std::size_t>(k + 1), 0.0);
    for (Index j = 1; j <= k; ++j) {
        const double s = static_cast<double>(counts[static_cast<std::size_t>(k - j)]) / static_cast<double>(n);
        v[j] = s / (1.0 - s);
        if (!(v[j] > v[j - 1]) && j > 1) throw DataError("tied knots: columns " + std::to_string(k - j) + " and " +
                                                          std::to_string(k - j + 1) + " coincide");
    }
    Matrix ordered = Matrix::Zero(k, k);
    for (Index j = 1; j <= k; ++j) {
        const double left = v[j] - v[j - 1];
        const double diag = j == k ? v[j] / left : (v[j + 1] - v[j - 1]) * v[j] / (left * (v[j + 1] - v[j]));
        ordered(j - 1, j - 1) = diag;
        if (j > 1) ordered(j - 1, j - 2) = ordered(j - 2, j - 1) = -std::sqrt(v[j] * v[j - 1]) / left;
    }
    return ordered.reverse();
}

}  // namespace monolasso
