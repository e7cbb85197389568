#pragma once

#include <optional>
#include <vector>

#include "monolasso/data.hpp"

namespace monolasso {

struct SignedSubset {
    std::vector<Index> indices;
    std::vector<int> signs;  // each +1 or -1

    void validate(Index p) const;
};

struct ConditionResult {
    Vector v;
    bool pass = false;
};

inline constexpr double kConditionTolerance = 1e-10;

/// v = S (G_A)^{-1} S 1 on the correlation Gram of the chosen columns.
ConditionResult check_condition(const StandardizedDesign& design, const SignedSubset& subset);
ConditionResult check_condition(const Matrix& correlation_gram, const SignedSubset& subset);

struct ExhaustiveOptions {
    int max_subset_size = 0;  // 0: all sizes up to p
    unsigned threads = 1;
    bool allow_large = false;  // required for p > 12
    double max_checks = 1e7;
};

struct ExhaustiveReport {
    bool pass = true;
    double checks = 0;  // signed subsets examined
    std::optional<SignedSubset> violation;
    Vector v;  // condition vector of the violation
};

/// Number of signed subsets with size <= max_size.
double signed_subset_count(Index p, int max_size);

/// Walks subsets by size, then lexicographically, then sign patterns (binary counter,
/// first index most significant, + before -). Returns the first violation.
ExhaustiveReport exhaustive_check(const Matrix& correlation_gram, const ExhaustiveOptions& options = {});
ExhaustiveReport exhaustive_check(const StandardizedDesign& design, const ExhaustiveOptions& options = {});

/// Correlation Gram of the design columns (X'X / N for standardized X).
Matrix correlation_gram(const StandardizedDesign& design);

/// Analytic correlation Gram of indicator columns I(x > t_j), given n_j = #{x_i > t_j}
/// (non-increasing) out of n observations.
Matrix pc_gram(const std::vector<long>& knot_counts, long n);

/// Tridiagonal inverse of pc_gram.
Matrix pc_inverse_gram(const std::vector<long>& knot_counts, long n);

}  // namespace monolasso
