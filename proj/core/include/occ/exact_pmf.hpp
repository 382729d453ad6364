#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "occ/params.hpp"

namespace occ {

enum class PmfMode { Exact, Float };

/// Distribution of Y, the number of urns with exactly d balls, as a vector
/// over the atoms k = 0..m. Exact mode stores rationals summing to one;
/// float mode stores doubles from the same dynamic program in probability
/// space, accurate to ~1e-12.
struct ExactPmf {
    OccupancyParams params;
    PmfMode mode = PmfMode::Exact;
    std::vector<mpq_class> probs_q;  // populated in exact mode, size m+1
    std::vector<double> probs;       // always populated, size m+1
};

struct PmfBudget {
    long long max_n = 150;
    long long max_m = 150;
};

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact-rational pmf of Y by dynamic programming over urns.
/// Throws BudgetExceeded when n or m exceed the budget; use float_pmf then.
ExactPmf exact_pmf(const OccupancyParams& params, const PmfBudget& budget = {});

/// Same dynamic program carried out in doubles.
ExactPmf float_pmf(const OccupancyParams& params);

/// exact_pmf when within budget, float_pmf otherwise.
ExactPmf auto_pmf(const OccupancyParams& params, const PmfBudget& budget = {});

/// (mean, variance) of the pmf; exact rationals in exact mode.
std::pair<mpq_class, mpq_class> exact_moments(const ExactPmf& pmf);
std::pair<double, double> moments_of(const ExactPmf& pmf);

/// The size-biased law k P(Y=k)/mu. Requires mean > 0.
ExactPmf size_biased_pmf(const ExactPmf& pmf);

struct KolmogorovReport {
    double d_k = 0.0;       // sup_z |F_W(z) - Phi(z)|
    long long arg_atom = 0; // atom k achieving the supremum
    bool left_limit = false;  // true when attained by F(k-) vs Phi(w_k)
    double lower_bound = 0.0; // 0.087 / max(3, sigma)
    double mu = 0.0;
    double sigma = 0.0;
};

/// Kolmogorov distance of the standardized count to the standard normal.
/// The supremum over z is attained at an atom, approached from the left or
/// the right; ties report the smallest achieving atom.
KolmogorovReport kolmogorov_distance(const ExactPmf& pmf);

/// CSV rows `k,probability_numerator,probability_denominator` (exact mode)
/// or `k,probability` (float mode).
void write_pmf_csv(const ExactPmf& pmf, std::ostream& out);
std::string pmf_to_json(const ExactPmf& pmf);

}  // namespace occ
