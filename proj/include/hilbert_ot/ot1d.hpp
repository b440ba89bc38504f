#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hilbert_ot/coupling.hpp"

namespace hilbert_ot {

/// Atoms on the real line, stably sorted by value. provenance[s] is the
/// original index of the atom at sorted position s.
struct SortedWeightedLine {
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<std::size_t> provenance;

    /// Stable sort of (values, weights); equal values keep input order.
    static SortedWeightedLine from_unsorted(std::span<const double> values, std::span<const double> weights);
    std::size_t size() const { return values.size(); }
};

/// Residuals closer than this are treated as equal and both sides advance.
inline constexpr double kResidualTie = 1e-12;

/// Monotone (north-west corner) coupling of two weight sequences, each
/// already in sorted order. Indices refer to sorted positions. At most
/// m + n - 1 entries, all with positive mass. Throws InvalidInput unless
/// both vectors lie on the simplex (tolerance 1e-9).
SparseCoupling northwest_coupling(std::span<const double> a, std::span<const double> b);

/// Same without validation, for callers holding validated weights.
SparseCoupling northwest_coupling_unchecked(std::span<const double> a, std::span<const double> b);

/// North-west coupling of two sorted lines, relabelled to original indices.
SparseCoupling quantile_coupling(const SortedWeightedLine& x, const SortedWeightedLine& y);

/// Closed-form 1D p-Wasserstein distance through the quantile coupling.
double wasserstein_1d(const SortedWeightedLine& x, const SortedWeightedLine& y, double p);

}  // namespace hilbert_ot
