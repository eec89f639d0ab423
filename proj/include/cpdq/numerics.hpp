#ifndef CPDQ_NUMERICS_HPP
#define CPDQ_NUMERICS_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace cpdq::numerics {

//! A sampled series with a per-sample validity flag. Invalid samples hold NaN.
struct MaskedSeries {
    std::vector<double> values;
    std::vector<bool> valid;

    std::size_t size() const { return values.size(); }
    std::size_t valid_count() const;
    //! max |value| over valid samples; 0 when nothing is valid.
    double max_abs() const;
};

//! Second-order central differences, second-order one-sided at both ends.
//! Requires at least 3 samples.
std::vector<double> derivative2(std::span<const double> y, double h);

//! Second-order derivative restricted to samples whose stencil is entirely valid.
MaskedSeries derivative2_masked(std::span<const double> y, const std::vector<bool>& valid, double h);

//! Finite-difference weights for the derivative of order `order` at `x0` from the
//! nodes `x` (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> x, int order);

//! First derivative on a uniform grid with a `width`-point stencil (odd, >= 3),
//! centred in the interior and shifted inward near the ends.
std::vector<double> derivative_high_order(std::span<const double> y, double h, int width = 9);
std::vector<std::complex<double>> derivative_high_order(std::span<const std::complex<double>> y, double h,
                                                        int width = 9);

//! Composite trapezoid rule on a uniform grid over [i0, i1] (inclusive).
double trapezoid(std::span<const double> y, double h, std::size_t i0, std::size_t i1);
double trapezoid(std::span<const double> y, double h);

//! Relative difference |a - b| / max(|a|, |b|), 0 when both vanish.
double rel_diff(double a, double b);

}  // namespace cpdq::numerics

#endif  // CPDQ_NUMERICS_HPP
