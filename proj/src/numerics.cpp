#include "cpdq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpdq/core.hpp"

namespace cpdq::numerics {

std::size_t MaskedSeries::valid_count() const
{
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

double MaskedSeries::max_abs() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (valid[i]) {
            m = std::max(m, std::abs(values[i]));
        }
    }
    return m;
}

std::vector<double> derivative2(std::span<const double> y, double h)
{
    const std::size_t n = y.size();
    if (n < 3) {
        throw PreconditionError("derivative2: at least 3 samples required");
    }
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    return d;
}

MaskedSeries derivative2_masked(std::span<const double> y, const std::vector<bool>& valid, double h)
{
    const std::size_t n = y.size();
    if (n < 3 || valid.size() != n) {
        throw PreconditionError("derivative2_masked: need >= 3 aligned samples");
    }
    MaskedSeries out{std::vector<double>(n, std::numeric_limits<double>::quiet_NaN()), std::vector<bool>(n, false)};
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) {
            continue;
        }
        const bool left = i >= 1 && valid[i - 1];
        const bool right = i + 1 < n && valid[i + 1];
        if (left && right) {
            out.values[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        } else if (right && i + 2 < n && valid[i + 2]) {
            out.values[i] = (-3.0 * y[i] + 4.0 * y[i + 1] - y[i + 2]) / (2.0 * h);
        } else if (left && i >= 2 && valid[i - 2]) {
            out.values[i] = (3.0 * y[i] - 4.0 * y[i - 1] + y[i - 2]) / (2.0 * h);
        } else {
            continue;
        }
        out.valid[i] = true;
    }
    return out;
}

std::vector<double> fd_weights(double x0, std::span<const double> x, int order)
{
    const int n = static_cast<int>(x.size());
    if (order < 0 || order >= n) {
        throw PreconditionError("fd_weights: stencil too small for requested order");
    }
    // c[j][k]: weight of node j for derivative k.
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int j = 0; j < n; ++j) {
        w[j] = c[j][order];
    }
    return w;
}

namespace {

template <class T>
std::vector<T> derivative_high_order_impl(std::span<const T> y, double h, int width)
{
    const int n = static_cast<int>(y.size());
    if (width < 3 || width % 2 == 0) {
        throw PreconditionError("derivative_high_order: stencil width must be odd and >= 3");
    }
    if (n < width) {
        throw PreconditionError("derivative_high_order: fewer samples than the stencil width");
    }
    const int half = width / 2;
    // Weights depend only on the offset of the evaluation point inside the stencil.
    std::vector<std::vector<double>> table(width);
    std::vector<double> nodes(width);
    for (int j = 0; j < width; ++j) {
        nodes[j] = static_cast<double>(j);
    }
    for (int s = 0; s < width; ++s) {
        table[s] = fd_weights(static_cast<double>(s), nodes, 1);
    }
    std::vector<T> d(n);
    for (int i = 0; i < n; ++i) {
        const int start = std::clamp(i - half, 0, n - width);
        const auto& w = table[i - start];
        T acc{};
        for (int j = 0; j < width; ++j) {
            acc += w[j] * y[start + j];
        }
        d[i] = acc / h;
    }
    return d;
}

}  // namespace

std::vector<double> derivative_high_order(std::span<const double> y, double h, int width)
{
    return derivative_high_order_impl<double>(y, h, width);
}

std::vector<std::complex<double>> derivative_high_order(std::span<const std::complex<double>> y, double h,
                                                        int width)
{
    return derivative_high_order_impl<std::complex<double>>(y, h, width);
}

double trapezoid(std::span<const double> y, double h, std::size_t i0, std::size_t i1)
{
    if (i1 >= y.size() || i0 > i1) {
        throw PreconditionError("trapezoid: index range out of bounds");
    }
    if (i0 == i1) {
        return 0.0;
    }
    double s = 0.5 * (y[i0] + y[i1]);
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        s += y[i];
    }
    return s * h;
}

double trapezoid(std::span<const double> y, double h)
{
    if (y.empty()) {
        return 0.0;
    }
    return trapezoid(y, h, 0, y.size() - 1);
}

double rel_diff(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) {
        return 0.0;
    }
    return std::abs(a - b) / scale;
}

}  // namespace cpdq::numerics
