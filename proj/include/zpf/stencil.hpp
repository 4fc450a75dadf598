//! \file stencil.hpp
//! Finite-difference weights on uniform grids.
#pragma once

#include <cmath>
#include <vector>

#include "core.hpp"

namespace zpf
{
/*!
 * Weights for the derivative of order `order` at offset 0 from samples at
 * integer `offsets` (grid spacing 1), by Fornberg's recursion.
 */
inline std::vector<double> fornberg_weights(int order, std::vector<int> const& offsets)
{
    int const n = static_cast<int>(offsets.size()) - 1;
    if (order < 0 || n < order)
        throw ConfigError("stencil has too few points for the requested derivative");
    // c[j][k]: weight of point j for derivative k
    std::vector<std::vector<double>> c(offsets.size(), std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    double c1 = 1.0;
    double c4 = offsets[0];
    c[0][0] = 1.0;
    for (int i = 1; i <= n; ++i)
    {
        int mn = std::min(i, order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = offsets[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j)
        {
            double c3 = c4 - offsets[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1)
            {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(offsets.size());
    for (std::size_t j = 0; j < offsets.size(); ++j)
        w[j] = c[j][static_cast<std::size_t>(order)];
    return w;
}

//! Treatment of the points within a half-width of either edge.
enum class EdgeClosure
{
    one_sided,      //!< same point count, stencil shifted inward
    zero_extension  //!< centred stencil, samples beyond the edge taken as zero
};

/*!
 * Fourth-order derivative operator of a given order along one grid axis.
 *
 * Interior points use the centred stencil of order + 4 (rounded to odd)
 * points. With zero extension an odd-order operator is exactly
 * antisymmetric, which keeps advection neutrally stable under RK4.
 */
class DerivativeStencil
{
  public:
    DerivativeStencil() = default;

    DerivativeStencil(int order, std::size_t n_points, EdgeClosure closure = EdgeClosure::one_sided)
        : order_(order), closure_(closure)
    {
        if (order < 1)
            throw ConfigError("derivative order must be positive");
        int width = order + 4;
        if (width % 2 == 0)
            width -= 1;
        half_ = width / 2;
        if (n_points < static_cast<std::size_t>(width))
            throw ConfigError("grid too small for the derivative stencil");
        std::vector<int> offs;
        for (int j = -half_; j <= half_; ++j)
            offs.push_back(j);
        central_ = fornberg_weights(order, offs);
        // edge stencils: evaluation point at position s within [0, width)
        for (int s = 0; s < half_; ++s)
        {
            std::vector<int> o;
            for (int j = 0; j < width; ++j)
                o.push_back(j - s);
            edge_.push_back(fornberg_weights(order, o));
        }
    }

    int order() const { return order_; }
    int half_width() const { return half_; }
    std::vector<double> const& central() const { return central_; }

    /*!
     * d^order f / dz^order for samples f[i * stride], i < n, spacing h;
     * writes to out[i * out_stride].
     */
    void apply(double const* f, std::size_t n, std::ptrdiff_t stride, double h, double* out, std::ptrdiff_t out_stride) const
    {
        double const scale = 1.0 / std::pow(h, order_);
        int const width = 2 * half_ + 1;
        auto at = [&](std::ptrdiff_t i) { return f[i * stride]; };
        auto const ni = static_cast<std::ptrdiff_t>(n);
        for (std::ptrdiff_t i = 0; i < ni; ++i)
        {
            double acc = 0;
            if (closure_ == EdgeClosure::zero_extension && (i < half_ || i >= ni - half_))
            {
                for (int j = -half_; j <= half_; ++j)
                    if (i + j >= 0 && i + j < ni)
                        acc += central_[static_cast<std::size_t>(j + half_)] * at(i + j);
            }
            else if (i < half_)
            {
                auto const& w = edge_[static_cast<std::size_t>(i)];
                for (int j = 0; j < width; ++j)
                    acc += w[static_cast<std::size_t>(j)] * at(j);
            }
            else if (i >= ni - half_)
            {
                // mirror of the left edge: positions reversed, odd orders flip sign
                auto const& w = edge_[static_cast<std::size_t>(ni - 1 - i)];
                double sign = order_ % 2 ? -1.0 : 1.0;
                for (int j = 0; j < width; ++j)
                    acc += sign * w[static_cast<std::size_t>(j)] * at(ni - 1 - j);
            }
            else
            {
                for (int j = -half_; j <= half_; ++j)
                    acc += central_[static_cast<std::size_t>(j + half_)] * at(i + j);
            }
            out[i * out_stride] = acc * scale;
        }
    }

    //! Largest |symbol| over wavenumbers, in units of h^-order.
    double max_symbol() const
    {
        double m = 0;
        for (int k = 0; k <= 512; ++k)
        {
            double th = pi * k / 512.0;
            double re = 0, im = 0;
            for (int j = -half_; j <= half_; ++j)
            {
                re += central_[static_cast<std::size_t>(j + half_)] * std::cos(j * th);
                im += central_[static_cast<std::size_t>(j + half_)] * std::sin(j * th);
            }
            m = std::max(m, std::hypot(re, im));
        }
        return m;
    }

  private:
    int order_ = 1;
    EdgeClosure closure_ = EdgeClosure::one_sided;
    int half_ = 0;
    std::vector<double> central_;
    std::vector<std::vector<double>> edge_;
};

}  // namespace zpf
