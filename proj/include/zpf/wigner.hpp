//! \file wigner.hpp
//! Phase-space functions on a rectangular (x, p) grid: construction,
//! quadrature, marginals, moments and file formats.
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "oracle.hpp"

namespace zpf
{
struct Axis
{
    double min = 0;
    double max = 0;
    std::size_t n = 0;

    double step() const { return (max - min) / static_cast<double>(n - 1); }
    double operator[](std::size_t i) const { return min + static_cast<double>(i) * step(); }
    double max_abs() const { return std::max(std::fabs(min), std::fabs(max)); }

    void validate(char const* name) const
    {
        if (n < 8 || !(max > min) || !std::isfinite(min) || !std::isfinite(max))
            throw ConfigError(std::string("invalid ") + name + " axis");
    }
    friend bool operator==(Axis const&, Axis const&) = default;
};

//! W(x_i, p_j) stored row-major with x as the outer index.
struct WignerGrid
{
    Axis x;
    Axis p;
    std::vector<double> values;

    WignerGrid() = default;
    WignerGrid(Axis xa, Axis pa) : x(xa), p(pa), values(xa.n * pa.n, 0.0) {}

    std::size_t index(std::size_t ix, std::size_t ip) const { return ix * p.n + ip; }
    double& operator()(std::size_t ix, std::size_t ip) { return values[index(ix, ip)]; }
    double operator()(std::size_t ix, std::size_t ip) const { return values[index(ix, ip)]; }
    double cell_area() const { return x.step() * p.step(); }
};

template<class F>
WignerGrid make_grid(Axis xa, Axis pa, F&& f)
{
    xa.validate("x");
    pa.validate("p");
    WignerGrid w(xa, pa);
    for (std::size_t i = 0; i < xa.n; ++i)
        for (std::size_t j = 0; j < pa.n; ++j)
            w(i, j) = f(xa[i], pa[j]);
    return w;
}

inline WignerGrid gaussian_grid(Axis xa, Axis pa, GaussianWignerParams const& g)
{
    return make_grid(xa, pa, [&](double x, double p) { return g.density(x, p); });
}

namespace detail
{
inline double trap_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }
}  // namespace detail

//---------------------------------------------------------------------------//
// Polynomial observables in (x, p)
//---------------------------------------------------------------------------//

struct PhaseMonomial
{
    double coeff;
    int x_power;
    int p_power;
};

//! Sum of c x^a p^b terms; total degree at most 6.
struct PhasePolynomial
{
    std::vector<PhaseMonomial> terms;

    PhasePolynomial() = default;
    PhasePolynomial(std::initializer_list<PhaseMonomial> t) : terms(t) {}

    int degree() const
    {
        int d = 0;
        for (auto const& t : terms)
            d = std::max(d, t.x_power + t.p_power);
        return d;
    }
    double operator()(double x, double p) const
    {
        double r = 0;
        for (auto const& t : terms)
            r += t.coeff * std::pow(x, t.x_power) * std::pow(p, t.p_power);
        return r;
    }
};

//! Trapezoid integral of obs(x, p) W(x, p).
inline double expectation(WignerGrid const& w, PhasePolynomial const& obs)
{
    if (obs.degree() > 6)
        throw ConfigError("observable degree exceeds 6");
    for (auto const& t : obs.terms)
        if (t.x_power < 0 || t.p_power < 0)
            throw ConfigError("observable powers must be non-negative");
    CompensatedSum s;
    for (std::size_t i = 0; i < w.x.n; ++i)
        for (std::size_t j = 0; j < w.p.n; ++j)
            s += detail::trap_weight(i, w.x.n) * detail::trap_weight(j, w.p.n) * obs(w.x[i], w.p[j]) * w(i, j);
    return s.value() * w.cell_area();
}

inline double total_mass(WignerGrid const& w) { return expectation(w, PhasePolynomial{{1.0, 0, 0}}); }

enum class PhaseAxis
{
    x,
    p
};

//! Trapezoid integral over the other axis; aligned with the kept axis.
inline std::vector<double> marginal(WignerGrid const& w, PhaseAxis keep)
{
    bool kx = keep == PhaseAxis::x;
    std::size_t nk = kx ? w.x.n : w.p.n;
    std::size_t no = kx ? w.p.n : w.x.n;
    double h = kx ? w.p.step() : w.x.step();
    std::vector<double> out(nk);
    for (std::size_t k = 0; k < nk; ++k)
    {
        CompensatedSum s;
        for (std::size_t o = 0; o < no; ++o)
            s += detail::trap_weight(o, no) * (kx ? w(k, o) : w(o, k));
        out[k] = s.value() * h;
    }
    return out;
}

//! Trapezoid integral of a 1D array on an axis.
inline double integrate_axis(std::vector<double> const& f, Axis const& a)
{
    CompensatedSum s;
    for (std::size_t i = 0; i < f.size(); ++i)
        s += detail::trap_weight(i, f.size()) * f[i];
    return s.value() * a.step();
}

inline double max_abs(WignerGrid const& w)
{
    double m = 0;
    for (double v : w.values)
        m = std::max(m, std::fabs(v));
    return m;
}

template<class F>
void for_each_boundary_cell(WignerGrid const& w, F&& f, std::size_t depth = 2)
{
    for (std::size_t i = 0; i < w.x.n; ++i)
    {
        bool edge_x = i < depth || i + depth >= w.x.n;
        for (std::size_t j = 0; j < w.p.n; ++j)
            if (edge_x || j < depth || j + depth >= w.p.n)
                f(w(i, j));
    }
}

//! max |W| on the outermost two cells, relative to max |W| overall.
inline double boundary_ratio(WignerGrid const& w)
{
    double b = 0;
    for_each_boundary_cell(w, [&](double v) { b = std::max(b, std::fabs(v)); });
    double m = max_abs(w);
    return m > 0 ? b / m : 0.0;
}

//! Share of integral |W| held by the outermost two cells.
inline double boundary_mass_fraction(WignerGrid const& w)
{
    CompensatedSum b, t;
    for_each_boundary_cell(w, [&](double v) { b += std::fabs(v); });
    for (double v : w.values)
        t += std::fabs(v);
    return t.value() > 0 ? b.value() / t.value() : 0.0;
}

//! Normalization and compact-support checks for an initial state.
inline void validate_wigner(WignerGrid const& w, double norm_tol = 1e-6)
{
    w.x.validate("x");
    w.p.validate("p");
    if (w.values.size() != w.x.n * w.p.n)
        throw ConfigError("grid value count does not match the axes");
    double norm = total_mass(w);
    if (std::fabs(norm - 1.0) > norm_tol)
        throw ConfigError("Wigner function is not normalized (integral = " + std::to_string(norm) + ")");
    if (boundary_ratio(w) >= 1e-8)
        throw ConfigError("Wigner function is not compactly supported on the grid");
}

inline double l2_distance(WignerGrid const& a, WignerGrid const& b)
{
    if (!(a.x == b.x) || !(a.p == b.p))
        throw ConfigError("grids have different axes");
    CompensatedSum s;
    for (std::size_t i = 0; i < a.values.size(); ++i)
    {
        double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s.value() * a.cell_area());
}

inline double linf_distance(WignerGrid const& a, WignerGrid const& b)
{
    if (!(a.x == b.x) || !(a.p == b.p))
        throw ConfigError("grids have different axes");
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::fabs(a.values[i] - b.values[i]));
    return m;
}

//---------------------------------------------------------------------------//
// File formats
//
// CSV:    "# wigner-grid x_min=..,x_max=..,n_x=..,p_min=..,p_max=..,n_p=.."
//         then a header "x,p,w" and one row per point, x outer.
// Binary: 8-byte magic "ZPFWGRD1"; f64 x_min, f64 x_max, u64 n_x,
//         f64 p_min, f64 p_max, u64 n_p; then n_x * n_p f64 values,
//         row-major with x outer. All little-endian.
//---------------------------------------------------------------------------//

inline void write_grid_csv(std::ostream& os, WignerGrid const& w)
{
    os << std::setprecision(17);
    os << "# wigner-grid x_min=" << w.x.min << ",x_max=" << w.x.max << ",n_x=" << w.x.n
       << ",p_min=" << w.p.min << ",p_max=" << w.p.max << ",n_p=" << w.p.n << "\n";
    os << "x,p,w\n";
    for (std::size_t i = 0; i < w.x.n; ++i)
        for (std::size_t j = 0; j < w.p.n; ++j)
            os << w.x[i] << ',' << w.p[j] << ',' << w(i, j) << '\n';
}

inline WignerGrid read_grid_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# wigner-grid ", 0) != 0)
        throw ConfigError("missing wigner-grid header line");
    Axis xa, pa;
    std::istringstream hs(line.substr(14));
    std::string item;
    int seen = 0;
    while (std::getline(hs, item, ','))
    {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed wigner-grid header");
        auto key = item.substr(0, eq);
        auto val = item.substr(eq + 1);
        if (key == "x_min") xa.min = parse_number<double>(val, "x_min");
        else if (key == "x_max") xa.max = parse_number<double>(val, "x_max");
        else if (key == "n_x") xa.n = parse_number<std::size_t>(val, "n_x");
        else if (key == "p_min") pa.min = parse_number<double>(val, "p_min");
        else if (key == "p_max") pa.max = parse_number<double>(val, "p_max");
        else if (key == "n_p") pa.n = parse_number<std::size_t>(val, "n_p");
        else throw ConfigError("unknown wigner-grid header key " + key);
        ++seen;
    }
    if (seen != 6)
        throw ConfigError("wigner-grid header needs six axis fields");
    xa.validate("x");
    pa.validate("p");
    if (!std::getline(is, line) || line != "x,p,w")
        throw ConfigError("wigner-grid CSV column header must be x,p,w");
    WignerGrid w(xa, pa);
    for (std::size_t k = 0; k < w.values.size(); ++k)
    {
        if (!std::getline(is, line))
            throw ConfigError("wigner-grid CSV truncated");
        auto c = line.rfind(',');
        if (c == std::string::npos)
            throw ConfigError("malformed wigner-grid CSV row");
        w.values[k] = parse_number<double>(line.substr(c + 1), "grid value");
    }
    return w;
}

namespace detail
{
template<class T>
void put_le(std::ostream& os, T v)
{
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<char const*>(b), sizeof(T));
}

template<class T>
T get_le(std::istream& is)
{
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw ConfigError("binary grid truncated");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

inline constexpr char grid_magic[8] = {'Z', 'P', 'F', 'W', 'G', 'R', 'D', '1'};
}  // namespace detail

inline void write_grid_binary(std::ostream& os, WignerGrid const& w)
{
    os.write(detail::grid_magic, 8);
    detail::put_le(os, w.x.min);
    detail::put_le(os, w.x.max);
    detail::put_le(os, static_cast<std::uint64_t>(w.x.n));
    detail::put_le(os, w.p.min);
    detail::put_le(os, w.p.max);
    detail::put_le(os, static_cast<std::uint64_t>(w.p.n));
    for (double v : w.values)
        detail::put_le(os, v);
}

inline WignerGrid read_grid_binary(std::istream& is)
{
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, detail::grid_magic, 8) != 0)
        throw ConfigError("not a binary Wigner grid");
    Axis xa, pa;
    xa.min = detail::get_le<double>(is);
    xa.max = detail::get_le<double>(is);
    xa.n = detail::get_le<std::uint64_t>(is);
    pa.min = detail::get_le<double>(is);
    pa.max = detail::get_le<double>(is);
    pa.n = detail::get_le<std::uint64_t>(is);
    if (xa.n == 0 || pa.n == 0 || xa.n > (1u << 20) || pa.n > (1u << 20))
        throw ConfigError("binary grid has implausible dimensions");
    WignerGrid w(xa, pa);
    for (auto& v : w.values)
        v = detail::get_le<double>(is);
    return w;
}

}  // namespace zpf
