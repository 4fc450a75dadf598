//! \file rng.hpp
//! Counter-based random numbers: every draw is a pure function of
//! (seed, stream, counter), so parallel workers never share generator state.
#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "core.hpp"

namespace zpf
{
namespace detail
{
// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

//! Derive an independent child seed, e.g. one per ensemble member.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return detail::mix64(detail::mix64(seed) ^ detail::mix64(~stream));
}

class CounterRng
{
  public:
    constexpr explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    constexpr std::uint64_t seed() const { return seed_; }

    constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const
    {
        std::uint64_t key = detail::mix64(seed_ ^ detail::mix64(stream + 0x632be59bd9b4e019ULL));
        return detail::mix64(key ^ detail::mix64(counter * 0xd1342543de82ef95ULL + 1));
    }

    //! Uniform on the open interval (0, 1).
    constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const
    {
        return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Two independent standard normals (Box-Muller on counters 2k, 2k+1).
    std::pair<double, double> normal_pair(std::uint64_t stream, std::uint64_t k = 0) const
    {
        double u1 = uniform(stream, 2 * k);
        double u2 = uniform(stream, 2 * k + 1);
        double r = std::sqrt(-2.0 * std::log(u1));
        double phi = 2.0 * pi * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    std::uint64_t seed_;
};

}  // namespace zpf
