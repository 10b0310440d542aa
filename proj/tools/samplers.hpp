#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fpfilter::harness {

/// All harness randomness goes through mt19937_64 raw output so that
/// streams are identical across standard libraries.
using rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit(rng& r) { return static_cast<double>(r() >> 11) * 0x1p-53; }
/// Uniform double in [lo, hi).
inline double uniform(rng& r, double lo, double hi) { return lo + (hi - lo) * unit(r); }
/// Uniform integer in [0, n).
inline std::uint64_t below(rng& r, std::uint64_t n) { return r() % n; }

enum class distribution
{
    uniform,
    near_degenerate,
    tiny,
    huge,
    grid,
};

distribution parse_distribution(std::string_view text);
std::string_view to_string(distribution d);
const std::vector<distribution>& all_distributions();

/// One input vector for a built-in predicate.
///  uniform          coordinates in [-1, 1)
///  near_degenerate  a degenerate configuration (collinear, cocircular,
///                   coplanar, cospherical) with a few coordinates moved
///                   by a few ulps
///  tiny / huge      uniform or near-degenerate scaled by 2^-1000 / 2^800
///  grid             small integers, so exact degeneracies are frequent
std::vector<double> sample_inputs(std::string_view predicate, distribution d, rng& r);

/// Moves x by k floating-point steps.
double ulp_step(double x, long k);

struct point2
{
    double x;
    double y;
};

std::vector<point2> uniform_points(std::size_t n, rng& r);
/// n points of the lattice (i*spacing, j*spacing), 0 <= i, j < ceil(sqrt n),
/// chosen in random order (all of them when n is a square).
std::vector<point2> grid_points(std::size_t n, rng& r, double spacing = 1.0);

} // namespace fpfilter::harness
