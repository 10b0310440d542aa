#include "samplers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpfilter/errors.hpp"

namespace fpfilter::harness {

distribution parse_distribution(std::string_view text)
{
    for (distribution d : all_distributions()) {
        if (to_string(d) == text) {
            return d;
        }
    }
    throw pipeline_error("unknown distribution '" + std::string(text) + "'");
}

std::string_view to_string(distribution d)
{
    switch (d) {
    case distribution::uniform: return "uniform";
    case distribution::near_degenerate: return "near-degenerate";
    case distribution::tiny: return "tiny";
    case distribution::huge: return "huge";
    case distribution::grid: return "grid";
    }
    return "?";
}

const std::vector<distribution>& all_distributions()
{
    static const std::vector<distribution> all{distribution::uniform, distribution::near_degenerate,
                                               distribution::tiny, distribution::huge, distribution::grid};
    return all;
}

double ulp_step(double x, long k)
{
    const double target = k > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    for (long i = 0; i < std::labs(k); ++i) {
        x = std::nextafter(x, target);
    }
    return x;
}

namespace {

int predicate_arity(std::string_view predicate)
{
    if (predicate == "orient2d") {
        return 6;
    }
    if (predicate == "incircle2d") {
        return 8;
    }
    if (predicate == "orient3d") {
        return 12;
    }
    if (predicate == "power_side_3d") {
        return 20;
    }
    throw pipeline_error("unknown predicate '" + std::string(predicate) + "'");
}

std::vector<double> uniform_inputs(int arity, rng& r)
{
    std::vector<double> v(static_cast<std::size_t>(arity));
    for (double& x : v) {
        x = uniform(r, -1.0, 1.0);
    }
    return v;
}

void perturb(std::vector<double>& v, rng& r)
{
    for (double& x : v) {
        if (below(r, 3) == 0) {
            x = ulp_step(x, static_cast<long>(below(r, 7)) - 3);
        }
    }
}

std::array<double, 3> unit_vector(rng& r)
{
    for (;;) {
        const double x = uniform(r, -1.0, 1.0);
        const double y = uniform(r, -1.0, 1.0);
        const double z = uniform(r, -1.0, 1.0);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 0.1 && n <= 1.0) {
            return {x / n, y / n, z / n};
        }
    }
}

std::vector<double> degenerate_inputs(std::string_view predicate, rng& r)
{
    std::vector<double> v;
    if (predicate == "orient2d") {
        v = uniform_inputs(6, r);
        const double t = uniform(r, -1.0, 2.0);
        v[4] = v[0] + t * (v[2] - v[0]);
        v[5] = v[1] + t * (v[3] - v[1]);
        switch (below(r, 8)) {
        case 0: v[4] = v[0]; v[5] = v[1]; break; // c == a
        case 1: v[2] = v[0]; break;              // shared x
        default: break;
        }
    } else if (predicate == "incircle2d") {
        const double cx = uniform(r, -1.0, 1.0);
        const double cy = uniform(r, -1.0, 1.0);
        const double radius = uniform(r, 0.1, 1.0);
        for (int k = 0; k < 4; ++k) {
            const double theta = uniform(r, 0.0, 6.283185307179586);
            v.push_back(cx + radius * std::cos(theta));
            v.push_back(cy + radius * std::sin(theta));
        }
        if (below(r, 8) == 0) {
            v[6] = v[0];
            v[7] = v[1];
        }
    } else if (predicate == "orient3d") {
        v = uniform_inputs(12, r);
        const double s = uniform(r, -1.0, 2.0);
        const double t = uniform(r, -1.0, 2.0);
        for (int k = 0; k < 3; ++k) {
            v[9 + k] = v[k] + s * (v[3 + k] - v[k]) + t * (v[6 + k] - v[k]);
        }
        if (below(r, 8) == 0) {
            std::copy(v.begin(), v.begin() + 3, v.begin() + 9);
        }
    } else {
        predicate_arity(predicate);
        const double ox = uniform(r, -1.0, 1.0);
        const double oy = uniform(r, -1.0, 1.0);
        const double oz = uniform(r, -1.0, 1.0);
        const double radius = uniform(r, 0.1, 1.0);
        const double weight = uniform(r, -0.5, 0.5);
        for (int p = 0; p < 5; ++p) {
            const auto u = unit_vector(r);
            v.push_back(ox + radius * u[0]);
            v.push_back(oy + radius * u[1]);
            v.push_back(oz + radius * u[2]);
            v.push_back(weight);
        }
        if (below(r, 8) == 0) {
            std::copy(v.begin(), v.begin() + 4, v.begin() + 16);
        }
    }
    perturb(v, r);
    return v;
}

} // namespace

std::vector<double> sample_inputs(std::string_view predicate, distribution d, rng& r)
{
    const int arity = predicate_arity(predicate);
    switch (d) {
    case distribution::uniform:
        return uniform_inputs(arity, r);
    case distribution::near_degenerate:
        return degenerate_inputs(predicate, r);
    case distribution::tiny:
    case distribution::huge: {
        std::vector<double> v = below(r, 2) == 0 ? uniform_inputs(arity, r) : degenerate_inputs(predicate, r);
        const int shift = d == distribution::tiny ? -1000 : 800;
        for (double& x : v) {
            x = std::ldexp(x, shift);
        }
        return v;
    }
    case distribution::grid: {
        std::vector<double> v(static_cast<std::size_t>(arity));
        for (double& x : v) {
            x = static_cast<double>(below(r, 4));
        }
        return v;
    }
    }
    return {};
}

std::vector<point2> uniform_points(std::size_t n, rng& r)
{
    std::vector<point2> out(n);
    for (auto& p : out) {
        p.x = unit(r);
        p.y = unit(r);
    }
    return out;
}

std::vector<point2> grid_points(std::size_t n, rng& r, double spacing)
{
    auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (side * side < n) {
        ++side;
    }
    std::vector<point2> out;
    out.reserve(side * side);
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            out.push_back({static_cast<double>(i) * spacing, static_cast<double>(j) * spacing});
        }
    }
    for (std::size_t i = out.size(); i > 1; --i) {
        std::swap(out[i - 1], out[below(r, i)]);
    }
    out.resize(n);
    return out;
}

} // namespace fpfilter::harness
