#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fpfilter/filters.hpp"
#include "fpfilter/predicates.hpp"
#include "samplers.hpp"

namespace fpfilter::harness {

/// Reads whitespace- or comma-separated rows of decimal or hexadecimal
/// floats. Blank lines and lines starting with '#' are skipped. Throws
/// parse_error whose position is the 1-based line number.
std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t expected_arity = 0);

/// Human-readable derivation: a, m and constants of both top operands.
std::string derive_report(const expr& e, bool ufp);

// --- torture vectors ------------------------------------------------------

struct torture_row
{
    std::string label;
    std::vector<double> inputs;
    double naive;
    sign staged;
    std::size_t stage;
    sign exact;
};

/// Underflow, overflow and the near-collinear triples of the consistency
/// example, evaluated naively, by the safe pipeline and by the oracle.
std::vector<torture_row> torture_rows();

struct consistency_result
{
    // orientations of (a,b,e), (b,d,e), (a,b,d)
    std::array<double, 3> naive;
    std::array<sign, 3> staged;
    std::array<sign, 3> exact;
    bool naive_contradiction;
    bool staged_contradiction;
};

consistency_result consistency_demo();

/// True when (a,b,e) and (b,d,e) are collinear but (a,b,d) is not, with b
/// and e distinct.
bool collinearity_contradiction(sign abe, sign bde, sign abd);

enum class relation
{
    inside,
    boundary,
    outside,
};

std::string_view to_string(relation r);

struct winding_result
{
    relation t1;
    relation t2;
    relation both;
};

/// Point (0, rd(-0.01)) against the closed triangles
/// t1 = {(-1, 0), a, b} and t2 = {(1, 0), b, a}, a = rd(-0.01, -0.59),
/// b = rd(0.01, 0.57). `exact` uses the staged predicate, otherwise the
/// naive one.
winding_result winding_demo(bool exact);

/// Relation of the closed triangle (p, q, r) to point c, given the
/// orientation function.
template <class Orient>
relation classify(const point2& p, const point2& q, const point2& r, const point2& c, Orient&& orient)
{
    const int s = to_int(orient(p, q, r));
    const int s1 = s * to_int(orient(p, q, c));
    const int s2 = s * to_int(orient(q, r, c));
    const int s3 = s * to_int(orient(r, p, c));
    if (s1 < 0 || s2 < 0 || s3 < 0) {
        return relation::outside;
    }
    if (s1 == 0 || s2 == 0 || s3 == 0) {
        return relation::boundary;
    }
    return relation::inside;
}

// --- precision map --------------------------------------------------------

enum class map_mode
{
    naive,
    semistatic,
    interval,
    exact,
};

map_mode parse_map_mode(std::string_view text);

struct precision_map_spec
{
    point2 a{20.1, 20.1};
    point2 b{18.9, 18.9};
    point2 center{3.5, 3.5};
    int width = 1350;
    int height = 675;
    map_mode mode = map_mode::exact;
};

/// Per pixel code, row-major from the top: 1, 0, -1 for the sign and 2 for
/// uncertain. Pixel (i, j) is center moved by i - width/2 steps in x and
/// height/2 - j steps in y.
std::vector<std::int8_t> precision_map(const precision_map_spec& spec);

/// Writes a binary PPM: red +1, green 0, blue -1, yellow uncertain.
void write_ppm(const std::string& path, int width, int height, const std::vector<std::int8_t>& codes);

// --- benchmark ------------------------------------------------------------

struct bench_report
{
    std::string predicate;
    distribution dist;
    std::size_t n;
    double staged_ns;
    double naive_ns;
    double interval_ns;
    double exact_ns;
    double stage1_rate;
    stage_stats stats;
};

bench_report run_bench(std::string_view predicate, std::size_t n, distribution dist, profile prof,
                       std::uint64_t seed = 1);

} // namespace fpfilter::harness
