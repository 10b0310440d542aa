#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "delaunay.hpp"
#include "fpfilter/errors.hpp"
#include "fpfilter/oracle.hpp"
#include "harness.hpp"
#include "samplers.hpp"

using namespace fpfilter;
using namespace fpfilter::harness;

namespace {

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("reading rows")
{
    std::istringstream in("# header\n0 0 1 0 0 1\n\n0x1p-801, 0x1p-801,0x1p-800 0x1p-800 0x1p-801 0x1p-800\n");
    const auto rows = read_rows(in, 6);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<double>{0, 0, 1, 0, 0, 1});
    CHECK(rows[1][0] == 0x1p-801);
    CHECK(rows[1][3] == 0x1p-800);

    std::istringstream bad("0 0 1 0 0 1\n1 2 3 x 5 6\n");
    try {
        read_rows(bad, 6);
        FAIL("expected a parse error");
    } catch (const parse_error& e) {
        CHECK(e.position() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream short_row("0 0 1 0 0 1\n\n# c\n1 2 3\n");
    CHECK_THROWS_AS(read_rows(short_row, 6), parse_error);
    std::istringstream inf_row("0 0 1 0 0 inf\n");
    CHECK_THROWS_AS(read_rows(inf_row, 6), parse_error);
}

TEST_CASE("torture rows")
{
    const auto rows = torture_rows();
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].naive == 0.0);
    CHECK(rows[0].staged == sign::positive);
    CHECK(rows[0].exact == sign::positive);
    CHECK(std::isnan(rows[1].naive));
    CHECK(rows[1].staged == sign::zero);
    for (const auto& r : rows) {
        CHECK(r.staged == r.exact);
    }
}

TEST_CASE("winding-number point test")
{
    const winding_result naive = winding_demo(false);
    CHECK(naive.t1 == relation::boundary);
    CHECK(naive.t2 == relation::boundary);
    const winding_result exact = winding_demo(true);
    CHECK(exact.t1 == relation::inside);
    CHECK(exact.t2 == relation::outside);
    CHECK(exact.both == relation::inside);
}

TEST_CASE("unit square triangulation")
{
    const triangulation t = delaunay({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, profile::safe, 1);
    CHECK(t.triangles.size() == 2);
    CHECK(hull_size(t.points) == 4);
    CHECK(empty_circle_violations(t) == 0);
    for (const auto& tri : t.triangles) {
        const std::vector<double> in{t.points[tri[0]].x, t.points[tri[0]].y, t.points[tri[1]].x,
                                     t.points[tri[1]].y, t.points[tri[2]].x, t.points[tri[2]].y};
        CHECK(oracle_sign(orient2d_expr(), in) == sign::positive);
    }
}

TEST_CASE("degenerate point sets")
{
    const triangulation line = delaunay({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, profile::safe, 1);
    CHECK(line.collinear);
    CHECK(line.triangles.empty());

    const triangulation dup = delaunay({{0, 0}, {1, 0}, {0, 1}, {1, 0}, {0, 0}}, profile::fast, 2);
    CHECK(dup.duplicates_removed == 2);
    CHECK(dup.triangles.size() == 1);
}

TEST_CASE("random and grid triangulations")
{
    for (profile prof : {profile::fast, profile::safe}) {
        rng r(7);
        const triangulation u = delaunay(uniform_points(300, r), prof, 7);
        const std::size_t h = hull_size(u.points);
        CHECK(u.triangles.size() == 2 * u.points.size() - h - 2);
        CHECK(empty_circle_violations(u) == 0);
        CHECK(u.orient_stats.conserved());
        CHECK(u.incircle_stats.conserved());

        rng g(8);
        const triangulation grid = delaunay(grid_points(225, g, 0.25), prof, 8);
        CHECK(grid.points.size() == 225);
        CHECK(hull_size(grid.points) == 56);
        CHECK(grid.triangles.size() == 2 * 225 - 56 - 2);
        CHECK(empty_circle_violations(grid) == 0);
    }
}

TEST_CASE("triangulation is deterministic")
{
    rng r1(9);
    rng r2(9);
    const triangulation a = delaunay(uniform_points(500, r1), profile::safe, 9);
    const triangulation b = delaunay(uniform_points(500, r2), profile::safe, 9);
    CHECK(a.triangles == b.triangles);
    for (std::size_t i = 0; i < a.orient_stats.size(); ++i) {
        CHECK(a.orient_stats.calls(i) == b.orient_stats.calls(i));
        CHECK(a.incircle_stats.certified(i) == b.incircle_stats.certified(i));
    }
}

TEST_CASE("precision map")
{
    precision_map_spec spec;
    spec.width = 135;
    spec.height = 67;
    spec.mode = map_mode::exact;
    const auto exact = precision_map(spec);
    CHECK(std::count(exact.begin(), exact.end(), 2) == 0);
    std::size_t yellow_semi = 0;
    std::size_t yellow_interval = 0;
    for (map_mode m : {map_mode::semistatic, map_mode::interval}) {
        spec.mode = m;
        const auto codes = precision_map(spec);
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (codes[i] != 2) {
                REQUIRE(codes[i] == exact[i]);
            }
        }
        (m == map_mode::semistatic ? yellow_semi : yellow_interval) = static_cast<std::size_t>(std::count(codes.begin(), codes.end(), 2));
    }
    CHECK(yellow_interval <= yellow_semi);

    // the centre pixel is the centre point itself
    spec.width = 3;
    spec.height = 3;
    spec.mode = map_mode::exact;
    const auto tiny = precision_map(spec);
    const std::vector<double> centre{spec.a.x, spec.a.y, spec.b.x, spec.b.y, 3.5, 3.5};
    CHECK(tiny[4] == to_int(oracle_sign(orient2d_expr(), centre)));

    spec.width = 0;
    CHECK_THROWS_AS(precision_map(spec), pipeline_error);
    CHECK_THROWS_AS(parse_map_mode("fancy"), pipeline_error);
}

TEST_CASE("ppm output is deterministic")
{
    precision_map_spec spec;
    spec.width = 40;
    spec.height = 20;
    spec.mode = map_mode::naive;
    const std::string p1 = "fpfilter_test_1.ppm";
    const std::string p2 = "fpfilter_test_2.ppm";
    write_ppm(p1, spec.width, spec.height, precision_map(spec));
    write_ppm(p2, spec.width, spec.height, precision_map(spec));
    const std::string a = slurp(p1);
    CHECK(a == slurp(p2));
    CHECK(a.rfind("P6\n40 20\n255\n", 0) == 0);
    CHECK(a.size() == std::string("P6\n40 20\n255\n").size() + 40 * 20 * 3);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("samplers")
{
    rng r1(1);
    rng r2(1);
    for (distribution d : all_distributions()) {
        CHECK(parse_distribution(to_string(d)) == d);
        for (const std::string& name : builtin_names()) {
            const auto a = sample_inputs(name, d, r1);
            const auto b = sample_inputs(name, d, r2);
            CHECK(a == b);
            CHECK(a.size() == static_cast<std::size_t>(builtin_expr(name).arity()));
            for (double x : a) {
                CHECK(std::isfinite(x));
            }
        }
    }
    CHECK(ulp_step(1.0, 1) == std::nextafter(1.0, 2.0));
    CHECK(ulp_step(1.0, -2) == std::nextafter(std::nextafter(1.0, 0.0), 0.0));
    CHECK_THROWS_AS(parse_distribution("gaussian"), pipeline_error);
}
