#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fpfilter/errors.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/oracle.hpp"
#include "fpfilter/predicates.hpp"

using namespace fpfilter;

TEST_CASE("dyadic from double")
{
    const dyadic one = dyadic::from_double(1.0);
    CHECK(one.signum() == 1);
    CHECK(one.mantissa() == 1);
    CHECK(one.exponent() == 0);

    const dyadic tiny = dyadic::from_double(0x1p-1074);
    CHECK(tiny.mantissa() == 1);
    CHECK(tiny.exponent() == -1074);

    const dyadic tenth = dyadic::from_double(0.1);
    CHECK(tenth.signum() == 1);
    CHECK(tenth.mantissa() == mpz_class("3602879701896397"));
    CHECK(tenth.exponent() == -55);

    CHECK(dyadic::from_double(-0.0).is_zero());
    CHECK_THROWS_AS(dyadic::from_double(NAN), invalid_input_error);
    CHECK_THROWS_AS(dyadic::from_double(INFINITY), invalid_input_error);
}

TEST_CASE("dyadic arithmetic is exact")
{
    const dyadic one = dyadic::from_integer(1);
    CHECK((one + dyadic::from_integer(-1)).is_zero());
    const dyadic x = dyadic::from_integer(3, -1);
    const dyadic sq = x * x;
    CHECK(sq.mantissa() == 9);
    CHECK(sq.exponent() == -2);
    const dyadic big = dyadic::from_integer(1, 800);
    CHECK((big - big).is_zero());
    CHECK(dyadic::from_integer(4, 0) == dyadic::from_integer(1, 2));
    CHECK(dyadic::from_integer(1, -3) < dyadic::from_integer(1, -2));
    CHECK(dyadic::from_integer(-5) < dyadic::from_integer(1, -900));
}

TEST_CASE("dyadic rounding to binary64")
{
    std::mt19937_64 r(7);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::ldexp(static_cast<double>(r() >> 11), static_cast<int>(r() % 2000) - 1100);
        CHECK(dyadic::from_double(x).to_double() == x);
    }
    // halfway between 1 and 1 + 2^-52 rounds to even
    CHECK((dyadic::from_integer(1) + dyadic::power_of_two(-53)).to_double() == 1.0);
    CHECK(dyadic::power_of_two(1024).to_double() == INFINITY);
    CHECK(dyadic::power_of_two(-1075).to_double() == 0.0);
    CHECK((dyadic::power_of_two(-1075) + dyadic::power_of_two(-1200)).to_double() == 0x1p-1074);
}

TEST_CASE("signs of sums and differences match long double")
{
    REQUIRE(std::numeric_limits<long double>::digits >= 64);
    std::mt19937_64 r(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int compared = 0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u(r);
        const double y = (i % 3 == 0) ? -x : std::ldexp(u(r), static_cast<int>(r() % 10) - 5);
        const dyadic dx = dyadic::from_double(x);
        const dyadic dy = dyadic::from_double(y);
        if (x == 0 || y == 0 || std::abs(std::ilogb(x) - std::ilogb(y)) > 9) {
            continue;
        }
        // 53-bit operands at most 9 binades apart: the long double result is exact
        const long double s = static_cast<long double>(x) + y;
        const long double d = static_cast<long double>(x) - y;
        REQUIRE((dx + dy).signum() == (s > 0) - (s < 0));
        REQUIRE((dx - dy).signum() == (d > 0) - (d < 0));
        ++compared;
    }
    CHECK(compared > 90000);
}

TEST_CASE("oracle sign")
{
    const expr& o = orient2d_expr();
    const double unit[] = {0, 0, 1, 0, 0, 1};
    CHECK(oracle_sign(o, unit) == sign::positive);
    const double under[] = {0x1p-801, 0x1p-801, 0x1p-800, 0x1p-800, 0x1p-801, 0x1p-800};
    CHECK(oracle_sign(o, under) == sign::positive);
    const double over[] = {0x1p800, 0x1p800, 0x1p800, 0x1p800, 0, 0};
    CHECK(oracle_sign(o, over) == sign::zero);
    const double bad[] = {0, 0, 1, 0, 0, NAN};
    CHECK_THROWS_AS(oracle_sign(o, bad), invalid_input_error);
}

TEST_CASE("compiled oracle agrees with recursive oracle")
{
    std::mt19937_64 r(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const std::string& name : builtin_names()) {
        const expr& e = builtin_expr(name);
        std::vector<double> in(static_cast<std::size_t>(e.arity()));
        for (int i = 0; i < 300; ++i) {
            for (double& x : in) {
                x = (i % 2 == 0) ? u(r) : static_cast<double>(r() % 3);
            }
            CHECK(oracle_sign(e, in) == sign_of(oracle_value(e, in).signum()));
        }
    }
}

TEST_CASE("oracle is invariant under commuting operands")
{
    const expr a = parse_expr("(_1 - _5)*(_4 - _6) - (_3 - _5)*(_2 - _6)");
    const expr b = parse_expr("(_4 - _6)*(_1 - _5) - (_2 - _6)*(_3 - _5)");
    std::mt19937_64 r(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        double in[6];
        for (double& x : in) {
            x = u(r);
        }
        REQUIRE(oracle_sign(a, in) == oracle_sign(b, in));
    }
}

TEST_CASE("orient2d oracle antisymmetry")
{
    const expr& o = orient2d_expr();
    std::mt19937_64 r(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10000; ++i) {
        double in[6];
        for (double& x : in) {
            x = u(r);
        }
        if (i % 4 == 0) {
            in[4] = in[0] + (in[2] - in[0]) * 0.5; // nearly collinear
            in[5] = in[1] + (in[3] - in[1]) * 0.5;
        }
        const double swapped[] = {in[2], in[3], in[0], in[1], in[4], in[5]};
        REQUIRE(oracle_sign(o, swapped) == -oracle_sign(o, in));
    }
}

TEST_CASE("rounding helpers")
{
    const fpn_params p = fpn_params::binary64();
    const dyadic third_ish = dyadic::from_integer(1) + dyadic::power_of_two(-60);
    CHECK(round_up(third_ish, p)->to_double() == std::nextafter(1.0, 2.0));
    CHECK(round_nearest(third_ish, p)->to_double() == 1.0);
    CHECK(next_up(dyadic::from_integer(1), p)->to_double() == std::nextafter(1.0, 2.0));
    CHECK(!round_up(dyadic::power_of_two(1024), p).has_value());
    CHECK(p.u_normal() == 0x1p-1022);
    CHECK(p.u_subnormal() == 2 * p.epsilon() * p.u_normal());
}
