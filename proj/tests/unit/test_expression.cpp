#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "fpfilter/errors.hpp"
#include "fpfilter/expression.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/predicates.hpp"

using namespace fpfilter;

namespace {

// one dyadic rounding per node
double reference_eval(const expr& e, std::span<const double> in)
{
    switch (e.kind()) {
    case node_kind::constant: return e.value();
    case node_kind::input: return in[static_cast<std::size_t>(e.index() - 1)];
    default: break;
    }
    const dyadic l = dyadic::from_double(reference_eval(e.left(), in));
    const dyadic r = dyadic::from_double(reference_eval(e.right(), in));
    switch (e.kind()) {
    case node_kind::sum: return (l + r).to_double();
    case node_kind::difference: return (l - r).to_double();
    default: return (l * r).to_double();
    }
}

} // namespace

TEST_CASE("parse orient2d listing")
{
    const expr e = parse_expr("(_1 - _5)*(_4 - _6) - (_3 - _5)*(_2 - _6)");
    CHECK(e.arity() == 6);
    CHECK(e.kind() == node_kind::difference);
    CHECK(e == orient2d_expr());
}

TEST_CASE("parse leaves and errors")
{
    const expr one = parse_expr("_1");
    CHECK(one.kind() == node_kind::input);
    CHECK(one.index() == 1);
    CHECK_THROWS_AS(parse_expr("_1 + _3"), parse_error);
    CHECK_THROWS_AS(parse_expr("(_1 + _2"), parse_error);
    CHECK_THROWS_AS(parse_expr("_1 + 1e400"), parse_error);
    CHECK_THROWS_AS(parse_expr("_1 $ _2"), parse_error);
    CHECK_THROWS_AS(parse_expr("_0"), parse_error);

    const expr c = parse_expr("_1 * 0x1.8p1 - -2.5");
    CHECK(c.left().right().value() == 3.0);
    CHECK(c.right().value() == -2.5);
    CHECK(parse_expr("0.1").value() == 0.1);
}

TEST_CASE("parse error carries the position")
{
    try {
        parse_expr("_1 + * _2");
        FAIL("expected a parse error");
    } catch (const parse_error& err) {
        CHECK(err.position() == 5);
    }
}

TEST_CASE("serialisation round-trips")
{
    for (const std::string& name : builtin_names()) {
        const expr& e = builtin_expr(name);
        CHECK(parse_expr(to_string(e)) == e);
    }
    const expr c = parse_expr("(_1 - 0.1) * 1e-300 + _2");
    CHECK(parse_expr(to_string(c)) == c);
}

TEST_CASE("association order is kept")
{
    const expr a = parse_expr("(_1 + _2) + _3");
    const expr b = parse_expr("_1 + (_2 + _3)");
    CHECK(!(a == b));
    const double in[] = {1.0, 0x1p-53, 0x1p-53};
    CHECK(eval_naive(a, in) == 1.0);
    CHECK(eval_naive(b, in) == 1.0 + 0x1p-52);
}

TEST_CASE("naive evaluation vectors")
{
    const expr& o = orient2d_expr();
    const double under[] = {0x1p-801, 0x1p-801, 0x1p-800, 0x1p-800, 0x1p-801, 0x1p-800};
    CHECK(eval_naive(o, under) == 0.0);
    CHECK(eval_checked(o, under).underflow);
    const double over[] = {0x1p800, 0x1p800, 0x1p800, 0x1p800, 0, 0};
    CHECK(std::isnan(eval_naive(o, over)));
    const double unit[] = {0, 0, 1, 0, 0, 1};
    CHECK(eval_naive(o, unit) == 1.0);
    CHECK(!eval_checked(o, unit).underflow);
}

TEST_CASE("naive evaluation is bit-exact against per-node dyadic rounding")
{
    std::mt19937_64 r(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t n = 0;
    for (const std::string& name : builtin_names()) {
        const expr& e = builtin_expr(name);
        std::vector<double> in(static_cast<std::size_t>(e.arity()));
        for (int i = 0; i < 25000; ++i) {
            const int scale = static_cast<int>(r() % 400) - 200;
            for (double& x : in) {
                x = std::ldexp(u(r), scale);
            }
            const double got = eval_naive(e, in);
            const double want = reference_eval(e, in);
            REQUIRE(std::memcmp(&got, &want, sizeof got) == 0);
            ++n;
        }
    }
    CHECK(n == 100000);
}

TEST_CASE("top decomposition")
{
    const auto split = top_decomposition(orient2d_expr());
    REQUIRE(split.has_value());
    CHECK(split->op == node_kind::difference);
    CHECK(to_string(split->left) == "(_1 - _5)*(_4 - _6)");
    CHECK(to_string(split->right) == "(_3 - _5)*(_2 - _6)");
    CHECK(!top_decomposition(parse_expr("_1 * _2")).has_value());
    CHECK(!top_decomposition(parse_expr("_1")).has_value());
}

TEST_CASE("built-in arities")
{
    CHECK(orient2d_expr().arity() == 6);
    CHECK(incircle2d_expr().arity() == 8);
    CHECK(orient3d_expr().arity() == 12);
    CHECK(power_side_3d_expr().arity() == 20);
    CHECK_THROWS_AS(builtin_expr("orient4d"), pipeline_error);
}
