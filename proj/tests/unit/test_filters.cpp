#include <doctest.h>

#include <cmath>
#include <random>

#include "fpfilter/errors.hpp"
#include "fpfilter/filters.hpp"
#include "fpfilter/oracle.hpp"
#include "fpfilter/predicates.hpp"
#include "invariants.hpp"
#include "validation.hpp"

using namespace fpfilter;

namespace {

const double unit_triangle[] = {0, 0, 1, 0, 0, 1};
const double underflow_triple[] = {0x1p-801, 0x1p-801, 0x1p-800, 0x1p-800, 0x1p-801, 0x1p-800};

const filter_outcome uncertain = filter_outcome::uncertain();

filter_outcome certain(int s) { return filter_outcome::certain(sign_of(s)); }

} // namespace

TEST_CASE("semi-static filter")
{
    const semi_static_filter ufp(orient2d_expr(), true);
    const semi_static_filter plain(orient2d_expr(), false);
    CHECK(ufp.name() == "semi-static-ufp");
    CHECK(plain.name() == "semi-static");
    CHECK(ufp.apply(unit_triangle) == certain(1));
    CHECK(ufp.apply(underflow_triple) == uncertain);

    const double same_y[] = {0, 1, 1, 1, 2, 1};
    CHECK(plain.error_bound_value(same_y) == 0.0);
    CHECK(plain.apply(same_y) == certain(0));
    CHECK(ufp.apply(same_y) == uncertain);

    CHECK(plain.a_max() == eps_poly{3, -94906250});
    CHECK(plain.constants().a4 == compute_constants(plain.a_max()).a4);
}

TEST_CASE("semi-static filter with a product root")
{
    const expr e = parse_expr("(_1 - _2) * (_3 * _4 - _5)");
    const semi_static_filter f(e, true);
    std::mt19937_64 r(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 5000; ++i) {
        double in[5];
        for (double& x : in) {
            x = u(r);
        }
        if (i % 3 == 0) {
            in[1] = in[0];
        }
        const filter_outcome o = f.apply(in);
        if (o.is_certain()) {
            REQUIRE(o.value() == oracle_sign(e, in));
        }
    }
    const double zero_factor[] = {0.5, 0.5, 0.3, 0.7, 0.1};
    CHECK(semi_static_filter(e, false).apply(zero_factor) == certain(0));
}

TEST_CASE("stages tolerate non-finite inputs")
{
    const expr& e = orient2d_expr();
    const std::vector<std::shared_ptr<const stage>> stages{
        std::make_shared<semi_static_filter>(e, false),
        std::make_shared<semi_static_filter>(e, true),
        std::make_shared<zero_filter>(e),
        std::make_shared<interval_filter>(e),
        std::make_shared<translation_filter>(e),
        std::make_shared<static_filter>(e, std::vector<interval>(6, interval{-1.0, 1.0}), true),
        std::make_shared<expansion_exact_stage>(e),
        std::make_shared<dyadic_exact_stage>(e),
    };
    const double bad[][6] = {
        {0, 0, 1, 0, NAN, 1},
        {0, 0, 1, 0, INFINITY, 1},
        {0, -INFINITY, 1, 0, 0, 1},
    };
    for (const auto& s : stages) {
        for (const auto& row : bad) {
            CHECK_NOTHROW(s->apply(row));
            CHECK(s->apply(row) == uncertain);
        }
    }
}

TEST_CASE("zero filter")
{
    const zero_filter z(orient2d_expr());
    const double dup[] = {0.3, 0.7, 1.5, -2.0, 0.3, 0.7};
    CHECK(z.apply(dup) == certain(0));
    const double generic[] = {0.1, 0.2, 0.7, -0.3, 0.9, 0.4};
    CHECK(z.apply(generic) == uncertain);
    const double overflow[] = {0x1p1023, 0, 1, 2, -0x1p1023, 3};
    CHECK(z.apply(overflow) == uncertain);
    const double shared_y[] = {0x1p1023, 1, 0, 1, -0x1p1023, 1};
    CHECK(z.apply(shared_y) == certain(0));
    CHECK(oracle_sign(orient2d_expr(), shared_y) == sign::zero);
}

TEST_CASE("interval filter")
{
    const interval_filter f(orient2d_expr());
    CHECK(f.apply(unit_triangle) == certain(1));

    const double near[] = {-0.01, -0.59, 0.01, 0.57, 0, -0.01};
    const filter_outcome o = f.apply(near);
    if (o.is_certain()) {
        CHECK(o.value() == oracle_sign(orient2d_expr(), near));
    }
    const double over[] = {0x1p800, 0x1p800, 0x1p800, 0x1p800, 0, 0};
    CHECK(f.apply(over) == uncertain);
    const double same[] = {1, 1, 1, 1, 1, 1};
    CHECK(f.apply(same) == certain(0));
}

TEST_CASE("interval enclosure at every node")
{
    std::mt19937_64 r(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t checked = 0;
    for (const std::string& name : builtin_names()) {
        const expr& e = builtin_expr(name);
        const interval_filter f(e);
        exact_evaluator exact(e);
        REQUIRE(exact.code().size() == f.code().size());
        std::vector<double> in(static_cast<std::size_t>(e.arity()));
        for (int i = 0; i < 25000; ++i) {
            const int scale = (i % 5 == 0) ? -1000 : ((i % 5 == 1) ? 500 : 0);
            for (double& x : in) {
                x = std::ldexp((i % 7 == 0) ? static_cast<double>(r() % 3) : u(r), scale);
            }
            const std::vector<interval> slots = f.evaluate(in);
            exact.run(in);
            for (std::size_t k = 0; k < slots.size(); ++k) {
                if (!slots[k].is_finite()) {
                    continue;
                }
                const dyadic v = exact.value_at(k);
                REQUIRE(dyadic::from_double(slots[k].lo) <= v);
                REQUIRE(v <= dyadic::from_double(slots[k].hi));
            }
            ++checked;
        }
    }
    CHECK(checked == 100000);
}

TEST_CASE("translation filter")
{
    const translation_filter t(orient2d_expr());
    CHECK(t.applicable());
    const double small[] = {4, 4, 5, 6, 3, 3};
    CHECK(t.apply(small) == certain(1));
    CHECK(oracle_sign(orient2d_expr(), small) == sign::positive);
    const double inexact[] = {1, 0, 0, 1, 0x1p-60, 0};
    CHECK(t.apply(inexact) == uncertain);
    const double huge[] = {0x1p800, 0x1p801, 0x1p802, 0x1p800, 0, 0x1p-3};
    CHECK(t.apply(huge) == uncertain);

    for (const std::string& name : builtin_names()) {
        CHECK(translation_filter(builtin_expr(name)).applicable());
    }
    const translation_filter na(parse_expr("_1 * _2 - _3"));
    CHECK(!na.applicable());
    const double any[] = {1, 2, 3};
    CHECK(na.apply(any) == uncertain);
}

TEST_CASE("static and almost-static filters")
{
    const expr& e = orient2d_expr();
    const static_filter s(e, std::vector<interval>(6, interval{-1.0, 1.0}), false);
    CHECK(s.apply(unit_triangle) == certain(1));
    CHECK(s.error_bound_value() > 0.0);
    CHECK(s.error_bound_value() < 30 * 0x1p-53);
    const double outside[] = {0, 0, 2, 0, 0, 1};
    CHECK(s.apply(outside) == uncertain);

    CHECK_THROWS_AS(static_filter(parse_expr("_1 * _2"), std::vector<interval>(2, interval{-1.0, 1.0}), false),
                    derivation_error);
    CHECK_THROWS_AS(static_filter(e, std::vector<interval>(6, interval{1.0, -1.0}), false), invalid_bounds_error);

    almost_static_filter a(e, std::vector<double>(6, 1.0), true);
    CHECK(a.apply(outside) == uncertain);
    CHECK(a.update(outside));
    CHECK(!a.update(outside));
    std::vector<interval> box(6, interval{-1.0, 1.0});
    box[2] = interval{-2.0, 2.0};
    const static_filter fresh(e, box, true);
    CHECK(a.error_bound_value() == fresh.error_bound_value());
    CHECK(a.apply(outside) == fresh.apply(outside));
    CHECK(a.apply(outside) == certain(1));
}

TEST_CASE("expansion and dyadic exact stages")
{
    const expansion_exact_stage x(orient2d_expr());
    const dyadic_exact_stage d(orient2d_expr());
    CHECK(!x.is_total());
    CHECK(d.is_total());
    CHECK(x.apply(unit_triangle) == certain(1));
    CHECK(d.apply(underflow_triple) == certain(1));
    // the exact value 2^-1602 lies below the subnormal range
    CHECK(x.apply(underflow_triple) == uncertain);
    const double over[] = {0x1p800, 0x1p800, 0x1p800, 0x1p800, 0, 0};
    CHECK(x.apply(over) == uncertain);
    CHECK(d.apply(over) == certain(0));
    const double square[] = {0, 0, 2, 0, 2, 2, 0, 2};
    CHECK(expansion_exact_stage(incircle2d_expr()).apply(square) == certain(0));
}

TEST_CASE("sampled validity of every stage")
{
    for (const std::string& name : builtin_names()) {
        const harness::validity_report rep = harness::run_validity(name, 1000, 5);
        CHECK(rep.samples == 5000);
        for (const harness::stage_tally& t : rep.stages) {
            INFO(name << " " << t.name);
            CHECK(t.wrong == 0);
            CHECK(t.calls + t.skipped == rep.samples);
        }
        CHECK(rep.monotonicity_violations == 0);
        CHECK(rep.monotonicity_checks == rep.samples);
    }
}

TEST_CASE("sampled error-bound invariants")
{
    for (const std::string& name : builtin_names()) {
        const harness::invariant_report rep = harness::run_invariants(name, 400, 6);
        INFO(name);
        CHECK(rep.plain.violations() == 0);
        CHECK(rep.ufp.violations() == 0);
        CHECK(rep.plain.underflow_skipped > 0);
        CHECK(rep.ufp.underflow_skipped == 0);
        CHECK(rep.ufp.checks > rep.plain.checks);
    }
}

TEST_CASE("underflow detector")
{
    harness::underflow_detector det(orient2d_expr());
    CHECK(det.underflows(underflow_triple));
    CHECK(!det.underflows(unit_triangle));
    CHECK(harness::product_underflow(0x1p-600, 0x1p-600, 0x1p-600 * 0x1p-600));
    CHECK(!harness::product_underflow(0.0, 0x1p-600, 0.0));
}

TEST_CASE("sum of exact operands is decided by its rounded sign")
{
    const expr e = parse_expr("_1 - _2");
    for (bool ufp : {false, true}) {
        const semi_static_filter f(e, ufp);
        CHECK(f.a_max().is_zero());
        const double equal[] = {0.75, 0.75};
        CHECK(f.apply(equal) == certain(0));
        const double close[] = {0x1p-1073, 0x1p-1074};
        CHECK(f.apply(close) == certain(1));
        const double inf[] = {INFINITY, 1.0};
        CHECK(f.apply(inf) == uncertain);
    }
}
