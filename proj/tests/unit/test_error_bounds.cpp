#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fpfilter/error_bounds.hpp"
#include "fpfilter/errors.hpp"
#include "fpfilter/predicates.hpp"

using namespace fpfilter;

namespace {

dyadic d(double x) { return dyadic::from_double(x); }

dyadic eps_of(const fpn_params& p) { return dyadic::power_of_two(-p.precision); }

// a3, a4 against their definitions, with exact arithmetic
void check_constants(const eps_poly& a_max, const fpn_params& p)
{
    const filter_constants c = compute_constants(a_max, p);
    const dyadic A = a_max.evaluate(p);
    const dyadic one = dyadic::from_integer(1);
    const dyadic e = eps_of(p);
    const auto prev = [&](double x) {
        return p == fpn_params::binary32() ? static_cast<double>(std::nextafter(static_cast<float>(x), 0.0f))
                                           : std::nextafter(x, 0.0);
    };
    CHECK(d(c.a3) * (one - e) > A);
    CHECK(!(d(prev(c.a3)) * (one - e) > A));
    const dyadic target = d(c.a3) * (one + e) * (one + e);
    CHECK(d(c.a4) >= target);
    CHECK(d(prev(c.a4)) < target);
    if (p == fpn_params::binary32()) {
        CHECK(static_cast<double>(static_cast<float>(c.a3)) == c.a3);
        CHECK(static_cast<double>(static_cast<float>(c.a4)) == c.a4);
    }
}

} // namespace

TEST_CASE("phi")
{
    CHECK(phi(fpn_params::binary64()) == 94906264);
    CHECK(phi(fpn_params::binary32()) == 4094);
    CHECK(phi(fpn_params{2, -2, 3}) == 2);
}

TEST_CASE("leaf and atom rules")
{
    const error_bound in = derive(parse_expr("_1"), false);
    CHECK(in.a.is_zero());
    CHECK(in.m.to_string() == "|_1|");
    CHECK(derive(parse_expr("_1"), true).a.is_zero());

    const error_bound c = derive(parse_expr("-2.5"), false);
    CHECK(c.a.is_zero());
    CHECK(c.m.kind() == magnitude_kind::constant);
    CHECK(c.m.value() == 2.5);

    CHECK(derive(parse_expr("_1 - _2"), false).a == eps_poly{1});
    CHECK(derive(parse_expr("_1 - 2.5"), false).a == eps_poly{1});

    const error_bound prod = derive(parse_expr("_1 * _2"), false);
    CHECK(prod.a == eps_poly{1});
    CHECK(prod.m.to_string() == "|_1*_2|");
    const error_bound prod_ufp = derive(parse_expr("_1 * _2"), true);
    CHECK(prod_ufp.a == eps_poly{1});
    CHECK(prod_ufp.m.to_string() == "|_1*_2| + u_N");
}

TEST_CASE("atom-pair product rule")
{
    const auto split = top_decomposition(orient2d_expr());
    REQUIRE(split.has_value());
    const error_bound b = derive(split->left, false);
    CHECK(b.a == eps_poly{3, -94906250});
    CHECK(b.a.to_string() == "3*eps - 94906250*eps^2");
    CHECK(b.m.to_string() == "|(_1 - _5)*(_4 - _6)|");
    const error_bound u = derive(split->left, true);
    CHECK(u.a == b.a);
    CHECK(u.m.to_string() == "|(_1 - _5)*(_4 - _6)| + u_N");
}

TEST_CASE("general rules")
{
    // (_1 + _2) + _3: (1 + eps) * eps + eps
    CHECK(derive(parse_expr("(_1 + _2) + _3"), false).a == eps_poly{2, 1});
    // (_1 * _2) * _3: (1 + eps) * eps + eps
    const error_bound p = derive(parse_expr("(_1 * _2) * _3"), true);
    CHECK(p.a == eps_poly{2, 1});
    CHECK(p.m.to_string() == "(|_1*_2| + u_N) * |_3| + u_N");
    CHECK(derive(orient2d_expr(), false).a == eps_poly{4, -94906247, -94906250});
}

TEST_CASE("derivation is deterministic")
{
    for (const std::string& name : builtin_names()) {
        for (bool ufp : {false, true}) {
            const error_bound a = derive(builtin_expr(name), ufp);
            const error_bound b = derive(parse_expr(to_string(builtin_expr(name))), ufp);
            CHECK(a.a == b.a);
            CHECK(a.m == b.m);
        }
    }
}

TEST_CASE("lexicographic maximum")
{
    const eps_poly a{3, -94906250};
    CHECK(eps_poly_max(a, eps_poly{1}) == a);
    CHECK(eps_poly_max(a, eps_poly{3}) == eps_poly{3});
    CHECK(eps_poly_max(eps_poly{}, eps_poly{}) == eps_poly{});
    CHECK(eps_poly_max(eps_poly{}, eps_poly{0, -1}) == eps_poly{});

    std::vector<mpz_class> big{mpz_class(1), mpz_class(1) << 53};
    CHECK_THROWS_AS(eps_poly_max(eps_poly(big), eps_poly{1}), derivation_error);
}

TEST_CASE("lexicographic comparison needs a margin below 1/eps")
{
    // at eps = 2^-53: eps - (2^53 - 1) eps^2 = eps^2 < (2^53 - 1) eps^2 = eps - eps^2
    const mpz_class c = (mpz_class(1) << 53) - 1;
    const eps_poly a1(std::vector<mpz_class>{1, -c});
    const eps_poly a2(std::vector<mpz_class>{0, c});
    const fpn_params p = fpn_params::binary64();
    CHECK(a1.evaluate(p) < a2.evaluate(p));
    CHECK(eps_poly_max(a1, a2) == a1);
    CHECK(eps_poly_max_at(a1, a2) == a2);
}

TEST_CASE("maximum agrees with exact evaluation on random pairs")
{
    const fpn_params p = fpn_params::binary64();
    std::mt19937_64 r(33);
    const auto coeff = [&](int bits) {
        mpz_class v = static_cast<unsigned long>(r() >> (64 - bits));
        return (r() & 1) ? mpz_class(-v) : v;
    };
    int lexicographic = 0;
    for (int i = 0; i < 10000; ++i) {
        const bool safe = i % 2 == 0;
        std::vector<mpz_class> c1;
        std::vector<mpz_class> c2;
        const std::size_t deg = 1 + r() % 5;
        for (std::size_t k = 0; k < deg; ++k) {
            // linear terms collide often so higher terms decide
            const int bits = k == 0 ? 2 : (safe ? 50 : 52);
            c1.push_back(coeff(bits));
            c2.push_back(r() % 4 == 0 ? c1.back() : coeff(bits));
        }
        const eps_poly a1(c1);
        const eps_poly a2(c2);
        const dyadic v1 = a1.evaluate(p);
        const dyadic v2 = a2.evaluate(p);
        const dyadic want = v1 >= v2 ? v1 : v2;
        REQUIRE(eps_poly_max_at(a1, a2, p).evaluate(p) == want);
        if (safe) {
            REQUIRE(eps_poly_max(a1, a2, p).evaluate(p) == want);
            ++lexicographic;
        }
    }
    CHECK(lexicographic == 5000);
}

TEST_CASE("maximum agrees with exact evaluation on derivation pairs")
{
    const fpn_params p = fpn_params::binary64();
    int pairs = 0;
    std::function<void(const expr&)> walk = [&](const expr& e) {
        if (e.is_leaf()) {
            return;
        }
        walk(e.left());
        walk(e.right());
        if (!e.is_additive() || is_atom_pair_sum(e)) {
            return;
        }
        for (bool ufp : {false, true}) {
            const eps_poly a1 = derive(e.left(), ufp).a;
            const eps_poly a2 = derive(e.right(), ufp).a;
            const dyadic v1 = a1.evaluate(p);
            const dyadic v2 = a2.evaluate(p);
            CHECK(eps_poly_max_at(a1, a2, p).evaluate(p) == (v1 >= v2 ? v1 : v2));
            ++pairs;
        }
    };
    for (const std::string& name : builtin_names()) {
        walk(builtin_expr(name));
    }
    CHECK(pairs > 0);
}

TEST_CASE("sum and product combination")
{
    const eps_poly a{3, -94906250};
    CHECK(eps_poly_combine_sum(a, a) == eps_poly{4, -94906247, -94906250});
    CHECK(eps_poly_combine_product(eps_poly{1}, eps_poly{}) == eps_poly{2, 1});
    // rounding the product of two exact operands still costs eps
    CHECK(eps_poly_combine_product(eps_poly{}, eps_poly{}) == eps_poly{1});
    CHECK(eps_poly_combine_sum(eps_poly{}, eps_poly{}) == eps_poly{1});
}

TEST_CASE("filter constants")
{
    const fpn_params p = fpn_params::binary64();
    const double eps = p.epsilon();
    const filter_constants c = compute_constants(eps_poly{3, -94906250}, p);
    CHECK(c.a4 > 2.9 * eps);
    CHECK(c.a4 < 3.1 * eps);
    CHECK(c.a4 < 8.88720573725927e-16);
    CHECK(c.a4 == 0x1.7fffffe95f621p-52);
    // below the textbook constant (3 + 16 eps) eps
    CHECK(c.a4 < (3.0 + 16.0 * eps) * eps);
    check_constants(eps_poly{3, -94906250}, p);

    const filter_constants one = compute_constants(eps_poly{1}, p);
    CHECK(one.a4 > eps);
    CHECK(one.a4 < 1.001 * eps * 1.1);
    check_constants(eps_poly{1}, p);

    const filter_constants zero = compute_constants(eps_poly{}, p);
    CHECK(zero.a3 == 0x1p-1074);
    check_constants(eps_poly{}, p);

    for (const std::string& name : builtin_names()) {
        check_constants(derive(builtin_expr(name), true).a, p);
    }
    check_constants(eps_poly{3, -4080}, fpn_params::binary32());
}

TEST_CASE("staticize")
{
    const auto split = top_decomposition(orient2d_expr());
    REQUIRE(split.has_value());
    const magnitude_expr m = magnitude_expr::sum(derive(split->left, false).m, derive(split->right, false).m);
    const std::vector<interval> box(6, interval{-1.0, 1.0});
    const double s = staticize(m, box);

    // corner maximum: m is monotone in every |x_i|
    double corner = 0.0;
    for (int bits = 0; bits < 64; ++bits) {
        double in[6];
        for (int k = 0; k < 6; ++k) {
            in[k] = (bits >> k) & 1 ? 1.0 : -1.0;
        }
        corner = std::fmax(corner, m.evaluate(in));
    }
    CHECK(corner == 8.0);
    CHECK(s >= corner);
    CHECK(s <= corner * (1 + 8 * 0x1p-53));

    const std::vector<interval> zeros(6, interval{0.0, 0.0});
    CHECK(staticize(m, zeros) == 0.0);
    const magnitude_expr mu = magnitude_expr::sum(derive(split->left, true).m, derive(split->right, true).m);
    CHECK(staticize(mu, zeros) >= 2 * 0x1p-1022);

    std::vector<interval> bad = box;
    bad[2] = interval{1.0, -1.0};
    CHECK_THROWS_AS(staticize(m, bad), invalid_bounds_error);
    bad[2] = interval{NAN, 1.0};
    CHECK_THROWS_AS(staticize(m, bad), invalid_bounds_error);
}

TEST_CASE("staticize bounds sampled magnitudes")
{
    std::mt19937_64 r(17);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const std::string& name : builtin_names()) {
        const expr& e = builtin_expr(name);
        const auto split = top_decomposition(e);
        REQUIRE(split.has_value());
        const magnitude_expr m = magnitude_expr::sum(derive(split->left, true).m, derive(split->right, true).m);
        const std::vector<interval> box(static_cast<std::size_t>(e.arity()), interval{-3.0, 3.0});
        const double s = staticize(m, box);
        std::vector<double> in(box.size());
        for (int i = 0; i < 2000; ++i) {
            for (double& x : in) {
                x = (i % 2 == 0) ? u(r) : ((r() & 1) ? 3.0 : -3.0);
            }
            REQUIRE(m.evaluate(in) <= s);
        }
    }
}
