#include "fpfilter/fpn_model.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "fpfilter/errors.hpp"

namespace fpfilter {

std::string to_string(sign s)
{
    switch (s) {
    case sign::negative: return "-1";
    case sign::zero: return "0";
    case sign::positive: return "+1";
    }
    return "?";
}

std::ostream& operator<<(std::ostream& os, sign s) { return os << to_string(s); }

dyadic::dyadic(mpz_class mantissa, std::int64_t exponent)
    : m_mantissa(std::move(mantissa))
    , m_exponent(exponent)
{
    canonicalize();
}

void dyadic::canonicalize()
{
    if (sgn(m_mantissa) == 0) {
        m_exponent = 0;
        return;
    }
    const mp_bitcnt_t tz = mpz_scan1(m_mantissa.get_mpz_t(), 0);
    if (tz > 0) {
        mpz_tdiv_q_2exp(m_mantissa.get_mpz_t(), m_mantissa.get_mpz_t(), tz);
        m_exponent += static_cast<std::int64_t>(tz);
    }
}

dyadic dyadic::from_double(double x)
{
    if (!std::isfinite(x)) {
        throw invalid_input_error("non-finite value cannot be converted to an exact dyadic");
    }
    if (x == 0) {
        return {};
    }
    int e = 0;
    const double f = std::frexp(x, &e);
    // f * 2^53 is an integer with at most 53 significant bits.
    const double scaled = std::ldexp(f, 53);
    return dyadic(mpz_class(scaled), static_cast<std::int64_t>(e) - 53);
}

dyadic dyadic::from_integer(mpz_class mantissa, std::int64_t exponent)
{
    return dyadic(std::move(mantissa), exponent);
}

dyadic dyadic::power_of_two(std::int64_t k) { return dyadic(mpz_class(1), k); }

mpz_class dyadic::mantissa() const
{
    mpz_class r;
    mpz_abs(r.get_mpz_t(), m_mantissa.get_mpz_t());
    return r;
}

dyadic dyadic::operator-() const
{
    dyadic r = *this;
    mpz_neg(r.m_mantissa.get_mpz_t(), r.m_mantissa.get_mpz_t());
    return r;
}

dyadic dyadic::abs() const { return signum() < 0 ? -*this : *this; }

dyadic dyadic::ldexp(std::int64_t k) const
{
    dyadic r = *this;
    if (!r.is_zero()) {
        r.m_exponent += k;
    }
    return r;
}

namespace {

// a + sign_b * b, exact.
dyadic add_signed(const dyadic& a, const dyadic& b, bool negate_b)
{
    if (b.is_zero()) {
        return a;
    }
    if (a.is_zero()) {
        return negate_b ? -b : b;
    }
    mpz_class r;
    std::int64_t e = 0;
    if (a.exponent() <= b.exponent()) {
        mpz_mul_2exp(r.get_mpz_t(), b.signed_mantissa().get_mpz_t(),
                     static_cast<mp_bitcnt_t>(b.exponent() - a.exponent()));
        if (negate_b) {
            mpz_sub(r.get_mpz_t(), a.signed_mantissa().get_mpz_t(), r.get_mpz_t());
        } else {
            mpz_add(r.get_mpz_t(), a.signed_mantissa().get_mpz_t(), r.get_mpz_t());
        }
        e = a.exponent();
    } else {
        mpz_mul_2exp(r.get_mpz_t(), a.signed_mantissa().get_mpz_t(),
                     static_cast<mp_bitcnt_t>(a.exponent() - b.exponent()));
        if (negate_b) {
            mpz_sub(r.get_mpz_t(), r.get_mpz_t(), b.signed_mantissa().get_mpz_t());
        } else {
            mpz_add(r.get_mpz_t(), r.get_mpz_t(), b.signed_mantissa().get_mpz_t());
        }
        e = b.exponent();
    }
    return dyadic::from_integer(std::move(r), e);
}

} // namespace

dyadic operator+(const dyadic& a, const dyadic& b) { return add_signed(a, b, false); }

dyadic operator-(const dyadic& a, const dyadic& b) { return add_signed(a, b, true); }

dyadic operator*(const dyadic& a, const dyadic& b)
{
    if (a.is_zero() || b.is_zero()) {
        return {};
    }
    mpz_class r;
    mpz_mul(r.get_mpz_t(), a.m_mantissa.get_mpz_t(), b.m_mantissa.get_mpz_t());
    // A product of odd integers is odd, so the result is already canonical.
    dyadic out;
    out.m_mantissa = std::move(r);
    out.m_exponent = a.m_exponent + b.m_exponent;
    return out;
}

std::strong_ordering operator<=>(const dyadic& a, const dyadic& b)
{
    const int sa = a.signum();
    const int sb = b.signum();
    if (sa != sb) {
        return sa <=> sb;
    }
    if (sa == 0) {
        return std::strong_ordering::equal;
    }
    // Same nonzero sign: compare leading exponents before subtracting.
    const auto lead_a = a.exponent() + static_cast<std::int64_t>(mpz_sizeinbase(a.signed_mantissa().get_mpz_t(), 2));
    const auto lead_b = b.exponent() + static_cast<std::int64_t>(mpz_sizeinbase(b.signed_mantissa().get_mpz_t(), 2));
    if (lead_a != lead_b) {
        return sa > 0 ? lead_a <=> lead_b : lead_b <=> lead_a;
    }
    return (a - b).signum() <=> 0;
}

namespace {

enum class rounding { nearest_even, upward };

std::optional<dyadic> round_to(const dyadic& x, const fpn_params& params, rounding mode)
{
    if (x.is_zero()) {
        return x;
    }
    const mpz_class m = x.mantissa();
    const auto bits = static_cast<std::int64_t>(mpz_sizeinbase(m.get_mpz_t(), 2));
    const std::int64_t lead = x.exponent() + bits - 1;
    const std::int64_t quantum = std::max<std::int64_t>(lead - (params.precision - 1),
                                                        static_cast<std::int64_t>(params.e_min) - params.precision + 1);
    const bool negative = x.signum() < 0;

    mpz_class r = m;
    if (x.exponent() < quantum) {
        const auto shift = static_cast<mp_bitcnt_t>(quantum - x.exponent());
        mpz_tdiv_q_2exp(r.get_mpz_t(), m.get_mpz_t(), shift);
        bool increment = false;
        if (mode == rounding::nearest_even) {
            const bool half = mpz_tstbit(m.get_mpz_t(), shift - 1) != 0;
            // m is odd, so bits below the half bit are nonzero whenever shift >= 2.
            const bool sticky = shift >= 2;
            increment = half && (sticky || mpz_odd_p(r.get_mpz_t()));
        } else {
            // Remainder is nonzero because m is odd; truncation rounds
            // negatives upward already.
            increment = !negative;
        }
        if (increment) {
            r += 1;
        }
    } else {
        mpz_mul_2exp(r.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(x.exponent() - quantum));
    }
    // Overflow: |result| >= 2^(e_max + 1).
    if (sgn(r) != 0) {
        const auto rbits = static_cast<std::int64_t>(mpz_sizeinbase(r.get_mpz_t(), 2));
        if (quantum + rbits - 1 > params.e_max) {
            return std::nullopt;
        }
    }
    if (negative) {
        r = -r;
    }
    return dyadic::from_integer(std::move(r), quantum);
}

} // namespace

std::optional<dyadic> round_nearest(const dyadic& x, const fpn_params& params)
{
    return round_to(x, params, rounding::nearest_even);
}

std::optional<dyadic> round_up(const dyadic& x, const fpn_params& params)
{
    return round_to(x, params, rounding::upward);
}

std::optional<dyadic> next_up(const dyadic& x, const fpn_params& params)
{
    const std::int64_t min_quantum = static_cast<std::int64_t>(params.e_min) - params.precision + 1;
    if (x.is_zero()) {
        return dyadic::power_of_two(min_quantum);
    }
    const auto bits = static_cast<std::int64_t>(mpz_sizeinbase(x.signed_mantissa().get_mpz_t(), 2));
    const std::int64_t lead = x.exponent() + bits - 1;
    const std::int64_t quantum = std::max<std::int64_t>(lead - (params.precision - 1), min_quantum);
    return round_nearest(x + dyadic::power_of_two(quantum), params);
}

double dyadic::to_double() const
{
    const auto rounded = round_nearest(*this, fpn_params::binary64());
    if (!rounded) {
        return signum() < 0 ? -HUGE_VAL : HUGE_VAL;
    }
    if (rounded->is_zero()) {
        return signum() < 0 ? -0.0 : 0.0;
    }
    // At most 53 significant bits: both conversions are exact.
    const double m = rounded->signed_mantissa().get_d();
    return std::ldexp(m, static_cast<int>(rounded->exponent()));
}

std::string dyadic::to_string() const
{
    std::ostringstream os;
    os << m_mantissa.get_str();
    if (m_exponent != 0) {
        os << "*2^" << m_exponent;
    }
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const dyadic& d) { return os << d.to_string(); }

} // namespace fpfilter
