#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <gmpxx.h>

namespace fpfilter {

/// Parameters of a binary floating-point number system with gradual underflow.
///
/// `epsilon` follows the rounding-unit convention 2^-p (half the gap between
/// 1 and its successor), `u_normal` is the smallest positive normalised
/// magnitude 2^e_min and `u_subnormal` the smallest positive subnormal
/// magnitude 2^(e_min - p + 1) = 2 * epsilon * u_normal.
struct fpn_params
{
    int precision = 53;
    int e_min = -1022;
    int e_max = 1023;

    double epsilon() const { return std::ldexp(1.0, -precision); }
    double u_normal() const { return std::ldexp(1.0, e_min); }
    double u_subnormal() const { return std::ldexp(1.0, e_min - precision + 1); }

    static constexpr fpn_params binary64() { return {53, -1022, 1023}; }
    static constexpr fpn_params binary32() { return {24, -126, 127}; }

    friend bool operator==(const fpn_params&, const fpn_params&) = default;
};

enum class sign : int
{
    negative = -1,
    zero = 0,
    positive = 1,
};

constexpr int to_int(sign s) { return static_cast<int>(s); }

constexpr sign sign_of(int v) { return v > 0 ? sign::positive : (v < 0 ? sign::negative : sign::zero); }

/// Sign of a finite or infinite double. NaN maps to zero; callers that can
/// see NaN must handle it before asking.
constexpr sign sign_of(double v) { return v > 0 ? sign::positive : (v < 0 ? sign::negative : sign::zero); }

constexpr sign operator-(sign s) { return static_cast<sign>(-static_cast<int>(s)); }

constexpr sign operator*(sign a, sign b) { return static_cast<sign>(to_int(a) * to_int(b)); }

std::string to_string(sign s);
std::ostream& operator<<(std::ostream& os, sign s);

/// Exact dyadic rational m * 2^e with arbitrary-precision m.
///
/// Canonical form: zero is (0, 0), otherwise the mantissa is odd. Because
/// of this, structural equality is value equality.
class dyadic
{
public:
    dyadic() = default;

    /// Throws invalid_input_error for NaN and infinities.
    static dyadic from_double(double x);
    static dyadic from_integer(mpz_class mantissa, std::int64_t exponent = 0);
    static dyadic power_of_two(std::int64_t k);

    int signum() const { return sgn(m_mantissa); }
    bool is_zero() const { return signum() == 0; }
    /// Magnitude of the mantissa.
    mpz_class mantissa() const;
    const mpz_class& signed_mantissa() const { return m_mantissa; }
    std::int64_t exponent() const { return m_exponent; }

    dyadic operator-() const;
    dyadic abs() const;
    dyadic ldexp(std::int64_t k) const;

    friend dyadic operator+(const dyadic& a, const dyadic& b);
    friend dyadic operator-(const dyadic& a, const dyadic& b);
    friend dyadic operator*(const dyadic& a, const dyadic& b);

    dyadic& operator+=(const dyadic& b) { return *this = *this + b; }
    dyadic& operator-=(const dyadic& b) { return *this = *this - b; }
    dyadic& operator*=(const dyadic& b) { return *this = *this * b; }

    friend bool operator==(const dyadic& a, const dyadic& b)
    {
        return a.m_exponent == b.m_exponent && a.m_mantissa == b.m_mantissa;
    }
    friend std::strong_ordering operator<=>(const dyadic& a, const dyadic& b);

    /// Round to nearest binary64, ties to even, with gradual underflow and
    /// overflow to signed infinity.
    double to_double() const;

    /// Exact decimal-free rendering, e.g. "3*2^-2".
    std::string to_string() const;

private:
    dyadic(mpz_class mantissa, std::int64_t exponent);
    void canonicalize();

    mpz_class m_mantissa;
    std::int64_t m_exponent = 0;
};

std::ostream& operator<<(std::ostream& os, const dyadic& d);

inline dyadic dyadic_from_float(double x) { return dyadic::from_double(x); }

/// Round `x` to the nearest member of `params` (ties to even). Returns
/// nullopt on overflow.
std::optional<dyadic> round_nearest(const dyadic& x, const fpn_params& params);

/// Smallest member of `params` that is >= x. nullopt on overflow.
std::optional<dyadic> round_up(const dyadic& x, const fpn_params& params);

/// Successor of a member `x >= 0` of `params`. nullopt on overflow.
std::optional<dyadic> next_up(const dyadic& x, const fpn_params& params);

} // namespace fpfilter
