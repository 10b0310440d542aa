#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "fpfilter/expression.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/program.hpp"

namespace fpfilter {

/// Exact value of the real polynomial represented by `e` at `inputs`.
/// Throws invalid_input_error if a referenced input is not finite.
dyadic oracle_value(const expr& e, std::span<const double> inputs);

/// Exact sign of the real polynomial (not its rounded realisation).
sign oracle_sign(const expr& e, std::span<const double> inputs);

/// Exact evaluation of every slot of a compiled expression. Slot values are
/// mantissa(i) * 2^exponent(i), not canonicalised. Not thread-safe; reuse
/// one instance per thread to avoid reallocation.
class exact_evaluator
{
public:
    explicit exact_evaluator(const expr& e);

    /// Inputs must be finite (not checked).
    void run(std::span<const double> inputs);

    const program& code() const { return m_program; }
    std::uint32_t result_slot() const { return m_result; }
    const mpz_class& mantissa(std::size_t slot) const { return m_mantissa[slot]; }
    std::int64_t exponent(std::size_t slot) const { return m_exponent[slot]; }
    sign sign_at(std::size_t slot) const { return sign_of(sgn(m_mantissa[slot])); }
    dyadic value_at(std::size_t slot) const { return dyadic::from_integer(m_mantissa[slot], m_exponent[slot]); }

private:
    void load(std::size_t i, double x);
    void add(std::size_t i, std::uint32_t a, std::uint32_t b, bool subtract);

    expr m_keep;
    program m_program;
    std::uint32_t m_result = 0;
    std::vector<mpz_class> m_mantissa;
    std::vector<std::int64_t> m_exponent;
    mpz_class m_scratch;
};

} // namespace fpfilter
