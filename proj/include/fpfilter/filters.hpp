#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpfilter/error_bounds.hpp"
#include "fpfilter/expression.hpp"
#include "fpfilter/interval.hpp"
#include "fpfilter/outcome.hpp"
#include "fpfilter/program.hpp"

namespace fpfilter {

/// Semi-static filter: certifies sign(p~) when |p~| > a4 * (m1 + m2)
/// (+ u_S with underflow protection). Without protection it also certifies
/// when the bound is exactly zero, and is valid only for underflow-free
/// evaluations.
///
/// A product root is handled by filtering each factor; a leaf root by its
/// own sign.
class semi_static_filter final : public stage
{
public:
    semi_static_filter(const expr& e, bool ufp, const fpn_params& params = fpn_params::binary64());
    semi_static_filter(const expr& e, const rule_set& rules, const fpn_params& params = fpn_params::binary64());

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override;

    bool ufp() const { return m_ufp; }
    const expr& expression() const { return m_expr; }
    /// Only set for a sum or difference at the root.
    const std::optional<error_bound>& left_bound() const { return m_left; }
    const std::optional<error_bound>& right_bound() const { return m_right; }
    const eps_poly& a_max() const { return m_a_max; }
    const filter_constants& constants() const { return m_constants; }

    /// The runtime error bound e for `inputs` (additive roots only, NaN
    /// otherwise). A sum of two exact operands is decided by the sign of p~
    /// alone; its bound is still reported.
    double error_bound_value(std::span<const double> inputs) const;

private:
    enum class root_kind
    {
        leaf,
        additive,
        exact_operands,
        product,
    };

    void build(const rule_set& rules, const fpn_params& params);

    expr m_expr;
    bool m_ufp;
    root_kind m_root = root_kind::leaf;
    std::optional<error_bound> m_left;
    std::optional<error_bound> m_right;
    eps_poly m_a_max;
    filter_constants m_constants{0.0, 0.0};
    program m_program;
    std::uint32_t m_value_slot = 0;
    std::uint32_t m_bound_slot = 0;
    double m_u_s = 0.0;
    std::vector<std::shared_ptr<const semi_static_filter>> m_factors;
};

/// Structural zero certification (rules Z1..Z4).
class zero_filter final : public stage
{
public:
    explicit zero_filter(expr e);

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "zero"; }

private:
    expr m_expr;
};

/// Interval evaluation of a compiled program; certifies when the final
/// interval excludes zero or equals [0, 0].
class interval_filter final : public stage
{
public:
    explicit interval_filter(const expr& e);

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "interval"; }

    /// Enclosure of every program slot, for tests. Slot `result_slot()`
    /// holds the root.
    std::vector<interval> evaluate(std::span<const double> inputs) const;
    const program& code() const { return m_program; }
    std::uint32_t result_slot() const { return m_result; }

private:
    program m_program;
    std::uint32_t m_result;
};

/// Translation filter: every leaf must sit in an atom difference
/// x_i - x_j. If all differences are exact the remaining polynomial is
/// evaluated exactly over expansions.
class translation_filter final : public stage
{
public:
    explicit translation_filter(const expr& e);

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "translation"; }

    bool applicable() const { return m_applicable; }
    /// Polynomial over the differences (placeholder k = k-th difference).
    const expr& translated() const { return m_translated; }

private:
    struct pair
    {
        expr left;
        expr right;
    };

    bool m_applicable = false;
    std::vector<pair> m_pairs;
    expr m_translated;
};

/// Static filter over a fixed input box. Inputs outside the box give
/// uncertain.
class static_filter : public stage
{
public:
    static_filter(const expr& e, std::vector<interval> bounds, bool ufp,
                  const fpn_params& params = fpn_params::binary64());

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override;

    double error_bound_value() const { return m_bound; }
    const std::vector<interval>& bounds() const { return m_bounds; }

protected:
    void set_bounds(std::vector<interval> bounds);

private:
    expr m_expr;
    bool m_ufp;
    magnitude_expr m_magnitude;
    double m_a4;
    double m_u_s;
    program m_program;
    std::uint32_t m_value_slot;
    std::vector<interval> m_bounds;
    double m_bound = 0.0;
};

/// Static filter with symmetric per-input bounds [-M_i, M_i] that grow on
/// update. update() needs exclusive access; apply() may run concurrently
/// between updates.
class almost_static_filter final : public static_filter
{
public:
    almost_static_filter(const expr& e, std::vector<double> initial_magnitudes, bool ufp,
                         const fpn_params& params = fpn_params::binary64());

    /// Enlarges the tracked bounds to cover `inputs`; non-finite values are
    /// ignored. Returns true if the bound was recomputed.
    bool update(std::span<const double> inputs);

    std::string name() const override;

    const std::vector<double>& magnitudes() const { return m_magnitudes; }

private:
    std::vector<double> m_magnitudes;
};

/// Exact sign over floating-point expansions; uncertain on range failure.
class expansion_exact_stage final : public stage
{
public:
    explicit expansion_exact_stage(expr e)
        : m_expr(std::move(e))
    {}

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "expansion"; }

private:
    expr m_expr;
};

/// Exact sign over dyadic rationals. Total on finite inputs.
class dyadic_exact_stage final : public stage
{
public:
    explicit dyadic_exact_stage(expr e)
        : m_expr(std::move(e))
    {}

    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "dyadic"; }
    bool is_total() const override { return true; }

private:
    expr m_expr;
};

} // namespace fpfilter
