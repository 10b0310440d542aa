#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpfilter/expression.hpp"
#include "fpfilter/fpn_model.hpp"
#include "fpfilter/outcome.hpp"

namespace fpfilter {

/// orient2d over a=(_1,_2), b=(_3,_4), c=(_5,_6).
const expr& orient2d_expr();
/// incircle2d over a, b, c, d = (_1,_2) .. (_7,_8), lifted determinant
/// translated by d.
const expr& incircle2d_expr();
/// orient3d over a, b, c, d = (_1,_2,_3) .. (_10,_11,_12), translated by d.
const expr& orient3d_expr();
/// Power side of oriented power sphere over weighted points
/// a..e = (x, y, z, w), inputs _1 .. _20, translated by e.
const expr& power_side_3d_expr();

std::vector<std::string> builtin_names();
/// Throws pipeline_error for an unknown name.
const expr& builtin_expr(std::string_view name);

enum class profile
{
    fast,
    safe,
};

/// "fast" or "safe"; throws pipeline_error otherwise.
profile parse_profile(std::string_view text);
std::string_view to_string(profile p);

/// Result of a staged predicate together with the 0-based index of the
/// stage that decided it.
struct decision
{
    sign value;
    std::size_t stage;
};

/// Immutable cascade of stages ending in a total stage.
class staged_predicate
{
public:
    staged_predicate(expr e, std::vector<std::shared_ptr<const stage>> stages);

    /// Throws invalid_input_error for a non-finite input or wrong arity.
    decision decide(std::span<const double> inputs) const;
    sign apply(std::span<const double> inputs) const { return decide(inputs).value; }

    /// Copy with `s` inserted before position `position`. The total final
    /// stage must stay last, so position < size().
    staged_predicate with_stage(std::size_t position, std::shared_ptr<const stage> s) const;
    /// Copy without the stage at `position`; the final stage cannot be
    /// removed.
    staged_predicate without_stage(std::size_t position) const;

    std::size_t size() const { return m_stages.size(); }
    const stage& stage_at(std::size_t i) const { return *m_stages.at(i); }
    const std::vector<std::shared_ptr<const stage>>& stages() const { return m_stages; }
    const expr& expression() const { return m_expr; }
    int arity() const { return m_arity; }

private:
    expr m_expr;
    int m_arity;
    std::vector<std::shared_ptr<const stage>> m_stages;
};

staged_predicate register_custom_stage(const staged_predicate& p, std::size_t position,
                                       std::shared_ptr<const stage> s);

/// fast: semi-static, zero, interval, expansion, dyadic.
/// safe: the same with an underflow-protected semi-static first stage.
staged_predicate default_pipeline(const expr& e, profile prof);
staged_predicate default_pipeline(std::string_view builtin, profile prof);

/// Per-stage call and certification counters.
class stage_stats
{
public:
    explicit stage_stats(std::size_t stages = 0)
        : m_calls(stages, 0)
        , m_certified(stages, 0)
    {}

    void record(const decision& d);
    void merge(const stage_stats& other);

    std::size_t size() const { return m_calls.size(); }
    std::uint64_t calls(std::size_t i) const { return m_calls.at(i); }
    std::uint64_t certified(std::size_t i) const { return m_certified.at(i); }
    std::uint64_t failures(std::size_t i) const { return m_calls.at(i) - m_certified.at(i); }
    /// certified + failures == calls per stage and calls(k) ==
    /// failures(k - 1).
    bool conserved() const;

private:
    std::vector<std::uint64_t> m_calls;
    std::vector<std::uint64_t> m_certified;
};

/// incircle2d stage: certifies 0 when the four points are distinct corners
/// of an axis-parallel rectangle.
class incircle_rect_stage final : public stage
{
public:
    filter_outcome apply(std::span<const double> inputs) const override;
    std::string name() const override { return "incircle-rect"; }
};

} // namespace fpfilter
