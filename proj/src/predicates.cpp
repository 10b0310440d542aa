#include "fpfilter/predicates.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "fpfilter/errors.hpp"
#include "fpfilter/filters.hpp"

namespace fpfilter {

namespace {

expr in(int k) { return expr::input(k); }

expr minor3(const std::array<expr, 3>& x, const std::array<expr, 3>& y, const std::array<expr, 3>& z)
{
    // rows x, y, z; columns (dx, dy, dz)
    return (x[2] * (y[0] * z[1] - y[1] * z[0]) - y[2] * (x[0] * z[1] - x[1] * z[0])) +
           z[2] * (x[0] * y[1] - x[1] * y[0]);
}

expr make_orient2d() { return (in(1) - in(5)) * (in(4) - in(6)) - (in(3) - in(5)) * (in(2) - in(6)); }

expr make_incircle2d()
{
    const expr adx = in(1) - in(7), ady = in(2) - in(8);
    const expr bdx = in(3) - in(7), bdy = in(4) - in(8);
    const expr cdx = in(5) - in(7), cdy = in(6) - in(8);
    const expr alift = adx * adx + ady * ady;
    const expr blift = bdx * bdx + bdy * bdy;
    const expr clift = cdx * cdx + cdy * cdy;
    return (alift * (bdx * cdy - bdy * cdx) - blift * (adx * cdy - ady * cdx)) + clift * (adx * bdy - ady * bdx);
}

expr make_orient3d()
{
    std::array<std::array<expr, 3>, 3> d;
    for (int p = 0; p < 3; ++p) {
        for (int k = 0; k < 3; ++k) {
            d[p][k] = in(3 * p + k + 1) - in(10 + k);
        }
    }
    return minor3(d[0], d[1], d[2]);
}

expr make_power_side_3d()
{
    // point p in 0..4 has coordinates _(4p+1) .. _(4p+3) and weight _(4p+4)
    std::array<std::array<expr, 3>, 4> d;
    std::array<expr, 4> lift;
    for (int p = 0; p < 4; ++p) {
        for (int k = 0; k < 3; ++k) {
            d[p][k] = in(4 * p + k + 1) - in(17 + k);
        }
        lift[p] = ((d[p][0] * d[p][0] + d[p][1] * d[p][1]) + d[p][2] * d[p][2]) + (in(20) - in(4 * p + 4));
    }
    const expr m_abc = minor3(d[0], d[1], d[2]);
    const expr m_abd = minor3(d[0], d[1], d[3]);
    const expr m_acd = minor3(d[0], d[2], d[3]);
    const expr m_bcd = minor3(d[1], d[2], d[3]);
    return ((lift[3] * m_abc - lift[2] * m_abd) + lift[1] * m_acd) - lift[0] * m_bcd;
}

bool all_finite(std::span<const double> inputs)
{
    return std::all_of(inputs.begin(), inputs.end(), [](double x) { return std::isfinite(x); });
}

} // namespace

const expr& orient2d_expr()
{
    static const expr e = make_orient2d();
    return e;
}

const expr& incircle2d_expr()
{
    static const expr e = make_incircle2d();
    return e;
}

const expr& orient3d_expr()
{
    static const expr e = make_orient3d();
    return e;
}

const expr& power_side_3d_expr()
{
    static const expr e = make_power_side_3d();
    return e;
}

std::vector<std::string> builtin_names() { return {"orient2d", "incircle2d", "orient3d", "power_side_3d"}; }

const expr& builtin_expr(std::string_view name)
{
    if (name == "orient2d") {
        return orient2d_expr();
    }
    if (name == "incircle2d") {
        return incircle2d_expr();
    }
    if (name == "orient3d") {
        return orient3d_expr();
    }
    if (name == "power_side_3d") {
        return power_side_3d_expr();
    }
    throw pipeline_error("unknown predicate '" + std::string(name) + "'");
}

profile parse_profile(std::string_view text)
{
    if (text == "fast") {
        return profile::fast;
    }
    if (text == "safe") {
        return profile::safe;
    }
    throw pipeline_error("unknown profile '" + std::string(text) + "' (expected fast or safe)");
}

std::string_view to_string(profile p) { return p == profile::fast ? "fast" : "safe"; }

// ---------------------------------------------------------------------------

staged_predicate::staged_predicate(expr e, std::vector<std::shared_ptr<const stage>> stages)
    : m_expr(std::move(e))
    , m_arity(m_expr.arity())
    , m_stages(std::move(stages))
{
    if (m_stages.empty() || !m_stages.back() || !m_stages.back()->is_total()) {
        throw pipeline_error("a staged predicate must end with a total stage");
    }
    for (const auto& s : m_stages) {
        if (!s) {
            throw pipeline_error("null stage");
        }
    }
}

decision staged_predicate::decide(std::span<const double> inputs) const
{
    if (inputs.size() != static_cast<std::size_t>(m_arity)) {
        throw invalid_input_error("expected " + std::to_string(m_arity) + " inputs, got " +
                                  std::to_string(inputs.size()));
    }
    if (!all_finite(inputs)) {
        throw invalid_input_error("non-finite predicate input");
    }
    for (std::size_t i = 0; i < m_stages.size(); ++i) {
        const filter_outcome o = m_stages[i]->apply(inputs);
        if (o.is_certain()) {
            return {o.value(), i};
        }
    }
    throw pipeline_error("total stage '" + m_stages.back()->name() + "' failed on finite input");
}

staged_predicate staged_predicate::with_stage(std::size_t position, std::shared_ptr<const stage> s) const
{
    if (position >= m_stages.size()) {
        throw pipeline_error("stage position " + std::to_string(position) +
                             " would displace the total final stage (size " + std::to_string(m_stages.size()) + ")");
    }
    auto stages = m_stages;
    stages.insert(stages.begin() + static_cast<std::ptrdiff_t>(position), std::move(s));
    return staged_predicate(m_expr, std::move(stages));
}

staged_predicate staged_predicate::without_stage(std::size_t position) const
{
    if (position + 1 >= m_stages.size()) {
        throw pipeline_error("cannot remove the total final stage or a stage past it");
    }
    auto stages = m_stages;
    stages.erase(stages.begin() + static_cast<std::ptrdiff_t>(position));
    return staged_predicate(m_expr, std::move(stages));
}

staged_predicate register_custom_stage(const staged_predicate& p, std::size_t position,
                                       std::shared_ptr<const stage> s)
{
    return p.with_stage(position, std::move(s));
}

staged_predicate default_pipeline(const expr& e, profile prof)
{
    std::vector<std::shared_ptr<const stage>> stages{
        std::make_shared<semi_static_filter>(e, prof == profile::safe),
        std::make_shared<zero_filter>(e),
        std::make_shared<interval_filter>(e),
        std::make_shared<expansion_exact_stage>(e),
        std::make_shared<dyadic_exact_stage>(e),
    };
    return staged_predicate(e, std::move(stages));
}

staged_predicate default_pipeline(std::string_view builtin, profile prof)
{
    return default_pipeline(builtin_expr(builtin), prof);
}

// ---------------------------------------------------------------------------

void stage_stats::record(const decision& d)
{
    for (std::size_t i = 0; i <= d.stage && i < m_calls.size(); ++i) {
        ++m_calls[i];
    }
    if (d.stage < m_certified.size()) {
        ++m_certified[d.stage];
    }
}

void stage_stats::merge(const stage_stats& other)
{
    if (other.size() > size()) {
        m_calls.resize(other.size(), 0);
        m_certified.resize(other.size(), 0);
    }
    for (std::size_t i = 0; i < other.size(); ++i) {
        m_calls[i] += other.m_calls[i];
        m_certified[i] += other.m_certified[i];
    }
}

bool stage_stats::conserved() const
{
    for (std::size_t i = 0; i < size(); ++i) {
        if (m_certified[i] > m_calls[i]) {
            return false;
        }
        if (i > 0 && m_calls[i] != failures(i - 1)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

filter_outcome incircle_rect_stage::apply(std::span<const double> inputs) const
{
    if (inputs.size() < 8 || !all_finite(inputs.first(8))) {
        return filter_outcome::uncertain();
    }
    const auto [x_lo, x_hi] = std::minmax({inputs[0], inputs[2], inputs[4], inputs[6]});
    const auto [y_lo, y_hi] = std::minmax({inputs[1], inputs[3], inputs[5], inputs[7]});
    if (!(x_lo < x_hi) || !(y_lo < y_hi)) {
        return filter_outcome::uncertain();
    }
    // Each point must be a corner, and the four corners distinct.
    unsigned seen = 0;
    for (int p = 0; p < 4; ++p) {
        const double x = inputs[2 * p];
        const double y = inputs[2 * p + 1];
        if ((x != x_lo && x != x_hi) || (y != y_lo && y != y_hi)) {
            return filter_outcome::uncertain();
        }
        seen |= 1u << ((x == x_hi ? 2 : 0) + (y == y_hi ? 1 : 0));
    }
    return seen == 0xF ? filter_outcome::certain(sign::zero) : filter_outcome::uncertain();
}

} // namespace fpfilter
