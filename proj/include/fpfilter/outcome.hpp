#pragma once

#include <ostream>
#include <span>
#include <string>

#include "fpfilter/fpn_model.hpp"

namespace fpfilter {

/// Result of a filter stage: a certified sign, or a filter failure.
class filter_outcome
{
public:
    static constexpr filter_outcome certain(sign s) { return filter_outcome(true, s); }
    static constexpr filter_outcome uncertain() { return filter_outcome(false, sign::zero); }

    constexpr bool is_certain() const { return m_certain; }
    /// Only meaningful when is_certain().
    constexpr sign value() const { return m_sign; }

    friend constexpr bool operator==(const filter_outcome&, const filter_outcome&) = default;

private:
    constexpr filter_outcome(bool certain, sign s)
        : m_certain(certain)
        , m_sign(s)
    {}

    bool m_certain;
    sign m_sign;
};

inline std::ostream& operator<<(std::ostream& os, const filter_outcome& o)
{
    return o.is_certain() ? os << "certain(" << o.value() << ")" : os << "uncertain";
}

/// Common interface of all stages of a staged predicate. `apply` is pure
/// and must tolerate any binary64 input, including NaN and infinities.
class stage
{
public:
    virtual ~stage() = default;

    virtual filter_outcome apply(std::span<const double> inputs) const = 0;
    virtual std::string name() const = 0;
    /// Total stages never return uncertain for finite inputs.
    virtual bool is_total() const { return false; }
};

} // namespace fpfilter
