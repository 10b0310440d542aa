#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "invariants.hpp"

namespace fpfilter::harness {

struct stage_tally
{
    std::string name;
    std::uint64_t calls = 0;
    std::uint64_t certified = 0;
    std::uint64_t wrong = 0;
    /// Inputs outside the stage's validity hypothesis (underflow for the
    /// unprotected filters).
    std::uint64_t skipped = 0;
};

struct validity_report
{
    std::string predicate;
    std::uint64_t samples = 0;
    std::vector<stage_tally> stages;
    std::uint64_t monotonicity_checks = 0;
    /// Protected filter certifies while the unprotected one does not, or
    /// both certify different signs.
    std::uint64_t monotonicity_violations = 0;
    double seconds = 0.0;

    std::uint64_t wrong() const;
};

/// Runs every filter stage and both staged profiles of a built-in predicate
/// on `per_distribution` samples of each distribution and compares every
/// certified sign with the oracle.
validity_report run_validity(std::string_view predicate, std::size_t per_distribution, std::uint64_t seed = 1);

struct invariant_report
{
    std::string predicate;
    invariant_counts plain;
    invariant_counts ufp;
    double seconds = 0.0;
};

/// Error-bound invariants at every subexpression, for both rule sets, on
/// `per_distribution` samples of each distribution.
invariant_report run_invariants(std::string_view predicate, std::size_t per_distribution, std::uint64_t seed = 1);

} // namespace fpfilter::harness
