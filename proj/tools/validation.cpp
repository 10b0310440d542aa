#include "validation.hpp"

#include <chrono>
#include <memory>

#include "fpfilter/filters.hpp"
#include "fpfilter/oracle.hpp"
#include "fpfilter/predicates.hpp"
#include "samplers.hpp"

namespace fpfilter::harness {

std::uint64_t validity_report::wrong() const
{
    std::uint64_t n = monotonicity_violations;
    for (const stage_tally& s : stages) {
        n += s.wrong;
    }
    return n;
}

namespace {

struct checked_stage
{
    std::shared_ptr<const stage> filter;
    bool needs_no_underflow;
};

double elapsed(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

validity_report run_validity(std::string_view predicate, std::size_t per_distribution, std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    const expr& e = builtin_expr(predicate);
    const std::size_t arity = static_cast<std::size_t>(e.arity());

    const auto plain = std::make_shared<semi_static_filter>(e, false);
    const auto ufp = std::make_shared<semi_static_filter>(e, true);
    std::vector<checked_stage> stages{
        {plain, true},
        {ufp, false},
        {std::make_shared<zero_filter>(e), false},
        {std::make_shared<interval_filter>(e), false},
        {std::make_shared<translation_filter>(e), false},
        {std::make_shared<static_filter>(e, std::vector<interval>(arity, interval{-1.0, 1.0}), true), false},
        {std::make_shared<expansion_exact_stage>(e), false},
        {std::make_shared<dyadic_exact_stage>(e), false},
    };
    if (predicate == "incircle2d") {
        stages.push_back({std::make_shared<incircle_rect_stage>(), false});
    }
    almost_static_filter almost(e, std::vector<double>(arity, 1.0), true);
    const staged_predicate fast = default_pipeline(e, profile::fast);
    const staged_predicate safe = default_pipeline(e, profile::safe);

    validity_report rep;
    rep.predicate = std::string(predicate);
    for (const checked_stage& s : stages) {
        rep.stages.push_back({s.filter->name()});
    }
    rep.stages.push_back({almost.name()});
    rep.stages.push_back({"staged-fast"});
    rep.stages.push_back({"staged-safe"});
    const std::size_t almost_at = stages.size();

    underflow_detector detector(e);
    auto tally = [](stage_tally& t, const filter_outcome& o, sign exact) {
        ++t.calls;
        if (o.is_certain()) {
            ++t.certified;
            t.wrong += o.value() != exact ? 1 : 0;
        }
    };

    rng r(seed);
    for (distribution d : all_distributions()) {
        for (std::size_t i = 0; i < per_distribution; ++i) {
            const std::vector<double> in = sample_inputs(predicate, d, r);
            ++rep.samples;
            const sign exact = oracle_sign(e, in);
            const bool underflow = detector.underflows(in);
            for (std::size_t k = 0; k < stages.size(); ++k) {
                if (stages[k].needs_no_underflow && underflow) {
                    ++rep.stages[k].skipped;
                    continue;
                }
                tally(rep.stages[k], stages[k].filter->apply(in), exact);
            }
            almost.update(in);
            tally(rep.stages[almost_at], almost.apply(in), exact);

            if (underflow) {
                ++rep.stages[almost_at + 1].skipped;
            } else {
                tally(rep.stages[almost_at + 1], filter_outcome::certain(fast.apply(in)), exact);
            }
            tally(rep.stages[almost_at + 2], filter_outcome::certain(safe.apply(in)), exact);

            const filter_outcome op = plain->apply(in);
            const filter_outcome ou = ufp->apply(in);
            ++rep.monotonicity_checks;
            if (ou.is_certain() && (!op.is_certain() || op.value() != ou.value())) {
                ++rep.monotonicity_violations;
            }
        }
    }
    rep.seconds = elapsed(start);
    return rep;
}

invariant_report run_invariants(std::string_view predicate, std::size_t per_distribution, std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    const expr& e = builtin_expr(predicate);
    invariant_checker plain(e, false);
    invariant_checker ufp(e, true);
    invariant_report rep;
    rep.predicate = std::string(predicate);
    rng r(seed);
    for (distribution d : all_distributions()) {
        for (std::size_t i = 0; i < per_distribution; ++i) {
            const std::vector<double> in = sample_inputs(predicate, d, r);
            plain.check(in, rep.plain);
            ufp.check(in, rep.ufp);
        }
    }
    invariant_checker::check_eps_max_pairs(e, false, rep.plain);
    invariant_checker::check_eps_max_pairs(e, true, rep.ufp);
    rep.seconds = elapsed(start);
    return rep;
}

} // namespace fpfilter::harness
