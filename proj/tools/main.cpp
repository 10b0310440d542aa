#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "delaunay.hpp"
#include "fpfilter/errors.hpp"
#include "fpfilter/oracle.hpp"
#include "harness.hpp"
#include "validation.hpp"

using namespace fpfilter;
using namespace fpfilter::harness;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw error("cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

expr load_expr(const std::string& builtin, const std::string& path)
{
    if (!builtin.empty()) {
        return builtin_expr(builtin);
    }
    return parse_expr(read_file(path));
}

std::string hex(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

int cmd_torture()
{
    bool ok = true;
    std::printf("%-22s %-24s %-8s %-6s %-6s\n", "case", "naive", "staged", "stage", "exact");
    for (const torture_row& r : torture_rows()) {
        std::printf("%-22s %-24s %-8s %-6zu %-6s\n", r.label.c_str(), hex(r.naive).c_str(),
                    to_string(r.staged).c_str(), r.stage + 1, to_string(r.exact).c_str());
        ok = ok && r.staged == r.exact;
    }

    const consistency_result c = consistency_demo();
    std::printf("\nconsistency (a,b,e) (b,d,e) (a,b,d)\n");
    std::printf("  naive : %s %s %s -> %s\n", to_string(sign_of(c.naive[0])).c_str(),
                to_string(sign_of(c.naive[1])).c_str(), to_string(sign_of(c.naive[2])).c_str(),
                c.naive_contradiction ? "contradiction" : "consistent");
    std::printf("  staged: %s %s %s -> %s\n", to_string(c.staged[0]).c_str(), to_string(c.staged[1]).c_str(),
                to_string(c.staged[2]).c_str(), c.staged_contradiction ? "contradiction" : "consistent");
    ok = ok && !c.staged_contradiction && c.staged == c.exact;

    std::printf("\npoint c = (0, -0.01) against t1 = {(-1,0), a, b}, t2 = {(1,0), b, a}\n");
    const winding_result naive = winding_demo(false);
    const winding_result exact = winding_demo(true);
    std::printf("  naive : t1 %-8s t2 %-8s union %s\n", std::string(to_string(naive.t1)).c_str(),
                std::string(to_string(naive.t2)).c_str(), std::string(to_string(naive.both)).c_str());
    std::printf("  staged: t1 %-8s t2 %-8s union %s\n", std::string(to_string(exact.t1)).c_str(),
                std::string(to_string(exact.t2)).c_str(), std::string(to_string(exact.both)).c_str());
    std::printf("\n%s\n", ok ? "all staged results match the oracle" : "MISMATCH between staged and oracle");
    return ok ? 0 : 1;
}

void write_stats_csv(const std::string& path, const triangulation& t, const staged_predicate& o,
                     const staged_predicate& ic)
{
    std::ofstream out(path);
    if (!out) {
        throw error("cannot open '" + path + "' for writing");
    }
    out << "predicate,stage_index,stage,calls,certified,failures\n";
    auto dump = [&](const char* name, const staged_predicate& p, const stage_stats& s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << name << "," << i + 1 << "," << p.stage_at(i).name() << "," << s.calls(i) << "," << s.certified(i)
                << "," << s.failures(i) << "\n";
        }
    };
    dump("orient2d", o, t.orient_stats);
    dump("incircle2d", ic, t.incircle_stats);
}

void print_stats(const char* name, const staged_predicate& p, const stage_stats& s)
{
    std::printf("%s\n", name);
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::printf("  %zu %-16s calls %-10llu certified %-10llu failures %llu\n", i + 1, p.stage_at(i).name().c_str(),
                    static_cast<unsigned long long>(s.calls(i)), static_cast<unsigned long long>(s.certified(i)),
                    static_cast<unsigned long long>(s.failures(i)));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Derived floating-point filters and staged robust predicates"};
    app.require_subcommand(1);

    std::string expr_path;
    std::string builtin;
    bool ufp = false;
    auto* derive_cmd = app.add_subcommand("derive", "Derive error bounds and filter constants");
    auto* derive_expr = derive_cmd->add_option("--expr", expr_path, "Expression file");
    auto* derive_builtin = derive_cmd->add_option("--builtin", builtin, "Built-in predicate name");
    derive_expr->excludes(derive_builtin);
    derive_cmd->add_flag("--ufp", ufp, "Use the underflow-protected rules");

    std::string points_path;
    std::string profile_name = "safe";
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a staged predicate on rows of a points file");
    auto* eval_expr = eval_cmd->add_option("--expr", expr_path, "Expression file");
    auto* eval_builtin = eval_cmd->add_option("--builtin", builtin, "Built-in predicate name");
    eval_expr->excludes(eval_builtin);
    eval_cmd->add_option("--points", points_path, "Points file (one input row per line)")->required();
    eval_cmd->add_option("--profile", profile_name, "fast or safe");

    auto* torture_cmd = app.add_subcommand("torture", "Run the underflow, overflow and consistency vectors");

    std::string mode = "exact";
    std::string out_path;
    precision_map_spec map_spec;
    auto* map_cmd = app.add_subcommand("precision-map", "Render orient2d decisions around a near-collinear point");
    map_cmd->add_option("--mode", mode, "naive, semistatic, interval or exact");
    map_cmd->add_option("--out", out_path, "Output PPM file")->required();
    map_cmd->add_option("--width", map_spec.width, "Width in pixels");
    map_cmd->add_option("--height", map_spec.height, "Height in pixels");

    std::size_t n = 1000;
    std::string dist_name = "uniform";
    std::uint64_t seed = 1;
    std::string stats_out;
    bool audit = false;
    auto* del_cmd = app.add_subcommand("delaunay", "Delaunay triangulation with per-stage statistics");
    del_cmd->add_option("--random", n, "Number of points");
    del_cmd->add_option("--dist", dist_name, "uniform or grid");
    del_cmd->add_option("--seed", seed, "PRNG seed");
    del_cmd->add_option("--profile", profile_name, "fast or safe");
    del_cmd->add_option("--stats-out", stats_out, "Write per-stage statistics as CSV");
    del_cmd->add_flag("--audit", audit, "Check every triangle against every vertex with the exact incircle");

    std::size_t bench_n = 1000000;
    auto* bench_cmd = app.add_subcommand("bench", "Time the staged, naive, interval and exact predicates");
    bench_cmd->add_option("--builtin", builtin, "Built-in predicate name")->required();
    bench_cmd->add_option("--n", bench_n, "Number of calls");
    bench_cmd->add_option("--dist", dist_name, "uniform, near-degenerate, tiny, huge or grid");
    bench_cmd->add_option("--profile", profile_name, "fast or safe");
    bench_cmd->add_option("--seed", seed, "PRNG seed");

    std::size_t per_dist = 200000;
    auto* validate_cmd = app.add_subcommand("validate", "Compare every certified sign with the oracle");
    validate_cmd->add_option("--builtin", builtin, "Built-in predicate name")->required();
    validate_cmd->add_option("--per-dist", per_dist, "Samples per distribution");
    validate_cmd->add_option("--seed", seed, "PRNG seed");

    auto* inv_cmd = app.add_subcommand("invariants", "Check the error-bound invariants at every subexpression");
    inv_cmd->add_option("--builtin", builtin, "Built-in predicate name")->required();
    inv_cmd->add_option("--per-dist", per_dist, "Samples per distribution");
    inv_cmd->add_option("--seed", seed, "PRNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (derive_cmd->parsed()) {
            if (builtin.empty() && expr_path.empty()) {
                throw error("derive needs --expr or --builtin");
            }
            std::cout << derive_report(load_expr(builtin, expr_path), ufp);
            return 0;
        }
        if (eval_cmd->parsed()) {
            if (builtin.empty() && expr_path.empty()) {
                throw error("eval needs --expr or --builtin");
            }
            const expr e = load_expr(builtin, expr_path);
            const staged_predicate p = default_pipeline(e, parse_profile(profile_name));
            std::ifstream in(points_path);
            if (!in) {
                throw error("cannot open '" + points_path + "'");
            }
            for (const auto& row : read_rows(in, static_cast<std::size_t>(e.arity()))) {
                const decision d = p.decide(row);
                std::cout << to_string(d.value) << " stage=" << d.stage + 1 << "\n";
            }
            return 0;
        }
        if (torture_cmd->parsed()) {
            return cmd_torture();
        }
        if (map_cmd->parsed()) {
            map_spec.mode = parse_map_mode(mode);
            const auto codes = precision_map(map_spec);
            write_ppm(out_path, map_spec.width, map_spec.height, codes);
            std::size_t counts[4] = {0, 0, 0, 0};
            for (auto c : codes) {
                ++counts[c == 2 ? 3 : c + 1];
            }
            std::printf("%s: %dx%d  red %zu  green %zu  blue %zu  yellow %zu\n", out_path.c_str(), map_spec.width,
                        map_spec.height, counts[2], counts[1], counts[0], counts[3]);
            return 0;
        }
        if (del_cmd->parsed()) {
            const profile prof = parse_profile(profile_name);
            rng r(seed);
            std::vector<point2> pts;
            if (dist_name == "uniform") {
                pts = uniform_points(n, r);
            } else if (dist_name == "grid") {
                pts = grid_points(n, r);
            } else {
                throw error("delaunay --dist must be uniform or grid");
            }
            const triangulation t = delaunay(std::move(pts), prof, seed);
            if (t.collinear) {
                std::fprintf(stderr, "warning: all points are collinear, the triangulation is empty\n");
            }
            const std::size_t h = hull_size(t.points);
            const std::size_t expected = t.collinear ? 0 : 2 * t.points.size() - h - 2;
            std::printf("points %zu (duplicates removed %zu)\n", t.points.size(), t.duplicates_removed);
            std::printf("triangles %zu  hull %zu  2n-h-2 %zu  time %.3f s\n", t.triangles.size(), h, expected,
                        t.seconds);
            const auto o = default_pipeline("orient2d", prof);
            const auto ic = default_pipeline("incircle2d", prof);
            print_stats("orient2d", o, t.orient_stats);
            print_stats("incircle2d", ic, t.incircle_stats);
            if (!stats_out.empty()) {
                write_stats_csv(stats_out, t, o, ic);
            }
            int status = t.triangles.size() == expected ? 0 : 1;
            if (audit) {
                const std::size_t v = empty_circle_violations(t);
                std::printf("empty-circle violations %zu\n", v);
                status = status != 0 || v != 0 ? 1 : 0;
            }
            return status;
        }
        if (bench_cmd->parsed()) {
            const bench_report rep =
                run_bench(builtin, bench_n, parse_distribution(dist_name), parse_profile(profile_name), seed);
            std::printf("%s %s n=%zu profile=%s\n", rep.predicate.c_str(), std::string(to_string(rep.dist)).c_str(),
                        rep.n, std::string(to_string(parse_profile(profile_name))).c_str());
            std::printf("  staged   %9.1f ns/call\n", rep.staged_ns);
            std::printf("  naive    %9.1f ns/call\n", rep.naive_ns);
            std::printf("  interval %9.1f ns/call\n", rep.interval_ns);
            std::printf("  exact    %9.1f ns/call\n", rep.exact_ns);
            std::printf("  staged / exact %.4f\n", rep.staged_ns / rep.exact_ns);
            std::printf("  stage-1 certification rate %.6f\n", rep.stage1_rate);
            return 0;
        }
        if (validate_cmd->parsed()) {
            const validity_report rep = run_validity(builtin, per_dist, seed);
            std::printf("%s samples %llu  %.1f s\n", rep.predicate.c_str(),
                        static_cast<unsigned long long>(rep.samples), rep.seconds);
            for (const stage_tally& t : rep.stages) {
                std::printf("  %-22s calls %-9llu certified %-9llu skipped %-8llu wrong %llu\n", t.name.c_str(),
                            static_cast<unsigned long long>(t.calls), static_cast<unsigned long long>(t.certified),
                            static_cast<unsigned long long>(t.skipped), static_cast<unsigned long long>(t.wrong));
            }
            std::printf("  monotonicity checks %llu violations %llu\n",
                        static_cast<unsigned long long>(rep.monotonicity_checks),
                        static_cast<unsigned long long>(rep.monotonicity_violations));
            return rep.wrong() == 0 ? 0 : 1;
        }
        if (inv_cmd->parsed()) {
            const invariant_report rep = run_invariants(builtin, per_dist, seed);
            std::printf("%s  %.1f s\n", rep.predicate.c_str(), rep.seconds);
            auto dump = [](const char* name, const invariant_counts& c) {
                std::printf("  %-5s samples %llu skipped %llu checks %llu  I2.1 %llu  I2.2 %llu  I3 %llu  "
                            "eps-max %llu/%llu (outside hypothesis %llu)\n",
                            name, static_cast<unsigned long long>(c.samples),
                            static_cast<unsigned long long>(c.underflow_skipped),
                            static_cast<unsigned long long>(c.checks),
                            static_cast<unsigned long long>(c.magnitude_violations),
                            static_cast<unsigned long long>(c.error_violations),
                            static_cast<unsigned long long>(c.exactness_violations),
                            static_cast<unsigned long long>(c.eps_max_violations),
                            static_cast<unsigned long long>(c.eps_max_checks),
                            static_cast<unsigned long long>(c.eps_max_outside_hypothesis));
            };
            dump("E", rep.plain);
            dump("E_UFP", rep.ufp);
            return rep.plain.violations() + rep.ufp.violations() == 0 ? 0 : 1;
        }
    } catch (const fpfilter::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
