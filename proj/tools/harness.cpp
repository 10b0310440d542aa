#include "harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "fpfilter/errors.hpp"
#include "fpfilter/oracle.hpp"

namespace fpfilter::harness {

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t expected_arity)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& ch : line) {
            if (ch == ',') {
                ch = ' ';
            }
        }
        std::vector<double> row;
        const char* p = line.c_str();
        for (;;) {
            while (*p == ' ' || *p == '\t' || *p == '\r') {
                ++p;
            }
            if (*p == '\0' || *p == '#') {
                break;
            }
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p || (*end != '\0' && *end != ' ' && *end != '\t' && *end != '\r')) {
                throw parse_error("line " + std::to_string(line_no) + ": malformed number", line_no);
            }
            if (!std::isfinite(v)) {
                throw parse_error("line " + std::to_string(line_no) + ": non-finite value", line_no);
            }
            row.push_back(v);
            p = end;
        }
        if (row.empty()) {
            continue;
        }
        if (expected_arity != 0 && row.size() != expected_arity) {
            throw parse_error("line " + std::to_string(line_no) + ": expected " + std::to_string(expected_arity) +
                                  " values, got " + std::to_string(row.size()),
                              line_no);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void describe_bound(std::ostream& os, const char* label, const error_bound& b)
{
    os << label << ".a = " << b.a.to_string() << "\n";
    os << label << ".m = " << b.m.to_string() << "\n";
}

} // namespace

std::string derive_report(const expr& e, bool ufp)
{
    std::ostringstream os;
    os << "expr  = " << to_string(e) << "\n";
    os << "arity = " << e.arity() << "\n";
    os << "ufp   = " << (ufp ? "yes" : "no") << "\n";
    const auto split = top_decomposition(e);
    if (!split) {
        const error_bound b = derive(e, ufp);
        describe_bound(os, "root", b);
        os << "root is not a sum or difference: factors are filtered separately\n";
        return os.str();
    }
    const semi_static_filter f(e, ufp);
    describe_bound(os, "left", *f.left_bound());
    describe_bound(os, "right", *f.right_bound());
    os << "a_max = " << f.a_max().to_string() << "\n";
    os << "a3    = " << format_double(f.constants().a3) << "\n";
    os << "a4    = " << format_double(f.constants().a4) << "  (" << format_double(f.constants().a4 / 0x1p-53)
       << " eps)\n";
    return os.str();
}

// ---------------------------------------------------------------------------

namespace {

// orient2d rows
const point2 demo_a{-0.01, -0.59};
const point2 demo_b{0.01, 0.57};
const point2 demo_c{0.0, -0.01};
const point2 demo_d{0.15, 8.69};
const point2 demo_e{0.07, 4.05};

std::vector<double> triple(const point2& a, const point2& b, const point2& c)
{
    return {a.x, a.y, b.x, b.y, c.x, c.y};
}

const staged_predicate& safe_orient()
{
    static const staged_predicate p = default_pipeline("orient2d", profile::safe);
    return p;
}

sign staged_orient(const point2& a, const point2& b, const point2& c)
{
    const auto in = triple(a, b, c);
    return safe_orient().apply(in);
}

sign naive_orient(const point2& a, const point2& b, const point2& c)
{
    const auto in = triple(a, b, c);
    const double v = eval_naive(orient2d_expr(), in);
    return std::isnan(v) ? sign::zero : sign_of(v);
}

} // namespace

std::vector<torture_row> torture_rows()
{
    const std::vector<std::pair<std::string, std::vector<double>>> cases{
        {"underflow", triple({0x1p-801, 0x1p-801}, {0x1p-800, 0x1p-800}, {0x1p-801, 0x1p-800})},
        {"overflow", triple({0x1p800, 0x1p800}, {0x1p800, 0x1p800}, {0.0, 0.0})},
        {"near-collinear a,b,c", triple(demo_a, demo_b, demo_c)},
        {"consistency a,b,e", triple(demo_a, demo_b, demo_e)},
        {"consistency b,d,e", triple(demo_b, demo_d, demo_e)},
        {"consistency a,b,d", triple(demo_a, demo_b, demo_d)},
    };
    std::vector<torture_row> rows;
    for (const auto& [label, in] : cases) {
        const decision d = safe_orient().decide(in);
        rows.push_back({label, in, eval_naive(orient2d_expr(), in), d.value, d.stage, oracle_sign(orient2d_expr(), in)});
    }
    return rows;
}

bool collinearity_contradiction(sign abe, sign bde, sign abd)
{
    return abe == sign::zero && bde == sign::zero && abd != sign::zero;
}

consistency_result consistency_demo()
{
    const std::array<std::vector<double>, 3> cases{
        triple(demo_a, demo_b, demo_e),
        triple(demo_b, demo_d, demo_e),
        triple(demo_a, demo_b, demo_d),
    };
    consistency_result r{};
    std::array<sign, 3> naive_signs{};
    for (std::size_t i = 0; i < 3; ++i) {
        r.naive[i] = eval_naive(orient2d_expr(), cases[i]);
        naive_signs[i] = sign_of(r.naive[i]);
        r.staged[i] = safe_orient().apply(cases[i]);
        r.exact[i] = oracle_sign(orient2d_expr(), cases[i]);
    }
    r.naive_contradiction = collinearity_contradiction(naive_signs[0], naive_signs[1], naive_signs[2]);
    r.staged_contradiction = collinearity_contradiction(r.staged[0], r.staged[1], r.staged[2]);
    return r;
}

std::string_view to_string(relation r)
{
    switch (r) {
    case relation::inside: return "inside";
    case relation::boundary: return "boundary";
    case relation::outside: return "outside";
    }
    return "?";
}

winding_result winding_demo(bool exact)
{
    const point2 left{-1.0, 0.0};
    const point2 right{1.0, 0.0};
    auto orient = [exact](const point2& p, const point2& q, const point2& r) {
        return exact ? staged_orient(p, q, r) : naive_orient(p, q, r);
    };
    winding_result w{};
    w.t1 = classify(left, demo_a, demo_b, demo_c, orient);
    w.t2 = classify(right, demo_b, demo_a, demo_c, orient);
    // The triangles share the edge a-b; a point on it is interior to the union.
    if (w.t1 == relation::inside || w.t2 == relation::inside ||
        (w.t1 == relation::boundary && w.t2 == relation::boundary && orient(demo_a, demo_b, demo_c) == sign::zero)) {
        w.both = relation::inside;
    } else if (w.t1 == relation::boundary || w.t2 == relation::boundary) {
        w.both = relation::boundary;
    } else {
        w.both = relation::outside;
    }
    return w;
}

// ---------------------------------------------------------------------------

map_mode parse_map_mode(std::string_view text)
{
    if (text == "naive") {
        return map_mode::naive;
    }
    if (text == "semistatic") {
        return map_mode::semistatic;
    }
    if (text == "interval") {
        return map_mode::interval;
    }
    if (text == "exact") {
        return map_mode::exact;
    }
    throw pipeline_error("unknown mode '" + std::string(text) + "' (expected naive, semistatic, interval or exact)");
}

std::vector<std::int8_t> precision_map(const precision_map_spec& spec)
{
    if (spec.width < 1 || spec.height < 1) {
        throw pipeline_error("precision map: width and height must be at least 1");
    }
    std::vector<double> xs(static_cast<std::size_t>(spec.width));
    std::vector<double> ys(static_cast<std::size_t>(spec.height));
    for (int i = 0; i < spec.width; ++i) {
        xs[static_cast<std::size_t>(i)] = ulp_step(spec.center.x, i - spec.width / 2);
    }
    for (int j = 0; j < spec.height; ++j) {
        ys[static_cast<std::size_t>(j)] = ulp_step(spec.center.y, spec.height / 2 - j);
    }
    const semi_static_filter semi(orient2d_expr(), true);
    const interval_filter inter(orient2d_expr());
    const expr& e = orient2d_expr();

    std::vector<std::int8_t> codes(xs.size() * ys.size());
    double in[6] = {spec.a.x, spec.a.y, spec.b.x, spec.b.y, 0.0, 0.0};
    for (std::size_t j = 0; j < ys.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            in[4] = xs[i];
            in[5] = ys[j];
            std::int8_t code = 2;
            switch (spec.mode) {
            case map_mode::naive: code = static_cast<std::int8_t>(to_int(sign_of(eval_naive(e, in)))); break;
            case map_mode::exact: code = static_cast<std::int8_t>(to_int(oracle_sign(e, in))); break;
            case map_mode::semistatic:
            case map_mode::interval: {
                const filter_outcome o = spec.mode == map_mode::semistatic ? semi.apply(in) : inter.apply(in);
                code = o.is_certain() ? static_cast<std::int8_t>(to_int(o.value())) : 2;
                break;
            }
            }
            codes[j * xs.size() + i] = code;
        }
    }
    return codes;
}

void write_ppm(const std::string& path, int width, int height, const std::vector<std::int8_t>& codes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw error("cannot open '" + path + "' for writing");
    }
    out << "P6\n" << width << " " << height << "\n255\n";
    for (std::int8_t c : codes) {
        unsigned char rgb[3] = {0, 0, 0};
        switch (c) {
        case 1: rgb[0] = 255; break;
        case 0: rgb[1] = 255; break;
        case -1: rgb[2] = 255; break;
        default: rgb[0] = 255; rgb[1] = 255; break;
        }
        out.write(reinterpret_cast<const char*>(rgb), 3);
    }
    if (!out) {
        throw error("write to '" + path + "' failed");
    }
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
double time_per_call(std::size_t n, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < n; ++i) {
        f(i);
    }
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(n);
}

} // namespace

bench_report run_bench(std::string_view predicate, std::size_t n, distribution dist, profile prof,
                       std::uint64_t seed)
{
    if (n == 0) {
        throw pipeline_error("bench: n must be at least 1");
    }
    const expr& e = builtin_expr(predicate);
    const auto arity = static_cast<std::size_t>(e.arity());
    rng r(seed);
    std::vector<double> data;
    data.reserve(n * arity);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = sample_inputs(predicate, dist, r);
        data.insert(data.end(), v.begin(), v.end());
    }
    auto row = [&](std::size_t i) { return std::span<const double>(data.data() + i * arity, arity); };

    const staged_predicate staged = default_pipeline(e, prof);
    const interval_filter inter(e);
    const dyadic_exact_stage exact(e);
    program naive;
    const std::uint32_t naive_slot = naive.add_expr(e);

    bench_report rep{std::string(predicate), dist, n, 0, 0, 0, 0, 0, stage_stats(staged.size())};
    volatile int sink = 0;
    std::vector<decision> decisions(n, decision{sign::zero, 0});
    rep.staged_ns = time_per_call(n, [&](std::size_t i) { decisions[i] = staged.decide(row(i)); });
    rep.naive_ns = time_per_call(n, [&](std::size_t i) {
        slot_buffer buf(naive.size());
        naive.run(row(i), buf.data());
        sink = sink + (buf.data()[naive_slot] > 0);
    });
    rep.interval_ns = time_per_call(n, [&](std::size_t i) { sink = sink + inter.apply(row(i)).is_certain(); });
    rep.exact_ns = time_per_call(n, [&](std::size_t i) { sink = sink + to_int(exact.apply(row(i)).value()); });
    for (const decision& d : decisions) {
        rep.stats.record(d);
    }
    rep.stage1_rate = static_cast<double>(rep.stats.certified(0)) / static_cast<double>(n);
    return rep;
}

} // namespace fpfilter::harness
