#include "delaunay.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

#include "fpfilter/oracle.hpp"

namespace fpfilter::harness {

namespace {

constexpr int infinite = -1;

struct triangle
{
    std::array<int, 3> v;
    std::array<int, 3> n; // n[i] is across the edge opposite v[i]
    bool alive = true;

    bool ghost() const { return v[2] == infinite; }
};

class builder
{
public:
    builder(std::vector<point2> pts, profile prof)
        : m_points(std::move(pts))
        , m_orient(default_pipeline("orient2d", prof))
        , m_incircle(default_pipeline("incircle2d", prof))
        , m_orient_stats(m_orient.size())
        , m_incircle_stats(m_incircle.size())
    {}

    bool run(rng& r);

    std::vector<std::array<int, 3>> finite_triangles() const
    {
        std::vector<std::array<int, 3>> out;
        for (const triangle& t : m_tris) {
            if (t.alive && !t.ghost()) {
                out.push_back(t.v);
            }
        }
        return out;
    }

    std::vector<point2>& points() { return m_points; }
    const stage_stats& orient_stats() const { return m_orient_stats; }
    const stage_stats& incircle_stats() const { return m_incircle_stats; }

private:
    sign orient(int a, int b, int c)
    {
        const double in[6] = {m_points[a].x, m_points[a].y, m_points[b].x,
                              m_points[b].y, m_points[c].x, m_points[c].y};
        const decision d = m_orient.decide(in);
        m_orient_stats.record(d);
        return d.value;
    }

    sign incircle(int a, int b, int c, int p)
    {
        const double in[8] = {m_points[a].x, m_points[a].y, m_points[b].x, m_points[b].y,
                              m_points[c].x, m_points[c].y, m_points[p].x, m_points[p].y};
        const decision d = m_incircle.decide(in);
        m_incircle_stats.record(d);
        return d.value;
    }

    // p on the line through a and b, strictly between them
    bool strictly_between(int a, int b, int p) const
    {
        const point2& pa = m_points[a];
        const point2& pb = m_points[b];
        const point2& pp = m_points[p];
        if (pa.x != pb.x) {
            return std::min(pa.x, pb.x) < pp.x && pp.x < std::max(pa.x, pb.x);
        }
        return std::min(pa.y, pb.y) < pp.y && pp.y < std::max(pa.y, pb.y);
    }

    bool in_conflict(int t, int p)
    {
        const triangle& tri = m_tris[static_cast<std::size_t>(t)];
        if (tri.ghost()) {
            const sign s = orient(tri.v[0], tri.v[1], p);
            return s == sign::positive || (s == sign::zero && strictly_between(tri.v[0], tri.v[1], p));
        }
        return incircle(tri.v[0], tri.v[1], tri.v[2], p) == sign::positive;
    }

    int locate(int p, rng& r);
    void insert(int p, rng& r);
    int new_triangle(const triangle& t);

    std::vector<point2> m_points;
    staged_predicate m_orient;
    staged_predicate m_incircle;
    stage_stats m_orient_stats;
    stage_stats m_incircle_stats;
    std::vector<triangle> m_tris;
    std::vector<int> m_free;
    int m_last = 0;
    std::vector<std::uint32_t> m_stamp;
    std::vector<char> m_state;
    std::uint32_t m_epoch = 0;
};

int builder::new_triangle(const triangle& t)
{
    if (!m_free.empty()) {
        const int id = m_free.back();
        m_free.pop_back();
        m_tris[static_cast<std::size_t>(id)] = t;
        return id;
    }
    m_tris.push_back(t);
    m_stamp.push_back(0);
    m_state.push_back(0);
    return static_cast<int>(m_tris.size() - 1);
}

int builder::locate(int p, rng& r)
{
    int t = m_last;
    if (m_tris[static_cast<std::size_t>(t)].ghost()) {
        t = m_tris[static_cast<std::size_t>(t)].n[2];
    }
    const std::size_t limit = 4 * m_tris.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
        const triangle& tri = m_tris[static_cast<std::size_t>(t)];
        if (tri.ghost()) {
            return t;
        }
        const auto start = static_cast<int>(below(r, 3));
        int next = -1;
        for (int k = 0; k < 3; ++k) {
            const int i = (start + k) % 3;
            if (orient(tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], p) == sign::negative) {
                next = tri.n[i];
                break;
            }
        }
        if (next < 0) {
            return t;
        }
        t = next;
    }
    // The visibility walk terminates on Delaunay triangulations; this scan
    // is only a guard.
    for (std::size_t i = 0; i < m_tris.size(); ++i) {
        if (m_tris[i].alive && in_conflict(static_cast<int>(i), p)) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void builder::insert(int p, rng& r)
{
    const int start = locate(p, r);
    ++m_epoch;
    auto mark = [&](int t, char state) {
        m_stamp[static_cast<std::size_t>(t)] = m_epoch;
        m_state[static_cast<std::size_t>(t)] = state;
    };
    auto state_of = [&](int t) -> char {
        return m_stamp[static_cast<std::size_t>(t)] == m_epoch ? m_state[static_cast<std::size_t>(t)] : 0;
    };

    struct boundary_edge
    {
        int u;
        int w;
        int outside;
    };
    std::vector<int> cavity{start};
    std::vector<int> stack{start};
    std::vector<boundary_edge> boundary;
    mark(start, 1);
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        for (int i = 0; i < 3; ++i) {
            const triangle& tri = m_tris[static_cast<std::size_t>(t)];
            const int nb = tri.n[i];
            char s = state_of(nb);
            if (s == 0) {
                s = in_conflict(nb, p) ? 1 : 2;
                mark(nb, s);
                if (s == 1) {
                    cavity.push_back(nb);
                    stack.push_back(nb);
                }
            }
            if (s == 2) {
                boundary.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], nb});
            }
        }
    }

    for (int t : cavity) {
        m_tris[static_cast<std::size_t>(t)].alive = false;
    }
    std::unordered_map<int, int> by_first;
    std::unordered_map<int, int> by_second;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const boundary_edge& e : boundary) {
        triangle t{{e.u, e.w, p}, {-1, -1, e.outside}, true};
        const int id = new_triangle(t);
        created.push_back(id);
        by_first[e.u] = id;
        by_second[e.w] = id;
        triangle& out = m_tris[static_cast<std::size_t>(e.outside)];
        for (int j = 0; j < 3; ++j) {
            const int x = out.v[j];
            if (x != e.u && x != e.w) {
                out.n[j] = id;
            }
        }
    }
    for (int id : created) {
        triangle& t = m_tris[static_cast<std::size_t>(id)];
        t.n[0] = by_first.at(t.v[1]);  // edge w -> p
        t.n[1] = by_second.at(t.v[0]); // edge p -> u
    }
    for (int id : created) {
        triangle& t = m_tris[static_cast<std::size_t>(id)];
        // keep the infinite vertex last
        while (t.v[2] != infinite && (t.v[0] == infinite || t.v[1] == infinite)) {
            std::rotate(t.v.begin(), t.v.begin() + 1, t.v.end());
            std::rotate(t.n.begin(), t.n.begin() + 1, t.n.end());
        }
    }
    for (int t : cavity) {
        m_free.push_back(t);
    }
    m_last = created.front();
}

bool builder::run(rng& r)
{
    const int n = static_cast<int>(m_points.size());
    if (n < 3) {
        return false;
    }
    int k = 2;
    while (k < n && orient(0, 1, k) == sign::zero) {
        ++k;
    }
    if (k == n) {
        return false;
    }
    std::swap(m_points[2], m_points[static_cast<std::size_t>(k)]);
    int a = 0, b = 1, c = 2;
    if (orient(a, b, c) == sign::negative) {
        std::swap(b, c);
    }
    std::vector<triangle> initial{
        {{a, b, c}, {}, true},
        {{c, b, infinite}, {}, true},
        {{a, c, infinite}, {}, true},
        {{b, a, infinite}, {}, true},
    };
    std::map<std::pair<int, int>, int> edges;
    for (int t = 0; t < 4; ++t) {
        for (int i = 0; i < 3; ++i) {
            edges[{initial[t].v[(i + 1) % 3], initial[t].v[(i + 2) % 3]}] = t;
        }
    }
    for (int t = 0; t < 4; ++t) {
        for (int i = 0; i < 3; ++i) {
            initial[t].n[i] = edges.at({initial[t].v[(i + 2) % 3], initial[t].v[(i + 1) % 3]});
        }
        new_triangle(initial[t]);
    }
    for (int p = 3; p < n; ++p) {
        insert(p, r);
    }
    return true;
}

} // namespace

triangulation delaunay(std::vector<point2> points, profile prof, std::uint64_t seed)
{
    const auto t0 = std::chrono::steady_clock::now();
    rng r(seed);
    for (std::size_t i = points.size(); i > 1; --i) {
        std::swap(points[i - 1], points[below(r, i)]);
    }
    triangulation result;
    std::set<std::pair<double, double>> seen;
    std::vector<point2> unique;
    unique.reserve(points.size());
    for (const point2& p : points) {
        if (seen.insert({p.x, p.y}).second) {
            unique.push_back(p);
        }
    }
    result.duplicates_removed = points.size() - unique.size();

    builder b(std::move(unique), prof);
    result.collinear = !b.run(r);
    result.triangles = b.finite_triangles();
    result.points = std::move(b.points());
    result.orient_stats = b.orient_stats();
    result.incircle_stats = b.incircle_stats();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

namespace {

sign exact_orient(const point2& a, const point2& b, const point2& c)
{
    const double in[6] = {a.x, a.y, b.x, b.y, c.x, c.y};
    return oracle_sign(orient2d_expr(), in);
}

} // namespace

std::size_t hull_size(const std::vector<point2>& points)
{
    std::vector<point2> p = points;
    std::sort(p.begin(), p.end(), [](const point2& l, const point2& r) { return l.x < r.x || (l.x == r.x && l.y < r.y); });
    p.erase(std::unique(p.begin(), p.end(), [](const point2& l, const point2& r) { return l.x == r.x && l.y == r.y; }),
            p.end());
    if (p.size() < 3) {
        return p.size();
    }
    // strict monotone chain
    std::vector<point2> hull(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && exact_orient(hull[k - 2], hull[k - 1], p[i]) != sign::positive) {
            --k;
        }
        hull[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i > 0; --i) {
        while (k >= t && exact_orient(hull[k - 2], hull[k - 1], p[i - 1]) != sign::positive) {
            --k;
        }
        hull[k++] = p[i - 1];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) {
        return p.size(); // all collinear
    }
    std::size_t count = hull.size();
    for (std::size_t e = 0; e < hull.size(); ++e) {
        const point2& a = hull[e];
        const point2& b = hull[(e + 1) % hull.size()];
        for (const point2& q : p) {
            const bool inside_box = std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
                                    std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
            const bool endpoint = (q.x == a.x && q.y == a.y) || (q.x == b.x && q.y == b.y);
            if (inside_box && !endpoint && exact_orient(a, b, q) == sign::zero) {
                ++count;
            }
        }
    }
    return count;
}

std::size_t empty_circle_violations(const triangulation& t)
{
    std::size_t violations = 0;
    double in[8];
    for (const auto& tri : t.triangles) {
        for (int k = 0; k < 3; ++k) {
            in[2 * k] = t.points[static_cast<std::size_t>(tri[k])].x;
            in[2 * k + 1] = t.points[static_cast<std::size_t>(tri[k])].y;
        }
        for (std::size_t v = 0; v < t.points.size(); ++v) {
            const int vi = static_cast<int>(v);
            if (vi == tri[0] || vi == tri[1] || vi == tri[2]) {
                continue;
            }
            in[6] = t.points[v].x;
            in[7] = t.points[v].y;
            if (oracle_sign(incircle2d_expr(), in) == sign::positive) {
                ++violations;
            }
        }
    }
    return violations;
}

} // namespace fpfilter::harness
