#include "fpfilter/expression.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "fpfilter/errors.hpp"

namespace fpfilter {

struct expr::node
{
    node_kind kind = node_kind::constant;
    double value = 0.0;
    int index = 0;
    expr left{nullptr};
    expr right{nullptr};
    int arity = 0;
    std::size_t count = 1;
};

expr::expr()
    : expr(constant(0.0))
{}

expr::expr(std::shared_ptr<const node> n)
    : m_node(std::move(n))
{}

expr expr::constant(double value)
{
    auto n = std::make_shared<node>();
    n->kind = node_kind::constant;
    n->value = value;
    return expr(std::move(n));
}

expr expr::input(int index)
{
    if (index < 1) {
        throw std::invalid_argument("placeholder index must be >= 1");
    }
    auto n = std::make_shared<node>();
    n->kind = node_kind::input;
    n->index = index;
    n->arity = index;
    return expr(std::move(n));
}

namespace {

expr make_binary(node_kind kind, expr left, expr right);

} // namespace

expr expr::sum(expr left, expr right) { return make_binary(node_kind::sum, std::move(left), std::move(right)); }

expr expr::difference(expr left, expr right)
{
    return make_binary(node_kind::difference, std::move(left), std::move(right));
}

expr expr::product(expr left, expr right)
{
    return make_binary(node_kind::product, std::move(left), std::move(right));
}

node_kind expr::kind() const { return m_node->kind; }
double expr::value() const { return m_node->value; }
int expr::index() const { return m_node->index; }
const expr& expr::left() const { return m_node->left; }
const expr& expr::right() const { return m_node->right; }
int expr::arity() const { return m_node->arity; }
std::size_t expr::node_count() const { return m_node->count; }
const void* expr::id() const { return m_node.get(); }

bool operator==(const expr& a, const expr& b)
{
    if (a.id() == b.id()) {
        return true;
    }
    if (a.kind() != b.kind()) {
        return false;
    }
    switch (a.kind()) {
    case node_kind::constant:
        return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
    case node_kind::input:
        return a.index() == b.index();
    default:
        return a.node_count() == b.node_count() && a.left() == b.left() && a.right() == b.right();
    }
}

// Needs access to the private node type.
class expr_factory
{
public:
    static expr binary(node_kind kind, expr left, expr right);
};

namespace {

expr make_binary(node_kind kind, expr left, expr right)
{
    return expr_factory::binary(kind, std::move(left), std::move(right));
}

void collect_indices(const expr& e, std::set<int>& out)
{
    switch (e.kind()) {
    case node_kind::constant:
        return;
    case node_kind::input:
        out.insert(e.index());
        return;
    default:
        collect_indices(e.left(), out);
        collect_indices(e.right(), out);
    }
}

} // namespace

void check_contiguous(const expr& e)
{
    std::set<int> indices;
    collect_indices(e, indices);
    int expected = 1;
    for (int i : indices) {
        if (i != expected) {
            throw parse_error("placeholder gap: _" + std::to_string(expected) + " is missing", 0);
        }
        ++expected;
    }
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class parser
{
public:
    explicit parser(std::string_view text)
        : m_text(text)
    {}

    expr parse()
    {
        expr e = parse_sum();
        skip_space();
        if (m_pos != m_text.size()) {
            fail(std::string("unexpected character '") + m_text[m_pos] + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const { throw parse_error(message, m_pos); }

    void skip_space()
    {
        while (m_pos < m_text.size() && std::isspace(static_cast<unsigned char>(m_text[m_pos]))) {
            ++m_pos;
        }
    }

    char peek()
    {
        skip_space();
        return m_pos < m_text.size() ? m_text[m_pos] : '\0';
    }

    expr parse_sum()
    {
        expr e = parse_product();
        for (;;) {
            const char c = peek();
            if (c == '+') {
                ++m_pos;
                e = expr::sum(e, parse_product());
            } else if (c == '-') {
                ++m_pos;
                e = expr::difference(e, parse_product());
            } else {
                return e;
            }
        }
    }

    expr parse_product()
    {
        expr e = parse_primary();
        for (;;) {
            const char c = peek();
            if (c == '*') {
                ++m_pos;
                e = expr::product(e, parse_primary());
            } else if (c == '/') {
                fail("division is not supported");
            } else {
                return e;
            }
        }
    }

    expr parse_primary()
    {
        const char c = peek();
        if (c == '(') {
            ++m_pos;
            expr e = parse_sum();
            if (peek() != ')') {
                fail("expected ')'");
            }
            ++m_pos;
            return e;
        }
        if (c == '_') {
            ++m_pos;
            const std::size_t start = m_pos;
            int index = 0;
            const auto [ptr, ec] = std::from_chars(m_text.data() + m_pos, m_text.data() + m_text.size(), index);
            if (ec != std::errc() || index < 1) {
                m_pos = start;
                fail("expected placeholder index >= 1 after '_'");
            }
            m_pos = static_cast<std::size_t>(ptr - m_text.data());
            return expr::input(index);
        }
        if (c == '-') {
            const std::size_t minus = m_pos;
            ++m_pos;
            const char next = m_pos < m_text.size() ? m_text[m_pos] : '\0';
            if (!(std::isdigit(static_cast<unsigned char>(next)) || next == '.')) {
                m_pos = minus;
                fail("unary minus is only supported in front of a numeric constant");
            }
            return expr::constant(-parse_number());
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return expr::constant(parse_number());
        }
        if (c == '\0') {
            fail("unexpected end of expression");
        }
        if (c == '/') {
            fail("division is not supported");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    double parse_number()
    {
        const std::size_t start = m_pos;
        std::size_t end = m_pos;
        const bool hex = m_text.substr(m_pos, 2) == "0x" || m_text.substr(m_pos, 2) == "0X";
        if (hex) {
            end += 2;
        }
        while (end < m_text.size()) {
            const char ch = m_text[end];
            const bool exponent_mark = hex ? (ch == 'p' || ch == 'P') : (ch == 'e' || ch == 'E');
            if (std::isxdigit(static_cast<unsigned char>(ch)) && (hex || std::isdigit(static_cast<unsigned char>(ch)))) {
                ++end;
            } else if (ch == '.') {
                ++end;
            } else if (exponent_mark) {
                ++end;
                if (end < m_text.size() && (m_text[end] == '+' || m_text[end] == '-')) {
                    ++end;
                }
            } else {
                break;
            }
        }
        const std::string literal(m_text.substr(start, end - start));
        char* parsed_end = nullptr;
        const double v = std::strtod(literal.c_str(), &parsed_end);
        if (parsed_end != literal.c_str() + literal.size() || literal.empty()) {
            fail("malformed numeric constant '" + literal + "'");
        }
        if (!std::isfinite(v)) {
            fail("constant '" + literal + "' is not representable as a finite binary64 value");
        }
        m_pos = end;
        return v;
    }

    std::string_view m_text;
    std::size_t m_pos = 0;
};

} // namespace

expr parse_expr(std::string_view text)
{
    expr e = parser(text).parse();
    check_contiguous(e);
    return e;
}

// ---------------------------------------------------------------------------
// serialisation

namespace {

std::string format_constant(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string s(buf, ptr);
    if (s.find_first_of(".e") == std::string::npos && s.find("inf") == std::string::npos) {
        // Keep plain integers readable but unambiguous as constants.
        s += ".0";
    }
    if (std::signbit(v)) {
        return "(" + s + ")";
    }
    return s;
}

void write(const expr& e, std::string& out)
{
    switch (e.kind()) {
    case node_kind::constant:
        out += format_constant(e.value());
        return;
    case node_kind::input:
        out += '_';
        out += std::to_string(e.index());
        return;
    case node_kind::sum:
    case node_kind::difference: {
        write(e.left(), out);
        out += e.kind() == node_kind::sum ? " + " : " - ";
        const bool wrap = e.right().is_additive();
        if (wrap) {
            out += '(';
        }
        write(e.right(), out);
        if (wrap) {
            out += ')';
        }
        return;
    }
    case node_kind::product: {
        const bool wrap_left = e.left().is_additive();
        const bool wrap_right = !e.right().is_leaf();
        if (wrap_left) {
            out += '(';
        }
        write(e.left(), out);
        if (wrap_left) {
            out += ')';
        }
        out += '*';
        if (wrap_right) {
            out += '(';
        }
        write(e.right(), out);
        if (wrap_right) {
            out += ')';
        }
        return;
    }
    }
}

} // namespace

std::string to_string(const expr& e)
{
    std::string out;
    write(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// evaluation

double eval_naive(const expr& e, std::span<const double> inputs)
{
    switch (e.kind()) {
    case node_kind::constant:
        return e.value();
    case node_kind::input:
        return inputs[static_cast<std::size_t>(e.index() - 1)];
    case node_kind::sum:
        return eval_naive(e.left(), inputs) + eval_naive(e.right(), inputs);
    case node_kind::difference:
        return eval_naive(e.left(), inputs) - eval_naive(e.right(), inputs);
    case node_kind::product:
        return eval_naive(e.left(), inputs) * eval_naive(e.right(), inputs);
    }
    return 0.0;
}

namespace {

bool product_underflows(double a, double b, double r)
{
    if (a == 0 || b == 0 || !std::isfinite(a) || !std::isfinite(b)) {
        return false;
    }
    return r == 0 || std::fpclassify(r) == FP_SUBNORMAL;
}

} // namespace

checked_value eval_checked(const expr& e, std::span<const double> inputs)
{
    switch (e.kind()) {
    case node_kind::constant:
        return {e.value(), false};
    case node_kind::input:
        return {inputs[static_cast<std::size_t>(e.index() - 1)], false};
    default:
        break;
    }
    const checked_value l = eval_checked(e.left(), inputs);
    const checked_value r = eval_checked(e.right(), inputs);
    const bool flag = l.underflow || r.underflow;
    switch (e.kind()) {
    case node_kind::sum:
        return {l.value + r.value, flag};
    case node_kind::difference:
        return {l.value - r.value, flag};
    default: {
        const double v = l.value * r.value;
        return {v, flag || product_underflows(l.value, r.value, v)};
    }
    }
}

std::optional<top_split> top_decomposition(const expr& e)
{
    if (!e.is_additive()) {
        return std::nullopt;
    }
    return top_split{e.left(), e.right(), e.kind()};
}

bool is_atom_pair_sum(const expr& e) { return e.is_additive() && is_atom(e.left()) && is_atom(e.right()); }

expr expr_factory::binary(node_kind kind, expr left, expr right)
{
    auto n = std::make_shared<expr::node>();
    n->kind = kind;
    n->arity = std::max(left.arity(), right.arity());
    n->count = 1 + left.node_count() + right.node_count();
    n->left = std::move(left);
    n->right = std::move(right);
    return expr(std::move(n));
}

} // namespace fpfilter
