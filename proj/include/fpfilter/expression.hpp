#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace fpfilter {

enum class node_kind
{
    constant,
    input,
    sum,
    difference,
    product,
};

/// Immutable expression tree over binary64 constants, input placeholders
/// `_1.._n` and the operators +, -, *.
///
/// The tree doubles as a real polynomial and as one fixed floating-point
/// realisation of it: evaluation rounds once per node, in tree order. Nodes
/// are shared, so copying an `expr` is cheap and subtrees keep their
/// identity (see `id()`).
class expr
{
public:
    expr();

    static expr constant(double value);
    /// Placeholder `_index`, index >= 1.
    static expr input(int index);
    static expr sum(expr left, expr right);
    static expr difference(expr left, expr right);
    static expr product(expr left, expr right);

    node_kind kind() const;
    bool is_leaf() const { return kind() == node_kind::constant || kind() == node_kind::input; }
    bool is_additive() const { return kind() == node_kind::sum || kind() == node_kind::difference; }

    /// Constant value; only meaningful for constant nodes.
    double value() const;
    /// 1-based placeholder index; only meaningful for input nodes.
    int index() const;
    const expr& left() const;
    const expr& right() const;

    /// Largest placeholder index in the tree (0 when there are none).
    int arity() const;
    std::size_t node_count() const;

    /// Identity of the underlying node, stable across copies.
    const void* id() const;

    friend expr operator+(const expr& a, const expr& b) { return sum(a, b); }
    friend expr operator-(const expr& a, const expr& b) { return difference(a, b); }
    friend expr operator*(const expr& a, const expr& b) { return product(a, b); }

    /// Structural equality (same shape, same constants bit-for-bit).
    friend bool operator==(const expr& a, const expr& b);

private:
    friend class expr_factory;
    struct node;
    explicit expr(std::shared_ptr<const node> n);

    std::shared_ptr<const node> m_node;
};

/// Throws parse_error if placeholders are not exactly _1.._arity.
void check_contiguous(const expr& e);

/// Parses the infix grammar: + - * with the usual precedence, parentheses,
/// placeholders `_k` and decimal or C99 hexadecimal constants (a leading
/// minus is accepted directly in front of a constant). Decimal constants are
/// rounded to nearest binary64. Placeholders must be contiguous from _1.
expr parse_expr(std::string_view text);

/// Serialises in the grammar accepted by parse_expr; parse_expr(to_string(e))
/// reproduces e exactly.
std::string to_string(const expr& e);

/// IEEE-754 binary64 evaluation, one rounding per node in tree order.
/// Non-finite values propagate. Requires inputs.size() >= e.arity().
double eval_naive(const expr& e, std::span<const double> inputs);

/// Evaluates like eval_naive and reports whether any multiplication of two
/// nonzero finite factors produced zero or a subnormal (an underflow).
struct checked_value
{
    double value;
    bool underflow;
};
checked_value eval_checked(const expr& e, std::span<const double> inputs);

/// Top-level split of a sum or difference.
struct top_split
{
    expr left;
    expr right;
    node_kind op;
};

/// Returns the split when the root is a sum or difference, nullopt
/// otherwise (products and leaves).
std::optional<top_split> top_decomposition(const expr& e);

/// True for leaves (constants or inputs). Atoms are exactly representable
/// operands for the atom-level error-bound rules.
inline bool is_atom(const expr& e) { return e.is_leaf(); }

/// atom (+|-) atom
bool is_atom_pair_sum(const expr& e);

} // namespace fpfilter
