#include "fpfilter/program.hpp"

#include <algorithm>
#include <cmath>

namespace fpfilter {

std::uint32_t program::add_expr(const expr& e)
{
    if (const auto it = m_memo.find(e.id()); it != m_memo.end()) {
        return it->second;
    }
    std::uint32_t slot = 0;
    switch (e.kind()) {
    case node_kind::constant:
        slot = add_constant(e.value());
        break;
    case node_kind::input:
        m_code.push_back({opcode::input, static_cast<std::uint32_t>(e.index() - 1), 0, 0.0});
        m_arity = std::max(m_arity, static_cast<std::size_t>(e.index()));
        slot = static_cast<std::uint32_t>(m_code.size() - 1);
        break;
    default: {
        const std::uint32_t l = add_expr(e.left());
        const std::uint32_t r = add_expr(e.right());
        const opcode op = e.kind() == node_kind::sum ? opcode::add
                          : e.kind() == node_kind::difference ? opcode::sub
                                                                : opcode::mul;
        slot = add_binary(op, l, r);
        break;
    }
    }
    m_memo.emplace(e.id(), slot);
    return slot;
}

std::uint32_t program::add_constant(double v)
{
    m_code.push_back({opcode::constant, 0, 0, v});
    return static_cast<std::uint32_t>(m_code.size() - 1);
}

std::uint32_t program::add_abs(std::uint32_t operand)
{
    m_code.push_back({opcode::abs, operand, 0, 0.0});
    return static_cast<std::uint32_t>(m_code.size() - 1);
}

std::uint32_t program::add_binary(opcode op, std::uint32_t a, std::uint32_t b)
{
    m_code.push_back({op, a, b, 0.0});
    return static_cast<std::uint32_t>(m_code.size() - 1);
}

} // namespace fpfilter
