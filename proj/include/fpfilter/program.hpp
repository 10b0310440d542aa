#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fpfilter/expression.hpp"

namespace fpfilter {

enum class opcode : std::uint8_t
{
    input,
    constant,
    add,
    sub,
    mul,
    abs,
};

struct instruction
{
    opcode op;
    std::uint32_t a = 0; // input index (0-based) or first operand slot
    std::uint32_t b = 0; // second operand slot
    double value = 0.0;  // constant
};

/// Straight-line code compiled from one or more expressions. Subtrees that
/// share a node (same `expr::id()`) are computed once. Every instruction
/// writes the slot with its own index.
class program
{
public:
    std::uint32_t add_expr(const expr& e);
    std::uint32_t add_constant(double v);
    std::uint32_t add_abs(std::uint32_t operand);
    std::uint32_t add_binary(opcode op, std::uint32_t a, std::uint32_t b);

    /// Slot already holding `e`, if it was added.
    std::optional<std::uint32_t> slot_of(const expr& e) const
    {
        const auto it = m_memo.find(e.id());
        return it == m_memo.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
    }

    std::size_t size() const { return m_code.size(); }
    const std::vector<instruction>& code() const { return m_code; }
    /// Highest input index referenced plus one.
    std::size_t arity() const { return m_arity; }

    /// Executes all instructions into `slots` (size() entries).
    void run(std::span<const double> inputs, double* slots) const
    {
        const instruction* code = m_code.data();
        const std::size_t n = m_code.size();
        for (std::size_t i = 0; i < n; ++i) {
            const instruction& in = code[i];
            switch (in.op) {
            case opcode::input: slots[i] = inputs[in.a]; break;
            case opcode::constant: slots[i] = in.value; break;
            case opcode::add: slots[i] = slots[in.a] + slots[in.b]; break;
            case opcode::sub: slots[i] = slots[in.a] - slots[in.b]; break;
            case opcode::mul: slots[i] = slots[in.a] * slots[in.b]; break;
            case opcode::abs: slots[i] = std::fabs(slots[in.a]); break;
            }
        }
    }

private:
    std::vector<instruction> m_code;
    std::unordered_map<const void*, std::uint32_t> m_memo;
    std::size_t m_arity = 0;
};

/// Scratch storage for program::run: on the stack for small programs.
class slot_buffer
{
public:
    explicit slot_buffer(std::size_t n)
    {
        if (n > m_local.size()) {
            m_heap.resize(n);
        }
    }
    double* data() { return m_heap.empty() ? m_local.data() : m_heap.data(); }

private:
    std::array<double, 256> m_local;
    std::vector<double> m_heap;
};

} // namespace fpfilter
