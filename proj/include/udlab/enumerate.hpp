#pragma once

#include <cstddef>
#include <vector>

#include "udlab/machine.hpp"
#include "udlab/measure_value.hpp"

namespace udlab {

/// Length-lexicographic order: shorter first, then lexicographic on bits.
bool canonical_less(const Bits& a, const Bits& b);

/// Every valid program with l(p) <= max_len, in canonical order.
std::vector<ProgramPtr> enumerate_programs(std::size_t max_len, EncodingId enc = EncodingId::A);

/// The n-th program (1-based) in canonical order. Extends a process-wide
/// cache on demand; safe to call from several threads.
ProgramPtr nth_program(std::size_t n, EncodingId enc = EncodingId::A);

/// Sum of 2^-l(p) over programs with l(p) <= max_len.
MeasureValue kraft_mass(std::size_t max_len, EncodingId enc = EncodingId::A);

}  // namespace udlab
