#include "udlab/dovetailer.hpp"

#include <cmath>
#include <stdexcept>

#include "udlab/enumerate.hpp"

namespace udlab {

namespace {

constexpr Natural triangle(Natural n) { return n * (n - 1) / 2; }  // d(d-1)/2

const Tape kEmptyTape{};

}  // namespace

Natural schedule_diagonal(Natural tick) {
  if (tick < 1) throw std::invalid_argument("schedule: tick must be >= 1");
  // Smallest d with d(d-1)/2 >= tick; start from the real root and correct.
  auto d = static_cast<Natural>(std::ceil((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(tick))) / 2.0));
  if (d < 2) d = 2;
  while (triangle(d) < tick) ++d;
  while (d > 2 && triangle(d - 1) >= tick) --d;
  return d;
}

SchedulePair schedule_pair(Natural tick) {
  const Natural d = schedule_diagonal(tick);
  const Natural i = tick - triangle(d - 1);
  return SchedulePair{static_cast<std::size_t>(i), d - i};
}

Natural schedule_tick(const SchedulePair& pair) {
  if (pair.program_index < 1 || pair.step_index < 1) {
    throw std::invalid_argument("schedule: indices are 1-based");
  }
  const Natural d = pair.program_index + pair.step_index;
  return triangle(d - 1) + pair.program_index;
}

Natural completed_steps(std::size_t program_index, Natural diagonal) {
  return diagonal > program_index ? diagonal - program_index : 0;
}

DovetailTick dovetail_tick(DovetailContext& ctx, EncodingId enc) {
  ++ctx.tick;
  const auto pair = schedule_pair(ctx.tick);
  if (pair.program_index > ctx.children.size()) ctx.children.resize(pair.program_index);
  auto program = nth_program(pair.program_index, enc);
  Configuration& child = ctx.children[pair.program_index - 1];
  advance(child, *program, kEmptyTape);
  DovetailTick out;
  out.tick = ctx.tick;
  out.program_index = pair.program_index;
  out.step_index = pair.step_index;
  out.record = EmulationRecord{program->bits(), pair.step_index,
                               std::make_shared<const SemanticState>(observe(child))};
  out.program = std::move(program);
  return out;
}

Bits dovetailer_program_bits(EncodingId enc) {
  return Program::assemble({ops::dvt()}, enc)->bits();
}

std::vector<DovetailEvent> dovetail_run(Natural ticks, EncodingId enc) {
  const Bits host = dovetailer_program_bits(enc);
  DovetailContext ctx;
  std::vector<DovetailEvent> events;
  events.reserve(ticks);
  for (Natural t = 0; t < ticks; ++t) {
    auto tick = dovetail_tick(ctx, enc);
    events.push_back(DovetailEvent{tick.tick, tick.program_index,
                                   EmulationEvent{host, tick.record.emulated_code, tick.record.step_index,
                                                  *tick.record.state}});
  }
  return events;
}

}  // namespace udlab
