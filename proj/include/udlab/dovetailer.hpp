#pragma once

#include <cstddef>
#include <vector>

#include "udlab/machine.hpp"

namespace udlab {

/// (program index i, step index s), both 1-based.
struct SchedulePair {
  std::size_t program_index = 1;
  Natural step_index = 1;

  friend bool operator==(const SchedulePair&, const SchedulePair&) = default;
};

/// Diagonal d containing `tick`: (d-1)(d-2)/2 < tick <= d(d-1)/2.
Natural schedule_diagonal(Natural tick);

/// Canonical diagonal schedule, ascending program index within a diagonal.
SchedulePair schedule_pair(Natural tick);

/// Inverse of schedule_pair.
Natural schedule_tick(const SchedulePair& pair);

/// Steps program i has completed once diagonal d is finished: max(0, d - i).
Natural completed_steps(std::size_t program_index, Natural diagonal);

struct DovetailTick {
  Natural tick = 0;
  std::size_t program_index = 0;
  Natural step_index = 0;
  ProgramPtr program;
  EmulationRecord record;
};

/// Advances `ctx` by one tick: runs the scheduled child one step.
DovetailTick dovetail_tick(DovetailContext& ctx, EncodingId enc);

/// Bits of the one-instruction dovetailer program [DVT] in `enc`.
Bits dovetailer_program_bits(EncodingId enc);

struct DovetailEvent {
  Natural tick = 0;
  std::size_t program_index = 0;
  EmulationEvent event;
};

/// Runs a fresh dovetailer for `ticks` ticks.
std::vector<DovetailEvent> dovetail_run(Natural ticks, EncodingId enc = EncodingId::A);

}  // namespace udlab
