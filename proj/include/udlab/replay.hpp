#pragma once

// Record/replay harness. A Recording is a program, its input tape and the
// semantic trace it produced. Playback reads the trace back without
// computing; hybrid runs switch to live computation at the first divergence;
// severance replaces chosen transitions with recorded ones.

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>

#include "udlab/equivalence.hpp"
#include "udlab/machine.hpp"

namespace udlab {

struct Recording {
  ProgramPtr program;
  Tape tape;
  std::size_t k = 0;
  Trace trace;
};

class InvalidRecording : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Recording record(ProgramPtr program, Tape tape, std::size_t k);

/// Throws InvalidRecording unless rec.trace is exactly what the program
/// produces on rec.tape. Used on recordings loaded from disk.
void verify_recording(const Recording& rec);

/// Returns the recorded trace. Never calls the step function.
Trace playback(const Recording& rec);

struct HybridResult {
  Trace trace;
  std::optional<std::size_t> switch_step;  // 1-based
};

HybridResult hybrid_run(const Recording& rec, const Tape& actual_tape);

struct SeverancePlan {
  std::set<std::size_t> severed_steps;  // 1-based step indices

  static SeverancePlan none() { return {}; }
  static SeverancePlan all(std::size_t k);
  void validate(std::size_t k) const;
};

/// Trace of the partly severed system on `actual_tape`: severed steps copy
/// the recorded configuration, the rest compute live.
Trace project(const Recording& rec, const SeverancePlan& plan, const Tape& actual_tape);

struct SeveranceResult {
  Trace trace;
  bool counterfactually_equivalent = false;
};

/// Projects on `actual_tape` and compares the severed system with the
/// original program over `universe`.
SeveranceResult sever_and_project(const Recording& rec, const SeverancePlan& plan, const Tape& actual_tape,
                                  const InputUniverse& universe = InputUniverse::default_universe());

}  // namespace udlab
