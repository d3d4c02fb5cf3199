#include "udlab/replay.hpp"

namespace udlab {

Recording record(ProgramPtr program, Tape tape, std::size_t k) {
  if (!program) throw std::invalid_argument("record: null program");
  if (k < 1) throw std::invalid_argument("record: k must be >= 1");
  auto trace = run_trace(*program, tape, k).trace;
  return Recording{std::move(program), std::move(tape), k, std::move(trace)};
}

void verify_recording(const Recording& rec) {
  if (!rec.program) throw InvalidRecording("recording has no program");
  if (rec.k < 1 || rec.trace.size() != rec.k) {
    throw InvalidRecording("recording trace length does not match k");
  }
  const auto live = run_trace(*rec.program, rec.tape, rec.k).trace;
  for (std::size_t j = 0; j < rec.k; ++j) {
    if (live[j] != rec.trace[j]) {
      throw InvalidRecording("recorded state " + std::to_string(j + 1) + " differs from the program's run");
    }
  }
}

Trace playback(const Recording& rec) { return rec.trace; }

HybridResult hybrid_run(const Recording& rec, const Tape& actual_tape) {
  HybridResult result;
  result.trace.reserve(rec.k);
  Configuration current;
  for (std::size_t j = 1; j <= rec.k; ++j) {
    advance(current, *rec.program, actual_tape);
    auto live = observe(current);
    if (!result.switch_step && live == rec.trace[j - 1]) {
      result.trace.push_back(rec.trace[j - 1]);
      continue;
    }
    if (!result.switch_step) result.switch_step = j;
    result.trace.push_back(std::move(live));
  }
  return result;
}

SeverancePlan SeverancePlan::all(std::size_t k) {
  SeverancePlan plan;
  for (std::size_t j = 1; j <= k; ++j) plan.severed_steps.insert(j);
  return plan;
}

void SeverancePlan::validate(std::size_t k) const {
  for (auto j : severed_steps) {
    if (j < 1 || j > k) {
      throw std::invalid_argument("severed step " + std::to_string(j) + " outside 1.." + std::to_string(k));
    }
  }
}

Trace project(const Recording& rec, const SeverancePlan& plan, const Tape& actual_tape) {
  plan.validate(rec.k);
  // Recorded configurations carry the structural position the semantic
  // trace omits; they are what a severed step hands to the next live step.
  const auto frames = plan.severed_steps.empty()
                          ? std::vector<Configuration>{}
                          : run_configurations(*rec.program, rec.tape, rec.k);
  Trace trace;
  trace.reserve(rec.k);
  Configuration current;
  for (std::size_t j = 1; j <= rec.k; ++j) {
    if (plan.severed_steps.contains(j)) {
      current = frames[j - 1];
      trace.push_back(rec.trace[j - 1]);
    } else {
      advance(current, *rec.program, actual_tape);
      trace.push_back(observe(current));
    }
  }
  return trace;
}

SeveranceResult sever_and_project(const Recording& rec, const SeverancePlan& plan, const Tape& actual_tape,
                                  const InputUniverse& universe) {
  SeveranceResult result;
  result.trace = project(rec, plan, actual_tape);
  const auto severed = trace_family([&](const Tape& t) { return project(rec, plan, t); }, universe);
  const auto original = trace_family(*rec.program, universe, rec.k);
  result.counterfactually_equivalent = severed.canonical_key == original.canonical_key;
  return result;
}

}  // namespace udlab
