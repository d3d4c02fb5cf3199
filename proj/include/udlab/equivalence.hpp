#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "udlab/machine.hpp"

namespace udlab {

/// The finite set of tapes counterfactual equivalence quantifies over.
class InputUniverse {
 public:
  /// All tapes over {0,1} of length <= 2.
  static const InputUniverse& default_universe();
  /// Sorts into canonical order; rejects empty or duplicated tape lists.
  static InputUniverse from_tapes(std::vector<Tape> tapes);

  const std::vector<Tape>& tapes() const { return tapes_; }
  /// "default", or "custom-<digest>" for any other tape set.
  const std::string& id() const { return id_; }

  friend bool operator==(const InputUniverse& a, const InputUniverse& b) { return a.tapes_ == b.tapes_; }

 private:
  InputUniverse(std::vector<Tape> tapes, std::string id) : tapes_(std::move(tapes)), id_(std::move(id)) {}

  std::vector<Tape> tapes_;
  std::string id_;
};

/// Canonical tape order: shorter first, then lexicographic.
bool tape_less(const Tape& a, const Tape& b);

/// Canonical text form of a state; equal strings iff equal states.
std::string canonical_state(const SemanticState& state);

struct TraceFamily {
  std::vector<Trace> traces;  // universe order
  std::string canonical_key;
};

/// Anything that maps a tape to a k-step trace.
using TracedSystem = std::function<Trace(const Tape&)>;

TraceFamily trace_family(const TracedSystem& system, const InputUniverse& universe);
TraceFamily trace_family(const Program& program, const InputUniverse& universe, std::size_t k);

bool counterfactually_equivalent(const Program& p, const Program& q, const InputUniverse& universe,
                                 std::size_t k);

/// 64-bit FNV-1a of `text` as 16 hex digits.
std::string digest(const std::string& text);

/// One block alpha_jk of the partition at level k.
struct EquivClass {
  std::size_t k = 0;
  std::size_t index = 0;
  std::vector<ProgramPtr> members;  // canonical program order
  std::string canonical_key;

  bool contains(const Bits& bits) const;
};

/// Groups programs by trace-family key. Indices follow sorted keys, so the
/// result does not depend on input order or worker count.
std::vector<EquivClass> partition(std::span<const ProgramPtr> programs, const InputUniverse& universe,
                                  std::size_t k, unsigned workers = 1);

class RefinementViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// For each child class (level k+1), the index of the parent (level k) that
/// contains it.
std::vector<std::size_t> refine(std::span<const EquivClass> parents, std::span<const EquivClass> children);

}  // namespace udlab
