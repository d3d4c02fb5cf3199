#pragma once

// Exact length-weighted measure over equivalence classes. A program p
// contributes 2^-l(p) to a class when it is a member or, within the host
// step budget, emulates a member for at least k steps.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "udlab/equivalence.hpp"
#include "udlab/machine.hpp"
#include "udlab/measure_value.hpp"

namespace udlab {

/// Truncation parameters every measure result is reported with.
struct MeasureContext {
  std::size_t max_len = 12;  // L
  std::size_t k = 2;
  Natural budget = 1000;  // T, host steps standing in for "eventually"
  InputUniverse universe = InputUniverse::default_universe();
  EncodingId encoding = EncodingId::A;

  MeasureContext at_level(std::size_t level) const {
    MeasureContext c = *this;
    c.k = level;
    return c;
  }
  /// "L=..,k=..,T=..,universe=..,encoding=.."
  std::string describe() const;
};

class EmptyClass : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotARefinement : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Highest emulated step index reached per emulated code (nested emulation
/// included) when `program` runs on the empty tape for `budget` host steps.
std::map<Bits, Natural> emulation_profile(const Program& program, Natural budget);

/// u_p(class): 1 if p is a member, or emulates a program equivalent to the
/// members for at least ctx.k steps within ctx.budget host steps.
int u_weight(const Program& p, const EquivClass& cls, const MeasureContext& ctx);

/// mu(class) = sum over p with l(p) <= L of 2^-l(p) u_p(class).
MeasureValue measure_class(const EquivClass& cls, const MeasureContext& ctx, unsigned workers = 1);

/// For every program, the sorted indices of the classes it has u_p = 1 for.
std::vector<std::vector<std::size_t>> emulation_matrix(std::span<const ProgramPtr> programs,
                                                       std::span<const EquivClass> classes,
                                                       const MeasureContext& ctx, unsigned workers = 1);

struct DecompositionRow {
  std::size_t class_index = 0;
  MeasureValue direct;      // measure_class
  MeasureValue recursive;   // sum_j mu_j * (sum_{p in j} w u_p(i)) / (sum_p w u_p(j))
  MeasureValue residual;    // recursive - direct
};

/// Evaluates the recursive decomposition for every class of a partition of
/// all programs up to ctx.max_len.
std::vector<DecompositionRow> decomposition_check(std::span<const EquivClass> classes,
                                                  const MeasureContext& ctx, unsigned workers = 1);

/// mu(child at ctx.k + 1) / mu(parent at ctx.k).
MeasureValue relative_measure(const EquivClass& child, const EquivClass& parent, const MeasureContext& ctx,
                              unsigned workers = 1);

struct ClassMeasure {
  EquivClass cls;
  MeasureValue mu;
};

/// Partition of P_{<=L} at ctx.k with the measure of every class.
std::vector<ClassMeasure> level_measures(const MeasureContext& ctx, unsigned workers = 1);

/// sum_j mu(alpha_jk) at level ctx.k.
MeasureValue level_mass(const MeasureContext& ctx, unsigned workers = 1);

struct LevelRow {
  std::size_t k = 0;
  std::size_t class_count = 0;
  MeasureValue mass;
  MeasureValue cumulative;
};

std::vector<LevelRow> divergence_report(std::size_t k_min, std::size_t k_max, const MeasureContext& ctx,
                                        unsigned workers = 1);

struct RelativeRow {
  std::size_t parent_index = 0;
  std::size_t child_index = 0;
  MeasureValue parent_mu;
  MeasureValue child_mu;
  MeasureValue ratio;
};

/// Every refinement pair between level ctx.k and ctx.k + 1.
std::vector<RelativeRow> relative_table(const MeasureContext& ctx, unsigned workers = 1);

/// Smallest member disassembly; names a class independently of encoding.
std::string class_label(const EquivClass& cls);

struct InvarianceRow {
  std::string parent_label;
  std::string child_label;
  std::optional<MeasureValue> ratio_a;
  std::optional<MeasureValue> ratio_b;
};

/// Relative measures under encodings A and B side by side, joined on class
/// labels. ctx.encoding is ignored.
std::vector<InvarianceRow> invariance_report(const MeasureContext& ctx, unsigned workers = 1);

}  // namespace udlab
