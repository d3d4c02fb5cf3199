#include "udlab/measure.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "udlab/enumerate.hpp"
#include "udlab/parallel.hpp"

namespace udlab {

namespace {

const Tape kEmptyTape{};

void require_level(const EquivClass& cls, const MeasureContext& ctx) {
  if (cls.k != ctx.k) {
    throw PreconditionViolation("class computed at k=" + std::to_string(cls.k) + " used with context k=" +
                                std::to_string(ctx.k));
  }
}

}  // namespace

std::string MeasureContext::describe() const {
  return "L=" + std::to_string(max_len) + ",k=" + std::to_string(k) + ",T=" + std::to_string(budget) +
         ",universe=" + universe.id() + ",encoding=" + std::string(encoding_name(encoding));
}

std::map<Bits, Natural> emulation_profile(const Program& program, Natural budget) {
  std::map<Bits, Natural> profile;
  std::vector<EmulationEvent> events;
  Configuration config;
  for (Natural t = 0; t < budget && !config.halted; ++t) {
    advance(config, program, kEmptyTape);
    events.clear();
    collect_events(program.bits(), observe(config), events);
    for (const auto& e : events) {
      auto& best = profile[e.emulated_code];
      best = std::max(best, e.emulated_step_index);
    }
  }
  return profile;
}

int u_weight(const Program& p, const EquivClass& cls, const MeasureContext& ctx) {
  require_level(cls, ctx);
  if (cls.contains(p.bits())) return 1;
  for (const auto& [code, steps] : emulation_profile(p, ctx.budget)) {
    if (steps < ctx.k) continue;
    const auto q = decode(code, ctx.encoding);
    if (trace_family(*q, ctx.universe, ctx.k).canonical_key == cls.canonical_key) return 1;
  }
  return 0;
}

MeasureValue measure_class(const EquivClass& cls, const MeasureContext& ctx, unsigned workers) {
  require_level(cls, ctx);
  const auto programs = enumerate_programs(ctx.max_len, ctx.encoding);
  std::vector<int> u(programs.size(), 0);
  parallel_for(programs.size(), workers, [&](std::size_t i) { u[i] = u_weight(*programs[i], cls, ctx); });
  MeasureValue total;
  for (std::size_t i = 0; i < programs.size(); ++i) {
    if (u[i]) total += MeasureValue::dyadic(programs[i]->length());
  }
  return total;
}

std::vector<std::vector<std::size_t>> emulation_matrix(std::span<const ProgramPtr> programs,
                                                       std::span<const EquivClass> classes,
                                                       const MeasureContext& ctx, unsigned workers) {
  std::unordered_map<std::string, std::size_t> class_by_key;
  std::unordered_map<Bits, std::size_t> class_by_member;
  for (std::size_t j = 0; j < classes.size(); ++j) {
    require_level(classes[j], ctx);
    class_by_key.emplace(classes[j].canonical_key, j);
    for (const auto& m : classes[j].members) class_by_member.emplace(m->bits(), j);
  }
  std::vector<std::vector<std::size_t>> rows(programs.size());
  parallel_for(programs.size(), workers, [&](std::size_t i) {
    std::vector<std::size_t> hit;
    if (auto it = class_by_member.find(programs[i]->bits()); it != class_by_member.end()) {
      hit.push_back(it->second);
    }
    for (const auto& [code, steps] : emulation_profile(*programs[i], ctx.budget)) {
      if (steps < ctx.k) continue;
      const auto q = decode(code, ctx.encoding);
      const auto it = class_by_key.find(trace_family(*q, ctx.universe, ctx.k).canonical_key);
      if (it != class_by_key.end()) hit.push_back(it->second);
    }
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    rows[i] = std::move(hit);
  });
  return rows;
}

std::vector<DecompositionRow> decomposition_check(std::span<const EquivClass> classes,
                                                  const MeasureContext& ctx, unsigned workers) {
  const auto programs = enumerate_programs(ctx.max_len, ctx.encoding);
  std::unordered_set<Bits> expected;
  for (const auto& p : programs) expected.insert(p->bits());
  std::size_t covered = 0;
  for (const auto& cls : classes) {
    if (cls.members.empty()) throw EmptyClass("class " + std::to_string(cls.index) + " has no members");
    for (const auto& m : cls.members) {
      if (!expected.contains(m->bits())) {
        throw PreconditionViolation("member " + m->bits() + " is not an enumerated program at " +
                                    ctx.describe());
      }
    }
    covered += cls.members.size();
  }
  if (covered != programs.size()) {
    throw PreconditionViolation("partition does not cover every program at " + ctx.describe());
  }

  const std::size_t n = classes.size();
  const auto matrix = emulation_matrix(programs, classes, ctx, workers);
  std::unordered_map<Bits, std::size_t> row_of;
  for (std::size_t r = 0; r < programs.size(); ++r) row_of.emplace(programs[r]->bits(), r);

  // denominator[j] = sum over all p of 2^-l(p) u_p(j)
  // numerator[j][i] = sum over p in class j of 2^-l(p) u_p(i)
  std::vector<MeasureValue> denominator(n);
  std::vector<std::vector<MeasureValue>> numerator(n, std::vector<MeasureValue>(n));
  for (std::size_t r = 0; r < programs.size(); ++r) {
    const auto w = MeasureValue::dyadic(programs[r]->length());
    for (auto j : matrix[r]) denominator[j] += w;
  }
  for (std::size_t j = 0; j < n; ++j) {
    for (const auto& m : classes[j].members) {
      const auto w = MeasureValue::dyadic(m->length());
      for (auto i : matrix[row_of.at(m->bits())]) numerator[j][i] += w;
    }
  }

  std::vector<MeasureValue> direct(n);
  for (std::size_t j = 0; j < n; ++j) direct[j] = measure_class(classes[j], ctx, workers);

  std::vector<DecompositionRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    MeasureValue rhs;
    for (std::size_t j = 0; j < n; ++j) {
      if (numerator[j][i].is_zero()) continue;
      rhs += direct[j] * numerator[j][i] / denominator[j];
    }
    rows.push_back(DecompositionRow{classes[i].index, direct[i], rhs, rhs - direct[i]});
  }
  return rows;
}

MeasureValue relative_measure(const EquivClass& child, const EquivClass& parent, const MeasureContext& ctx,
                              unsigned workers) {
  require_level(parent, ctx);
  if (child.k != parent.k + 1) {
    throw NotARefinement("child level " + std::to_string(child.k) + " is not parent level + 1");
  }
  for (const auto& m : child.members) {
    if (!parent.contains(m->bits())) {
      throw NotARefinement("child member " + m->bits() + " is not in the parent class");
    }
  }
  const auto parent_mu = measure_class(parent, ctx, workers);
  const auto child_mu = measure_class(child, ctx.at_level(ctx.k + 1), workers);
  return child_mu / parent_mu;
}

std::vector<ClassMeasure> level_measures(const MeasureContext& ctx, unsigned workers) {
  const auto programs = enumerate_programs(ctx.max_len, ctx.encoding);
  auto classes = partition(programs, ctx.universe, ctx.k, workers);
  const auto matrix = emulation_matrix(programs, classes, ctx, workers);
  std::vector<MeasureValue> mu(classes.size());
  for (std::size_t r = 0; r < programs.size(); ++r) {
    const auto w = MeasureValue::dyadic(programs[r]->length());
    for (auto j : matrix[r]) mu[j] += w;
  }
  std::vector<ClassMeasure> out;
  out.reserve(classes.size());
  for (std::size_t j = 0; j < classes.size(); ++j) out.push_back({std::move(classes[j]), std::move(mu[j])});
  return out;
}

MeasureValue level_mass(const MeasureContext& ctx, unsigned workers) {
  MeasureValue total;
  for (const auto& cm : level_measures(ctx, workers)) total += cm.mu;
  return total;
}

std::vector<LevelRow> divergence_report(std::size_t k_min, std::size_t k_max, const MeasureContext& ctx,
                                        unsigned workers) {
  if (k_min < 1 || k_max < k_min) throw std::invalid_argument("divergence_report: need 1 <= k_min <= k_max");
  std::vector<LevelRow> rows;
  MeasureValue cumulative;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const auto level = level_measures(ctx.at_level(k), workers);
    MeasureValue mass;
    for (const auto& cm : level) mass += cm.mu;
    cumulative += mass;
    rows.push_back(LevelRow{k, level.size(), mass, cumulative});
  }
  return rows;
}

std::vector<RelativeRow> relative_table(const MeasureContext& ctx, unsigned workers) {
  const auto parents = level_measures(ctx, workers);
  const auto children = level_measures(ctx.at_level(ctx.k + 1), workers);
  std::vector<EquivClass> parent_classes, child_classes;
  for (const auto& p : parents) parent_classes.push_back(p.cls);
  for (const auto& c : children) child_classes.push_back(c.cls);
  const auto mapping = refine(parent_classes, child_classes);
  std::vector<RelativeRow> rows;
  rows.reserve(children.size());
  for (std::size_t c = 0; c < children.size(); ++c) {
    const auto& parent = parents[mapping[c]];
    rows.push_back(RelativeRow{parent.cls.index, children[c].cls.index, parent.mu, children[c].mu,
                               children[c].mu / parent.mu});
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RelativeRow& a, const RelativeRow& b) { return a.parent_index < b.parent_index; });
  return rows;
}

std::string class_label(const EquivClass& cls) {
  std::string best;
  for (const auto& m : cls.members) {
    auto text = m->disassemble();
    if (best.empty() || text.size() < best.size() || (text.size() == best.size() && text < best)) {
      best = std::move(text);
    }
  }
  return best;
}

std::vector<InvarianceRow> invariance_report(const MeasureContext& ctx, unsigned workers) {
  std::map<std::pair<std::string, std::string>, InvarianceRow> joined;
  for (EncodingId enc : {EncodingId::A, EncodingId::B}) {
    MeasureContext c = ctx;
    c.encoding = enc;
    const auto parents = level_measures(c, workers);
    const auto children = level_measures(c.at_level(c.k + 1), workers);
    std::vector<EquivClass> parent_classes, child_classes;
    for (const auto& p : parents) parent_classes.push_back(p.cls);
    for (const auto& ch : children) child_classes.push_back(ch.cls);
    const auto mapping = refine(parent_classes, child_classes);
    for (std::size_t i = 0; i < children.size(); ++i) {
      const auto& parent = parents[mapping[i]];
      const auto key = std::make_pair(class_label(parent.cls), class_label(children[i].cls));
      auto& row = joined[key];
      row.parent_label = key.first;
      row.child_label = key.second;
      (enc == EncodingId::A ? row.ratio_a : row.ratio_b) = children[i].mu / parent.mu;
    }
  }
  std::vector<InvarianceRow> rows;
  rows.reserve(joined.size());
  for (auto& [key, row] : joined) rows.push_back(std::move(row));
  return rows;
}

}  // namespace udlab
