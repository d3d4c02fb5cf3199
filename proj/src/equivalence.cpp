#include "udlab/equivalence.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "udlab/enumerate.hpp"
#include "udlab/parallel.hpp"

namespace udlab {

namespace {

void append_state(const SemanticState& s, std::string& out) {
  out += "r=";
  for (std::size_t i = 0; i < s.registers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.registers[i]);
  }
  out += ";c=" + std::to_string(s.input_cursor) + ";o=";
  for (std::size_t i = 0; i < s.output_log.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.output_log[i]);
  }
  out += s.halted ? ";h=1" : ";h=0";
  if (s.emulation) {
    out += ";e={" + s.emulation->emulated_code + '@' + std::to_string(s.emulation->step_index) + ':';
    if (s.emulation->state) append_state(*s.emulation->state, out);
    out += '}';
  }
}

std::string family_key(const std::vector<Trace>& traces) {
  std::string key;
  for (const auto& trace : traces) {
    key += '[';
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (i) key += '|';
      append_state(trace[i], key);
    }
    key += ']';
  }
  return key;
}

}  // namespace

bool tape_less(const Tape& a, const Tape& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

const InputUniverse& InputUniverse::default_universe() {
  static const InputUniverse universe({{}, {0}, {1}, {0, 0}, {0, 1}, {1, 0}, {1, 1}}, "default");
  return universe;
}

InputUniverse InputUniverse::from_tapes(std::vector<Tape> tapes) {
  if (tapes.empty()) throw std::invalid_argument("input universe must contain at least one tape");
  std::sort(tapes.begin(), tapes.end(), tape_less);
  if (std::adjacent_find(tapes.begin(), tapes.end()) != tapes.end()) {
    throw std::invalid_argument("input universe contains a duplicate tape");
  }
  if (tapes == default_universe().tapes()) return default_universe();
  std::string text;
  for (const auto& t : tapes) {
    text += '(';
    for (auto v : t) text += std::to_string(v) + ',';
    text += ')';
  }
  return InputUniverse(std::move(tapes), "custom-" + digest(text));
}

std::string canonical_state(const SemanticState& state) {
  std::string out;
  append_state(state, out);
  return out;
}

TraceFamily trace_family(const TracedSystem& system, const InputUniverse& universe) {
  TraceFamily family;
  family.traces.reserve(universe.tapes().size());
  for (const auto& tape : universe.tapes()) family.traces.push_back(system(tape));
  family.canonical_key = family_key(family.traces);
  return family;
}

TraceFamily trace_family(const Program& program, const InputUniverse& universe, std::size_t k) {
  return trace_family([&](const Tape& tape) { return run_trace(program, tape, k).trace; }, universe);
}

bool counterfactually_equivalent(const Program& p, const Program& q, const InputUniverse& universe,
                                 std::size_t k) {
  if (k < 1) throw std::invalid_argument("counterfactually_equivalent: k must be >= 1");
  for (const auto& tape : universe.tapes()) {
    if (run_trace(p, tape, k).trace != run_trace(q, tape, k).trace) return false;
  }
  return true;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool EquivClass::contains(const Bits& bits) const {
  return std::any_of(members.begin(), members.end(), [&](const ProgramPtr& p) { return p->bits() == bits; });
}

std::vector<EquivClass> partition(std::span<const ProgramPtr> programs, const InputUniverse& universe,
                                  std::size_t k, unsigned workers) {
  if (k < 1) throw std::invalid_argument("partition: k must be >= 1");
  std::vector<std::string> keys(programs.size());
  parallel_for(programs.size(), workers,
               [&](std::size_t i) { keys[i] = trace_family(*programs[i], universe, k).canonical_key; });

  std::map<std::string, std::vector<ProgramPtr>> groups;
  for (std::size_t i = 0; i < programs.size(); ++i) groups[keys[i]].push_back(programs[i]);

  std::vector<EquivClass> classes;
  classes.reserve(groups.size());
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const ProgramPtr& a, const ProgramPtr& b) { return canonical_less(a->bits(), b->bits()); });
    if (std::adjacent_find(members.begin(), members.end(), [](const ProgramPtr& a, const ProgramPtr& b) {
          return a->bits() == b->bits();
        }) != members.end()) {
      throw std::invalid_argument("partition: program list contains duplicates");
    }
    classes.push_back(EquivClass{k, classes.size(), std::move(members), key});
  }
  return classes;
}

std::vector<std::size_t> refine(std::span<const EquivClass> parents, std::span<const EquivClass> children) {
  std::unordered_map<Bits, std::size_t> parent_of;
  for (const auto& parent : parents) {
    for (const auto& p : parent.members) parent_of.emplace(p->bits(), parent.index);
  }
  std::vector<std::size_t> mapping;
  mapping.reserve(children.size());
  std::vector<std::size_t> covered(parents.size(), 0);
  for (const auto& child : children) {
    if (child.members.empty()) throw RefinementViolation("refine: empty child class");
    std::optional<std::size_t> target;
    for (const auto& p : child.members) {
      const auto it = parent_of.find(p->bits());
      if (it == parent_of.end()) {
        throw RefinementViolation("refine: program " + p->bits() + " has no parent class");
      }
      if (target && *target != it->second) {
        throw RefinementViolation("refine: child class " + std::to_string(child.index) +
                                  " straddles parents " + std::to_string(*target) + " and " +
                                  std::to_string(it->second));
      }
      target = it->second;
    }
    mapping.push_back(*target);
    covered.at(*target) += child.members.size();
  }
  for (const auto& parent : parents) {
    if (covered.at(parent.index) != parent.members.size()) {
      throw RefinementViolation("refine: children do not cover parent class " + std::to_string(parent.index));
    }
  }
  return mapping;
}

}  // namespace udlab
