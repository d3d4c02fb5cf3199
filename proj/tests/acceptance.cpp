// Acceptance suite: one line per criterion, non-zero exit if any fails.
// Every tolerance is exact (rational equality / inequality); each criterion
// also has a wall-clock limit.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "udlab/dovetailer.hpp"
#include "udlab/enumerate.hpp"
#include "udlab/equivalence.hpp"
#include "udlab/measure.hpp"
#include "udlab/replay.hpp"

namespace {

using namespace udlab;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) detail << what;
    ok = ok && condition;
  }
};

MeasureContext context(std::size_t L, std::size_t k, Natural T) {
  MeasureContext ctx;
  ctx.max_len = L;
  ctx.k = k;
  ctx.budget = T;
  return ctx;
}

std::vector<std::vector<Bits>> member_bits(const std::vector<EquivClass>& classes) {
  std::vector<std::vector<Bits>> out;
  for (const auto& c : classes) {
    std::vector<Bits> m;
    for (const auto& p : c.members) m.push_back(p->bits());
    out.push_back(std::move(m));
  }
  return out;
}

void prefix_free_and_kraft(Check& c) {
  std::set<Bits> valid;
  for (const auto& p : oracle::exhaustive_programs(14)) valid.insert(p->bits());
  for (const auto& bits : valid) {
    for (std::size_t len = 1; len < bits.size(); ++len) {
      c.expect(!valid.contains(bits.substr(0, len)), "prefix violation: " + bits);
    }
  }
  const std::map<std::size_t, std::string> expected = {{4, "1/16"}, {8, "9/128"}, {10, "11/128"}};
  for (const auto& [L, fraction] : expected) {
    const auto mass = kraft_mass(L);
    c.expect(mass == MeasureValue::parse(fraction), "kraft_mass(" + std::to_string(L) + ") = " + mass.str());
    c.expect(mass == oracle::exhaustive_kraft(L), "kraft_mass disagrees with exhaustive decode at " +
                                                       std::to_string(L));
  }
}

void partition_laws(Check& c) {
  const auto programs = enumerate_programs(12);
  const auto& universe = InputUniverse::default_universe();
  std::vector<std::vector<EquivClass>> levels;
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto classes = partition(programs, universe, k, 1);
    std::set<Bits> seen;
    std::size_t total = 0;
    for (const auto& cls : classes) {
      c.expect(!cls.members.empty(), "empty class");
      for (const auto& m : cls.members) c.expect(seen.insert(m->bits()).second, "overlap on " + m->bits());
      total += cls.members.size();
    }
    c.expect(total == programs.size() && seen.size() == programs.size(), "classes do not cover P");
    const auto reference = member_bits(classes);
    auto shuffled = programs;
    std::mt19937 rng(static_cast<unsigned>(k));
    for (int round = 0; round < 3; ++round) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (unsigned workers : {1u, 4u}) {
        c.expect(member_bits(partition(shuffled, universe, k, workers)) == reference,
                 "partition depends on order/workers at k=" + std::to_string(k));
      }
    }
    levels.push_back(classes);
  }
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    try {
      const auto mapping = refine(levels[k], levels[k + 1]);
      c.expect(mapping.size() == levels[k + 1].size(), "refinement map is not total");
      for (auto parent : mapping) c.expect(parent < levels[k].size(), "refinement target out of range");
    } catch (const RefinementViolation& e) {
      c.expect(false, e.what());
    }
  }
}

void decomposition_identity(Check& c) {
  for (std::size_t L : {8, 10, 12}) {
    const auto programs = enumerate_programs(L);
    for (std::size_t k : {1, 2, 3}) {
      const auto classes = partition(programs, InputUniverse::default_universe(), k);
      for (Natural T : {0, 1, 100}) {
        const auto ctx = context(L, k, T);
        for (const auto& row : decomposition_check(classes, ctx, 4)) {
          c.expect(row.residual.is_zero(), "nonzero residual " + row.residual.str() + " at " + ctx.describe());
        }
      }
    }
  }
}

void delta_remark(Check& c) {
  const auto programs = enumerate_programs(12);
  for (std::size_t k : {1, 2, 3}) {
    const auto ctx = context(12, k, 1000);
    const auto classes = partition(programs, ctx.universe, k);
    for (const auto& p : programs) {
      if (p->uses_emulation()) continue;
      int total = 0;
      for (const auto& cls : classes) total += u_weight(*p, cls, ctx);
      c.expect(total == 1, "sum of u_weight for " + p->bits() + " is " + std::to_string(total));
    }
  }
}

void budget_monotonicity_and_child_bound(Check& c) {
  const std::array<Natural, 5> budgets = {0, 1, 10, 100, 1000};
  const auto programs = enumerate_programs(12);
  for (std::size_t k : {1, 2, 3}) {
    const auto classes = partition(programs, InputUniverse::default_universe(), k);
    for (const auto& p : programs) {
      for (const auto& cls : classes) {
        int last = 0;
        for (auto T : budgets) {
          const int u = u_weight(*p, cls, context(12, k, T));
          c.expect(u >= last, "u_weight decreased in T for " + p->bits());
          last = u;
        }
      }
    }
  }
  for (auto T : budgets) {
    for (const auto& row : relative_table(context(10, 1, T), 4)) {
      c.expect(row.child_mu <= row.parent_mu, "child measure exceeds parent at T=" + std::to_string(T));
    }
  }
}

void divergence(Check& c) {
  const auto ctx = context(10, 1, 100);
  const auto rows = divergence_report(1, 8, ctx, 4);
  const auto bound = MeasureValue::fraction(8, 1) * kraft_mass(10);
  c.expect(rows.size() == 8, "expected 8 levels");
  c.expect(rows.back().cumulative >= bound,
           "cumulative " + rows.back().cumulative.str() + " < 8 * kraft = " + bound.str());
}

void schedule(Check& c) {
  const auto expected = oracle::diagonal_schedule(10000);
  for (std::size_t t = 1; t <= expected.size(); ++t) {
    c.expect(schedule_pair(t) == expected[t - 1], "schedule mismatch at tick " + std::to_string(t));
  }
  const Natural last = 140;
  const auto events = dovetail_run(last * (last - 1) / 2);
  std::map<std::size_t, Natural> done;
  std::size_t next = 0;
  for (Natural d = 2; d <= last; ++d) {
    for (; next < d * (d - 1) / 2; ++next) done[events[next].program_index]++;
    for (std::size_t i = 1; i <= d + 1; ++i) {
      c.expect(done[i] == completed_steps(i, d),
               "program " + std::to_string(i) + " after diagonal " + std::to_string(d));
    }
  }
}

void mga_witness(Check& c) {
  const auto echo = Program::assemble({ops::in(0), ops::out(0)});
  const Tape recorded{1};
  const auto rec = record(echo, recorded, 2);
  const auto severed = sever_and_project(rec, SeverancePlan::all(rec.k), recorded);
  c.expect(severed.trace == run_trace(*echo, recorded, 2).trace, "severed projection differs from live run");
  c.expect(!severed.counterfactually_equivalent, "fully severed system judged counterfactually equivalent");
  const auto perturbed = hybrid_run(rec, {0});
  c.expect(perturbed.switch_step == std::optional<std::size_t>{1}, "hybrid did not switch at step 1");
  c.expect(!hybrid_run(rec, recorded).switch_step.has_value(), "hybrid switched on the recorded tape");
  const auto before = steps_executed_on_this_thread();
  const auto trace = playback(rec);
  c.expect(steps_executed_on_this_thread() == before, "playback executed machine steps");
  c.expect(trace == rec.trace, "playback differs from recording");
}

std::string run_cli(const std::string& args, int& status) {
  const std::string cmd = std::string(UDLAB_CLI_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

void cli_determinism(Check& c) {
  const std::vector<std::string> commands = {
      "enumerate",
      "enumerate --format json",
      "kraft --max-len 8",
      "kraft --format csv",
      "schedule --tick 5",
      "schedule --ticks 50 --format json",
      "dovetail --ticks 300",
      "dovetail --ticks 50 --format json",
      "partition",
      "partition --max-len 8 -k 1 --format json",
      "partition -k 3 --format csv",
      "measure",
      "measure --format json",
      "decompose -k 3 -T 100",
      "relmeasure",
      "relmeasure --format json -L 10 -k 1",
      "levels -L 10 -k 8 -T 100",
      "record --program 0100000011001111 --tape 1 -k 2",
      "replay --program 10001111 -k 4",
      "hybrid --program 0100000011001111 --tape 1 --actual-tape 0 -k 2",
      "sever --program 0100000011001111 --tape 1 --severed all -k 2",
      "invariance -L 10 -k 1 -T 100",
      "measure --encoding B --format csv"};
  for (const auto& args : commands) {
    std::string reference;
    bool first = true;
    for (const char* threads : {"1", "4"}) {
      for (int run = 0; run < 3; ++run) {
        int status = 0;
        const auto out = run_cli(args + " --threads " + threads, status);
        c.expect(status == 0, "'" + args + "' exited with status " + std::to_string(status));
        if (first) {
          reference = out;
          first = false;
        }
        c.expect(out == reference, "output of '" + args + "' differs across runs/threads");
      }
    }
  }
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "prefix-free code and Kraft masses", 10, prefix_free_and_kraft},
      {2, "partition laws on P<=12, k=1..4", 60, partition_laws},
      {3, "recursive decomposition residuals exactly zero", 120, decomposition_identity},
      {4, "delta remark for ordinary programs", 60, delta_remark},
      {5, "budget monotonicity and child bound", 120, budget_monotonicity_and_child_bound},
      {6, "level-mass divergence over k=1..8", 60, divergence},
      {7, "dovetailer schedule and completed steps", 5, schedule},
      {8, "severed recording vs counterfactual equivalence", 5, mga_witness},
      {9, "CLI determinism across runs and thread counts", 60, cli_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(seconds < criterion.limit_seconds, "exceeded time limit");
    if (!check.ok) ++failures;
    std::printf("[%s] %d. %s (%.2f s, limit %.0f s)%s%s\n", check.ok ? "PASS" : "FAIL", criterion.id,
                criterion.name.c_str(), seconds, criterion.limit_seconds, check.ok ? "" : ": ",
                check.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
