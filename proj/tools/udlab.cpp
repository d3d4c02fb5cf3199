// udlab: batch front end for the dovetailer measure laboratory.
//
// Exit codes: 0 success, 1 usage error, 2 precondition/validation failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "udlab/dovetailer.hpp"
#include "udlab/enumerate.hpp"
#include "udlab/equivalence.hpp"
#include "udlab/measure.hpp"
#include "udlab/replay.hpp"
#include "udlab/serialize.hpp"

namespace {

using namespace udlab;

struct RunConfig {
  std::size_t max_len = 12;
  std::size_t k = 2;
  std::size_t k_min = 1;
  Natural budget = 1000;
  std::string universe = "default";
  std::string encoding = "A";
  std::string format = "text";
  std::string out;
  unsigned threads = 1;
  Natural tick = 1;
  Natural ticks = 0;
  std::string program;
  std::string tape;
  std::string actual_tape;
  bool actual_tape_set = false;
  std::string severed;
  std::string recording;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Session {
  RunConfig cfg;
  std::string command;
  EncodingId enc = EncodingId::A;
  InputUniverse universe = InputUniverse::default_universe();

  MeasureContext context() const {
    MeasureContext ctx;
    ctx.max_len = cfg.max_len;
    ctx.k = cfg.k;
    ctx.budget = cfg.budget;
    ctx.universe = universe;
    ctx.encoding = enc;
    return ctx;
  }

  // Worker count and output path are left out: output must not depend on them.
  Json config_json() const {
    Json j;
    j["command"] = command;
    j["max_len"] = cfg.max_len;
    j["k"] = cfg.k;
    j["budget"] = cfg.budget;
    j["universe_id"] = universe.id();
    j["encoding_id"] = std::string(encoding_name(enc));
    j["format"] = cfg.format;
    return j;
  }

  std::string context_header() const { return "L,k,T,universe_id,encoding_id"; }
  std::string context_cells(std::size_t k) const {
    return std::to_string(cfg.max_len) + "," + std::to_string(k) + "," + std::to_string(cfg.budget) + "," +
           universe.id() + "," + std::string(encoding_name(enc));
  }
};

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

ProgramPtr require_program(const Session& s) {
  if (s.cfg.program.empty()) throw ValidationError("--program is required for '" + s.command + "'");
  return decode(s.cfg.program, s.enc);
}

Recording load_recording(const Session& s) {
  if (s.cfg.recording.empty()) {
    if (s.cfg.k < 1) throw ValidationError("k must be >= 1");
    return record(require_program(s), parse_tape(s.cfg.tape), s.cfg.k);
  }
  std::ifstream in(s.cfg.recording);
  if (!in) throw ValidationError("cannot read recording '" + s.cfg.recording + "'");
  auto rec = recording_from_json(Json::parse(in), s.enc);
  verify_recording(rec);
  return rec;
}

Tape actual_tape(const Session& s, const Recording& rec) {
  return s.cfg.actual_tape_set ? parse_tape(s.cfg.actual_tape) : rec.tape;
}

std::string cmd_enumerate(const Session& s) {
  const auto programs = enumerate_programs(s.cfg.max_len, s.enc);
  std::ostringstream os;
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    j["programs"] = programs_to_json(programs);
    return dump(j);
  }
  if (s.cfg.format == "csv") {
    os << "L,encoding_id,index,bits,length\n";
    for (std::size_t i = 0; i < programs.size(); ++i) {
      os << s.cfg.max_len << ',' << encoding_name(s.enc) << ',' << i + 1 << ',' << programs[i]->bits() << ','
         << programs[i]->length() << '\n';
    }
    return os.str();
  }
  for (const auto& p : programs) os << p->bits() << '\n';
  return os.str();
}

std::string cmd_kraft(const Session& s) {
  const auto mass = kraft_mass(s.cfg.max_len, s.enc);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    j["kraft_mass"] = mass.str();
    return dump(j);
  }
  if (s.cfg.format == "csv") {
    return "L,encoding_id,kraft_mass\n" + std::to_string(s.cfg.max_len) + "," +
           std::string(encoding_name(s.enc)) + "," + mass.str() + "\n";
  }
  return mass.str() + "\n";
}

std::string cmd_schedule(const Session& s) {
  std::vector<Natural> ticks;
  if (s.cfg.ticks > 0) {
    for (Natural t = 1; t <= s.cfg.ticks; ++t) ticks.push_back(t);
  } else {
    if (s.cfg.tick < 1) throw ValidationError("--tick must be >= 1");
    ticks.push_back(s.cfg.tick);
  }
  std::ostringstream os;
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    Json rows = Json::array();
    for (auto t : ticks) {
      const auto p = schedule_pair(t);
      rows.push_back(Json{{"tick", t}, {"program_index", p.program_index}, {"step_index", p.step_index}});
    }
    j["schedule"] = std::move(rows);
    return dump(j);
  }
  if (s.cfg.format == "csv") os << "tick,program_index,step_index\n";
  for (auto t : ticks) {
    const auto p = schedule_pair(t);
    if (s.cfg.format == "csv") {
      os << t << ',' << p.program_index << ',' << p.step_index << '\n';
    } else {
      os << '(' << p.program_index << ',' << p.step_index << ")\n";
    }
  }
  return os.str();
}

std::string cmd_dovetail(const Session& s) {
  const auto events = dovetail_run(s.cfg.ticks, s.enc);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    j["ticks"] = s.cfg.ticks;
    Json arr = Json::array();
    for (const auto& e : events) {
      Json row;
      row["tick"] = e.tick;
      row["program_index"] = e.program_index;
      row["program_bits"] = e.event.emulated_code;
      row["step_index"] = e.event.emulated_step_index;
      row["state"] = to_json(e.event.emulated_state);
      arr.push_back(std::move(row));
    }
    j["events"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << "tick,program_index,program_bits,step_index,halted,registers,outputs\n";
  for (const auto& e : events) {
    const auto& st = e.event.emulated_state;
    os << e.tick << ',' << e.program_index << ',' << e.event.emulated_code << ',' << e.event.emulated_step_index
       << ',' << (st.halted ? 1 : 0) << ','
       << join_naturals(std::vector<Natural>(st.registers.begin(), st.registers.end())) << ','
       << join_naturals(st.output_log) << '\n';
  }
  return os.str();
}

std::string cmd_partition(const Session& s) {
  const auto programs = enumerate_programs(s.cfg.max_len, s.enc);
  const auto classes = partition(programs, s.universe, s.cfg.k, s.cfg.threads);
  if (s.cfg.format == "json") {
    Json j = partition_to_json(classes, s.universe);
    j["config"] = s.config_json();
    return dump(j);
  }
  std::ostringstream os;
  if (s.cfg.format == "csv") {
    os << s.context_header() << ",class_index,canonical_key_digest,member\n";
    for (const auto& c : classes) {
      for (const auto& m : c.members) {
        os << s.context_cells(c.k) << ',' << c.index << ',' << digest(c.canonical_key) << ',' << m->bits() << '\n';
      }
    }
    return os.str();
  }
  for (const auto& c : classes) {
    os << "class " << c.index << " [" << digest(c.canonical_key) << "]:";
    for (const auto& m : c.members) os << ' ' << m->bits();
    os << '\n';
  }
  return os.str();
}

std::string cmd_measure(const Session& s) {
  const auto ctx = s.context();
  const auto level = level_measures(ctx, s.cfg.threads);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    Json arr = Json::array();
    for (const auto& cm : level) {
      Json row;
      row["index"] = cm.cls.index;
      row["label"] = class_label(cm.cls);
      row["members"] = programs_to_json(cm.cls.members);
      row["measure"] = cm.mu.str();
      arr.push_back(std::move(row));
    }
    j["classes"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << s.context_header() << ",class_index,size,label,measure\n";
  for (const auto& cm : level) {
    os << s.context_cells(ctx.k) << ',' << cm.cls.index << ',' << cm.cls.members.size() << ','
       << quoted(class_label(cm.cls)) << ',' << cm.mu.str() << '\n';
  }
  return os.str();
}

std::string cmd_decompose(const Session& s) {
  const auto ctx = s.context();
  const auto programs = enumerate_programs(ctx.max_len, ctx.encoding);
  const auto classes = partition(programs, ctx.universe, ctx.k, s.cfg.threads);
  const auto rows = decomposition_check(classes, ctx, s.cfg.threads);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"class_index", r.class_index},
                         {"direct", r.direct.str()},
                         {"recursive", r.recursive.str()},
                         {"residual", r.residual.str()}});
    }
    j["classes"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << s.context_header() << ",class_index,direct,recursive,residual\n";
  for (const auto& r : rows) {
    os << s.context_cells(ctx.k) << ',' << r.class_index << ',' << r.direct.str() << ',' << r.recursive.str()
       << ',' << r.residual.str() << '\n';
  }
  return os.str();
}

std::string cmd_relmeasure(const Session& s) {
  const auto ctx = s.context();
  const auto rows = relative_table(ctx, s.cfg.threads);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"parent_k", ctx.k},
                         {"parent_index", r.parent_index},
                         {"child_index", r.child_index},
                         {"parent_measure", r.parent_mu.str()},
                         {"child_measure", r.child_mu.str()},
                         {"relative_measure", r.ratio.str()}});
    }
    j["pairs"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << s.context_header() << ",parent_index,child_index,parent_measure,child_measure,relative_measure\n";
  for (const auto& r : rows) {
    os << s.context_cells(ctx.k) << ',' << r.parent_index << ',' << r.child_index << ',' << r.parent_mu.str()
       << ',' << r.child_mu.str() << ',' << r.ratio.str() << '\n';
  }
  return os.str();
}

std::string cmd_levels(const Session& s) {
  const auto ctx = s.context();
  const auto rows = divergence_report(s.cfg.k_min, s.cfg.k, ctx, s.cfg.threads);
  const auto kraft = kraft_mass(ctx.max_len, ctx.encoding);
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    j["k_min"] = s.cfg.k_min;
    j["kraft_mass"] = kraft.str();
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back(Json{{"k", r.k},
                         {"class_count", r.class_count},
                         {"level_mass", r.mass.str()},
                         {"cumulative", r.cumulative.str()}});
    }
    j["levels"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << s.context_header() << ",class_count,level_mass,cumulative,kraft_mass\n";
  for (const auto& r : rows) {
    os << s.context_cells(r.k) << ',' << r.class_count << ',' << r.mass.str() << ',' << r.cumulative.str() << ','
       << kraft.str() << '\n';
  }
  return os.str();
}

std::string cmd_invariance(const Session& s) {
  const auto rows = invariance_report(s.context(), s.cfg.threads);
  auto cell = [](const std::optional<MeasureValue>& v) { return v ? v->str() : std::string(); };
  if (s.cfg.format == "json") {
    Json j;
    j["config"] = s.config_json();
    Json arr = Json::array();
    for (const auto& r : rows) {
      Json row;
      row["parent_label"] = r.parent_label;
      row["child_label"] = r.child_label;
      row["relative_measure_A"] = r.ratio_a ? Json(r.ratio_a->str()) : Json(nullptr);
      row["relative_measure_B"] = r.ratio_b ? Json(r.ratio_b->str()) : Json(nullptr);
      arr.push_back(std::move(row));
    }
    j["pairs"] = std::move(arr);
    return dump(j);
  }
  std::ostringstream os;
  os << "L,k,T,universe_id,parent_label,child_label,relative_measure_A,relative_measure_B\n";
  for (const auto& r : rows) {
    os << s.cfg.max_len << ',' << s.cfg.k << ',' << s.cfg.budget << ',' << s.universe.id() << ','
       << quoted(r.parent_label) << ',' << quoted(r.child_label) << ',' << cell(r.ratio_a) << ','
       << cell(r.ratio_b) << '\n';
  }
  return os.str();
}

std::string cmd_record(const Session& s) {
  if (s.cfg.k < 1) throw ValidationError("k must be >= 1");
  const auto rec = record(require_program(s), parse_tape(s.cfg.tape), s.cfg.k);
  return dump(to_json(rec));
}

std::string cmd_replay(const Session& s) {
  const auto rec = load_recording(s);
  const auto before = steps_executed_on_this_thread();
  const auto trace = playback(rec);
  const auto steps = steps_executed_on_this_thread() - before;
  Json j;
  j["config"] = s.config_json();
  j["program_bits"] = rec.program->bits();
  j["machine_steps_during_playback"] = steps;
  j["trace"] = to_json(trace);
  return dump(j);
}

std::string cmd_hybrid(const Session& s) {
  const auto rec = load_recording(s);
  const auto tape = actual_tape(s, rec);
  const auto result = hybrid_run(rec, tape);
  Json j;
  j["config"] = s.config_json();
  j["program_bits"] = rec.program->bits();
  j["recorded_tape"] = rec.tape;
  j["actual_tape"] = tape;
  j["switch_step"] = result.switch_step ? Json(*result.switch_step) : Json(nullptr);
  j["trace"] = to_json(result.trace);
  return dump(j);
}

std::string cmd_sever(const Session& s) {
  const auto rec = load_recording(s);
  const auto tape = actual_tape(s, rec);
  SeverancePlan plan;
  if (s.cfg.severed == "all") {
    plan = SeverancePlan::all(rec.k);
  } else {
    for (auto j : parse_tape(s.cfg.severed)) plan.severed_steps.insert(static_cast<std::size_t>(j));
  }
  const auto result = sever_and_project(rec, plan, tape, s.universe);
  Json j;
  j["config"] = s.config_json();
  j["program_bits"] = rec.program->bits();
  j["recorded_tape"] = rec.tape;
  j["actual_tape"] = tape;
  j["severed_steps"] = plan.severed_steps;
  j["counterfactually_equivalent"] = result.counterfactually_equivalent;
  j["trace"] = to_json(result.trace);
  return dump(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"udlab: universal dovetailer measure laboratory"};
  app.set_config("--config", "", "key = value config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  if (const char* env = std::getenv("UDLAB_THREADS")) {
    try {
      cfg.threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "error: UDLAB_THREADS must be a positive integer\n";
      return 1;
    }
  }

  app.add_option("-L,--max-len", cfg.max_len, "maximum program length in bits")->check(CLI::Range(4, 40));
  app.add_option("-k", cfg.k, "number of steps (level)");
  app.add_option("--k-min", cfg.k_min, "first level for 'levels'")->check(CLI::PositiveNumber);
  app.add_option("-T,--budget", cfg.budget, "host step budget standing in for 'eventually'");
  app.add_option("--universe", cfg.universe, "'default' or path to a JSON list of tapes");
  app.add_option("--encoding", cfg.encoding, "opcode table")->check(CLI::IsMember({"A", "B"}));
  app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--out", cfg.out, "write output to this file instead of stdout");
  app.add_option("--threads", cfg.threads, "worker threads (default: UDLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--tick", cfg.tick, "tick for 'schedule'");
  app.add_option("--ticks", cfg.ticks, "tick count for 'dovetail' / 'schedule'");
  app.add_option("--program", cfg.program, "program as a 0/1 string");
  app.add_option("--tape", cfg.tape, "input tape, comma-separated naturals");
  auto* actual = app.add_option("--actual-tape", cfg.actual_tape, "tape the hybrid/severed system runs on");
  app.add_option("--severed", cfg.severed, "comma-separated step indices, or 'all'");
  app.add_option("--recording", cfg.recording, "recording JSON produced by 'record'");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"enumerate", "list programs up to --max-len in canonical order"},
      {"kraft", "Kraft mass of programs up to --max-len"},
      {"schedule", "dovetailer schedule pair for --tick (or ticks 1..--ticks)"},
      {"dovetail", "event log of a dovetailer run for --ticks ticks"},
      {"partition", "k-step counterfactual equivalence classes"},
      {"measure", "measure of every class at level k"},
      {"decompose", "recursive decomposition residuals"},
      {"relmeasure", "relative measures between levels k and k+1"},
      {"levels", "level masses and cumulative sums for k-min..k"},
      {"record", "record a program's trace"},
      {"replay", "play a recording back without computing"},
      {"hybrid", "replay, switching to live computation at the first divergence"},
      {"sever", "severed-transition projection and counterfactual verdict"},
      {"invariance", "relative measures under encodings A and B"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Session session;
  session.cfg = cfg;
  session.cfg.actual_tape_set = actual->count() > 0;
  session.command = app.get_subcommands().front()->get_name();

  std::string output;
  try {
    session.enc = parse_encoding(cfg.encoding);
    if (cfg.universe != "default") {
      std::ifstream in(cfg.universe);
      if (!in) throw ValidationError("cannot read universe file '" + cfg.universe + "'");
      session.universe = universe_from_json(Json::parse(in));
    }
    const auto& c = session.command;
    const bool needs_k = c == "partition" || c == "measure" || c == "decompose" || c == "relmeasure" ||
                         c == "levels" || c == "record" || c == "invariance";
    if (needs_k && cfg.k < 1) throw ValidationError("k must be >= 1");
    if (c == "levels" && cfg.k_min > cfg.k) throw ValidationError("--k-min must not exceed -k");

    if (c == "enumerate") output = cmd_enumerate(session);
    else if (c == "kraft") output = cmd_kraft(session);
    else if (c == "schedule") output = cmd_schedule(session);
    else if (c == "dovetail") output = cmd_dovetail(session);
    else if (c == "partition") output = cmd_partition(session);
    else if (c == "measure") output = cmd_measure(session);
    else if (c == "decompose") output = cmd_decompose(session);
    else if (c == "relmeasure") output = cmd_relmeasure(session);
    else if (c == "levels") output = cmd_levels(session);
    else if (c == "record") output = cmd_record(session);
    else if (c == "replay") output = cmd_replay(session);
    else if (c == "hybrid") output = cmd_hybrid(session);
    else if (c == "sever") output = cmd_sever(session);
    else if (c == "invariance") output = cmd_invariance(session);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (cfg.out.empty()) {
    std::cout << output;
  } else {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << cfg.out << "'\n";
      return 2;
    }
    out << output;
  }
  return 0;
}
