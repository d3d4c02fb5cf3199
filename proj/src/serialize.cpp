#include "udlab/serialize.hpp"

#include <charconv>
#include <stdexcept>

namespace udlab {

Json to_json(const SemanticState& state) {
  Json j;
  j["registers"] = state.registers;
  j["input_cursor"] = state.input_cursor;
  j["output_log"] = state.output_log;
  j["halted"] = state.halted;
  if (state.emulation && state.emulation->state) {
    Json e;
    e["emulated_code"] = state.emulation->emulated_code;
    e["emulated_step_index"] = state.emulation->step_index;
    e["emulated_state"] = to_json(*state.emulation->state);
    j["emulation"] = std::move(e);
  } else {
    j["emulation"] = nullptr;
  }
  return j;
}

SemanticState state_from_json(const Json& j) {
  SemanticState s;
  const auto regs = j.at("registers").get<std::vector<Natural>>();
  if (regs.size() != kRegisterCount) throw std::invalid_argument("state needs exactly 4 registers");
  std::copy(regs.begin(), regs.end(), s.registers.begin());
  s.input_cursor = j.at("input_cursor").get<Natural>();
  s.output_log = j.at("output_log").get<std::vector<Natural>>();
  s.halted = j.at("halted").get<bool>();
  if (const auto& e = j.at("emulation"); !e.is_null()) {
    s.emulation = EmulationRecord{e.at("emulated_code").get<Bits>(), e.at("emulated_step_index").get<Natural>(),
                                  std::make_shared<const SemanticState>(state_from_json(e.at("emulated_state")))};
  }
  return s;
}

Json to_json(const Trace& trace) {
  Json arr = Json::array();
  for (const auto& s : trace) arr.push_back(to_json(s));
  return arr;
}

Json to_json(const Recording& rec) {
  Json j;
  j["program_bits"] = rec.program->bits();
  j["tape"] = rec.tape;
  j["k"] = rec.k;
  j["trace"] = to_json(rec.trace);
  return j;
}

Recording recording_from_json(const Json& j, EncodingId enc) {
  Recording rec;
  rec.program = decode(j.at("program_bits").get<std::string>(), enc);
  rec.tape = j.at("tape").get<Tape>();
  rec.k = j.at("k").get<std::size_t>();
  for (const auto& s : j.at("trace")) rec.trace.push_back(state_from_json(s));
  return rec;
}

Json programs_to_json(const std::vector<ProgramPtr>& programs) {
  Json arr = Json::array();
  for (const auto& p : programs) arr.push_back(p->bits());
  return arr;
}

Json partition_to_json(const std::vector<EquivClass>& classes, const InputUniverse& universe) {
  Json j;
  j["k"] = classes.empty() ? 0 : classes.front().k;
  j["universe_id"] = universe.id();
  Json arr = Json::array();
  for (const auto& c : classes) {
    Json cj;
    cj["index"] = c.index;
    cj["canonical_key_digest"] = digest(c.canonical_key);
    Json members = Json::array();
    for (const auto& m : c.members) members.push_back(m->bits());
    cj["members"] = std::move(members);
    arr.push_back(std::move(cj));
  }
  j["classes"] = std::move(arr);
  return j;
}

InputUniverse universe_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("universe file must hold a JSON array of tapes");
  std::vector<Tape> tapes;
  for (const auto& t : j) tapes.push_back(t.get<Tape>());
  return InputUniverse::from_tapes(std::move(tapes));
}

std::string tape_to_string(const Tape& tape) { return join_naturals(tape, ','); }

Tape parse_tape(std::string_view text) {
  Tape tape;
  if (text.empty()) return tape;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    const auto cell = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    Natural v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
      throw std::invalid_argument("bad tape cell '" + std::string(cell) + "'");
    }
    tape.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return tape;
}

std::string join_naturals(const std::vector<Natural>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace udlab
