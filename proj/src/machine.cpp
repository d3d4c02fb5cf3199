#include "udlab/machine.hpp"

#include <algorithm>
#include <utility>

#include "udlab/dovetailer.hpp"

namespace udlab {

namespace {

constexpr std::array<std::string_view, kOpKindCount> kMnemonics = {
    "HALT", "INC", "DEC", "OUT", "IN", "WHILE", "WEND", "EXEC", "DVT", "END"};

// Opcode per OpKind, in enum order.
constexpr std::array<unsigned, kOpKindCount> kCodesA = {
    0b0000, 0b0001, 0b0010, 0b0011, 0b0100, 0b0101, 0b0110, 0b0111, 0b1000, 0b1111};
constexpr std::array<unsigned, kOpKindCount> kCodesB = {
    0b1000, 0b0011, 0b0010, 0b0001, 0b0100, 0b0101, 0b0110, 0b0111, 0b0000, 0b1111};

const Tape kEmptyTape{};

thread_local std::uint64_t tl_steps = 0;

std::string nibble(unsigned value, std::size_t width) {
  std::string out(width, '0');
  for (std::size_t i = 0; i < width; ++i) {
    if (value & (1u << (width - 1 - i))) out[i] = '1';
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view bits, std::size_t offset, const EncodingTable& table)
      : bits_(bits), pos_(offset), table_(table) {}

  // Parses instructions up to and including the closing END (top level) or
  // WEND (inside a loop body).
  bool sequence(bool in_loop, std::vector<Instruction>& out) {
    for (;;) {
      if (pos_ + kOpcodeWidth > bits_.size()) return fail(DecodeErrorKind::Truncated);
      const std::size_t at = pos_;
      const auto kind = table_.kind_of(read(kOpcodeWidth));
      if (!kind) return fail(DecodeErrorKind::UnknownOpcode, at);
      Instruction ins;
      ins.kind = *kind;
      switch (*kind) {
        case OpKind::End:
          if (in_loop) return fail(DecodeErrorKind::UnbalancedLoop, at);
          return true;
        case OpKind::Wend:
          if (!in_loop) return fail(DecodeErrorKind::UnbalancedLoop, at);
          return true;
        case OpKind::Halt:
        case OpKind::Dvt:
          break;
        case OpKind::Inc:
        case OpKind::Dec:
        case OpKind::Out:
        case OpKind::In:
        case OpKind::While:
          if (pos_ + kRegisterWidth > bits_.size()) return fail(DecodeErrorKind::Truncated);
          ins.reg = static_cast<std::uint8_t>(read(kRegisterWidth));
          if (*kind == OpKind::While && !sequence(true, ins.body)) return false;
          break;
        case OpKind::Exec: {
          std::vector<Instruction> inner;
          if (!sequence(false, inner)) return false;
          ins.embedded = std::make_shared<const Program>(std::move(inner), table_.id());
          break;
        }
      }
      out.push_back(std::move(ins));
    }
  }

  std::size_t position() const { return pos_; }
  std::optional<DecodeErrorKind> error() const { return error_; }
  std::size_t error_offset() const { return error_offset_; }

 private:
  unsigned read(std::size_t width) {
    unsigned v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 1) | (bits_[pos_ + i] == '1' ? 1u : 0u);
    pos_ += width;
    return v;
  }

  bool fail(DecodeErrorKind kind) { return fail(kind, bits_.size()); }
  bool fail(DecodeErrorKind kind, std::size_t at) {
    error_ = kind;
    error_offset_ = at;
    return false;
  }

  std::string_view bits_;
  std::size_t pos_;
  const EncodingTable& table_;
  std::optional<DecodeErrorKind> error_;
  std::size_t error_offset_ = 0;
};

void encode_into(const std::vector<Instruction>& instructions, const EncodingTable& table, Bits& out) {
  for (const auto& ins : instructions) {
    out += table.opcode_bits(ins.kind);
    if (takes_register(ins.kind)) out += nibble(ins.reg, kRegisterWidth);
    if (ins.kind == OpKind::While) {
      encode_into(ins.body, table, out);
      out += table.opcode_bits(OpKind::Wend);
    } else if (ins.kind == OpKind::Exec) {
      out += ins.embedded->bits();
    }
  }
}

void flatten(const std::vector<Instruction>& instructions, std::vector<FlatOp>& code, bool& emulates) {
  for (const auto& ins : instructions) {
    FlatOp op{ins.kind, ins.reg, 0, nullptr};
    if (ins.kind == OpKind::While) {
      const auto head = static_cast<std::uint32_t>(code.size());
      code.push_back(op);
      flatten(ins.body, code, emulates);
      code.push_back(FlatOp{OpKind::Wend, 0, head, nullptr});
      code[head].target = static_cast<std::uint32_t>(code.size());
      continue;
    }
    if (ins.kind == OpKind::Exec) {
      op.embedded = ins.embedded.get();
      emulates = true;
    }
    if (ins.kind == OpKind::Dvt) emulates = true;
    code.push_back(op);
  }
}

void disassemble_into(const std::vector<Instruction>& instructions, std::string& out) {
  bool first = true;
  for (const auto& ins : instructions) {
    if (!first) out += "; ";
    first = false;
    out += mnemonic(ins.kind);
    if (takes_register(ins.kind)) out += " r" + std::to_string(ins.reg);
    if (ins.kind == OpKind::While) {
      out += " {";
      disassemble_into(ins.body, out);
      out += "}";
    } else if (ins.kind == OpKind::Exec) {
      out += " [";
      disassemble_into(ins.embedded->instructions(), out);
      out += "]";
    }
  }
}

}  // namespace

std::string_view mnemonic(OpKind kind) { return kMnemonics[static_cast<std::size_t>(kind)]; }

bool takes_register(OpKind kind) {
  switch (kind) {
    case OpKind::Inc:
    case OpKind::Dec:
    case OpKind::Out:
    case OpKind::In:
    case OpKind::While:
      return true;
    default:
      return false;
  }
}

std::string_view encoding_name(EncodingId id) { return id == EncodingId::A ? "A" : "B"; }

EncodingId parse_encoding(std::string_view name) {
  if (name == "A") return EncodingId::A;
  if (name == "B") return EncodingId::B;
  throw std::invalid_argument("unknown encoding '" + std::string(name) + "' (expected A or B)");
}

EncodingTable::EncodingTable(EncodingId id, const std::array<unsigned, kOpKindCount>& codes)
    : id_(id), code_of_(codes) {
  for (std::size_t k = 0; k < kOpKindCount; ++k) by_code_[codes[k]] = static_cast<OpKind>(k);
}

const EncodingTable& EncodingTable::get(EncodingId id) {
  static const EncodingTable a(EncodingId::A, kCodesA);
  static const EncodingTable b(EncodingId::B, kCodesB);
  return id == EncodingId::A ? a : b;
}

std::string EncodingTable::opcode_bits(OpKind kind) const { return nibble(code_of(kind), kOpcodeWidth); }

std::string_view decode_error_name(DecodeErrorKind kind) {
  switch (kind) {
    case DecodeErrorKind::UnknownOpcode: return "UnknownOpcode";
    case DecodeErrorKind::UnbalancedLoop: return "UnbalancedLoop";
    case DecodeErrorKind::TrailingBits: return "TrailingBits";
    case DecodeErrorKind::Truncated: return "Truncated";
  }
  return "?";
}

DecodeError::DecodeError(DecodeErrorKind kind, std::size_t offset)
    : std::runtime_error(std::string(decode_error_name(kind)) + " at bit " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

Program::Program(std::vector<Instruction> instructions, EncodingId enc)
    : encoding_(enc), instructions_(std::move(instructions)) {
  const auto& table = EncodingTable::get(enc);
  encode_into(instructions_, table, bits_);
  bits_ += table.opcode_bits(OpKind::End);
  flatten(instructions_, code_, uses_emulation_);
  code_.push_back(FlatOp{OpKind::End, 0, 0, nullptr});
}

ProgramPtr Program::assemble(std::vector<Instruction> instructions, EncodingId enc) {
  return std::make_shared<const Program>(std::move(instructions), enc);
}

std::string Program::disassemble() const {
  std::string out;
  disassemble_into(instructions_, out);
  return out.empty() ? std::string("(empty)") : out;
}

DecodeOutcome try_decode(std::string_view bits, EncodingId enc) {
  DecodeOutcome outcome;
  Parser parser(bits, 0, EncodingTable::get(enc));
  std::vector<Instruction> instructions;
  if (!parser.sequence(false, instructions)) {
    outcome.error = parser.error();
    outcome.error_offset = parser.error_offset();
    return outcome;
  }
  if (parser.position() != bits.size()) {
    outcome.error = DecodeErrorKind::TrailingBits;
    outcome.error_offset = parser.position();
    return outcome;
  }
  outcome.program = Program::assemble(std::move(instructions), enc);
  return outcome;
}

ProgramPtr decode(std::string_view bits, EncodingId enc) {
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("program bits must be '0'/'1' characters");
  }
  auto outcome = try_decode(bits, enc);
  if (outcome.error) throw DecodeError(*outcome.error, outcome.error_offset);
  return outcome.program;
}

Bits encode(const std::vector<Instruction>& instructions, EncodingId enc) {
  Bits out;
  encode_into(instructions, EncodingTable::get(enc), out);
  return out;
}

namespace ops {
Instruction halt() { return {OpKind::Halt, 0, {}, nullptr}; }
Instruction inc(std::uint8_t r) { return {OpKind::Inc, r, {}, nullptr}; }
Instruction dec(std::uint8_t r) { return {OpKind::Dec, r, {}, nullptr}; }
Instruction out(std::uint8_t r) { return {OpKind::Out, r, {}, nullptr}; }
Instruction in(std::uint8_t r) { return {OpKind::In, r, {}, nullptr}; }
Instruction loop(std::uint8_t r, std::vector<Instruction> body) {
  return {OpKind::While, r, std::move(body), nullptr};
}
Instruction exec(ProgramPtr embedded) { return {OpKind::Exec, 0, {}, std::move(embedded)}; }
Instruction dvt() { return {OpKind::Dvt, 0, {}, nullptr}; }
}  // namespace ops

bool operator==(const EmulationRecord& a, const EmulationRecord& b) {
  if (a.emulated_code != b.emulated_code || a.step_index != b.step_index) return false;
  if (a.state == b.state) return true;
  if (!a.state || !b.state) return false;
  return *a.state == *b.state;
}

bool operator==(const SemanticState& a, const SemanticState& b) {
  return a.registers == b.registers && a.input_cursor == b.input_cursor &&
         a.halted == b.halted && a.output_log == b.output_log && a.emulation == b.emulation;
}

Configuration::Configuration() = default;
Configuration::~Configuration() = default;
Configuration::Configuration(Configuration&&) noexcept = default;
Configuration& Configuration::operator=(Configuration&&) noexcept = default;

Configuration::Configuration(const Configuration& other)
    : registers(other.registers),
      input_cursor(other.input_cursor),
      output_log(other.output_log),
      position(other.position),
      halted(other.halted),
      last_emulation(other.last_emulation),
      emulation(other.emulation ? std::make_unique<EmulationContext>(*other.emulation) : nullptr) {}

Configuration& Configuration::operator=(const Configuration& other) {
  if (this != &other) {
    Configuration copy(other);
    *this = std::move(copy);
  }
  return *this;
}

SemanticState observe(const Configuration& config) {
  return SemanticState{config.registers, config.input_cursor, config.output_log, config.halted,
                       config.last_emulation};
}

std::uint64_t steps_executed_on_this_thread() { return tl_steps; }

void advance(Configuration& c, const Program& program, const Tape& tape) {
  ++tl_steps;
  if (c.halted) return;
  c.last_emulation.reset();

  const auto code = program.code();
  const FlatOp& op = code[c.position];
  switch (op.kind) {
    case OpKind::End:
    case OpKind::Halt:
      c.halted = true;
      return;
    case OpKind::Inc:
      ++c.registers[op.reg];
      ++c.position;
      break;
    case OpKind::Dec:
      if (c.registers[op.reg] > 0) --c.registers[op.reg];
      ++c.position;
      break;
    case OpKind::Out:
      c.output_log.push_back(c.registers[op.reg]);
      ++c.position;
      break;
    case OpKind::In:
      c.registers[op.reg] = c.input_cursor < tape.size() ? tape[c.input_cursor] : 0;
      ++c.input_cursor;
      ++c.position;
      break;
    case OpKind::While:
      c.position = c.registers[op.reg] != 0 ? c.position + 1 : op.target;
      break;
    case OpKind::Wend:
      c.position = op.target;
      break;
    case OpKind::Exec: {
      if (!c.emulation) {
        c.emulation = std::make_unique<EmulationContext>();
        c.emulation->exec.emplace();
      }
      auto& ctx = *c.emulation->exec;
      advance(ctx.inner, *op.embedded, kEmptyTape);
      ++ctx.steps;
      c.last_emulation = EmulationRecord{op.embedded->bits(), ctx.steps,
                                         std::make_shared<const SemanticState>(observe(ctx.inner))};
      if (!ctx.inner.halted) return;
      c.emulation.reset();
      ++c.position;
      break;
    }
    case OpKind::Dvt: {
      if (!c.emulation) {
        c.emulation = std::make_unique<EmulationContext>();
        c.emulation->dovetail.emplace();
      }
      c.last_emulation = dovetail_tick(*c.emulation->dovetail, program.encoding()).record;
      return;
    }
  }
  if (code[c.position].kind == OpKind::End) c.halted = true;
}

Configuration step(const Configuration& config, const Program& program, const Tape& tape) {
  Configuration next(config);
  advance(next, program, tape);
  return next;
}

void collect_events(const Bits& host, const SemanticState& state, std::vector<EmulationEvent>& out) {
  if (!state.emulation || !state.emulation->state) return;
  const auto& rec = *state.emulation;
  out.push_back(EmulationEvent{host, rec.emulated_code, rec.step_index, *rec.state});
  collect_events(rec.emulated_code, *rec.state, out);
}

RunResult run_trace(const Program& program, const Tape& tape, std::size_t k, std::size_t budget) {
  if (k < 1) throw std::invalid_argument("run_trace: k must be >= 1");
  if (budget < k) throw std::invalid_argument("run_trace: budget must be >= k");
  RunResult result;
  result.trace.reserve(k);
  Configuration config;
  for (std::size_t j = 0; j < k; ++j) {
    if (config.halted) {
      result.trace.push_back(result.trace.back());
      continue;
    }
    advance(config, program, tape);
    result.trace.push_back(observe(config));
    collect_events(program.bits(), result.trace.back(), result.events);
  }
  return result;
}

std::vector<Configuration> run_configurations(const Program& program, const Tape& tape, std::size_t k) {
  std::vector<Configuration> frames;
  frames.reserve(k);
  Configuration config;
  for (std::size_t j = 0; j < k; ++j) {
    advance(config, program, tape);
    frames.push_back(config);
  }
  return frames;
}

}  // namespace udlab
