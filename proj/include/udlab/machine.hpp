#pragma once

// Reference prefix-free universal machine: a four-register counter machine
// with structured loops and two emulation meta-instructions (EXEC, DVT).
//
// Programs are ASCII '0'/'1' strings. Every opcode is four bits; register
// operands add two more. A program is a balanced instruction sequence closed
// by a single top-level END, which makes the code prefix-free.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace udlab {

using Bits = std::string;
using Natural = std::uint64_t;
using Tape = std::vector<Natural>;

inline constexpr std::size_t kRegisterCount = 4;
inline constexpr std::size_t kOpcodeWidth = 4;
inline constexpr std::size_t kRegisterWidth = 2;

using Registers = std::array<Natural, kRegisterCount>;

enum class OpKind : std::uint8_t { Halt, Inc, Dec, Out, In, While, Wend, Exec, Dvt, End };
inline constexpr std::size_t kOpKindCount = 10;

std::string_view mnemonic(OpKind kind);
bool takes_register(OpKind kind);

enum class EncodingId : std::uint8_t { A, B };

std::string_view encoding_name(EncodingId id);
EncodingId parse_encoding(std::string_view name);

/// Bit-exact opcode table. Encoding A is the reference table; B permutes
/// HALT<->DVT and INC<->OUT while keeping semantics.
class EncodingTable {
 public:
  static const EncodingTable& get(EncodingId id);

  EncodingId id() const { return id_; }
  std::optional<OpKind> kind_of(unsigned code) const { return by_code_.at(code); }
  unsigned code_of(OpKind kind) const { return code_of_[static_cast<std::size_t>(kind)]; }
  /// Four-character opcode string for `kind`.
  std::string opcode_bits(OpKind kind) const;

 private:
  EncodingTable(EncodingId id, const std::array<unsigned, kOpKindCount>& codes);

  EncodingId id_;
  std::array<std::optional<OpKind>, 16> by_code_{};
  std::array<unsigned, kOpKindCount> code_of_{};
};

class Program;
using ProgramPtr = std::shared_ptr<const Program>;

/// Decoded instruction tree. WHILE owns its body (the matching WEND is
/// implicit); EXEC owns its embedded program.
struct Instruction {
  OpKind kind = OpKind::Halt;
  std::uint8_t reg = 0;
  std::vector<Instruction> body;
  ProgramPtr embedded;
};

/// Flattened form the stepper runs. `target` is the jump index for WHILE
/// (one past the matching WEND) and WEND (the matching WHILE).
struct FlatOp {
  OpKind kind = OpKind::Halt;
  std::uint8_t reg = 0;
  std::uint32_t target = 0;
  const Program* embedded = nullptr;
};

enum class DecodeErrorKind { UnknownOpcode, UnbalancedLoop, TrailingBits, Truncated };

std::string_view decode_error_name(DecodeErrorKind kind);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrorKind kind, std::size_t offset);
  DecodeErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  DecodeErrorKind kind_;
  std::size_t offset_;
};

class Program {
 public:
  /// Builds from an instruction list (without the final END).
  static ProgramPtr assemble(std::vector<Instruction> instructions, EncodingId enc = EncodingId::A);

  const Bits& bits() const { return bits_; }
  /// l(p), the number of bits.
  std::size_t length() const { return bits_.size(); }
  EncodingId encoding() const { return encoding_; }
  const std::vector<Instruction>& instructions() const { return instructions_; }
  std::span<const FlatOp> code() const { return code_; }
  /// True when EXEC or DVT occurs anywhere, including embedded programs.
  bool uses_emulation() const { return uses_emulation_; }
  /// Encoding-neutral mnemonic listing, e.g. "IN r0; OUT r0".
  std::string disassemble() const;

  Program(std::vector<Instruction> instructions, EncodingId enc);

 private:
  Bits bits_;
  EncodingId encoding_;
  std::vector<Instruction> instructions_;
  std::vector<FlatOp> code_;
  bool uses_emulation_ = false;
};

/// Parse result used by the hot exhaustive-decode loops; never throws.
struct DecodeOutcome {
  ProgramPtr program;
  std::optional<DecodeErrorKind> error;
  std::size_t error_offset = 0;
};

DecodeOutcome try_decode(std::string_view bits, EncodingId enc = EncodingId::A);
/// Throws DecodeError on invalid input.
ProgramPtr decode(std::string_view bits, EncodingId enc = EncodingId::A);
/// Serializes an instruction list (without final END) to bits.
Bits encode(const std::vector<Instruction>& instructions, EncodingId enc = EncodingId::A);

// Instruction builders, mostly for tests and examples.
namespace ops {
Instruction halt();
Instruction inc(std::uint8_t r);
Instruction dec(std::uint8_t r);
Instruction out(std::uint8_t r);
Instruction in(std::uint8_t r);
Instruction loop(std::uint8_t r, std::vector<Instruction> body);
Instruction exec(ProgramPtr embedded);
Instruction dvt();
}  // namespace ops

struct SemanticState;

/// What an emulation meta-instruction produced during one step.
struct EmulationRecord {
  Bits emulated_code;
  Natural step_index = 0;
  std::shared_ptr<const SemanticState> state;

  friend bool operator==(const EmulationRecord& a, const EmulationRecord& b);
};

/// Observable machine state after a step. Carries no structural position,
/// so textually different programs can share semantic states.
struct SemanticState {
  Registers registers{};
  Natural input_cursor = 0;
  std::vector<Natural> output_log;
  bool halted = false;
  std::optional<EmulationRecord> emulation;

  friend bool operator==(const SemanticState& a, const SemanticState& b);
};

using Trace = std::vector<SemanticState>;

/// Flattened emulation evidence for one emulated step.
struct EmulationEvent {
  Bits host_program;
  Bits emulated_code;
  Natural emulated_step_index = 0;
  SemanticState emulated_state;

  friend bool operator==(const EmulationEvent&, const EmulationEvent&) = default;
};

struct EmulationContext;

/// Full machine configuration. Copies are deep.
class Configuration {
 public:
  Configuration();
  ~Configuration();
  Configuration(const Configuration& other);
  Configuration& operator=(const Configuration& other);
  Configuration(Configuration&&) noexcept;
  Configuration& operator=(Configuration&&) noexcept;

  Registers registers{};
  Natural input_cursor = 0;
  std::vector<Natural> output_log;
  std::size_t position = 0;
  bool halted = false;
  /// Emulation raised by the most recent non-absorbing step, if any.
  std::optional<EmulationRecord> last_emulation;
  /// Live EXEC or DVT state while the host sits on such an instruction.
  std::unique_ptr<EmulationContext> emulation;
};

struct ExecContext {
  Configuration inner;
  Natural steps = 0;
};

struct DovetailContext {
  Natural tick = 0;
  /// children[i - 1] is the configuration of the i-th enumerated program.
  std::vector<Configuration> children;
};

struct EmulationContext {
  std::optional<ExecContext> exec;
  std::optional<DovetailContext> dovetail;
};

SemanticState observe(const Configuration& config);

/// One transition of U. Halted configurations are fixed points.
Configuration step(const Configuration& config, const Program& program, const Tape& tape);
/// In-place variant of step().
void advance(Configuration& config, const Program& program, const Tape& tape);

/// Number of advance() calls made on the calling thread.
std::uint64_t steps_executed_on_this_thread();

/// Flattens the emulation records nested in `state`, host first.
void collect_events(const Bits& host, const SemanticState& state, std::vector<EmulationEvent>& out);

struct RunResult {
  Trace trace;
  std::vector<EmulationEvent> events;
};

/// States after steps 1..k plus every emulation event raised, in order.
RunResult run_trace(const Program& program, const Tape& tape, std::size_t k, std::size_t budget);
inline RunResult run_trace(const Program& program, const Tape& tape, std::size_t k) {
  return run_trace(program, tape, k, k);
}

/// Configurations after steps 1..k (index 0 holds the state after step 1).
std::vector<Configuration> run_configurations(const Program& program, const Tape& tape, std::size_t k);

}  // namespace udlab
