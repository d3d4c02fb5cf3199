#include "udlab/enumerate.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>


namespace udlab {

namespace {

// Grammar generator. blocks[n] holds every balanced instruction sequence of
// exactly n bits (no closing END); a program of length n is blocks[n - 4]
// followed by END.
class Generator {
 public:
  explicit Generator(EncodingId enc) : enc_(enc), table_(EncodingTable::get(enc)) {
    blocks_.push_back({Bits{}});
    instructions_.push_back({});
  }

  EncodingId encoding() const { return enc_; }

  const std::vector<Bits>& blocks(std::size_t n) {
    while (blocks_.size() <= n) grow();
    return blocks_[n];
  }

  std::vector<Bits> programs_of_length(std::size_t n) {
    if (n < kOpcodeWidth) return {};
    std::vector<Bits> out;
    const Bits end = table_.opcode_bits(OpKind::End);
    for (const auto& b : blocks(n - kOpcodeWidth)) out.push_back(b + end);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  // Extends both tables by one length.
  void grow() {
    const std::size_t n = blocks_.size();
    std::vector<Bits> single;
    if (n == kOpcodeWidth) {
      single.push_back(table_.opcode_bits(OpKind::Halt));
      single.push_back(table_.opcode_bits(OpKind::Dvt));
    }
    if (n == kOpcodeWidth + kRegisterWidth) {
      for (OpKind k : {OpKind::Inc, OpKind::Dec, OpKind::Out, OpKind::In}) {
        for (unsigned r = 0; r < kRegisterCount; ++r) single.push_back(op_reg(k, r));
      }
    }
    // WHILE r <body> WEND
    const std::size_t loop_overhead = kOpcodeWidth + kRegisterWidth + kOpcodeWidth;
    if (n >= loop_overhead) {
      const Bits wend = table_.opcode_bits(OpKind::Wend);
      for (unsigned r = 0; r < kRegisterCount; ++r) {
        const Bits head = op_reg(OpKind::While, r);
        for (const auto& body : blocks_[n - loop_overhead]) single.push_back(head + body + wend);
      }
    }
    // EXEC <program>, program = block + END
    if (n >= 2 * kOpcodeWidth) {
      const Bits exec = table_.opcode_bits(OpKind::Exec);
      const Bits end = table_.opcode_bits(OpKind::End);
      for (const auto& body : blocks_[n - 2 * kOpcodeWidth]) single.push_back(exec + body + end);
    }
    instructions_.push_back(std::move(single));

    std::vector<Bits> seqs;
    for (std::size_t first = 1; first <= n; ++first) {
      for (const auto& head : instructions_[first]) {
        for (const auto& tail : blocks_[n - first]) seqs.push_back(head + tail);
      }
    }
    blocks_.push_back(std::move(seqs));
  }

  Bits op_reg(OpKind kind, unsigned r) const {
    Bits b = table_.opcode_bits(kind);
    b += (r & 2u) ? '1' : '0';
    b += (r & 1u) ? '1' : '0';
    return b;
  }

  EncodingId enc_;
  const EncodingTable& table_;
  std::vector<std::vector<Bits>> blocks_;
  std::vector<std::vector<Bits>> instructions_;  // single instructions by exact length
};

struct Cache {
  explicit Cache(EncodingId enc) : generator(enc) {}

  // Caller holds `mutex`.
  void extend_to(std::size_t len) {
    while (covered < len) {
      ++covered;
      for (const auto& bits : generator.programs_of_length(covered)) {
        programs.push_back(decode(bits, generator.encoding()));
      }
    }
  }

  std::mutex mutex;
  Generator generator;
  std::size_t covered = 0;
  std::vector<ProgramPtr> programs;
};

Cache& cache_for(EncodingId enc) {
  static Cache a(EncodingId::A);
  static Cache b(EncodingId::B);
  return enc == EncodingId::A ? a : b;
}

void require_min_len(std::size_t max_len) {
  if (max_len < kOpcodeWidth) throw std::invalid_argument("max_len must be >= 4");
}

}  // namespace

bool canonical_less(const Bits& a, const Bits& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::vector<ProgramPtr> enumerate_programs(std::size_t max_len, EncodingId enc) {
  require_min_len(max_len);
  auto& cache = cache_for(enc);
  std::lock_guard lock(cache.mutex);
  cache.extend_to(max_len);
  const auto end = std::partition_point(cache.programs.begin(), cache.programs.end(),
                                        [&](const ProgramPtr& p) { return p->length() <= max_len; });
  return {cache.programs.begin(), end};
}

ProgramPtr nth_program(std::size_t n, EncodingId enc) {
  if (n < 1) throw std::invalid_argument("nth_program: index is 1-based");
  auto& cache = cache_for(enc);
  std::lock_guard lock(cache.mutex);
  while (cache.programs.size() < n) cache.extend_to(cache.covered + 1);
  return cache.programs[n - 1];
}

MeasureValue kraft_mass(std::size_t max_len, EncodingId enc) {
  MeasureValue total;
  for (const auto& p : enumerate_programs(max_len, enc)) total += MeasureValue::dyadic(p->length());
  return total;
}

}  // namespace udlab
