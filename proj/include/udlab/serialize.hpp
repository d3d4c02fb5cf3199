#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "udlab/equivalence.hpp"
#include "udlab/machine.hpp"
#include "udlab/replay.hpp"

namespace udlab {

using Json = nlohmann::ordered_json;

Json to_json(const SemanticState& state);
SemanticState state_from_json(const Json& j);

Json to_json(const Trace& trace);

/// {program_bits, tape, k, trace}
Json to_json(const Recording& rec);
Recording recording_from_json(const Json& j, EncodingId enc);

/// JSON array of bit strings.
Json programs_to_json(const std::vector<ProgramPtr>& programs);

/// {k, universe_id, classes: [{index, canonical_key_digest, members}]}
Json partition_to_json(const std::vector<EquivClass>& classes, const InputUniverse& universe);

/// A JSON array of tapes, e.g. [[], [0], [1, 0]].
InputUniverse universe_from_json(const Json& j);

/// "1,0,7"; empty tape is "".
std::string tape_to_string(const Tape& tape);
/// Comma-separated naturals; the empty string is the empty tape.
Tape parse_tape(std::string_view text);

/// Space-separated values, for CSV cells.
std::string join_naturals(const std::vector<Natural>& values, char sep = ' ');

}  // namespace udlab
