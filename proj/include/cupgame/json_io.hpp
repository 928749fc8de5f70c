#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cupgame/game.hpp"

namespace cupgame {

using json = nlohmann::ordered_json;

// Rationals travel as "p/q" strings. Parsing throws GameError(ParseError).
json to_json(const Rational& value);
Rational rational_from_json(const json& value);
json to_json(const RationalVec& values);
RationalVec rational_vec_from_json(const json& value);

json to_json(const GameSpec& spec);
GameSpec spec_from_json(const json& value);

// JSON-lines trace: a header object with the spec, one object per step and a
// trailer with the backlog. A fill identical to the previous step's (same
// shared vector) is written as the string "repeat".
struct TraceMeta {
  std::string player;
  std::string adversary;
};

void write_trace(std::ostream& out, const Trace& trace, const TraceMeta& meta = {});
Trace read_trace(std::istream& in, TraceMeta* meta = nullptr);

void write_trace_file(const std::string& path, const Trace& trace, const TraceMeta& meta = {});
Trace read_trace_file(const std::string& path, TraceMeta* meta = nullptr);

// {backlog, backlog_step, steps, player, adversary}
json summary_json(const Trace& trace, const TraceMeta& meta);

}  // namespace cupgame
