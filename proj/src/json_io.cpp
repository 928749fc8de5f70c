#include "cupgame/json_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace cupgame {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw GameError(ErrorKind::ParseError, what); }

const char* removal_name(RemovalModel r) { return r == RemovalModel::Unit ? "unit" : "flush"; }

const char* tiebreak_name(TieBreak t) {
  return t == TieBreak::LowestIndex ? "lowest_index" : "adversary_directed";
}

const char* info_name(InfoModel::Kind k) {
  switch (k) {
    case InfoModel::Kind::Exact:
      return "exact";
    case InfoModel::Kind::Multiplicative:
      return "multiplicative";
    case InfoModel::Kind::Additive:
      return "additive";
  }
  return "exact";
}

std::size_t index_from_json(const json& v, std::size_t n, const char* field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    parse_error(std::string(field) + " must be a non-negative integer");
  }
  const auto i = v.get<std::uint64_t>();
  if (i >= n) parse_error(std::string(field) + " out of range");
  return static_cast<std::size_t>(i);
}

bool same_fill(const SharedVec& a, const SharedVec& b) {
  if (!a || !b) return false;
  return a == b || *a == *b;
}

}  // namespace

json to_json(const Rational& value) { return value.str(); }

Rational rational_from_json(const json& value) {
  if (value.is_string()) {
    try {
      return Rational::parse(value.get<std::string>());
    } catch (const std::exception& e) {
      parse_error(e.what());
    }
  }
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  parse_error("expected a rational string, got " + value.dump());
}

json to_json(const RationalVec& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(v.str());
  return out;
}

RationalVec rational_vec_from_json(const json& value) {
  if (!value.is_array()) parse_error("expected an array of rationals");
  RationalVec out;
  out.reserve(value.size());
  for (const auto& v : value) out.push_back(rational_from_json(v));
  return out;
}

json to_json(const GameSpec& spec) {
  json out{{"n", spec.n},
           {"removal", removal_name(spec.removal)},
           {"tiebreak", tiebreak_name(spec.tiebreak)},
           {"info", {{"kind", info_name(spec.info.kind)}}}};
  if (!spec.info.is_exact()) out["info"]["c"] = spec.info.c.str();
  if (spec.fixed_rates) out["fixed_rates"] = to_json(*spec.fixed_rates);
  return out;
}

GameSpec spec_from_json(const json& value) {
  if (!value.is_object()) parse_error("spec must be an object");
  GameSpec spec;
  try {
    spec.n = value.at("n").get<std::size_t>();
    const auto removal = value.value("removal", std::string("unit"));
    if (removal == "unit") {
      spec.removal = RemovalModel::Unit;
    } else if (removal == "flush") {
      spec.removal = RemovalModel::Flush;
    } else {
      parse_error("unknown removal model: " + removal);
    }
    const auto tiebreak = value.value("tiebreak", std::string("lowest_index"));
    if (tiebreak == "lowest_index") {
      spec.tiebreak = TieBreak::LowestIndex;
    } else if (tiebreak == "adversary_directed") {
      spec.tiebreak = TieBreak::AdversaryDirected;
    } else {
      parse_error("unknown tiebreak: " + tiebreak);
    }
    if (value.contains("info")) {
      const auto& info = value.at("info");
      const auto kind = info.value("kind", std::string("exact"));
      if (kind == "exact") {
        spec.info = InfoModel::exact();
      } else if (kind == "multiplicative") {
        spec.info = InfoModel::multiplicative(rational_from_json(info.at("c")));
      } else if (kind == "additive") {
        spec.info = InfoModel::additive(rational_from_json(info.at("c")));
      } else {
        parse_error("unknown info model: " + kind);
      }
    }
    if (value.contains("fixed_rates")) spec.fixed_rates = rational_vec_from_json(value.at("fixed_rates"));
  } catch (const json::exception& e) {
    parse_error(std::string("bad spec: ") + e.what());
  }
  try {
    spec.validate();
  } catch (const GameError& e) {
    throw GameError(e.kind(), std::string("spec: ") + e.what());
  }
  return spec;
}

void write_trace(std::ostream& out, const Trace& trace, const TraceMeta& meta) {
  json header{{"type", "header"}, {"format", "cupgame-trace"}, {"version", 1}, {"spec", to_json(trace.spec)}};
  if (!meta.player.empty()) header["player"] = meta.player;
  if (!meta.adversary.empty()) header["adversary"] = meta.adversary;
  out << header.dump() << '\n';

  SharedVec previous;
  for (const auto& rec : trace.records) {
    json line{{"t", rec.t}};
    if (rec.fill) {
      if (same_fill(rec.fill, previous)) {
        line["fill"] = "repeat";
      } else {
        line["fill"] = to_json(*rec.fill);
      }
      previous = rec.fill;
    }
    if (!rec.discarded.is_zero()) line["discarded"] = rec.discarded.str();
    if (rec.estimates) line["estimates"] = to_json(*rec.estimates);
    if (rec.directed) line["directed"] = *rec.directed;
    line["chosen"] = rec.chosen ? json(*rec.chosen) : json(nullptr);
    line["max"] = rec.intermediate_max.str();
    line["post"] = rec.post_removal_max.str();
    out << line.dump() << '\n';
  }

  json trailer{{"type", "trailer"},
               {"steps", trace.records.size()},
               {"backlog", trace.backlog.str()},
               {"backlog_step", trace.backlog_step}};
  out << trailer.dump() << '\n';
}

Trace read_trace(std::istream& in, TraceMeta* meta) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  bool have_trailer = false;
  SharedVec previous;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (have_trailer) parse_error("line " + std::to_string(lineno) + ": data after trailer");
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      parse_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string where = "line " + std::to_string(lineno) + ": ";
    try {
      if (!have_header) {
        if (obj.value("type", std::string()) != "header") parse_error(where + "missing header");
        trace.spec = spec_from_json(obj.at("spec"));
        if (meta) {
          meta->player = obj.value("player", std::string());
          meta->adversary = obj.value("adversary", std::string());
        }
        have_header = true;
        continue;
      }
      if (obj.contains("type")) {
        if (obj["type"] != "trailer") parse_error(where + "unexpected object type");
        trace.backlog = rational_from_json(obj.at("backlog"));
        trace.backlog_step = obj.at("backlog_step").get<std::uint64_t>();
        if (obj.at("steps").get<std::uint64_t>() != trace.records.size()) {
          parse_error(where + "trailer step count does not match");
        }
        have_trailer = true;
        continue;
      }
      const std::size_t n = trace.spec.n;
      StepRecord rec;
      rec.t = obj.at("t").get<std::uint64_t>();
      if (obj.contains("fill")) {
        const auto& fill = obj["fill"];
        if (fill.is_string() && fill.get<std::string>() == "repeat") {
          if (!previous) parse_error(where + "\"repeat\" with no earlier fill");
          rec.fill = previous;
        } else {
          auto values = rational_vec_from_json(fill);
          if (values.size() != n) parse_error(where + "fill has wrong length");
          rec.fill = share(std::move(values));
        }
        previous = rec.fill;
      }
      if (obj.contains("discarded")) rec.discarded = rational_from_json(obj["discarded"]);
      if (obj.contains("estimates")) {
        auto values = rational_vec_from_json(obj["estimates"]);
        if (values.size() != n) parse_error(where + "estimates have wrong length");
        rec.estimates = share(std::move(values));
      }
      if (obj.contains("directed")) rec.directed = index_from_json(obj["directed"], n, "directed");
      if (obj.contains("chosen") && !obj["chosen"].is_null()) rec.chosen = index_from_json(obj["chosen"], n, "chosen");
      rec.intermediate_max = rational_from_json(obj.at("max"));
      rec.post_removal_max = rational_from_json(obj.at("post"));
      trace.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      parse_error(where + e.what());
    }
  }
  if (!have_header) parse_error("empty trace");
  if (!have_trailer) parse_error("trace has no trailer");
  return trace;
}

void write_trace_file(const std::string& path, const Trace& trace, const TraceMeta& meta) {
  std::ofstream out(path);
  if (!out) throw GameError(ErrorKind::ConfigError, "cannot open " + path + " for writing");
  write_trace(out, trace, meta);
  if (!out) throw GameError(ErrorKind::ConfigError, "write failed: " + path);
}

Trace read_trace_file(const std::string& path, TraceMeta* meta) {
  std::ifstream in(path);
  if (!in) throw GameError(ErrorKind::ConfigError, "cannot open " + path);
  return read_trace(in, meta);
}

json summary_json(const Trace& trace, const TraceMeta& meta) {
  return json{{"backlog", trace.backlog.str()},
              {"backlog_step", trace.backlog_step},
              {"steps", trace.records.size()},
              {"player", meta.player},
              {"adversary", meta.adversary}};
}

}  // namespace cupgame
