#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cupgame/json_io.hpp"

namespace cupgame::cli {

// Exit statuses: all hard checks passed, a check failed, usage or config error.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;
inline constexpr int kUsage = 2;

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// `config` is a run configuration; see README for the keys. Writes the trace
// to `trace_path` when given and prints the summary object.
int cmd_run(const json& config, const std::optional<std::string>& trace_path, Streams io);
int cmd_lowerbound(const json& config, Streams io);
int cmd_verify(const std::string& suite, Streams io);
int cmd_search(const json& config, const std::optional<std::string>& archive_path, Streams io);
int cmd_instances(const std::string& action, const std::optional<std::string>& name,
                  const std::optional<std::string>& out_path, const std::string& format, Streams io);

const std::vector<std::string>& suite_names();

// Full command line, argv[0] excluded.
int run(const std::vector<std::string>& args, Streams io);

}  // namespace cupgame::cli
