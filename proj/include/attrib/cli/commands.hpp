#pragma once

// The `attrib` command line: ingest, classify, evaluate, suite, high-yield.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace attrib::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct RunConfig {
  std::string command;
  std::optional<std::filesystem::path> corpus_dir;
  std::optional<std::filesystem::path> labels_csv;
  std::optional<std::filesystem::path> rules_file;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output_dir;
  bool mosaic = false;
  bool lenient = false;
  std::vector<std::string> contrasts;
  std::vector<std::string> features;
  std::vector<std::string> interactions;
  std::string target;
  std::size_t min_count = 1;
  unsigned threads = 0;
};

int cmd_ingest(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_suite(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_high_yield(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// The config as pretty-printed JSON, paths absolute.
std::string config_echo(const RunConfig& config);

}  // namespace attrib::cli
