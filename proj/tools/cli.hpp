#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "absa/pipeline.hpp"

namespace absa::cli {

enum class Command { train, predict, cv, encode, gradcheck, metrics };

std::string_view to_string(Command command);

struct RunConfig {
  Command command = Command::cv;
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> test;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> archive;
  std::optional<std::filesystem::path> gold;
  std::optional<std::filesystem::path> pred;
  std::optional<std::filesystem::path> stopwords;
  PipelineConfig pipeline;
  std::size_t k = 5;
  std::optional<std::size_t> index;  // encode: one instance only
  double holdout = 0.0;              // train: fraction scored after fitting
  std::size_t grad_dim = 8;
  std::size_t grad_context = 5;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --help or --version; carries the text to print with exit status 0.
struct HelpRequested {
  std::string text;
};

/// Throws UsageError on bad flags, a missing required flag, or an
/// incompatible model/feature pair; throws HelpRequested for --help.
RunConfig parse_args(const std::vector<std::string>& args);

/// Executes the command and returns its exit status; module failures
/// propagate as exceptions.
int run(const RunConfig& config, std::ostream& out);

/// Full entry point: parse, log the configuration, run, map to 0/1/2.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// JSON echo of the effective configuration.
std::string describe(const RunConfig& config);

}  // namespace absa::cli
