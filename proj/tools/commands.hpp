#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace bqpca::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

struct Options {
  std::string config;
  std::string basis = "basis.bqp";
  std::string manifest;    // run manifest (JSON); read by recognize/reconstruct, written by select
  std::string csv;         // CSV output path
  std::string export_dir;  // reconstructed image export
  std::string probe_set = "test";   // recognize: train | validation | test
  std::string image_set = "train";  // reconstruct: train | validation | test | all
  std::optional<long long> sweep;   // k1 = k2 = 1..sweep
};

// Each command writes a JSON report to `out` and diagnostics to `err`, and
// returns the process exit code.
int cmd_fit(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_select_weighting(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_recognize(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace bqpca::cli
