#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bqpca::cli {

/// Run configuration. Files are `key = value` lines; `[section]` headers
/// prefix the keys that follow, so `[model]` + `s = 2` is `model.s = 2`.
/// `#` starts a comment. Arrays are written `[a, b, c]`.
struct Config {
  std::string dataset_root;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  std::uint64_t seed = 0;

  double s = 2.0;
  double p = 2.0;
  long long k1 = 1;
  long long k2 = 1;
  double tol = 1e-4;
  long long max_iter = 500;

  std::string manner = "unweighted";
  std::string transform = "identity";

  long long repeats = 3;

  // Keys present in the file.
  std::vector<std::string> given;
  bool has(const std::string& key) const;
};

/// Thrown with every problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "dataset.root", "dataset.split", "dataset.seed",      "model.s",
      "model.p",      "model.k1",      "model.k2",          "model.tol",
      "model.max_iter", "weighting.manner", "weighting.transform", "selection.repeats"};
  return keys;
}

/// Flat key -> raw value map; syntax errors and unknown or duplicate keys are
/// collected into `problems`.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    std::vector<std::string>& problems);

/// Parses and validates. `required` lists keys that must be present.
/// load_config resolves a relative dataset.root against the file's directory.
Config parse_config(const std::string& text, const std::vector<std::string>& required = {});
Config load_config(const std::filesystem::path& path,
                   const std::vector<std::string>& required = {});

}  // namespace bqpca::cli
