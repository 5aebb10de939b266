#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bqpca::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

bool parse_double(const std::string& raw, double& out) {
  const std::string s = unquote(trim(raw));
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !std::isnan(out);
}

bool parse_int(const std::string& raw, long long& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_array(const std::string& raw, std::vector<double>& out) {
  const std::string s = trim(raw);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') return false;
  std::stringstream body(s.substr(1, s.size() - 2));
  std::string item;
  while (std::getline(body, item, ',')) {
    double v;
    if (!parse_double(item, v)) return false;
    out.push_back(v);
  }
  return true;
}

}  // namespace

bool Config::has(const std::string& key) const {
  return std::find(given.begin(), given.end(), key) != given.end();
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    std::vector<std::string>& problems) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + "expected 'key = value', got '" + line + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) key = section + "." + key;
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (out.count(key)) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    out[key] = value;
  }
  return out;
}

Config parse_config(const std::string& text, const std::vector<std::string>& required) {
  std::vector<std::string> problems;
  const auto kv = parse_key_values(text, problems);
  Config cfg;
  for (const auto& [key, value] : kv) cfg.given.push_back(key);

  auto number = [&](const char* key, double& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (!parse_double(it->second, dst)) {
      problems.push_back(std::string(key) + ": expected a number, got '" + it->second + "'");
    }
  };
  auto integer = [&](const char* key, long long& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (!parse_int(it->second, dst)) {
      problems.push_back(std::string(key) + ": expected an integer, got '" + it->second + "'");
    }
  };
  auto text_value = [&](const char* key, std::string& dst) {
    auto it = kv.find(key);
    if (it != kv.end()) dst = unquote(it->second);
  };

  text_value("dataset.root", cfg.dataset_root);
  if (auto it = kv.find("dataset.split"); it != kv.end()) {
    std::vector<double> parts;
    if (!parse_array(it->second, parts) || parts.size() != 3) {
      problems.push_back("dataset.split: expected [train, validation, test], got '" +
                         it->second + "'");
    } else {
      std::copy(parts.begin(), parts.end(), cfg.split.begin());
    }
  }
  long long seed = 0;
  integer("dataset.seed", seed);
  if (seed < 0) problems.push_back("dataset.seed >= 0 required");
  cfg.seed = static_cast<std::uint64_t>(seed);
  number("model.s", cfg.s);
  number("model.p", cfg.p);
  integer("model.k1", cfg.k1);
  integer("model.k2", cfg.k2);
  number("model.tol", cfg.tol);
  integer("model.max_iter", cfg.max_iter);
  text_value("weighting.manner", cfg.manner);
  text_value("weighting.transform", cfg.transform);
  integer("selection.repeats", cfg.repeats);

  for (const auto& key : required) {
    if (!kv.count(key)) problems.push_back("missing required key '" + key + "'");
  }
  if (kv.count("dataset.root") && cfg.dataset_root.empty()) {
    problems.push_back("dataset.root must not be empty");
  }
  if (!(cfg.s >= 1.0) || !std::isfinite(cfg.s)) problems.push_back("model.s: s >= 1 required");
  if (!(cfg.p > 0.0)) problems.push_back("model.p: p > 0 required");
  if (cfg.k1 < 1) problems.push_back("model.k1: k1 >= 1 required");
  if (cfg.k2 < 1) problems.push_back("model.k2: k2 >= 1 required");
  if (!(cfg.tol >= 0.0)) problems.push_back("model.tol: tol >= 0 required");
  if (cfg.max_iter < 1) problems.push_back("model.max_iter: max_iter >= 1 required");
  if (cfg.repeats < 1) problems.push_back("selection.repeats: repeats >= 1 required");
  double total = 0.0;
  bool nonneg = true;
  for (double f : cfg.split) {
    total += f;
    nonneg = nonneg && f >= 0.0;
  }
  if (!nonneg || std::abs(total - 1.0) > 1e-9) {
    problems.push_back("dataset.split: fractions must be nonnegative and sum to 1");
  }
  if (cfg.manner != "unweighted" && cfg.manner != "left" && cfg.manner != "right" &&
      cfg.manner != "both") {
    problems.push_back("weighting.manner: expected unweighted|left|right|both, got '" +
                       cfg.manner + "'");
  }
  if (cfg.transform != "identity" && cfg.transform != "inverse_log") {
    problems.push_back("weighting.transform: expected identity|inverse_log, got '" +
                       cfg.transform + "'");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

Config load_config(const std::filesystem::path& path, const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
  std::stringstream buf;
  buf << in.rdbuf();
  Config cfg = parse_config(buf.str(), required);
  // A relative dataset root is taken relative to the config file.
  const std::filesystem::path root(cfg.dataset_root);
  if (!cfg.dataset_root.empty() && root.is_relative()) {
    cfg.dataset_root = (path.parent_path() / root).lexically_normal().string();
  }
  return cfg;
}

}  // namespace bqpca::cli
