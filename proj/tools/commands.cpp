#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "bqpca/bqpca.h"
#include "config.hpp"

namespace bqpca::cli {

namespace {

using json = nlohmann::ordered_json;

struct DatasetDeleter {
  void operator()(bqpca_dataset* p) const { bqpca_dataset_free(p); }
};
struct BasisDeleter {
  void operator()(bqpca_basis* p) const { bqpca_basis_free(p); }
};
struct GalleryDeleter {
  void operator()(bqpca_gallery* p) const { bqpca_gallery_free(p); }
};
using DatasetPtr = std::unique_ptr<bqpca_dataset, DatasetDeleter>;
using BasisPtr = std::unique_ptr<bqpca_basis, BasisDeleter>;
using GalleryPtr = std::unique_ptr<bqpca_gallery, GalleryDeleter>;

struct RuntimeFailure : std::runtime_error {
  RuntimeFailure(bqpca_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  bqpca_status status;
};

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bqpca_status status, const char* what) {
  if (status == BQPCA_OK) return;
  throw RuntimeFailure(status, std::string(what) + ": " + bqpca_status_string(status) + ": " +
                                   bqpca_last_error());
}

std::string number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(std::numeric_limits<double>::max_digits10);
  os << x;
  return os.str();
}

json p_value(double p) { return std::isinf(p) ? json("inf") : json(p); }

bqpca_manner to_manner(const std::string& s) {
  if (s == "left") return BQPCA_WEIGHTED_LEFT;
  if (s == "right") return BQPCA_WEIGHTED_RIGHT;
  if (s == "both") return BQPCA_WEIGHTED_BOTH;
  return BQPCA_UNWEIGHTED;
}

const char* manner_name(bqpca_manner m) {
  switch (m) {
    case BQPCA_UNWEIGHTED: return "unweighted";
    case BQPCA_WEIGHTED_LEFT: return "left";
    case BQPCA_WEIGHTED_RIGHT: return "right";
    case BQPCA_WEIGHTED_BOTH: return "both";
  }
  return "?";
}

bqpca_transform to_transform(const std::string& s) {
  return s == "inverse_log" ? BQPCA_TRANSFORM_INVERSE_LOG : BQPCA_TRANSFORM_IDENTITY;
}

bqpca_fit_params fit_params(const Config& cfg) {
  bqpca_fit_params p;
  bqpca_fit_params_init(&p);
  p.s = cfg.s;
  p.p = cfg.p;
  p.k1 = static_cast<uint32_t>(cfg.k1);
  p.k2 = static_cast<uint32_t>(cfg.k2);
  p.tol = cfg.tol;
  p.max_iter = static_cast<uint32_t>(cfg.max_iter);
  return p;
}

struct Data {
  std::size_t rows = 0;
  std::size_t cols = 0;
  DatasetPtr train, validation, test;

  const bqpca_dataset* pick(const std::string& name) const {
    if (name == "train") return train.get();
    if (name == "validation") return validation.get();
    if (name == "test") return test.get();
    throw ValidationFailure("unknown sample set '" + name + "'");
  }
};

Data load_data(const Config& cfg) {
  bqpca_dataset* raw = nullptr;
  check(bqpca_dataset_load(cfg.dataset_root.c_str(), &raw), "loading dataset");
  DatasetPtr all(raw);
  Data d;
  d.rows = bqpca_dataset_rows(all.get());
  d.cols = bqpca_dataset_cols(all.get());
  bqpca_dataset *tr = nullptr, *va = nullptr, *te = nullptr;
  check(bqpca_dataset_split(all.get(), cfg.split.data(), cfg.seed, &tr, &va, &te),
        "splitting dataset");
  d.train.reset(tr);
  d.validation.reset(va);
  d.test.reset(te);
  return d;
}

void require_k_bounds(const Config& cfg, const Data& d) {
  std::vector<std::string> problems;
  if (static_cast<std::size_t>(cfg.k1) > d.rows) {
    problems.push_back("model.k1: k1 <= m = " + std::to_string(d.rows) + " required, got " +
                       std::to_string(cfg.k1));
  }
  if (static_cast<std::size_t>(cfg.k2) > d.cols) {
    problems.push_back("model.k2: k2 <= n = " + std::to_string(d.cols) + " required, got " +
                       std::to_string(cfg.k2));
  }
  if (!problems.empty()) throw ConfigError(problems);
}

BasisPtr load_basis_for(const Options& opts, const Data& d) {
  bqpca_basis* raw = nullptr;
  check(bqpca_basis_load(opts.basis.c_str(), &raw), "loading basis");
  BasisPtr basis(raw);
  std::size_t m = 0, n = 0;
  bqpca_basis_dims(basis.get(), &m, &n, nullptr, nullptr);
  if (m != d.rows || n != d.cols) {
    throw RuntimeFailure(BQPCA_ERR_SHAPE, "ShapeError: basis '" + opts.basis + "' expects " +
                                              std::to_string(m) + "x" + std::to_string(n) +
                                              " images but the dataset holds " +
                                              std::to_string(d.rows) + "x" +
                                              std::to_string(d.cols) + " images");
  }
  return basis;
}

json read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) return json::object();
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw RuntimeFailure(BQPCA_ERR_FORMAT, "manifest '" + path + "' is not valid JSON: " + e.what());
  }
}

struct Scheme {
  bqpca_manner manner;
  bqpca_transform transform;
  std::string manner_text;
  std::string transform_text;
};

// Weighting from the config, replaced by a manifest choice when one exists.
Scheme resolve_scheme(const Config& cfg, const Options& opts) {
  Scheme s{to_manner(cfg.manner), to_transform(cfg.transform), cfg.manner, cfg.transform};
  if (opts.manifest.empty()) return s;
  const json m = read_manifest(opts.manifest);
  if (m.contains("weighting")) {
    const auto& w = m["weighting"];
    s.manner_text = w.value("manner", s.manner_text);
    s.transform_text = w.value("transform", s.transform_text);
    s.manner = to_manner(s.manner_text);
    s.transform = to_transform(s.transform_text);
  }
  return s;
}

std::size_t sweep_bound(const Options& opts, const bqpca_basis* basis) {
  std::size_t k1 = 0, k2 = 0;
  bqpca_basis_dims(basis, nullptr, nullptr, &k1, &k2);
  const long long bound = *opts.sweep;
  if (bound < 1) throw ValidationFailure("--sweep: k >= 1 required, got " + std::to_string(bound));
  if (static_cast<std::size_t>(bound) > std::min(k1, k2)) {
    throw ValidationFailure("--sweep: bound " + std::to_string(bound) +
                            " exceeds the basis projector counts (k1 = " + std::to_string(k1) +
                            ", k2 = " + std::to_string(k2) + ")");
  }
  return static_cast<std::size_t>(bound);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure(BQPCA_ERR_IO, "IoError: cannot write '" + path + "'");
  out << text;
  if (!out) throw RuntimeFailure(BQPCA_ERR_IO, "IoError: write to '" + path + "' failed");
}

const char* remediation(bqpca_status status) {
  switch (status) {
    case BQPCA_ERR_INVALID_WEIGHT:
      return "inverse_log weighting needs every per-direction objective value > 1; "
             "set weighting.transform = identity, or use fewer projectors so the "
             "trailing objective values stay above 1";
    case BQPCA_ERR_DEGENERATE_DIRECTION:
      return "the training images do not span enough directions; lower model.k1/model.k2 "
             "or add training images";
    case BQPCA_ERR_INVALID_DATASET:
      return "check that every class directory holds enough images for the requested split";
    default: return nullptr;
  }
}

template <typename F>
int run(std::ostream& err, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RuntimeFailure& e) {
    err << "error: " << e.what() << "\n";
    if (const char* hint = remediation(e.status)) err << "hint: " << hint << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

const std::vector<std::string> kModelKeys{"dataset.root", "model.s", "model.p", "model.k1",
                                          "model.k2"};

}  // namespace

int cmd_fit(const Options& opts, std::ostream& out, std::ostream& err) {
  return run(err, [&] {
    const Config cfg = load_config(opts.config, kModelKeys);
    const Data d = load_data(cfg);
    require_k_bounds(cfg, d);
    const bqpca_fit_params params = fit_params(cfg);

    bqpca_basis* raw = nullptr;
    const bqpca_status st = bqpca_fit(d.train.get(), &params, &raw);
    if (st == BQPCA_ERR_DEGENERATE_DIRECTION) {
      throw RuntimeFailure(st, "fit: DegenerateDirection at direction " +
                                   std::to_string(bqpca_last_error_direction()) + ": " +
                                   bqpca_last_error());
    }
    check(st, "fit");
    BasisPtr basis(raw);
    check(bqpca_basis_save(basis.get(), opts.basis.c_str()), "saving basis");

    json report;
    report["command"] = "fit";
    report["basis"] = opts.basis;
    report["dataset"] = {{"root", cfg.dataset_root},
                         {"rows", d.rows},
                         {"cols", d.cols},
                         {"train", bqpca_dataset_size(d.train.get())},
                         {"validation", bqpca_dataset_size(d.validation.get())},
                         {"test", bqpca_dataset_size(d.test.get())}};
    report["params"] = {{"s", cfg.s},         {"p", p_value(cfg.p)},
                        {"k1", cfg.k1},       {"k2", cfg.k2},
                        {"tol", cfg.tol},     {"max_iter", cfg.max_iter}};
    for (const auto& [side, key, count] :
         {std::tuple{BQPCA_SIDE_RIGHT, "right", cfg.k2}, std::tuple{BQPCA_SIDE_LEFT, "left", cfg.k1}}) {
      json dirs = json::array();
      for (long long t = 0; t < count; ++t) {
        double f = 0.0;
        std::size_t iters = 0;
        int converged = 0;
        check(bqpca_basis_direction_info(basis.get(), side, static_cast<std::size_t>(t), &f,
                                         &iters, &converged),
              "reading fit diagnostics");
        dirs.push_back({{"direction", t + 1},
                        {"objective", f},
                        {"iterations", iters},
                        {"converged", converged != 0}});
      }
      report[key] = dirs;
    }
    json warnings = json::array();
    for (std::size_t i = 0; i < bqpca_basis_warning_count(basis.get()); ++i) {
      warnings.push_back(bqpca_basis_warning(basis.get(), i));
      err << "warning: " << bqpca_basis_warning(basis.get(), i) << "\n";
    }
    report["warnings"] = warnings;
    out << report.dump(2) << "\n";
  });
}

int cmd_select_weighting(const Options& opts, std::ostream& out, std::ostream& err) {
  return run(err, [&] {
    const Config cfg = load_config(opts.config, kModelKeys);
    const Data d = load_data(cfg);
    require_k_bounds(cfg, d);
    const bqpca_fit_params params = fit_params(cfg);
    const bqpca_transform transform = to_transform(cfg.transform);

    bqpca_manner chosen = BQPCA_UNWEIGHTED;
    double accuracy[4] = {};
    check(bqpca_select_weighting(d.train.get(), &params, static_cast<std::size_t>(cfg.repeats),
                                 8.0 / 9.0, cfg.seed, transform, &chosen, accuracy),
          "select-weighting");

    json table = json::object();
    for (int m = 0; m < 4; ++m) table[manner_name(static_cast<bqpca_manner>(m))] = accuracy[m];
    json report;
    report["command"] = "select-weighting";
    report["repeats"] = cfg.repeats;
    report["seed"] = cfg.seed;
    report["transform"] = cfg.transform;
    report["accuracy"] = table;
    report["chosen"] = manner_name(chosen);

    if (!opts.manifest.empty()) {
      json manifest = read_manifest(opts.manifest);
      manifest["weighting"] = {{"manner", manner_name(chosen)},
                               {"transform", cfg.transform},
                               {"accuracy", table},
                               {"repeats", cfg.repeats},
                               {"seed", cfg.seed}};
      write_text(opts.manifest, manifest.dump(2) + "\n");
      report["manifest"] = opts.manifest;
    }
    if (!opts.csv.empty()) {
      std::string csv = "manner,accuracy\n";
      for (int m = 0; m < 4; ++m) {
        csv += std::string(manner_name(static_cast<bqpca_manner>(m))) + "," + number(accuracy[m]) +
               "\n";
      }
      write_text(opts.csv, csv);
    }
    out << report.dump(2) << "\n";
  });
}

int cmd_recognize(const Options& opts, std::ostream& out, std::ostream& err) {
  return run(err, [&] {
    const Config cfg = load_config(opts.config, {"dataset.root"});
    const Data d = load_data(cfg);
    const bqpca_dataset* probes = d.pick(opts.probe_set);
    BasisPtr basis = load_basis_for(opts, d);
    const Scheme scheme = resolve_scheme(cfg, opts);

    json report;
    report["command"] = "recognize";
    report["basis"] = opts.basis;
    report["probe_set"] = opts.probe_set;
    report["manner"] = scheme.manner_text;
    report["transform"] = scheme.transform_text;

    if (opts.sweep) {
      const std::size_t bound = sweep_bound(opts, basis.get());
      std::string csv = "k1,k2,accuracy\n";
      json rows = json::array();
      for (std::size_t k = 1; k <= bound; ++k) {
        bqpca_basis* raw = nullptr;
        check(bqpca_basis_truncate(basis.get(), k, k, &raw), "truncating basis");
        BasisPtr part(raw);
        bqpca_gallery* g = nullptr;
        check(bqpca_gallery_build(d.train.get(), part.get(), scheme.manner, scheme.transform, &g),
              "building gallery");
        GalleryPtr gallery(g);
        double acc = 0.0;
        check(bqpca_evaluate(gallery.get(), probes, &acc), "evaluating");
        csv += std::to_string(k) + "," + std::to_string(k) + "," + number(acc) + "\n";
        rows.push_back({{"k1", k}, {"k2", k}, {"accuracy", acc}});
      }
      report["sweep"] = rows;
      if (!opts.csv.empty()) write_text(opts.csv, csv);
      out << report.dump(2) << "\n";
      return;
    }

    bqpca_gallery* g = nullptr;
    check(bqpca_gallery_build(d.train.get(), basis.get(), scheme.manner, scheme.transform, &g),
          "building gallery");
    GalleryPtr gallery(g);
    std::map<std::string, std::map<std::string, std::size_t>> confusion;
    std::size_t correct = 0;
    const std::size_t count = bqpca_dataset_size(probes);
    if (count == 0) {
      throw RuntimeFailure(BQPCA_ERR_INVALID_DATASET,
                           "InvalidDataset: the " + opts.probe_set + " set is empty");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const char* label = nullptr;
      check(bqpca_classify(gallery.get(), probes, i, &label, nullptr), "classifying");
      const std::string truth = bqpca_dataset_label(probes, i);
      ++confusion[truth][label];
      if (truth == label) ++correct;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(count);
    std::size_t k1 = 0, k2 = 0;
    bqpca_basis_dims(basis.get(), nullptr, nullptr, &k1, &k2);
    report["k1"] = k1;
    report["k2"] = k2;
    report["probes"] = count;
    report["accuracy"] = accuracy;
    json cm = json::object();
    std::string csv = "true_label,predicted_label,count\n";
    for (const auto& [truth, row] : confusion) {
      json r = json::object();
      for (const auto& [pred, n] : row) {
        r[pred] = n;
        csv += truth + "," + pred + "," + std::to_string(n) + "\n";
      }
      cm[truth] = r;
    }
    report["confusion"] = cm;
    if (!opts.csv.empty()) write_text(opts.csv, csv);
    out << report.dump(2) << "\n";
  });
}

int cmd_reconstruct(const Options& opts, std::ostream& out, std::ostream& err) {
  return run(err, [&] {
    const Config cfg = load_config(opts.config, {"dataset.root"});
    Data d = load_data(cfg);
    BasisPtr basis = load_basis_for(opts, d);
    const Scheme scheme = resolve_scheme(cfg, opts);

    DatasetPtr everything;
    const bqpca_dataset* images = nullptr;
    if (opts.image_set == "all") {
      bqpca_dataset* raw = nullptr;
      check(bqpca_dataset_load(cfg.dataset_root.c_str(), &raw), "loading dataset");
      everything.reset(raw);
      images = everything.get();
    } else {
      images = d.pick(opts.image_set);
    }

    json report;
    report["command"] = "reconstruct";
    report["basis"] = opts.basis;
    report["image_set"] = opts.image_set;
    report["manner"] = scheme.manner_text;
    report["transform"] = scheme.transform_text;

    if (opts.sweep) {
      const std::size_t bound = sweep_bound(opts, basis.get());
      std::string csv = "k1,k2,ratio\n";
      json rows = json::array();
      for (std::size_t k = 1; k <= bound; ++k) {
        bqpca_basis* raw = nullptr;
        check(bqpca_basis_truncate(basis.get(), k, k, &raw), "truncating basis");
        BasisPtr part(raw);
        double ratio = 0.0;
        check(bqpca_reconstruct(images, part.get(), scheme.manner, scheme.transform, nullptr,
                                &ratio),
              "reconstructing");
        csv += std::to_string(k) + "," + std::to_string(k) + "," + number(ratio) + "\n";
        rows.push_back({{"k1", k}, {"k2", k}, {"ratio", ratio}});
      }
      report["sweep"] = rows;
      if (!opts.csv.empty()) write_text(opts.csv, csv);
      out << report.dump(2) << "\n";
      return;
    }

    bqpca_dataset* recs_raw = nullptr;
    double ratio = 0.0;
    check(bqpca_reconstruct(images, basis.get(), scheme.manner, scheme.transform, &recs_raw,
                            &ratio),
          "reconstructing");
    DatasetPtr recs(recs_raw);
    std::size_t k1 = 0, k2 = 0;
    bqpca_basis_dims(basis.get(), nullptr, nullptr, &k1, &k2);
    report["k1"] = k1;
    report["k2"] = k2;
    report["images"] = bqpca_dataset_size(images);
    report["ratio"] = ratio;
    if (!opts.export_dir.empty()) {
      check(bqpca_dataset_export(recs.get(), opts.export_dir.c_str()), "exporting images");
      report["export_dir"] = opts.export_dir;
    }
    if (!opts.csv.empty()) {
      write_text(opts.csv, "k1,k2,ratio\n" + std::to_string(k1) + "," + std::to_string(k2) + "," +
                               number(ratio) + "\n");
    }
    out << report.dump(2) << "\n";
  });
}

}  // namespace bqpca::cli
