#include "bqpca/bqpca.h"

#include <exception>
#include <new>
#include <string>

#include "dataset.hpp"
#include "error.hpp"
#include "recognition.hpp"
#include "reconstruction.hpp"
#include "solver.hpp"
#include "weighting.hpp"

struct bqpca_dataset {
  bqpca::SampleSet set;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct bqpca_basis {
  bqpca::BasisPair basis;
};

struct bqpca_gallery {
  bqpca::Gallery gallery;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_direction = 0;

bqpca_status to_status(bqpca::ErrorCode code) {
  switch (code) {
    case bqpca::ErrorCode::Shape: return BQPCA_ERR_SHAPE;
    case bqpca::ErrorCode::InvalidParameter: return BQPCA_ERR_INVALID_PARAMETER;
    case bqpca::ErrorCode::DegenerateDirection: return BQPCA_ERR_DEGENERATE_DIRECTION;
    case bqpca::ErrorCode::InvalidWeight: return BQPCA_ERR_INVALID_WEIGHT;
    case bqpca::ErrorCode::InvalidDataset: return BQPCA_ERR_INVALID_DATASET;
    case bqpca::ErrorCode::Io: return BQPCA_ERR_IO;
    case bqpca::ErrorCode::Format: return BQPCA_ERR_FORMAT;
  }
  return BQPCA_ERR_INTERNAL;
}

bqpca_status set_error(bqpca_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs body(), translating exceptions into status codes.
template <typename F>
bqpca_status guarded(F&& body) {
  try {
    body();
    return BQPCA_OK;
  } catch (const bqpca::Error& e) {
    g_last_direction = e.direction_index.value_or(0);
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(BQPCA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(BQPCA_ERR_INTERNAL, e.what());
  }
}

bqpca_status null_arg(const char* fn) {
  return set_error(BQPCA_ERR_NULL_ARGUMENT, std::string(fn) + ": null argument");
}

bqpca::FitParams to_cpp(const bqpca_fit_params& p) {
  bqpca::FitParams out;
  out.s = p.s;
  out.p = p.p;
  out.k1 = p.k1;
  out.k2 = p.k2;
  out.tol = p.tol;
  out.max_iter = p.max_iter;
  out.init = p.init == BQPCA_INIT_RANDOM ? bqpca::InitKind::Random : bqpca::InitKind::Ones;
  out.seed = p.seed;
  out.small_p_weight =
      p.small_p_uses_current ? bqpca::SmallPWeight::Current : bqpca::SmallPWeight::Initial;
  return out;
}

bqpca_fit_params to_c(const bqpca::FitParams& p) {
  bqpca_fit_params out;
  out.s = p.s;
  out.p = p.p;
  out.k1 = static_cast<uint32_t>(p.k1);
  out.k2 = static_cast<uint32_t>(p.k2);
  out.tol = p.tol;
  out.max_iter = static_cast<uint32_t>(p.max_iter);
  out.init = p.init == bqpca::InitKind::Random ? BQPCA_INIT_RANDOM : BQPCA_INIT_ONES;
  out.seed = p.seed;
  out.small_p_uses_current = p.small_p_weight == bqpca::SmallPWeight::Current;
  return out;
}

bqpca::WeightingScheme to_scheme(bqpca_manner manner, bqpca_transform transform) {
  if (manner < BQPCA_UNWEIGHTED || manner > BQPCA_WEIGHTED_BOTH) {
    bqpca::fail(bqpca::ErrorCode::InvalidParameter, "unknown weighting manner");
  }
  if (transform != BQPCA_TRANSFORM_IDENTITY && transform != BQPCA_TRANSFORM_INVERSE_LOG) {
    bqpca::fail(bqpca::ErrorCode::InvalidParameter, "unknown weight transform");
  }
  return {static_cast<bqpca::Manner>(manner), transform == BQPCA_TRANSFORM_IDENTITY
                                                   ? bqpca::Transform::Identity
                                                   : bqpca::Transform::InverseLog};
}

bqpca_dataset* wrap(bqpca::SampleSet set, std::size_t rows, std::size_t cols) {
  auto* h = new bqpca_dataset;
  h->rows = set.empty() ? rows : set.rows();
  h->cols = set.empty() ? cols : set.cols();
  h->set = std::move(set);
  return h;
}

void copy_planes(const bqpca::QMatrix& q, double* out) {
  const std::size_t plane = q.rows() * q.cols();
  for (int c = 0; c < 4; ++c) {
    for (std::size_t r = 0; r < q.rows(); ++r) {
      for (std::size_t k = 0; k < q.cols(); ++k) {
        out[c * plane + r * q.cols() + k] =
            q.part(c)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
      }
    }
  }
}

void add_sample(bqpca_dataset* h, const char* label, bqpca::QMatrix image) {
  if (h->rows == 0 || h->cols == 0) {
    bqpca::fail(bqpca::ErrorCode::Shape, "dataset has no image dimensions");
  }
  bqpca::Sample s;
  s.label = label;
  s.image = std::move(image);
  s.source = "sample_" + std::to_string(h->set.size()) + ".ppm";
  h->set.samples.push_back(std::move(s));
}

}  // namespace

extern "C" {

const char* bqpca_last_error(void) { return g_last_error.c_str(); }

size_t bqpca_last_error_direction(void) { return g_last_direction; }

const char* bqpca_status_string(bqpca_status status) {
  switch (status) {
    case BQPCA_OK: return "ok";
    case BQPCA_ERR_SHAPE: return "ShapeError";
    case BQPCA_ERR_INVALID_PARAMETER: return "InvalidParameter";
    case BQPCA_ERR_DEGENERATE_DIRECTION: return "DegenerateDirection";
    case BQPCA_ERR_INVALID_WEIGHT: return "InvalidWeight";
    case BQPCA_ERR_INVALID_DATASET: return "InvalidDataset";
    case BQPCA_ERR_IO: return "IoError";
    case BQPCA_ERR_FORMAT: return "FormatError";
    case BQPCA_ERR_NULL_ARGUMENT: return "NullArgument";
    case BQPCA_ERR_INTERNAL: return "InternalError";
  }
  return "UnknownStatus";
}

void bqpca_fit_params_init(bqpca_fit_params* params) {
  if (params) *params = to_c(bqpca::FitParams{});
}

// ---------------------------------------------------------------- datasets

bqpca_status bqpca_dataset_load(const char* root, bqpca_dataset** out) {
  if (!root || !out) return null_arg("bqpca_dataset_load");
  return guarded([&] { *out = wrap(bqpca::load_dataset(root), 0, 0); });
}

bqpca_status bqpca_dataset_create(size_t rows, size_t cols, bqpca_dataset** out) {
  if (!out) return null_arg("bqpca_dataset_create");
  if (rows == 0 || cols == 0) {
    return set_error(BQPCA_ERR_SHAPE, "bqpca_dataset_create: rows and cols must be positive");
  }
  return guarded([&] { *out = wrap({}, rows, cols); });
}

bqpca_status bqpca_dataset_add_rgb(bqpca_dataset* set, const char* label, const uint8_t* rgb) {
  if (!set || !label || !rgb) return null_arg("bqpca_dataset_add_rgb");
  return guarded([&] {
    bqpca::RgbImage img;
    img.height = set->rows;
    img.width = set->cols;
    img.pixels.assign(rgb, rgb + 3 * set->rows * set->cols);
    add_sample(set, label, bqpca::to_quaternion(img));
  });
}

bqpca_status bqpca_dataset_add_planes(bqpca_dataset* set, const char* label,
                                      const double* planes) {
  if (!set || !label || !planes) return null_arg("bqpca_dataset_add_planes");
  return guarded([&] {
    bqpca::QMatrix q(set->rows, set->cols);
    const std::size_t plane = set->rows * set->cols;
    for (int c = 0; c < 4; ++c) {
      for (std::size_t r = 0; r < set->rows; ++r) {
        for (std::size_t k = 0; k < set->cols; ++k) {
          q.part(c)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              planes[c * plane + r * set->cols + k];
        }
      }
    }
    add_sample(set, label, std::move(q));
  });
}

void bqpca_dataset_free(bqpca_dataset* set) { delete set; }

size_t bqpca_dataset_size(const bqpca_dataset* set) { return set ? set->set.size() : 0; }
size_t bqpca_dataset_rows(const bqpca_dataset* set) { return set ? set->rows : 0; }
size_t bqpca_dataset_cols(const bqpca_dataset* set) { return set ? set->cols : 0; }

const char* bqpca_dataset_label(const bqpca_dataset* set, size_t i) {
  if (!set || i >= set->set.size()) return nullptr;
  return set->set.samples[i].label.c_str();
}

const char* bqpca_dataset_source(const bqpca_dataset* set, size_t i) {
  if (!set || i >= set->set.size()) return nullptr;
  return set->set.samples[i].source.c_str();
}

bqpca_status bqpca_dataset_image(const bqpca_dataset* set, size_t i, double* planes) {
  if (!set || !planes) return null_arg("bqpca_dataset_image");
  if (i >= set->set.size()) {
    return set_error(BQPCA_ERR_INVALID_PARAMETER, "bqpca_dataset_image: index out of range");
  }
  return guarded([&] { copy_planes(set->set.samples[i].image, planes); });
}

bqpca_status bqpca_dataset_split(const bqpca_dataset* set, const double fractions[3],
                                 uint64_t seed, bqpca_dataset** train,
                                 bqpca_dataset** validation, bqpca_dataset** test) {
  if (!set || !fractions) return null_arg("bqpca_dataset_split");
  return guarded([&] {
    auto parts = bqpca::split(set->set, {fractions[0], fractions[1], fractions[2]}, seed);
    if (train) *train = wrap(std::move(parts.train), set->rows, set->cols);
    if (validation) *validation = wrap(std::move(parts.validation), set->rows, set->cols);
    if (test) *test = wrap(std::move(parts.test), set->rows, set->cols);
  });
}

bqpca_status bqpca_dataset_export(const bqpca_dataset* set, const char* dir) {
  if (!set || !dir) return null_arg("bqpca_dataset_export");
  return guarded([&] { bqpca::export_dataset(set->set, dir); });
}

// ------------------------------------------------------------------ basis

bqpca_status bqpca_fit(const bqpca_dataset* train, const bqpca_fit_params* params,
                       bqpca_basis** out) {
  if (!train || !params || !out) return null_arg("bqpca_fit");
  g_last_direction = 0;
  return guarded([&] {
    const bqpca::SampleSet centered = bqpca::center(train->set);
    *out = new bqpca_basis{bqpca::fit(centered.images(), centered.mean, to_cpp(*params))};
  });
}

bqpca_status bqpca_basis_save(const bqpca_basis* basis, const char* path) {
  if (!basis || !path) return null_arg("bqpca_basis_save");
  return guarded([&] { bqpca::save_basis(basis->basis, path); });
}

bqpca_status bqpca_basis_load(const char* path, bqpca_basis** out) {
  if (!path || !out) return null_arg("bqpca_basis_load");
  return guarded([&] { *out = new bqpca_basis{bqpca::load_basis(path)}; });
}

bqpca_status bqpca_basis_truncate(const bqpca_basis* basis, size_t k1, size_t k2,
                                  bqpca_basis** out) {
  if (!basis || !out) return null_arg("bqpca_basis_truncate");
  return guarded([&] { *out = new bqpca_basis{bqpca::truncate(basis->basis, k1, k2)}; });
}

void bqpca_basis_free(bqpca_basis* basis) { delete basis; }

bqpca_status bqpca_basis_dims(const bqpca_basis* basis, size_t* rows, size_t* cols, size_t* k1,
                              size_t* k2) {
  if (!basis) return null_arg("bqpca_basis_dims");
  if (rows) *rows = basis->basis.rows();
  if (cols) *cols = basis->basis.cols();
  if (k1) *k1 = basis->basis.k1();
  if (k2) *k2 = basis->basis.k2();
  return BQPCA_OK;
}

bqpca_status bqpca_basis_params(const bqpca_basis* basis, bqpca_fit_params* out) {
  if (!basis || !out) return null_arg("bqpca_basis_params");
  *out = to_c(basis->basis.params);
  return BQPCA_OK;
}

bqpca_status bqpca_basis_weights(const bqpca_basis* basis, bqpca_side side, double* out) {
  if (!basis || !out) return null_arg("bqpca_basis_weights");
  const auto& d = side == BQPCA_SIDE_LEFT ? basis->basis.d_left : basis->basis.d_right;
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i];
  return BQPCA_OK;
}

bqpca_status bqpca_basis_projector(const bqpca_basis* basis, bqpca_side side, double* planes) {
  if (!basis || !planes) return null_arg("bqpca_basis_projector");
  return guarded(
      [&] { copy_planes(side == BQPCA_SIDE_LEFT ? basis->basis.u : basis->basis.v, planes); });
}

bqpca_status bqpca_basis_direction_info(const bqpca_basis* basis, bqpca_side side, size_t idx,
                                        double* objective, size_t* iterations, int* converged) {
  if (!basis) return null_arg("bqpca_basis_direction_info");
  const auto& info = side == BQPCA_SIDE_LEFT ? basis->basis.left_info : basis->basis.right_info;
  if (idx >= info.size()) {
    return set_error(BQPCA_ERR_INVALID_PARAMETER,
                     "bqpca_basis_direction_info: no diagnostics for this direction");
  }
  if (objective) *objective = info[idx].objective;
  if (iterations) *iterations = info[idx].iterations;
  if (converged) *converged = info[idx].converged ? 1 : 0;
  return BQPCA_OK;
}

size_t bqpca_basis_warning_count(const bqpca_basis* basis) {
  return basis ? basis->basis.warnings.size() : 0;
}

const char* bqpca_basis_warning(const bqpca_basis* basis, size_t i) {
  if (!basis || i >= basis->basis.warnings.size()) return nullptr;
  return basis->basis.warnings[i].c_str();
}

// --------------------------------------------------------------- weighting

bqpca_status bqpca_select_weighting(const bqpca_dataset* train, const bqpca_fit_params* params,
                                    size_t repeats, double train_fraction, uint64_t seed,
                                    bqpca_transform transform, bqpca_manner* chosen,
                                    double accuracy[4]) {
  if (!train || !params || !chosen) return null_arg("bqpca_select_weighting");
  return guarded([&] {
    bqpca::SelectionConfig config;
    config.repeats = repeats;
    config.train_fraction = train_fraction;
    config.seed = seed;
    config.transform = to_scheme(BQPCA_UNWEIGHTED, transform).transform;
    const auto result = bqpca::select_weighting(train->set, to_cpp(*params), config);
    *chosen = static_cast<bqpca_manner>(result.scheme.manner);
    if (accuracy) {
      for (int i = 0; i < 4; ++i) accuracy[i] = result.accuracy[static_cast<std::size_t>(i)];
    }
  });
}

// ------------------------------------------------------------- recognition

bqpca_status bqpca_gallery_build(const bqpca_dataset* train, const bqpca_basis* basis,
                                 bqpca_manner manner, bqpca_transform transform,
                                 bqpca_gallery** out) {
  if (!train || !basis || !out) return null_arg("bqpca_gallery_build");
  return guarded([&] {
    *out = new bqpca_gallery{
        bqpca::build_gallery(train->set, basis->basis, to_scheme(manner, transform))};
  });
}

void bqpca_gallery_free(bqpca_gallery* gallery) { delete gallery; }

size_t bqpca_gallery_size(const bqpca_gallery* gallery) {
  return gallery ? gallery->gallery.size() : 0;
}

bqpca_status bqpca_classify(const bqpca_gallery* gallery, const bqpca_dataset* probes, size_t i,
                            const char** label, double* distance) {
  if (!gallery || !probes || !label) return null_arg("bqpca_classify");
  if (i >= probes->set.size()) {
    return set_error(BQPCA_ERR_INVALID_PARAMETER, "bqpca_classify: probe index out of range");
  }
  return guarded([&] {
    bqpca::SampleSet one;
    one.samples.push_back(probes->set.samples[i]);
    const auto images = bqpca::centered_images(one, gallery->gallery.basis);
    const bqpca::Match m = bqpca::classify(images[0], gallery->gallery);
    *label = gallery->gallery.labels[m.index].c_str();
    if (distance) *distance = m.distance;
  });
}

bqpca_status bqpca_evaluate(const bqpca_gallery* gallery, const bqpca_dataset* test,
                            double* accuracy) {
  if (!gallery || !test || !accuracy) return null_arg("bqpca_evaluate");
  return guarded([&] { *accuracy = bqpca::evaluate(test->set, gallery->gallery); });
}

// ---------------------------------------------------------- reconstruction

bqpca_status bqpca_reconstruct(const bqpca_dataset* set, const bqpca_basis* basis,
                               bqpca_manner manner, bqpca_transform transform,
                               bqpca_dataset** recs, double* ratio) {
  if (!set || !basis) return null_arg("bqpca_reconstruct");
  return guarded([&] {
    bqpca::SampleSet out = bqpca::reconstruct_set(set->set, basis->basis,
                                                  to_scheme(manner, transform));
    if (ratio) *ratio = bqpca::reconstruction_ratio(set->set.images(), out.images());
    if (recs) *recs = wrap(std::move(out), set->rows, set->cols);
  });
}

}  // extern "C"
