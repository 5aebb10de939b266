#include "dataset.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <random>

#include <png.h>

#include "error.hpp"

namespace bqpca {

namespace fs = std::filesystem;

// ------------------------------------------------------------- SampleSet

std::vector<QMatrix> SampleSet::images() const {
  std::vector<QMatrix> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.image);
  return out;
}

std::vector<std::string> SampleSet::labels() const {
  std::vector<std::string> out;
  for (const auto& s : samples) {
    if (std::find(out.begin(), out.end(), s.label) == out.end()) out.push_back(s.label);
  }
  return out;
}

// ------------------------------------------------------------ raster I/O

namespace {

[[noreturn]] void io_fail(const fs::path& path, const std::string& what) {
  fail(ErrorCode::Io, path.string() + ": " + what);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string ppm_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) io_fail(path, "truncated PPM header");
  return tok;
}

std::size_t ppm_number(std::istream& in, const fs::path& path) {
  const std::string tok = ppm_token(in, path);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) {
        return std::isdigit(static_cast<unsigned char>(ch));
      })) {
    io_fail(path, "malformed PPM header field '" + tok + "'");
  }
  return static_cast<std::size_t>(std::stoull(tok));
}

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

}  // namespace

RgbImage read_ppm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  if (ppm_token(in, path) != "P6") io_fail(path, "not a binary (P6) PPM");
  RgbImage img;
  img.width = ppm_number(in, path);
  img.height = ppm_number(in, path);
  const std::size_t maxval = ppm_number(in, path);
  if (maxval != 255) io_fail(path, "only 8-bit PPM (maxval 255) is supported");
  if (img.width == 0 || img.height == 0) io_fail(path, "empty image");
  // ppm_token consumed exactly one whitespace byte after maxval.
  img.pixels.resize(3 * img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) {
    io_fail(path, "truncated PPM pixel data");
  }
  return img;
}

void write_ppm(const fs::path& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) io_fail(path, "write failed");
}

RgbImage read_png(const fs::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.string().c_str())) {
    io_fail(path, std::string("cannot read PNG: ") + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  RgbImage img;
  img.width = png.width;
  img.height = png.height;
  img.pixels.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    io_fail(path, "cannot decode PNG: " + msg);
  }
  return img;
}

void write_png(const fs::path& path, const RgbImage& image) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.pixels.data(), 0,
                               nullptr)) {
    io_fail(path, std::string("cannot write PNG: ") + png.message);
  }
}

QMatrix to_quaternion(const RgbImage& image) {
  QMatrix q(image.height, image.width);
  for (std::size_t r = 0; r < image.height; ++r) {
    for (std::size_t c = 0; c < image.width; ++c) {
      const std::uint8_t* px = &image.pixels[3 * (r * image.width + c)];
      q.set(r, c, {0.0, px[0] / 255.0, px[1] / 255.0, px[2] / 255.0});
    }
  }
  return q;
}

RgbImage to_rgb(const QMatrix& image) {
  RgbImage img;
  img.height = image.rows();
  img.width = image.cols();
  img.pixels.resize(3 * img.width * img.height);
  auto quantize = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  for (std::size_t r = 0; r < img.height; ++r) {
    for (std::size_t c = 0; c < img.width; ++c) {
      const Quaternion q = image(r, c);
      std::uint8_t* px = &img.pixels[3 * (r * img.width + c)];
      px[0] = quantize(q.w1);
      px[1] = quantize(q.w2);
      px[2] = quantize(q.w3);
    }
  }
  return img;
}

// --------------------------------------------------------------- dataset

SampleSet load_dataset(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) io_fail(root, "dataset root is not a directory");

  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  SampleSet set;
  for (const auto& dir : class_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string ext = lower_extension(entry.path());
      if (ext == ".png" || ext == ".ppm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
      return a.filename().string() < b.filename().string();
    });
    for (const auto& file : files) {
      const bool png = lower_extension(file) == ".png";
      const RgbImage img = png ? read_png(file) : read_ppm(file);
      Sample s{dir.filename().string(), to_quaternion(img), file.filename().string(),
               png ? ImageFormat::Png : ImageFormat::Ppm};
      if (!set.samples.empty() &&
          (s.image.rows() != set.rows() || s.image.cols() != set.cols())) {
        fail(ErrorCode::InvalidDataset,
             file.string() + ": image is " + std::to_string(s.image.rows()) + "x" +
                 std::to_string(s.image.cols()) + " but the dataset is " +
                 std::to_string(set.rows()) + "x" + std::to_string(set.cols()));
      }
      set.samples.push_back(std::move(s));
    }
  }
  if (set.empty()) fail(ErrorCode::InvalidDataset, root.string() + ": no images found");
  return set;
}

void export_dataset(const SampleSet& set, const fs::path& dir) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Sample& s = set.samples[i];
    const fs::path class_dir = dir / s.label;
    fs::create_directories(class_dir);
    std::string name = s.source;
    if (name.empty()) {
      name = "sample_" + std::to_string(i) + (s.format == ImageFormat::Png ? ".png" : ".ppm");
    }
    const RgbImage img = to_rgb(s.image);
    if (s.format == ImageFormat::Png) {
      write_png(class_dir / name, img);
    } else {
      write_ppm(class_dir / name, img);
    }
  }
}

SampleSet center_with(const SampleSet& set, const QMatrix& mean) {
  SampleSet out = set;
  for (auto& s : out.samples) s.image -= mean;
  out.mean = set.centered ? set.mean + mean : mean;
  out.centered = true;
  return out;
}

SampleSet center(const SampleSet& set) {
  if (set.empty()) fail(ErrorCode::InvalidDataset, "center: empty sample set");
  QMatrix mean(set.rows(), set.cols());
  for (const auto& s : set.samples) mean += s.image;
  mean *= 1.0 / static_cast<double>(set.size());
  return center_with(set, mean);
}

Split split(const SampleSet& set, std::array<double, 3> fractions, std::uint64_t seed) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) fail(ErrorCode::InvalidParameter, "split: fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCode::InvalidParameter, "split: fractions must sum to 1");
  }

  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < set.size(); ++i) by_class[set.samples[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  std::array<std::vector<std::size_t>, 3> parts;
  for (auto& [label, idx] : by_class) {
    // Fisher-Yates driven by raw engine output, for portable determinism.
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng() % i]);
    }
    const std::size_t n = idx.size();
    std::array<std::size_t, 3> count{};
    std::size_t needed = 0;
    for (int p = 1; p < 3; ++p) {
      if (fractions[p] > 0.0) {
        count[p] = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(fractions[p] * static_cast<double>(n) + 1e-9)));
        ++needed;
      }
    }
    if (fractions[0] > 0.0) ++needed;
    if (n < needed || count[1] + count[2] + (fractions[0] > 0.0 ? 1 : 0) > n) {
      fail(ErrorCode::InvalidDataset, "split: class '" + label + "' has " + std::to_string(n) +
                                          " samples, too few for the requested split");
    }
    count[0] = n - count[1] - count[2];
    std::size_t pos = 0;
    for (int p = 0; p < 3; ++p) {
      for (std::size_t c = 0; c < count[p]; ++c) parts[p].push_back(idx[pos++]);
    }
  }

  std::array<SampleSet, 3> sets;
  for (int p = 0; p < 3; ++p) {
    std::sort(parts[p].begin(), parts[p].end());
    for (std::size_t i : parts[p]) sets[p].samples.push_back(set.samples[i]);
  }
  return {std::move(sets[0]), std::move(sets[1]), std::move(sets[2])};
}

// ---------------------------------------------------------- basis format

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'B', 'Q', 'P', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 5 * 4 + 2 * 8;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void plane(const Plane& p) {
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) f64(p(r, c));
    }
  }
  void planes(const QMatrix& q) {
    for (int c = 0; c < 4; ++c) plane(q.part(c));
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }
  void raw(std::span<const std::uint8_t> b) { bytes_.insert(bytes_.end(), b.begin(), b.end()); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  QMatrix planes(std::size_t rows, std::size_t cols) {
    QMatrix q(rows, cols);
    for (int c = 0; c < 4; ++c) {
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < cols; ++k) {
          q.part(c)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = f64();
        }
      }
    }
    return q;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (remaining() < n) fail(ErrorCode::Format, "basis file truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

bool all_finite(const QMatrix& q) {
  for (int c = 0; c < 4; ++c) {
    if (!q.part(c).allFinite()) return false;
  }
  return true;
}

double orthonormality_error(const QMatrix& q) {
  return fro_norm(matmul(conj_transpose(q), q) - QMatrix::identity(q.cols()));
}

}  // namespace

std::vector<std::uint8_t> encode_basis(const BasisPair& basis) {
  const std::size_t m = basis.rows();
  const std::size_t n = basis.cols();
  if (basis.mean.rows() != m || basis.mean.cols() != n || basis.d_left.size() != basis.k1() ||
      basis.d_right.size() != basis.k2()) {
    fail(ErrorCode::Shape, "save_basis: inconsistent basis dimensions");
  }
  Writer w;
  w.raw(kMagic);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(m));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(basis.k1()));
  w.u32(static_cast<std::uint32_t>(basis.k2()));
  w.f64(basis.params.s);
  w.f64(basis.params.p);
  w.planes(basis.u);
  w.planes(basis.v);
  for (double d : basis.d_left) w.f64(d);
  for (double d : basis.d_right) w.f64(d);
  w.planes(basis.mean);
  return w.take();
}

BasisPair decode_basis(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) fail(ErrorCode::Format, "basis file truncated (header)");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    fail(ErrorCode::Format, "bad magic: not a BQP1 basis file");
  }
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    fail(ErrorCode::Format, "unsupported basis format version " + std::to_string(version));
  }
  const std::uint64_t m = r.u32();
  const std::uint64_t n = r.u32();
  const std::uint64_t k1 = r.u32();
  const std::uint64_t k2 = r.u32();
  if (m == 0 || n == 0 || k1 == 0 || k2 == 0 || k1 > m || k2 > n) {
    fail(ErrorCode::Format, "corrupt basis header dimensions");
  }
  const double s = r.f64();
  const double p = r.f64();
  if (!(s >= 1.0) || !std::isfinite(s) || !(p > 0.0)) {
    fail(ErrorCode::Format, "corrupt basis header parameters");
  }
  using Wide = unsigned __int128;
  const Wide doubles = Wide{4} * m * k1 + Wide{4} * n * k2 + k1 + k2 + Wide{4} * m * n;
  const Wide available = r.remaining();
  if (available < doubles * 8) fail(ErrorCode::Format, "basis file truncated");
  if (available > doubles * 8) fail(ErrorCode::Format, "trailing bytes after basis data");

  BasisPair b;
  b.params.s = s;
  b.params.p = p;
  b.params.k1 = k1;
  b.params.k2 = k2;
  b.u = r.planes(m, k1);
  b.v = r.planes(n, k2);
  b.d_left.resize(k1);
  b.d_right.resize(k2);
  for (auto& d : b.d_left) d = r.f64();
  for (auto& d : b.d_right) d = r.f64();
  b.mean = r.planes(m, n);

  if (!all_finite(b.u) || !all_finite(b.v) || !all_finite(b.mean)) {
    fail(ErrorCode::Format, "basis file contains non-finite values");
  }
  for (double d : b.d_left) {
    if (!(d >= 0.0) || !std::isfinite(d)) fail(ErrorCode::Format, "corrupt left weights");
  }
  for (double d : b.d_right) {
    if (!(d >= 0.0) || !std::isfinite(d)) fail(ErrorCode::Format, "corrupt right weights");
  }
  if (orthonormality_error(b.u) > 1e-8 || orthonormality_error(b.v) > 1e-8) {
    fail(ErrorCode::Format, "basis file projectors are not orthonormal");
  }
  return b;
}

void save_basis(const BasisPair& basis, const fs::path& path) {
  const auto bytes = encode_basis(basis);
  std::ofstream out(path, std::ios::binary);
  if (!out) io_fail(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) io_fail(path, "write failed");
}

BasisPair load_basis(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail(path, "cannot open");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return decode_basis(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace bqpca
