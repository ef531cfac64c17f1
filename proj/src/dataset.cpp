#include "exactnn/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace exactnn::dataset {

namespace {

using Json = nlohmann::ordered_json;

std::vector<FaceVariant> build_variants() {
  std::vector<FaceVariant> out;
  for (Label label : {Label::Happy, Label::Sad}) {
    for (Index eye_row = 1; eye_row <= 2; ++eye_row) {
      for (Index eye_col = 1; eye_col <= 3; ++eye_col) {
        for (Index top = 4; top <= kImageSize - 3; ++top) {
          for (Index width = 1; width <= kImageSize - 4; ++width) {
            for (Index left = 0; left + width + 4 <= kImageSize; ++left) {
              out.push_back({eye_row, eye_col, top, left, width, label});
            }
          }
        }
      }
    }
  }
  return out;
}

// Unbiased draw in [0, n) from a generator whose output sequence is fixed by
// the standard, so shuffles are identical across library implementations.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = gen();
  } while (x >= limit);
  return x % n;
}

template <class T>
void shuffle(std::vector<T>& items, std::mt19937_64& gen) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(gen, i)]);
  }
}

bool pixel(const FaceImage& img, Index r, Index c) {
  if (r < 0 || c < 0 || r >= img.pixels.rows() || c >= img.pixels.cols()) return false;
  return img.pixels.at(r, c) == 1;
}

}  // namespace

const char* label_name(Label label) { return label == Label::Happy ? "happy" : "sad"; }

Vector<Rational> FaceImage::as_input() const {
  Vector<Rational> out(pixels.rows() * pixels.cols());
  for (Index i = 0; i < pixels.rows(); ++i) {
    for (Index j = 0; j < pixels.cols(); ++j) out(i * pixels.cols() + j) = Rational(pixels.at(i, j));
  }
  return out;
}

const std::vector<FaceVariant>& variant_space() {
  static const std::vector<FaceVariant> variants = build_variants();
  return variants;
}

std::size_t variant_count() { return variant_space().size(); }

FaceImage render(const FaceVariant& v) {
  Matrix<Integer>::DenseStorage px = Matrix<Integer>::DenseStorage::Zero(kImageSize, kImageSize);
  px(v.eye_row, v.eye_col) = 1;
  px(v.eye_row, kImageSize - 1 - v.eye_col) = 1;

  const Index t = v.mouth_top;
  const Index l = v.mouth_left;
  const Index w = v.mouth_width;
  const bool smile = v.label == Label::Happy;
  const Index outer_row = smile ? t : t + 2;
  const Index run_row = smile ? t + 2 : t;
  px(outer_row, l) = 1;
  px(t + 1, l + 1) = 1;
  for (Index c = l + 2; c <= l + w + 1; ++c) px(run_row, c) = 1;
  px(t + 1, l + w + 2) = 1;
  px(outer_row, l + w + 3) = 1;

  return FaceImage{Matrix<Integer>(std::move(px)), v.label, Region{t, t + 2, l, l + w + 3}};
}

bool happy_spec(const FaceImage& img) {
  const Region& m = img.mouth_region;
  for (Index t = m.row_begin; t + 2 <= m.row_end; ++t) {
    for (Index l = m.col_begin; l <= m.col_end; ++l) {
      for (Index w = 1; l + w + 3 <= m.col_end; ++w) {
        bool ok = pixel(img, t, l) && pixel(img, t + 1, l + 1) && pixel(img, t + 1, l + w + 2) &&
                  pixel(img, t, l + w + 3);
        for (Index c = l + 2; ok && c <= l + w + 1; ++c) ok = pixel(img, t + 2, c);
        if (ok) return true;
      }
    }
  }
  return false;
}

DatasetManifest generate(std::uint64_t seed, std::size_t count) {
  std::vector<FaceVariant> happy;
  std::vector<FaceVariant> sad;
  for (const auto& v : variant_space()) (v.label == Label::Happy ? happy : sad).push_back(v);

  const std::size_t happy_n = (count + 1) / 2;
  const std::size_t sad_n = count / 2;
  if (happy_n > happy.size() || sad_n > sad.size()) {
    throw std::invalid_argument("count " + std::to_string(count) + " exceeds the " +
                                std::to_string(variant_count()) + " available face variants");
  }

  std::mt19937_64 gen(seed);
  shuffle(happy, gen);
  shuffle(sad, gen);

  DatasetManifest manifest;
  manifest.seed = seed;
  for (std::size_t i = 0; i < happy_n || i < sad_n; ++i) {
    if (i < happy_n) manifest.images.push_back(render(happy[i]));
    if (i < sad_n) manifest.images.push_back(render(sad[i]));
  }
  manifest.happy_count = happy_n;
  manifest.sad_count = sad_n;
  return manifest;
}

Json manifest_to_json(const DatasetManifest& manifest) {
  Json doc;
  doc["seed"] = manifest.seed;
  doc["count"] = manifest.images.size();
  doc["counts"] = Json{{"happy", manifest.happy_count}, {"sad", manifest.sad_count}};
  Json images = Json::array();
  for (std::size_t k = 0; k < manifest.images.size(); ++k) {
    const auto& img = manifest.images[k];
    Json rows = Json::array();
    for (Index i = 0; i < img.pixels.rows(); ++i) {
      std::string row;
      for (Index j = 0; j < img.pixels.cols(); ++j) row.push_back(img.pixels.at(i, j) == 1 ? '1' : '0');
      rows.push_back(row);
    }
    Json rec;
    rec["id"] = k;
    rec["label"] = label_name(img.label);
    rec["mouth_region"] = Json{{"rows", {img.mouth_region.row_begin, img.mouth_region.row_end}},
                               {"cols", {img.mouth_region.col_begin, img.mouth_region.col_end}}};
    rec["pixels"] = std::move(rows);
    images.push_back(std::move(rec));
  }
  doc["images"] = std::move(images);
  return doc;
}

DatasetManifest manifest_from_json(const Json& doc) {
  DatasetManifest manifest;
  manifest.seed = doc.at("seed").get<std::uint64_t>();
  for (const auto& rec : doc.at("images")) {
    FaceImage img;
    const std::string label = rec.at("label").get<std::string>();
    if (label != "happy" && label != "sad") throw std::invalid_argument("unknown label " + label);
    img.label = label == "happy" ? Label::Happy : Label::Sad;
    const auto& rows = rec.at("pixels");
    Matrix<Integer>::DenseStorage px(static_cast<Index>(rows.size()),
                                     rows.empty() ? 0 : static_cast<Index>(rows[0].get<std::string>().size()));
    for (Index i = 0; i < px.rows(); ++i) {
      const std::string row = rows[static_cast<std::size_t>(i)].get<std::string>();
      if (static_cast<Index>(row.size()) != px.cols()) throw std::invalid_argument("ragged image");
      for (Index j = 0; j < px.cols(); ++j) {
        if (row[static_cast<std::size_t>(j)] != '0' && row[static_cast<std::size_t>(j)] != '1') {
          throw std::invalid_argument("image pixels must be 0 or 1");
        }
        px(i, j) = row[static_cast<std::size_t>(j)] == '1' ? 1 : 0;
      }
    }
    img.pixels = Matrix<Integer>(std::move(px));
    const auto& region = rec.at("mouth_region");
    img.mouth_region = Region{region.at("rows")[0].get<Index>(), region.at("rows")[1].get<Index>(),
                              region.at("cols")[0].get<Index>(), region.at("cols")[1].get<Index>()};
    (img.label == Label::Happy ? manifest.happy_count : manifest.sad_count)++;
    manifest.images.push_back(std::move(img));
  }
  return manifest;
}

std::string to_pgm(const FaceImage& img) {
  std::ostringstream out;
  out << "P2\n" << img.pixels.cols() << " " << img.pixels.rows() << "\n1\n";
  for (Index i = 0; i < img.pixels.rows(); ++i) {
    for (Index j = 0; j < img.pixels.cols(); ++j) {
      out << img.pixels.at(i, j) << (j + 1 == img.pixels.cols() ? "\n" : " ");
    }
  }
  return out.str();
}

void write_dataset(const DatasetManifest& manifest, const std::filesystem::path& dir,
                   bool write_pgm) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "manifest.json") << manifest_to_json(manifest).dump(2) << "\n";
  if (!write_pgm) return;
  for (std::size_t k = 0; k < manifest.images.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%04zu.pgm", k);
    std::ofstream(dir / name) << to_pgm(manifest.images[k]);
  }
}

DatasetManifest read_dataset(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "manifest.json" : path;
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open dataset manifest " + file.string());
  return manifest_from_json(Json::parse(in));
}

}  // namespace exactnn::dataset
