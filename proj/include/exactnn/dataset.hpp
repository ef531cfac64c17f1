#ifndef EXACTNN_DATASET_HPP
#define EXACTNN_DATASET_HPP

#include "exactnn/layers.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace exactnn::dataset {

inline constexpr Index kImageSize = 9;

enum class Label { Happy, Sad };

const char* label_name(Label label);

/// Inclusive row/column span of the mouth.
struct Region {
  Index row_begin = 0;
  Index row_end = 0;
  Index col_begin = 0;
  Index col_end = 0;

  bool contains(Index r, Index c) const {
    return r >= row_begin && r <= row_end && c >= col_begin && c <= col_end;
  }
  friend bool operator==(const Region&, const Region&) = default;
};

struct FaceImage {
  Matrix<Integer> pixels;  // 9x9, entries 0/1
  Label label = Label::Happy;
  Region mouth_region;

  Tensor<Integer> as_tensor() const { return Tensor<Integer>(std::vector<Matrix<Integer>>{pixels}); }
  Vector<Rational> as_input() const;
};

struct DatasetManifest {
  std::uint64_t seed = 0;
  std::vector<FaceImage> images;
  std::size_t happy_count = 0;
  std::size_t sad_count = 0;
};

/// Procedural layout parameters of one face.
///
/// Eyes are single pixels at (eye_row, eye_col) and (eye_row, 8 - eye_col).
/// The mouth is a three-row figure whose top row is `mouth_top`; its central
/// horizontal run has `mouth_width` pixels starting at `mouth_left + 2`, and
/// each side carries a two-pixel diagonal. A smile has the run on the bottom
/// row with the diagonals rising outward:
///
///     X . . . . X        row mouth_top
///     . X . . X .        row mouth_top + 1
///     . . X X . .        row mouth_top + 2
///
/// A frown is the same figure flipped vertically.
struct FaceVariant {
  Index eye_row;
  Index eye_col;
  Index mouth_top;
  Index mouth_left;
  Index mouth_width;
  Label label;
};

/// Every distinct procedural variant, happy ones first.
const std::vector<FaceVariant>& variant_space();

/// Size of the variant space (540: 270 per label).
std::size_t variant_count();

FaceImage render(const FaceVariant& v);

/// True iff the mouth region contains a smile template of any run width:
/// pixels (t, l), (t+1, l+1), the run (t+2, l+2 .. l+w+1), (t+1, l+w+2)
/// and (t, l+w+3), all set, all inside the region.
bool happy_spec(const FaceImage& img);

/// Deterministic for a fixed seed; ceil(count/2) happy and floor(count/2)
/// sad images, all distinct. Throws std::invalid_argument when count exceeds
/// the per-label variant space.
DatasetManifest generate(std::uint64_t seed, std::size_t count);

nlohmann::ordered_json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::ordered_json& doc);

/// Writes manifest.json and, when requested, one img_NNNN.pgm per image.
void write_dataset(const DatasetManifest& manifest, const std::filesystem::path& dir,
                   bool write_pgm = true);
/// Accepts either the directory or the manifest file itself.
DatasetManifest read_dataset(const std::filesystem::path& path);

std::string to_pgm(const FaceImage& img);

}  // namespace exactnn::dataset

#endif
