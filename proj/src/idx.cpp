#include "noisylab/idx.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <vector>

namespace noisylab {

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorKind::MissingFile, "cannot open IDX file " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxErrorKind::Truncated, "IDX header truncated in " + path.string());
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, bool normalize) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  if (read_be32(images, 0, images_path) != kIdxImageMagic) {
    throw IdxError(IdxErrorKind::BadMagic, "bad IDX image magic in " + images_path.string());
  }
  if (read_be32(labels, 0, labels_path) != kIdxLabelMagic) {
    throw IdxError(IdxErrorKind::BadMagic, "bad IDX label magic in " + labels_path.string());
  }
  const std::size_t n_images = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t n_labels = read_be32(labels, 4, labels_path);
  if (n_images != n_labels) {
    throw IdxError(IdxErrorKind::CountMismatch,
                   "IDX count mismatch: " + std::to_string(n_images) + " images vs " +
                       std::to_string(n_labels) + " labels");
  }
  const std::size_t d = rows * cols;
  constexpr std::size_t kImageHeader = 16;
  constexpr std::size_t kLabelHeader = 8;
  if (images.size() < kImageHeader + n_images * d) {
    throw IdxError(IdxErrorKind::Truncated, "IDX image payload truncated in " + images_path.string());
  }
  if (labels.size() < kLabelHeader + n_labels) {
    throw IdxError(IdxErrorKind::Truncated, "IDX label payload truncated in " + labels_path.string());
  }
  if (n_images == 0 || d == 0) {
    throw IdxError(IdxErrorKind::Truncated, "IDX file holds no samples");
  }

  FeatureMatrix features(static_cast<Eigen::Index>(n_images), static_cast<Eigen::Index>(d));
  const double scale = normalize ? 1.0 / 255.0 : 1.0;
  for (std::size_t i = 0; i < n_images; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          images[kImageHeader + i * d + j] * scale;
    }
  }
  std::vector<int> y(n_labels);
  int max_label = 1;
  for (std::size_t i = 0; i < n_labels; ++i) {
    y[i] = labels[kLabelHeader + i];
    max_label = std::max(max_label, y[i]);
  }
  return make_clean_dataset(std::move(features), std::move(y), max_label + 1);
}

}  // namespace noisylab
