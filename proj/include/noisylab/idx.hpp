#pragma once

#include "noisylab/dataset.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace noisylab {

enum class IdxErrorKind { MissingFile, BadMagic, CountMismatch, Truncated };

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  IdxErrorKind kind() const noexcept { return kind_; }

 private:
  IdxErrorKind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// Reads an unsigned-byte IDX image file (rank 3) and label file (rank 1).
// Dimension sizes are big-endian. Features are flattened row-major to
// rows*cols and divided by 255 when `normalize` is set. The class count is
// max(label) + 1 (at least 2).
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, bool normalize);

}  // namespace noisylab
