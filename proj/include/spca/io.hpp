#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spca/ensemble.hpp"
#include "spca/numerics.hpp"

namespace spca {

// Comma-separated rows written at 17 significant digits. An optional header
// line is emitted first; readers skip a first line that does not parse as
// numbers. Failures to open or parse raise IoError / InvalidInput.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header = {});
Matrix read_matrix_csv(const std::filesystem::path& path);

// Samples as an n × p table with header x0,...,x{p−1}.
void write_sample_batch(const std::filesystem::path& path, const SampleBatch& batch);
SampleBatch read_sample_batch(const std::filesystem::path& path);

// Everything needed to rebuild a SpikedModel and locate its samples.
struct BatchMetadata {
  int p = 0;
  int k = 0;
  double beta = 0.0;
  std::vector<int> support;
  std::vector<int> signs;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int n = 0;
  std::optional<Matrix> gamma;  // absent for the identity base
  std::string data_path;        // relative to the metadata file
};

BatchMetadata metadata_for(const SpikedModel& model, const SampleBatch& batch, const std::string& data_path);
SpikedModel model_from(const BatchMetadata& md);

void write_metadata(const std::filesystem::path& path, const BatchMetadata& md);
BatchMetadata read_metadata(const std::filesystem::path& path);

}  // namespace spca
