#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adev/cond_regression.hpp"
#include "adev/generator.hpp"
#include "adev/hrpcf.hpp"

namespace adev {

// Binary container shared by every trained object:
//
//   "ADEV" | u32 version | u32 kind | u32 n | u32 d | u32 T
//   | u32 hidden_count | u32 hidden[hidden_count]
//   | u64 block_count | { u64 length | f64 values[length] } * block_count
//
// All integers and floats are little-endian.
enum class CheckpointKind : std::uint32_t {
  regression = 1,
  map_ensemble = 2,
  generator = 3,
  map_ensemble2 = 4,
};

struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;
  CheckpointKind kind = CheckpointKind::regression;
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::uint32_t steps = 0;
  std::vector<std::uint32_t> hidden;
  std::vector<RVector> blocks;
};

std::string encode_checkpoint(const Checkpoint& c);
Checkpoint decode_checkpoint(const std::string& bytes);

Checkpoint to_checkpoint(const RegressionModel& model);
RegressionModel regression_from_checkpoint(const Checkpoint& c);

// n = lie_dim, d = d_in, one block per map.
Checkpoint to_checkpoint(const MapEnsemble& ens);
MapEnsemble map_ensemble_from_checkpoint(const Checkpoint& c);

// n = input size, d = lie_dim, steps = 1 when the time channel is on.
Checkpoint to_checkpoint(const MapEnsemble2& ens);
MapEnsemble2 map_ensemble2_from_checkpoint(const Checkpoint& c);

// n = noise_dim, d = d, steps = T; hidden holds past, latent_dim, the
// embedding layer count and then every layer width.
Checkpoint to_checkpoint(const GeneratorModel& model);
GeneratorModel generator_from_checkpoint(const Checkpoint& c);

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace adev
