#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uepnc/allocators.hpp"
#include "uepnc/channel.hpp"
#include "uepnc/types.hpp"

namespace uepnc {

/// Which direct solver experiments run; kOff skips it.
enum class DirectChoice { kAuto, kOff, kExhaustive, kGenetic };

/// Grid of the decoding-probability validation sweep.
struct ValidationGrid {
  std::vector<int> k{10, 40, 50};
  std::vector<int> per_tb{2, 5};
  std::vector<double> erasure{0.1, 0.4};
  long long trials = 100000;
  /// The sweep over N = t stops once every window reaches this probability.
  double saturation = 0.9999;
  int max_tbs = 400;
};

/// A complete experiment input: stream, network, radio and optimizer knobs.
struct Scenario {
  std::string name = "unnamed";
  DeliveryMode mode = DeliveryMode::kSingleCell;
  PropagationParams network;
  RadioConfig radio;
  BlerModel bler;
  double q_hat = 0.99;

  /// Either bitrates (k derived from H and d_GoP) or explicit layer sizes.
  std::vector<double> bitrate_kbps;
  std::vector<int> k;
  std::vector<double> psnr_db;
  std::vector<double> t_hat;

  UserPattern users = RadialPattern{};
  DirectChoice direct = DirectChoice::kAuto;
  DirectOptions direct_options;
  std::vector<int> sweep_n_rbp{1, 2, 3, 4, 5};
  ValidationGrid validation;
  std::uint64_t seed = 1;

  /// FNV-1a of the canonical JSON form of the input.
  std::string digest;

  LayerConfig layers() const;
};

/// Parses the JSON scenario schema documented in the README. Unknown keys are
/// rejected so typos do not silently fall back to defaults.
/// Throws std::invalid_argument on malformed input.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Built-in scenarios for the two reference streams.
enum class StreamPreset { kA, kB };
Scenario preset_scenario(StreamPreset stream, DeliveryMode mode);

std::string fnv1a_hex(std::string_view bytes);

}  // namespace uepnc
