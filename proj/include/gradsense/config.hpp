#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradsense/fourier.hpp"
#include "gradsense/metrics.hpp"
#include "gradsense/scheme.hpp"

namespace gradsense {

/// Whether the reconstruction uses the y-gradient term.
enum class YTerm { Auto, On, Off };

std::string_view to_string(YTerm y);
std::optional<YTerm> parse_y_term(std::string_view text);

struct TileConfig {
  std::size_t width = 0;  // 0 disables tiling
  std::size_t height = 0;
  std::size_t overlap = 0;

  bool enabled() const noexcept { return width > 0 && height > 0; }
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "GRADSENSE_OUTPUT_DIR";

/// $GRADSENSE_OUTPUT_DIR, or "gradsense_out" when unset or empty.
std::filesystem::path default_output_dir();

struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;  // image files and/or directories of frames
  std::vector<SchemeId> schemes{SchemeId::OneDir1p5Bit};
  std::map<SchemeId, std::vector<int>> thresholds;  // 8-bit units, per scheme
  int lri_factor = 8;
  std::vector<double> noise_sigmas_8bit{0.0};

  ReconConfig recon;  // recon.upsample_factor follows lri_factor
  YTerm y_term = YTerm::Auto;
  std::size_t border_crop = 0;
  SsimConfig ssim;

  TileConfig tile;
  std::filesystem::path output_dir = default_output_dir();
  std::uint64_t seed = 1;
  double link_gbps = kMipiCsi2Gbps;
  /// Frame size used for fps_at_link; the processed frame size when unset.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> fps_frame;
  unsigned workers = 1;
  bool write_streams = true;
  bool write_images = true;

  /// Scheme with the configured threshold override, if any.
  QuantScheme scheme(SchemeId id) const;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Input frames in processing order: files as listed, directory entries with an
  /// image extension sorted by name.
  std::vector<std::filesystem::path> frames() const;
};

/// Parses the JSON config format described in the README. Relative input paths
/// are resolved against `base_dir`. Unknown keys are rejected. Throws ConfigError.
PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});

PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace gradsense
