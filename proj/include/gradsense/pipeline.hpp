#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gradsense/config.hpp"
#include "gradsense/fourier.hpp"
#include "gradsense/raster.hpp"
#include "gradsense/report.hpp"
#include "gradsense/tile.hpp"

namespace gradsense {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitConfigError = 2;

struct Reconstruction {
  RasterImage image;
  double residual = 0.0;  // worst residual_check over all tiles
  std::size_t tile_count = 1;
};

/// Closed-form reconstruction of a whole frame, tile by tile when `tiles` is
/// enabled (tiles larger than the frame are clipped to it). Overlaps are averaged
/// before clamping.
Reconstruction reconstruct_frame(const RasterImage& lri, const Field& gx, const Field* gy,
                                 const ReconConfig& cfg, const TileConfig& tiles = {});

struct TileRecord {
  TileRect rect;
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Outcome of one (frame, scheme, noise level) job.
struct FrameRecord {
  std::string frame;
  std::size_t frame_index = 0;
  SchemeId scheme = SchemeId::OneDir1p5Bit;
  double sigma_8bit = 0.0;

  bool ok = false;
  std::string error;

  std::size_t width = 0;  // processed (possibly cropped) frame
  std::size_t height = 0;
  double psnr = 0.0;
  double ssim = 0.0;
  double psnr_zoh = 0.0;  // plain upsampled LRI, for reference
  double ssim_zoh = 0.0;
  double compression_ratio = 0.0;  // all streams of the frame vs 8-bit raw
  std::uint64_t stream_bytes = 0;
  double residual = 0.0;
  std::vector<TileRecord> tiles;  // filled when tiling is enabled
};

/// Runs simulate, encode, stream write/read, decode, reconstruct and metrics for
/// one job. Never throws for per-frame errors; they are returned in the record.
FrameRecord process_frame(const PipelineConfig& cfg, const std::filesystem::path& frame_path,
                          std::size_t frame_index, SchemeId scheme, double sigma_8bit);

struct RunResult {
  std::vector<FrameRecord> records;
  Table frames;  // per-frame/tile rows plus aggregate rows
  std::size_t failures = 0;

  int exit_code() const { return failures ? kExitPartialFailure : kExitOk; }
};

/// Seed, metric settings and dequantization tables for report headers.
Metadata run_metadata(const PipelineConfig& cfg);

/// Per frame x scheme x sigma, run in a pool of cfg.workers threads. Writes
/// streams/, recon/ and frames.{csv,json,txt} under cfg.output_dir. Throws
/// ConfigError for an invalid config or an empty input set.
RunResult run_pipeline(const PipelineConfig& cfg);

struct SweepResult {
  Table table;
  RunResult run;

  int exit_code() const { return run.exit_code(); }
};

/// One row per configured scheme, averaged over the corpus at the first noise
/// level: scheme | PSNR | SSIM | TB | RS | fps | compression ratio. Also writes
/// schemes.{csv,json,txt}.
SweepResult sweep_schemes(const PipelineConfig& cfg);

/// One row per (scheme, sigma), averaged over the corpus. Also writes
/// noise_sweep.{csv,json,txt}.
SweepResult noise_sweep(const PipelineConfig& cfg);

}  // namespace gradsense
