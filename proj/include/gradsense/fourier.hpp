#pragma once

#include <map>

#include "gradsense/grid.hpp"
#include "gradsense/raster.hpp"
#include "gradsense/sensor.hpp"

namespace gradsense {

/// Parameters of the closed-form reconstruction
///   min_I ||U - I||^2 + lambda ||Dx I - Gx||^2 [+ lambda ||Dy I - Gy||^2] + beta ||I||^2
/// with U the zero-order-hold upsampled LRI and Dx, Dy periodic forward differences.
struct ReconConfig {
  double lambda = 1.0;
  double beta = 1e-3;
  int upsample_factor = 8;

  /// Representative gradient (8-bit units) bounding the outermost quantization
  /// intervals; must exceed every |threshold|.
  double saturation_8bit = 32.0;
  /// Explicit level -> gradient (8-bit units) entries replacing the defaults.
  std::map<int, double> dequant_overrides;

  /// Throws InvalidArgument for beta <= 0, lambda < 0 or factor < 1.
  void validate() const;
};

/// Level -> representative gradient value (normalized units).
///
/// Default: the level whose interval contains 0 maps to 0; every other level maps
/// to the midpoint of its interval clipped to [-saturation, +saturation].
class DequantTable {
 public:
  static DequantTable make(const QuantScheme& scheme, const ReconConfig& cfg);

  /// Throws InvalidArgument if the level has no entry.
  double value(int level) const;
  const std::map<int, double>& entries() const noexcept { return values_; }

 private:
  std::map<int, double> values_;
};

/// Dequantized full-frame field. For checkerboard lattices the unsampled
/// positions take the mean of their in-frame 4-neighbours, all of which are sampled.
Field dequantize(const GradientMap& map, const ReconConfig& cfg);

/// Pre-clamp solution of the normal equations, computed pointwise in the
/// Fourier domain. `gy` adds the symmetric y term when non-null.
Field reconstruct_unclamped(const RasterImage& lri, const Field& gx, const ReconConfig& cfg,
                            const Field* gy = nullptr);

/// reconstruct_unclamped clamped to [0, 1].
RasterImage reconstruct_closed_form(const RasterImage& lri, const Field& gx,
                                    const ReconConfig& cfg, const Field* gy = nullptr);

/// Max-norm of (1+beta) I + lambda Dx^T Dx I [+ lambda Dy^T Dy I] - U - lambda Dx^T Gx
/// [- lambda Dy^T Gy], evaluated directly in the spatial domain.
double residual_check(const Field& image, const RasterImage& lri, const Field& gx,
                      const ReconConfig& cfg, const Field* gy = nullptr);

/// Value of the objective above at `image`.
double objective(const Field& image, const RasterImage& lri, const Field& gx,
                 const ReconConfig& cfg, const Field* gy = nullptr);

/// Periodic forward difference and its adjoint, used by the spatial-domain checks.
Field periodic_diff(const Field& f, Direction d);
Field periodic_diff_adjoint(const Field& f, Direction d);

}  // namespace gradsense
