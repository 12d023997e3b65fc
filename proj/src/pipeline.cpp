#include "gradsense/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <set>
#include <thread>

#include "gradsense/codec.hpp"
#include "gradsense/error.hpp"
#include "gradsense/kernels.hpp"
#include "gradsense/log.hpp"
#include "gradsense/metrics.hpp"
#include "gradsense/raster_io.hpp"
#include "gradsense/sensor.hpp"

namespace gradsense {
namespace {

std::string sigma_tag(double sigma_8bit) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", sigma_8bit);
  return buf;
}

std::string job_stem(const FrameRecord& r) {
  return r.frame + "_" + std::string(to_string(r.scheme)) + "_s" + sigma_tag(r.sigma_8bit);
}

std::vector<std::string> frame_names(const std::vector<std::filesystem::path>& frames) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string name = frames[i].stem().string();
    if (!seen.insert(name).second) name += "-" + std::to_string(i);
    names.push_back(std::move(name));
  }
  return names;
}

std::size_t crop_multiple(const PipelineConfig& cfg, SchemeId id) {
  const auto f = static_cast<std::size_t>(cfg.lri_factor);
  return id == SchemeId::TwoDir2BitHalfRes && f % 2 ? 2 * f : f;
}

bool use_y_term(const PipelineConfig& cfg, const QuantScheme& scheme) {
  return cfg.y_term != YTerm::Off && scheme.supports(Direction::Y);
}

EncodedStream transmit(const PipelineConfig& cfg, const GradientMap& map,
                       const std::filesystem::path& path) {
  const EncodedStream sent = encode(map);
  if (cfg.write_streams) {
    write_stream_file(sent, path);
    return read_stream_file(path);
  }
  return EncodedStream::parse(sent.serialize());
}

std::string dequant_summary(const PipelineConfig& cfg, SchemeId id) {
  ReconConfig rc = cfg.recon;
  rc.upsample_factor = cfg.lri_factor;
  const DequantTable table = DequantTable::make(cfg.scheme(id), rc);
  std::string out;
  for (const auto& [level, value] : table.entries()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s%d:%.6f", out.empty() ? "" : " ", level, value * 255.0);
    out += buf;
  }
  return out + " (8-bit units)";
}

std::vector<FrameRecord> run_jobs(const PipelineConfig& cfg,
                                  const std::vector<std::filesystem::path>& frames) {
  struct Job {
    std::size_t frame;
    SchemeId scheme;
    double sigma;
  };
  std::vector<Job> jobs;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    for (SchemeId id : cfg.schemes) {
      for (double sigma : cfg.noise_sigmas_8bit) jobs.push_back({f, id, sigma});
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (cfg.write_streams) std::filesystem::create_directories(cfg.output_dir / "streams", ec);
  if (cfg.write_images) std::filesystem::create_directories(cfg.output_dir / "recon", ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string());

  const auto names = frame_names(frames);
  std::vector<FrameRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& j = jobs[i];
      records[i] = process_frame(cfg, frames[j.frame], j.frame, j.scheme, j.sigma);
      records[i].frame = names[j.frame];
      if (!records[i].ok) {
        log_warning("frame " + records[i].frame + " (" + std::string(to_string(j.scheme)) +
                    ") failed: " + records[i].error);
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(cfg.workers, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  return records;
}

struct Summary {
  std::size_t frames = 0;
  std::size_t failures = 0;
  double psnr = 0.0, ssim = 0.0, psnr_zoh = 0.0, ssim_zoh = 0.0, ratio = 0.0, residual = 0.0;
  std::uint64_t bytes = 0;

  void add(const FrameRecord& r) {
    if (!r.ok) {
      ++failures;
      return;
    }
    ++frames;
    psnr += r.psnr;
    ssim += r.ssim;
    psnr_zoh += r.psnr_zoh;
    ssim_zoh += r.ssim_zoh;
    ratio += r.compression_ratio;
    bytes += r.stream_bytes;
    residual = std::max(residual, r.residual);
  }
  Cell mean(double total) const {
    return frames ? Cell{total / static_cast<double>(frames)} : Cell{};
  }
};

int fps_for(const PipelineConfig& cfg, const QuantScheme& s, std::size_t w, std::size_t h) {
  if (cfg.fps_frame) return fps_at_link(s, cfg.fps_frame->first, cfg.fps_frame->second, cfg.link_gbps);
  return fps_at_link(s, w, h, cfg.link_gbps);
}

Table frames_table(const PipelineConfig& cfg, const std::vector<FrameRecord>& records) {
  Table t;
  t.title = "gradsense frame report";
  t.meta = run_metadata(cfg);
  t.columns = {"frame",  "scheme",   "sigma_8bit",   "tile",          "x",
               "y",      "width",    "height",       "psnr",          "ssim",
               "psnr_zoh", "ssim_zoh", "compression_ratio", "stream_bytes", "tb_ratio",
               "readout_speedup", "fps_at_link", "residual", "status", "error"};
  std::map<std::pair<SchemeId, double>, Summary> groups;
  for (const FrameRecord& r : records) {
    const QuantScheme s = cfg.scheme(r.scheme);
    const Cell fps = r.ok ? Cell{std::int64_t{fps_for(cfg, s, r.width, r.height)}} : Cell{};
    const auto num = [&](double v) { return r.ok ? Cell{v} : Cell{}; };
    t.add_row({r.frame, std::string(to_string(r.scheme)), r.sigma_8bit, std::string("all"),
               std::int64_t{0}, std::int64_t{0}, static_cast<std::int64_t>(r.width),
               static_cast<std::int64_t>(r.height), num(r.psnr), num(r.ssim), num(r.psnr_zoh),
               num(r.ssim_zoh), num(r.compression_ratio),
               r.ok ? Cell{static_cast<std::int64_t>(r.stream_bytes)} : Cell{}, tb_ratio(s),
               std::int64_t{readout_speedup(s)}, fps, num(r.residual),
               std::string(r.ok ? "ok" : "failed"), r.error});
    for (std::size_t i = 0; i < r.tiles.size(); ++i) {
      const TileRecord& tr = r.tiles[i];
      t.add_row({r.frame, std::string(to_string(r.scheme)), r.sigma_8bit,
                 static_cast<std::int64_t>(i), static_cast<std::int64_t>(tr.rect.x),
                 static_cast<std::int64_t>(tr.rect.y), static_cast<std::int64_t>(tr.rect.width),
                 static_cast<std::int64_t>(tr.rect.height), tr.psnr, tr.ssim, Cell{}, Cell{},
                 Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                 std::string(tr.rect.partial ? "partial" : "ok"), std::string()});
    }
    groups[{r.scheme, r.sigma_8bit}].add(r);
  }
  for (const auto& [key, g] : groups) {
    const QuantScheme s = cfg.scheme(key.first);
    t.add_row({std::string("aggregate"), std::string(to_string(key.first)), key.second,
               std::string("all"), Cell{}, Cell{}, static_cast<std::int64_t>(g.frames), Cell{},
               g.mean(g.psnr), g.mean(g.ssim), g.mean(g.psnr_zoh), g.mean(g.ssim_zoh),
               g.mean(g.ratio), static_cast<std::int64_t>(g.bytes), tb_ratio(s),
               std::int64_t{readout_speedup(s)}, Cell{}, g.frames ? Cell{g.residual} : Cell{},
               std::string(g.failures ? "partial" : "ok"),
               g.failures ? std::to_string(g.failures) + " failed" : std::string()});
  }
  return t;
}

RunResult run_all(const PipelineConfig& cfg) {
  cfg.validate();
  const auto frames = cfg.frames();
  if (frames.empty()) throw ConfigError("no input frames found");
  RunResult result;
  result.records = run_jobs(cfg, frames);
  for (const auto& r : result.records) result.failures += r.ok ? 0 : 1;
  result.frames = frames_table(cfg, result.records);
  write_table(result.frames, cfg.output_dir, "frames");
  return result;
}

}  // namespace

Reconstruction reconstruct_frame(const RasterImage& lri, const Field& gx, const Field* gy,
                                 const ReconConfig& cfg, const TileConfig& tiles) {
  Reconstruction out;
  if (!tiles.enabled()) {
    Field solution = reconstruct_unclamped(lri, gx, cfg, gy);
    out.residual = residual_check(solution, lri, gx, cfg, gy);
    out.image = RasterImage::clamped(std::move(solution), lri.source_bit_depth());
    return out;
  }
  const auto f = static_cast<std::size_t>(cfg.upsample_factor);
  const TileGrid grid = TileGrid::make(gx.width(), gx.height(), std::min(tiles.width, gx.width()),
                                       std::min(tiles.height, gx.height()), tiles.overlap);
  const TileGrid lri_grid = grid.scaled_down(f);
  const auto lri_tiles = tile(lri, lri_grid);
  const auto gx_tiles = tile(gx, grid);
  std::vector<Field> gy_tiles;
  if (gy) gy_tiles = tile(*gy, grid);

  std::vector<Field> solved;
  solved.reserve(grid.tiles.size());
  for (std::size_t i = 0; i < grid.tiles.size(); ++i) {
    const Field* tgy = gy ? &gy_tiles[i] : nullptr;
    Field s = reconstruct_unclamped(lri_tiles[i], gx_tiles[i], cfg, tgy);
    out.residual = std::max(out.residual, residual_check(s, lri_tiles[i], gx_tiles[i], cfg, tgy));
    solved.push_back(std::move(s));
  }
  out.image = RasterImage::clamped(untile(solved, grid), lri.source_bit_depth());
  out.tile_count = grid.tiles.size();
  return out;
}

FrameRecord process_frame(const PipelineConfig& cfg, const std::filesystem::path& frame_path,
                          std::size_t frame_index, SchemeId scheme_id, double sigma_8bit) {
  FrameRecord rec;
  rec.frame = frame_path.stem().string();
  rec.frame_index = frame_index;
  rec.scheme = scheme_id;
  rec.sigma_8bit = sigma_8bit;
  try {
    const QuantScheme scheme = cfg.scheme(scheme_id);
    const RasterImage original = load_image(frame_path);
    const std::size_t m = crop_multiple(cfg, scheme_id);
    const CropRect rect = center_crop_rect(original.width(), original.height(), m, m);
    if (rect.width == 0 || rect.height == 0) {
      throw InvalidArgument("frame smaller than the LRI factor");
    }
    const RasterImage hr =
        rect.width == original.width() && rect.height == original.height() ? original
                                                                            : crop(original, rect);
    if (rect.width != original.width() || rect.height != original.height()) {
      log_info("cropped " + rec.frame + " to " + std::to_string(rect.width) + "x" +
               std::to_string(rect.height));
    }
    rec.width = hr.width();
    rec.height = hr.height();

    const Acquisition acq = simulate_acquisition(hr, scheme, cfg.lri_factor, sigma_8bit / 255.0,
                                                 derive_seed(cfg.seed, frame_index));
    ReconConfig rc = cfg.recon;
    rc.upsample_factor = cfg.lri_factor;

    Field gx, gy;
    bool have_y = false;
    std::uint64_t total_bits = 0;
    for (const GradientMap& map : acq.maps) {
      const auto path = cfg.output_dir / "streams" /
                        (job_stem(rec) + "_" + std::string(to_string(map.direction())) + ".gcs");
      const EncodedStream received = transmit(cfg, map, path);
      total_bits += received.total_bits();
      const GradientMap decoded = decode(received);
      if (decoded != map) throw CodecError("decoded map differs from the encoded map", 0);
      if (map.direction() == Direction::X) {
        gx = dequantize(decoded, rc);
      } else {
        gy = dequantize(decoded, rc);
        have_y = true;
      }
    }
    rec.stream_bytes = total_bits / 8;
    rec.compression_ratio =
        static_cast<double>(total_bits) / (static_cast<double>(hr.size()) * 8.0);

    const Field* gy_ptr = have_y && use_y_term(cfg, scheme) ? &gy : nullptr;
    if (gx.empty()) {
      // y-only measurement is not a configured scheme; keep the solver's x term at zero.
      gx = Field(hr.width(), hr.height());
    }
    const Reconstruction recon = reconstruct_frame(acq.lri, gx, gy_ptr, rc, cfg.tile);
    rec.residual = recon.residual;

    const RasterImage zoh = upsample_zoh(acq.lri, cfg.lri_factor);
    rec.psnr = psnr(recon.image, hr, cfg.border_crop);
    rec.ssim = ssim(recon.image, hr, cfg.ssim, cfg.border_crop);
    rec.psnr_zoh = psnr(zoh, hr, cfg.border_crop);
    rec.ssim_zoh = ssim(zoh, hr, cfg.ssim, cfg.border_crop);

    if (cfg.tile.enabled()) {
      const TileGrid grid =
          TileGrid::make(hr.width(), hr.height(), std::min(cfg.tile.width, hr.width()),
                         std::min(cfg.tile.height, hr.height()), cfg.tile.overlap);
      const auto ours = tile(recon.image, grid);
      const auto truth = tile(hr, grid);
      for (std::size_t i = 0; i < grid.tiles.size(); ++i) {
        TileRecord tr;
        tr.rect = grid.tiles[i];
        tr.psnr = psnr(ours[i], truth[i]);
        const bool fits = grid.tiles[i].width >= static_cast<std::size_t>(cfg.ssim.window) &&
                          grid.tiles[i].height >= static_cast<std::size_t>(cfg.ssim.window);
        tr.ssim = fits ? ssim(ours[i], truth[i], cfg.ssim) : 0.0;
        rec.tiles.push_back(tr);
      }
    }
    if (cfg.write_images) {
      save_image(recon.image, cfg.output_dir / "recon" / (job_stem(rec) + ".png"));
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

Metadata run_metadata(const PipelineConfig& cfg) {
  Metadata m;
  m.emplace_back("seed", static_cast<std::int64_t>(cfg.seed));
  m.emplace_back("lri_factor", std::int64_t{cfg.lri_factor});
  m.emplace_back("lambda", cfg.recon.lambda);
  m.emplace_back("beta", cfg.recon.beta);
  m.emplace_back("y_term", std::string(to_string(cfg.y_term)));
  m.emplace_back("border_crop", static_cast<std::int64_t>(cfg.border_crop));
  char ssim_desc[128];
  std::snprintf(ssim_desc, sizeof ssim_desc,
                "gaussian %dx%d sigma %.2f K1 %.2f K2 %.2f, valid windows", cfg.ssim.window,
                cfg.ssim.window, cfg.ssim.sigma, cfg.ssim.k1, cfg.ssim.k2);
  m.emplace_back("ssim", std::string(ssim_desc));
  m.emplace_back("psnr", std::string("peak 1.0, capped at 99 dB"));
  m.emplace_back("link_gbps", cfg.link_gbps);
  if (cfg.fps_frame) {
    m.emplace_back("fps_frame", std::to_string(cfg.fps_frame->first) + "x" +
                                    std::to_string(cfg.fps_frame->second));
  } else {
    m.emplace_back("fps_frame", std::string("processed frame"));
  }
  m.emplace_back("tile", cfg.tile.enabled() ? std::to_string(cfg.tile.width) + "x" +
                                                  std::to_string(cfg.tile.height) + " overlap " +
                                                  std::to_string(cfg.tile.overlap)
                                            : std::string("off"));
  m.emplace_back("kernels", std::string(kernels::active().name));
  for (SchemeId id : cfg.schemes) {
    const QuantScheme s = cfg.scheme(id);
    std::string th;
    for (int t : s.thresholds_8bit()) th += (th.empty() ? "" : " ") + std::to_string(t);
    m.emplace_back("thresholds." + std::string(to_string(id)), th);
    m.emplace_back("dequant." + std::string(to_string(id)), dequant_summary(cfg, id));
  }
  return m;
}

RunResult run_pipeline(const PipelineConfig& cfg) { return run_all(cfg); }

SweepResult sweep_schemes(const PipelineConfig& cfg_in) {
  PipelineConfig cfg = cfg_in;
  cfg.noise_sigmas_8bit.resize(std::min<std::size_t>(cfg.noise_sigmas_8bit.size(), 1));
  SweepResult out;
  out.run = run_all(cfg);

  Table& t = out.table;
  t.title = "Scheme sweep (closed-form reconstruction, not learned-network results)";
  t.meta = run_metadata(cfg);
  t.meta.emplace_back("sigma_8bit", cfg.noise_sigmas_8bit.front());
  const std::uint64_t implied = implied_frame_pixels();
  if (!cfg.fps_frame) {
    for (auto& [key, value] : t.meta) {
      if (key == "fps_frame") value = std::to_string(implied) + " pixels (240 Gbit/s, 8 bit, 30 fps)";
    }
  }
  t.columns = {"scheme", "label", "bits_per_pixel", "psnr", "ssim", "psnr_zoh",
               "tb_ratio", "readout_speedup", "fps_at_link", "compression_ratio", "frames",
               "failures"};
  static constexpr const char* kLabels[] = {"a", "b", "c", "d", "e"};
  for (SchemeId id : cfg.schemes) {
    Summary g;
    for (const auto& r : out.run.records) {
      if (r.scheme == id) g.add(r);
    }
    const QuantScheme s = cfg.scheme(id);
    const int fps = cfg.fps_frame ? fps_at_link(s, cfg.fps_frame->first, cfg.fps_frame->second,
                                                cfg.link_gbps)
                                  : fps_at_link(s, implied, 1, cfg.link_gbps);
    t.add_row({std::string(to_string(id)), std::string(kLabels[static_cast<int>(id)]),
               s.avg_bits_per_pixel(), g.mean(g.psnr), g.mean(g.ssim), g.mean(g.psnr_zoh),
               tb_ratio(s), std::int64_t{readout_speedup(s)}, std::int64_t{fps}, g.mean(g.ratio),
               static_cast<std::int64_t>(g.frames), static_cast<std::int64_t>(g.failures)});
  }
  write_table(t, cfg.output_dir, "schemes");
  return out;
}

SweepResult noise_sweep(const PipelineConfig& cfg) {
  SweepResult out;
  out.run = run_all(cfg);

  Table& t = out.table;
  t.title = "Noise sweep";
  t.meta = run_metadata(cfg);
  t.columns = {"scheme", "sigma_8bit", "sigma", "psnr", "ssim", "psnr_zoh",
               "compression_ratio", "frames", "failures", "seed"};
  for (SchemeId id : cfg.schemes) {
    for (double sigma : cfg.noise_sigmas_8bit) {
      Summary g;
      for (const auto& r : out.run.records) {
        if (r.scheme == id && r.sigma_8bit == sigma) g.add(r);
      }
      t.add_row({std::string(to_string(id)), sigma, sigma / 255.0, g.mean(g.psnr),
                 g.mean(g.ssim), g.mean(g.psnr_zoh), g.mean(g.ratio),
                 static_cast<std::int64_t>(g.frames), static_cast<std::int64_t>(g.failures),
                 static_cast<std::int64_t>(cfg.seed)});
    }
  }
  write_table(t, cfg.output_dir, "noise_sweep");
  return out;
}

}  // namespace gradsense
