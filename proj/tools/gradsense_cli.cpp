// Command-line front end: single-stage tools plus the batch pipeline and sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gradsense/codec.hpp"
#include "gradsense/config.hpp"
#include "gradsense/error.hpp"
#include "gradsense/fourier.hpp"
#include "gradsense/log.hpp"
#include "gradsense/metrics.hpp"
#include "gradsense/pipeline.hpp"
#include "gradsense/raster_io.hpp"
#include "gradsense/sensor.hpp"

namespace fs = std::filesystem;
using namespace gradsense;

namespace {

SchemeId scheme_arg(const std::string& text) {
  const auto id = parse_scheme_id(text);
  if (!id) throw ConfigError("unknown scheme '" + text + "'");
  return *id;
}

QuantScheme make_scheme(const std::string& name, const std::vector<int>& thresholds) {
  try {
    const SchemeId id = scheme_arg(name);
    return thresholds.empty() ? QuantScheme::make(id) : QuantScheme::make(id, thresholds);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& text, const char* flag) {
  unsigned long long w = 0, h = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%llux%llu%c", &w, &h, &tail) != 2 || w == 0 || h == 0) {
    throw ConfigError(std::string(flag) + " expects WIDTHxHEIGHT, got '" + text + "'");
  }
  return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
}

void print_stream_info(const EncodedStream& s, std::ostream& out) {
  const QuantScheme scheme = QuantScheme::make(
      s.scheme, std::vector<int>(s.thresholds.begin(), s.thresholds.end()));
  out << "size        " << s.width << "x" << s.height << '\n'
      << "scheme      " << to_string(s.scheme) << '\n'
      << "direction   " << to_string(s.direction) << '\n'
      << "thresholds ";
  for (auto t : s.thresholds) out << ' ' << t;
  out << '\n'
      << "samples     " << lattice_sample_count(s.width, s.height, scheme.lattice(s.direction))
      << '\n'
      << "value_bits  " << s.value_bits << '\n'
      << "counter_bits " << s.counter_bits << '\n'
      << "bytes       " << s.byte_size() << '\n'
      << "ratio       " << compression_ratio(s) << " (vs 8-bit raw)\n";
}

/// Gray-level picture of a gradient map: alphabet index spread over 0..1,
/// unsampled checkerboard positions black.
RasterImage level_picture(const GradientMap& map) {
  const auto levels = map.scheme().levels();
  const double step = levels.size() > 1 ? 1.0 / static_cast<double>(levels.size() - 1) : 1.0;
  Field out(map.width(), map.height());
  std::size_t i = 0;
  for (std::size_t r = 0; r < map.height(); ++r) {
    for (std::size_t c = 0; c < map.width(); ++c) {
      if (on_lattice(r, c, map.lattice())) {
        out(r, c) = step * map.scheme().level_index(map.samples()[i++]);
      }
    }
  }
  return RasterImage(std::move(out));
}

/// Options shared by the batch subcommands; unset values keep the config's.
struct BatchOptions {
  std::string config;
  std::vector<std::string> inputs;
  std::vector<std::string> schemes;
  std::vector<double> sigmas;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<int> factor;
  std::optional<double> lambda;
  std::optional<double> beta;
  std::optional<double> saturation;
  std::optional<std::string> y_term;
  std::optional<std::size_t> border_crop;
  std::optional<std::string> tile;
  std::optional<std::size_t> overlap;
  std::optional<double> link_gbps;
  std::optional<std::string> fps_frame;
  bool no_images = false;
  bool no_streams = false;
};

void add_batch_options(CLI::App* cmd, BatchOptions& o) {
  cmd->add_option("-c,--config", o.config, "JSON pipeline config")->check(CLI::ExistingFile);
  cmd->add_option("-i,--input", o.inputs, "image file or directory of frames (repeatable)");
  cmd->add_option("-s,--scheme", o.schemes, "scheme name, short name or letter a-e (repeatable)");
  cmd->add_option("--sigma", o.sigmas, "noise std in 8-bit units (repeatable)");
  cmd->add_option("-o,--output-dir", o.output_dir,
                  std::string("output directory (default $") + kOutputDirEnv +
                      " or ./gradsense_out)");
  cmd->add_option("--seed", o.seed, "base random seed");
  cmd->add_option("-j,--workers", o.workers, "parallel frame workers");
  cmd->add_option("--factor", o.factor, "LRI downsampling factor");
  cmd->add_option("--lambda", o.lambda, "gradient term weight");
  cmd->add_option("--beta", o.beta, "ridge weight");
  cmd->add_option("--saturation", o.saturation, "outer dequantization bound, 8-bit units");
  cmd->add_option("--y-term", o.y_term, "auto, on or off");
  cmd->add_option("--border-crop", o.border_crop, "pixels excluded at each border for metrics");
  cmd->add_option("--tile", o.tile, "reconstruction tile size WIDTHxHEIGHT");
  cmd->add_option("--overlap", o.overlap, "tile overlap in pixels");
  cmd->add_option("--link-gbps", o.link_gbps, "link bandwidth for the fps column");
  cmd->add_option("--fps-frame", o.fps_frame, "frame size WIDTHxHEIGHT for the fps column");
  cmd->add_flag("--no-images", o.no_images, "do not write reconstructed images");
  cmd->add_flag("--no-streams", o.no_streams, "keep streams in memory instead of writing .gcs");
}

bool config_has_key(const std::string& path, const char* key) {
  if (path.empty()) return false;
  std::ifstream in(path);
  try {
    return nlohmann::json::parse(in).contains(key);
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

PipelineConfig batch_config(const BatchOptions& o) {
  PipelineConfig cfg = o.config.empty() ? PipelineConfig{} : load_config(o.config);
  if (!o.inputs.empty()) cfg.inputs.assign(o.inputs.begin(), o.inputs.end());
  if (!o.schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& s : o.schemes) cfg.schemes.push_back(scheme_arg(s));
  }
  if (!o.sigmas.empty()) cfg.noise_sigmas_8bit = o.sigmas;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.factor) cfg.lri_factor = *o.factor;
  if (o.lambda) cfg.recon.lambda = *o.lambda;
  if (o.beta) cfg.recon.beta = *o.beta;
  if (o.saturation) cfg.recon.saturation_8bit = *o.saturation;
  if (o.y_term) {
    const auto y = parse_y_term(*o.y_term);
    if (!y) throw ConfigError("--y-term must be auto, on or off");
    cfg.y_term = *y;
  }
  if (o.border_crop) cfg.border_crop = *o.border_crop;
  if (o.tile) {
    const auto [w, h] = parse_dims(*o.tile, "--tile");
    cfg.tile.width = w;
    cfg.tile.height = h;
  }
  if (o.overlap) cfg.tile.overlap = *o.overlap;
  if (o.link_gbps) cfg.link_gbps = *o.link_gbps;
  if (o.fps_frame) cfg.fps_frame = parse_dims(*o.fps_frame, "--fps-frame");
  if (o.no_images) cfg.write_images = false;
  if (o.no_streams) cfg.write_streams = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradsense: low-bit gradient camera simulator"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "also log informational messages");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "acquire gradient streams and an LRI from an image");
  std::string sim_input, sim_scheme = "OneDir1p5Bit";
  std::vector<int> sim_thresholds;
  int sim_factor = 8;
  double sim_sigma = 0.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  simulate->add_option("-i,--input", sim_input, "input image")->required()->check(CLI::ExistingFile);
  simulate->add_option("-s,--scheme", sim_scheme, "quantization scheme")->capture_default_str();
  simulate->add_option("-t,--thresholds", sim_thresholds, "thresholds in 8-bit units")->delimiter(',');
  simulate->add_option("--factor", sim_factor, "LRI downsampling factor")->capture_default_str();
  simulate->add_option("--sigma", sim_sigma, "noise std, 8-bit units")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "noise seed")->capture_default_str();
  simulate->add_option("-o,--output-dir", sim_out, "output directory");

  // encode
  auto* encode_cmd = app.add_subcommand("encode", "quantize one gradient direction of an image into a .gcs stream");
  std::string enc_input, enc_output, enc_scheme = "OneDir1p5Bit", enc_dir = "x";
  std::vector<int> enc_thresholds;
  encode_cmd->add_option("-i,--input", enc_input, "input image")->required()->check(CLI::ExistingFile);
  encode_cmd->add_option("-o,--output", enc_output, "output .gcs file")->required();
  encode_cmd->add_option("-s,--scheme", enc_scheme, "quantization scheme")->capture_default_str();
  encode_cmd->add_option("-t,--thresholds", enc_thresholds, "thresholds in 8-bit units")->delimiter(',');
  encode_cmd->add_option("-d,--direction", enc_dir, "x or y")->capture_default_str();

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "validate and describe a .gcs stream");
  std::string dec_input, dec_output;
  decode_cmd->add_option("-i,--input", dec_input, ".gcs file")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("-o,--output", dec_output, "write the level map as a gray image");

  // reconstruct
  auto* recon_cmd = app.add_subcommand("reconstruct", "closed-form reconstruction from an LRI and gradient streams");
  std::string rec_lri, rec_gx, rec_gy, rec_output, rec_tile;
  ReconConfig rec_cfg;
  rec_cfg.upsample_factor = 8;
  recon_cmd->add_option("--lri", rec_lri, "low-resolution image")->required()->check(CLI::ExistingFile);
  recon_cmd->add_option("--gx", rec_gx, "x-gradient .gcs stream")->required()->check(CLI::ExistingFile);
  recon_cmd->add_option("--gy", rec_gy, "y-gradient .gcs stream (adds the y term)")->check(CLI::ExistingFile);
  recon_cmd->add_option("-o,--output", rec_output, "reconstructed image")->required();
  recon_cmd->add_option("--factor", rec_cfg.upsample_factor, "upsampling factor")->capture_default_str();
  recon_cmd->add_option("--lambda", rec_cfg.lambda, "gradient term weight")->capture_default_str();
  recon_cmd->add_option("--beta", rec_cfg.beta, "ridge weight")->capture_default_str();
  recon_cmd->add_option("--saturation", rec_cfg.saturation_8bit, "outer dequantization bound, 8-bit units")->capture_default_str();
  recon_cmd->add_option("--tile", rec_tile, "tile size WIDTHxHEIGHT");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "compare two images and account for bandwidth");
  std::string met_ref, met_test, met_scheme, met_frame;
  std::vector<std::string> met_streams;
  std::size_t met_crop = 0;
  double met_link = kMipiCsi2Gbps;
  metrics_cmd->add_option("-r,--reference", met_ref, "reference image")->check(CLI::ExistingFile);
  metrics_cmd->add_option("-t,--test", met_test, "image under test")->check(CLI::ExistingFile);
  metrics_cmd->add_option("--border-crop", met_crop, "pixels excluded at each border")->capture_default_str();
  metrics_cmd->add_option("--gcs", met_streams, "streams whose compression ratio to report")->check(CLI::ExistingFile);
  metrics_cmd->add_option("-s,--scheme", met_scheme, "report TB, RS and fps for this scheme");
  metrics_cmd->add_option("--frame", met_frame, "frame size WIDTHxHEIGHT for fps (default: implied 1e9 pixels)");
  metrics_cmd->add_option("--link-gbps", met_link, "link bandwidth")->capture_default_str();

  BatchOptions pipe_opts, table_opts, noise_opts;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full pipeline over a set of frames");
  add_batch_options(pipeline_cmd, pipe_opts);
  auto* sweep_schemes_cmd = app.add_subcommand("sweep-schemes", "compare all schemes over a corpus (default: all five)");
  add_batch_options(sweep_schemes_cmd, table_opts);
  auto* sweep_noise = app.add_subcommand("sweep-noise", "PSNR/SSIM against noise level (default sigmas 0 2 4 8 16)");
  add_batch_options(sweep_noise, noise_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfigError;
  }
  if (verbose) {
    set_log_sink([](LogLevel level, std::string_view msg) {
      if (level >= LogLevel::Info) std::clog << "gradsense: " << msg << '\n';
    });
  }

  try {
    if (*simulate) {
      const QuantScheme scheme = make_scheme(sim_scheme, sim_thresholds);
      const fs::path out_dir = sim_out.empty() ? default_output_dir() : fs::path(sim_out);
      fs::create_directories(out_dir);
      const RasterImage img = load_image(sim_input);
      const std::size_t m = static_cast<std::size_t>(sim_factor) *
                            (scheme.id() == SchemeId::TwoDir2BitHalfRes && sim_factor % 2 ? 2 : 1);
      const CropRect rect = center_crop_rect(img.width(), img.height(), m, m);
      if (rect.width == 0 || rect.height == 0) throw InvalidArgument("image smaller than the LRI factor");
      const RasterImage hr = crop(img, rect);
      const Acquisition acq =
          simulate_acquisition(hr, scheme, sim_factor, sim_sigma / 255.0, sim_seed);
      const std::string stem = fs::path(sim_input).stem().string();
      for (const GradientMap& map : acq.maps) {
        const EncodedStream s = encode(map);
        const fs::path p = out_dir / (stem + "_" + std::string(to_string(map.direction())) + ".gcs");
        write_stream_file(s, p);
        std::cout << p.string() << "  " << s.byte_size() << " bytes, ratio "
                  << compression_ratio(s) << '\n';
      }
      const fs::path lri_path = out_dir / (stem + "_lri.png");
      save_image(acq.lri, lri_path);
      std::cout << lri_path.string() << "  " << acq.lri.width() << "x" << acq.lri.height() << '\n';
      return kExitOk;
    }
    if (*encode_cmd) {
      const QuantScheme scheme = make_scheme(enc_scheme, enc_thresholds);
      const auto dir = parse_direction(enc_dir);
      if (!dir) throw ConfigError("direction must be x or y");
      if (!scheme.supports(*dir)) throw ConfigError("scheme does not measure that direction");
      const RasterImage img = load_image(enc_input);
      const GradientMap map = quantize(gradient_exact(img, *dir), scheme, *dir);
      const EncodedStream s = encode(map);
      write_stream_file(s, enc_output);
      print_stream_info(s, std::cout);
      return kExitOk;
    }
    if (*decode_cmd) {
      const EncodedStream s = read_stream_file(dec_input);
      const GradientMap map = decode(s);
      print_stream_info(s, std::cout);
      if (!dec_output.empty()) save_image(level_picture(map), dec_output);
      return kExitOk;
    }
    if (*recon_cmd) {
      try {
        rec_cfg.validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
      const RasterImage lri = load_image(rec_lri);
      const GradientMap mx = decode(read_stream_file(rec_gx));
      if (mx.direction() != Direction::X) throw ConfigError("--gx stream holds y gradients");
      const Field gx = dequantize(mx, rec_cfg);
      Field gy;
      if (!rec_gy.empty()) {
        const GradientMap my = decode(read_stream_file(rec_gy));
        if (my.direction() != Direction::Y) throw ConfigError("--gy stream holds x gradients");
        gy = dequantize(my, rec_cfg);
      }
      TileConfig tiles;
      if (!rec_tile.empty()) std::tie(tiles.width, tiles.height) = parse_dims(rec_tile, "--tile");
      const Reconstruction r =
          reconstruct_frame(lri, gx, rec_gy.empty() ? nullptr : &gy, rec_cfg, tiles);
      save_image(r.image, rec_output);
      std::cout << rec_output << "  " << r.image.width() << "x" << r.image.height()
                << ", residual " << r.residual << ", tiles " << r.tile_count << '\n';
      return kExitOk;
    }
    if (*metrics_cmd) {
      if (met_ref.empty() != met_test.empty()) {
        throw ConfigError("--reference and --test must be given together");
      }
      if (!met_ref.empty()) {
        const RasterImage a = load_image(met_ref);
        const RasterImage b = load_image(met_test);
        std::cout << "psnr  " << psnr(a, b, met_crop) << " dB\n"
                  << "ssim  " << ssim(a, b, SsimConfig{}, met_crop) << '\n';
      }
      for (const auto& path : met_streams) {
        const EncodedStream s = read_stream_file(path);
        std::cout << "ratio " << compression_ratio(s) << "  " << path << '\n';
      }
      if (!met_scheme.empty()) {
        const QuantScheme s = make_scheme(met_scheme, {});
        std::uint64_t w = implied_frame_pixels(), h = 1;
        if (!met_frame.empty()) std::tie(w, h) = parse_dims(met_frame, "--frame");
        std::cout << "tb_ratio        " << tb_ratio(s) << '\n'
                  << "readout_speedup " << readout_speedup(s) << '\n'
                  << "fps_at_link     " << fps_at_link(s, w, h, met_link) << '\n';
      }
      return kExitOk;
    }
    if (*pipeline_cmd) {
      const RunResult r = run_pipeline(batch_config(pipe_opts));
      std::cout << to_text(r.frames);
      return r.exit_code();
    }
    if (*sweep_schemes_cmd) {
      PipelineConfig cfg = batch_config(table_opts);
      if (table_opts.schemes.empty() && !config_has_key(table_opts.config, "schemes")) {
        cfg.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
      }
      const SweepResult r = sweep_schemes(cfg);
      std::cout << to_text(r.table);
      return r.exit_code();
    }
    if (*sweep_noise) {
      PipelineConfig cfg = batch_config(noise_opts);
      if (noise_opts.sigmas.empty() && !config_has_key(noise_opts.config, "noise_sigmas")) {
        cfg.noise_sigmas_8bit = {0.0, 2.0, 4.0, 8.0, 16.0};
      }
      const SweepResult r = noise_sweep(cfg);
      std::cout << to_text(r.table);
      return r.exit_code();
    }
  } catch (const ConfigError& e) {
    std::cerr << "gradsense: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "gradsense: error: " << e.what() << '\n';
    return kExitPartialFailure;
  }
  return kExitOk;
}
