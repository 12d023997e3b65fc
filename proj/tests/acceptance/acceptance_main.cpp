// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
// GRADSENSE_CORPUS overrides the photograph directory used by criteria 3, 4 and 8.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "gradsense/codec.hpp"
#include "gradsense/fourier.hpp"
#include "gradsense/huffman.hpp"
#include "gradsense/log.hpp"
#include "gradsense/metrics.hpp"
#include "gradsense/pipeline.hpp"
#include "gradsense/raster_io.hpp"
#include "gradsense/rlc.hpp"
#include "gradsense/sensor.hpp"

namespace fs = std::filesystem;
using namespace gradsense;

namespace {

// Pinned tolerances and limits.
constexpr std::size_t kCodecMaps = 10000;
constexpr std::size_t kCodecMaxSide = 512;
constexpr double kCodecSeconds = 120.0;
constexpr int kFpsTolerance = 1;
constexpr std::size_t kCorpusMinImages = 10;
constexpr std::size_t kCorpusMinPixels = 2'000'000;
constexpr double kRatioBound = 0.10;
constexpr double kRatioSeconds = 300.0;
constexpr double kExactMarginDb = 3.0;
constexpr double kTernaryMarginDb = 1.0;
constexpr double kResidualBound = 1e-5;
constexpr std::size_t kHuffmanSequences = 1000;
constexpr std::uint64_t kSeed = 20240601;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int g_failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("AC%d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path corpus_dir() {
  if (const char* env = std::getenv("GRADSENSE_CORPUS"); env && *env) return env;
  return fs::path(GRADSENSE_TEST_DATA_DIR) / "corpus";
}

std::vector<fs::path> corpus_files() {
  PipelineConfig cfg;
  cfg.inputs = {corpus_dir()};
  return fs::exists(corpus_dir()) ? cfg.frames() : std::vector<fs::path>{};
}

RasterImage crop_to(const RasterImage& img, std::size_t multiple) {
  const CropRect r = center_crop_rect(img.width(), img.height(), multiple, multiple);
  return crop(img, r);
}

// 1. decode(encode(m)) == m for random, alternating and long-run maps.
void codec_losslessness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed);
  std::size_t mismatches = 0, tested = 0, alternating = 0;
  std::uniform_real_distribution<double> logside(0.0, std::log(static_cast<double>(kCodecMaxSide)));
  for (std::size_t i = 0; i < kCodecMaps; ++i) {
    const SchemeId id = kAllSchemes[i % 5];
    const QuantScheme s = QuantScheme::make(id);
    const Direction d = s.directions()[(i / 5) % s.directions().size()];
    std::size_t w, h;
    if (i < 20) {
      w = h = 1 + (i % 2) * (kCodecMaxSide - 1);  // 1x1 and 512x512 extremes
    } else {
      w = static_cast<std::size_t>(std::exp(logside(rng)));
      h = static_cast<std::size_t>(std::exp(logside(rng)));
    }
    const std::size_t n = lattice_sample_count(w, h, s.lattice(d));
    const auto levels = s.levels();
    std::vector<std::int8_t> samples(n);
    switch (i % 4) {
      case 0: {  // adversarial: every sample differs from its predecessor
        for (std::size_t k = 0; k < n; ++k) samples[k] = levels[(k + i) % levels.size()];
        ++alternating;
        break;
      }
      case 1: {  // i.i.d. levels
        for (auto& v : samples) v = levels[rng() % levels.size()];
        break;
      }
      case 2: {  // long runs around the 255 continuation boundary
        std::size_t k = 0;
        while (k < n) {
          const std::size_t run = std::min<std::size_t>(n - k, 250 + rng() % 12 + (rng() % 3) * 255);
          const auto level = levels[rng() % levels.size()];
          std::fill_n(samples.begin() + static_cast<std::ptrdiff_t>(k), run, level);
          k += run;
        }
        break;
      }
      default: {  // Markov runs with random persistence
        const double stay = static_cast<double>(rng() % 1000) / 1000.0;
        std::bernoulli_distribution keep(stay);
        for (std::size_t k = 0; k < n; ++k) {
          samples[k] = k > 0 && keep(rng) ? samples[k - 1] : levels[rng() % levels.size()];
        }
      }
    }
    const GradientMap map(w, h, d, s, std::move(samples));
    try {
      if (!(decode_bytes(encode_bytes(map)) == map)) ++mismatches;
    } catch (const std::exception&) {
      ++mismatches;
    }
    ++tested;
  }
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && tested >= kCodecMaps && secs < kCodecSeconds, "codec losslessness",
         std::to_string(tested) + " maps (" + std::to_string(alternating) +
             " alternating), sides 1..512, all schemes, " + std::to_string(mismatches) +
             " mismatches, " + fmt("%.1f s", secs) + fmt(" (limit %.0f s)", kCodecSeconds));
}

// 2. Bandwidth, readout and frame-rate accounting.
void table_accounting() {
  const double tb[] = {0.125, 0.1875, 0.25, 0.25, 0.25};
  const int rs[] = {256, 128, 85, 128, 85};
  const int fps[] = {41, 27, 20, 20, 20};
  const std::uint64_t pixels = implied_frame_pixels(240.0, 8, 30.0);
  bool ok = pixels == 1'000'000'000ull;
  std::string got_tb, got_rs, got_fps;
  for (std::size_t i = 0; i < 5; ++i) {
    const QuantScheme s = QuantScheme::make(kAllSchemes[i]);
    const double t = tb_ratio(s);
    const int r = readout_speedup(s);
    const int f = fps_at_link(s, pixels, 1, kMipiCsi2Gbps);
    ok = ok && t == tb[i] && r == rs[i] && std::abs(f - fps[i]) <= kFpsTolerance;
    got_tb += fmt(i ? " %.4g" : "%.4g", t);
    got_rs += (i ? " " : "") + std::to_string(r);
    got_fps += (i ? " " : "") + std::to_string(f);
  }
  report(2, ok, "bandwidth and readout accounting",
         "TB [" + got_tb + "] RS [" + got_rs + "] fps@41.4Gbps [" + got_fps + "] for " +
             std::to_string(pixels) + "-pixel frame");
}

// 3. Ternary stream compression ratio on large photographs.
void compression_ratio_corpus() {
  const auto t0 = Clock::now();
  const auto files = corpus_files();
  const QuantScheme s = QuantScheme::make(SchemeId::OneDir1p5Bit, {-4, 4});
  std::size_t large = 0;
  double sum = 0.0;
  std::size_t count = 0;
  double worst = 0.0;
  for (const auto& f : files) {
    const RasterImage img = load_image(f);
    if (img.size() >= kCorpusMinPixels) ++large;
    const EncodedStream stream = encode(quantize(gradient_exact(img, Direction::X), s, Direction::X));
    const double r = compression_ratio(stream);
    sum += r;
    worst = std::max(worst, r);
    ++count;
  }
  const double secs = seconds_since(t0);
  const double mean_ratio = count ? sum / static_cast<double>(count) : 1.0;
  const bool corpus_ok = count >= kCorpusMinImages && large == count;
  std::string detail = fmt("mean ratio %.4f", mean_ratio) + fmt(" (max %.4f", worst) +
                       fmt(", bound %.2f)", kRatioBound) + " over " + std::to_string(count) +
                       " images, " + std::to_string(large) + " of them >= 2 MP, " +
                       fmt("%.1f s", secs);
  if (!corpus_ok) {
    detail += "; corpus precondition (>= 10 images of >= 2 MP) not met, set GRADSENSE_CORPUS";
  }
  report(3, corpus_ok && mean_ratio < kRatioBound && secs < kRatioSeconds,
         "compression ratio (ternary, thresholds -4/4)", detail);
}

// 4. Closed-form reconstruction beats plain upsampling.
void reconstruction_fidelity() {
  const auto files = corpus_files();
  const ReconConfig cfg;  // lambda 1, beta 1e-3, factor 8
  const QuantScheme ternary = QuantScheme::make(SchemeId::OneDir1p5Bit);
  double min_exact = 1e9, min_ternary = 1e9, min_xy = 1e9, worst_residual = 0.0;
  std::string worst_exact_name, worst_ternary_name;
  std::size_t exact_pass = 0, ternary_pass = 0;
  for (const auto& f : files) {
    const RasterImage img = crop_to(load_image(f), 8);
    const RasterImage lri = downsample_avg(img, 8);
    const double zoh = psnr(upsample_zoh(lri, 8), img);

    const Field gx = gradient_exact(img, Direction::X);
    const Reconstruction exact = reconstruct_frame(lri, gx, nullptr, cfg);
    const double m_exact = psnr(exact.image, img) - zoh;

    const Field gq = dequantize(quantize(gx, ternary, Direction::X), cfg);
    const Reconstruction tern = reconstruct_frame(lri, gq, nullptr, cfg);
    const double m_tern = psnr(tern.image, img) - zoh;

    const Field gy = gradient_exact(img, Direction::Y);
    const Reconstruction xy = reconstruct_frame(lri, gx, &gy, cfg);
    min_xy = std::min(min_xy, psnr(xy.image, img) - zoh);

    worst_residual = std::max({worst_residual, exact.residual, tern.residual, xy.residual});
    exact_pass += m_exact >= kExactMarginDb;
    ternary_pass += m_tern >= kTernaryMarginDb;
    if (m_exact < min_exact) {
      min_exact = m_exact;
      worst_exact_name = f.stem().string();
    }
    if (m_tern < min_ternary) {
      min_ternary = m_tern;
      worst_ternary_name = f.stem().string();
    }
  }
  const std::size_t n = files.size();
  const bool ok = n > 0 && exact_pass == n && ternary_pass == n && worst_residual <= kResidualBound;
  report(4, ok, "reconstruction fidelity vs upsampled LRI",
         "exact-gradient margin >= 3 dB on " + std::to_string(exact_pass) + "/" +
             std::to_string(n) + fmt(" (min %.2f dB, ", min_exact) + worst_exact_name +
             "); ternary margin >= 1 dB on " + std::to_string(ternary_pass) + "/" +
             std::to_string(n) + fmt(" (min %.2f dB, ", min_ternary) + worst_ternary_name +
             fmt("); max residual %.2e", worst_residual) +
             fmt("; info: exact x+y margin min %.2f dB", min_xy));
}

// 5. Quantizer against brute-force interval membership.
// quantize_value runs the scalar kernel, quantize the dispatched one.
void quantizer_oracle() {
  std::size_t mismatches = 0, checked = 0;
  for (SchemeId id : kAllSchemes) {
    const QuantScheme s = QuantScheme::make(id);
    const auto t = s.thresholds_8bit();
    Field sweep(511, 1);
    for (int g8 = -255; g8 <= 255; ++g8) sweep(0, static_cast<std::size_t>(g8 + 255)) = g8 / 255.0;
    const Direction d = s.directions().front();
    const auto dense = quantize(sweep, s, d).to_dense(99);
    for (int g8 = -255; g8 <= 255; ++g8) {
      int expected = 99;
      for (std::size_t k = 0; k < s.levels().size(); ++k) {
        if ((k == 0 || g8 >= t[k - 1]) && (k == t.size() || g8 < t[k])) expected = s.levels()[k];
      }
      if (quantize_value(g8 / 255.0, s) != expected) ++mismatches;
      ++checked;
      const auto c = static_cast<std::size_t>(g8 + 255);
      if (!on_lattice(0, c, s.lattice(d))) continue;
      if (dense(0, c) != expected) ++mismatches;
      ++checked;
    }
  }
  report(5, mismatches == 0, "quantizer oracle equivalence",
         std::to_string(checked) + " comparisons over -255..255, all schemes, " +
             std::to_string(mismatches) + " mismatches");
}

// 6. Counter section size against the entropy bound.
void huffman_near_optimality() {
  std::mt19937_64 rng(kSeed + 6);
  std::size_t violations = 0;
  double worst_slack = 1e300;
  for (std::size_t i = 0; i < kHuffmanSequences; ++i) {
    std::vector<std::uint8_t> counters;
    if (i % 2 == 0) {
      // Counters of a random run-length map.
      const QuantScheme s = QuantScheme::make(kAllSchemes[i % 5]);
      const std::size_t w = 1 + rng() % 256, h = 1 + rng() % 64;
      const std::size_t n = lattice_sample_count(w, h, s.lattice(s.directions().front()));
      const double stay = static_cast<double>(rng() % 1000) / 1000.0;
      std::bernoulli_distribution keep(stay);
      std::vector<std::int8_t> levels(n);
      for (std::size_t k = 0; k < n; ++k) {
        levels[k] = k > 0 && keep(rng) ? levels[k - 1] : s.levels()[rng() % s.levels().size()];
      }
      counters = rlc_encode(levels, s).counters;
    } else {
      // Direct byte sequences with a random skew.
      const std::size_t n = 1 + rng() % 5000;
      std::geometric_distribution<int> geo(0.01 + static_cast<double>(rng() % 95) / 100.0);
      counters.resize(n);
      for (auto& c : counters) c = static_cast<std::uint8_t>(std::min(geo(rng), 255));
    }
    const SymbolHistogram hist = histogram(counters);
    const HuffmanTable table = HuffmanTable::build(hist);
    BitWriter w;
    table.encode(counters, w);
    std::vector<std::uint8_t> serialized;
    write_code_lengths(table.lengths(), serialized);
    const double n = static_cast<double>(counters.size());
    const double bound = entropy_bits_per_symbol(hist) * n + n + 8.0 * serialized.size();
    const double used = static_cast<double>(w.bit_count()) + 8.0 * serialized.size();
    worst_slack = std::min(worst_slack, bound - used);
    if (used > bound + 1e-6) ++violations;
  }
  report(6, violations == 0, "Huffman near-optimality",
         std::to_string(kHuffmanSequences) + " sequences, " + std::to_string(violations) +
             " above entropy + 1 bit/symbol + table" + fmt(", min slack %.1f bits", worst_slack));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 7. Identical config and seed give identical artifacts.
void determinism(const fs::path& scratch) {
  auto files = corpus_files();
  files.resize(std::min<std::size_t>(files.size(), 3));
  PipelineConfig cfg;
  cfg.inputs.assign(files.begin(), files.end());
  cfg.schemes = {SchemeId::OneDir1p5Bit, SchemeId::TwoDir2BitHalfRes};
  cfg.noise_sigmas_8bit = {2.0};
  cfg.seed = kSeed;
  cfg.workers = 4;
  cfg.write_images = false;
  PipelineConfig again = cfg;
  cfg.output_dir = scratch / "run_a";
  again.output_dir = scratch / "run_b";
  bool ok = !files.empty();
  std::size_t compared = 0, streams = 0;
  try {
    run_pipeline(cfg);
    run_pipeline(again);
    for (const auto& e : fs::recursive_directory_iterator(cfg.output_dir)) {
      if (!e.is_regular_file()) continue;
      const auto rel = fs::relative(e.path(), cfg.output_dir);
      ok = ok && slurp(e.path()) == slurp(again.output_dir / rel);
      ++compared;
      streams += e.path().extension() == ".gcs";
    }
  } catch (const std::exception& e) {
    ok = false;
    std::printf("  determinism run failed: %s\n", e.what());
  }
  report(7, ok && streams > 0, "determinism",
         std::to_string(compared) + " artifacts (" + std::to_string(streams) +
             " .gcs streams) byte-identical across two runs with seed " + std::to_string(kSeed));
}

// 8. More bits per gradient give better corpus-mean PSNR.
void scheme_ordering(const fs::path& scratch) {
  PipelineConfig cfg;
  cfg.inputs = {corpus_dir()};
  cfg.schemes = {SchemeId::OneDir1Bit, SchemeId::OneDir1p5Bit, SchemeId::OneDir2Bit};
  cfg.output_dir = scratch / "ordering";
  cfg.write_images = false;
  cfg.write_streams = false;
  cfg.workers = 4;
  bool ok = false;
  std::string detail;
  try {
    const SweepResult r = sweep_schemes(cfg);
    const std::size_t col = r.table.column("psnr");
    const double a = std::get<double>(r.table.rows[0][col]);
    const double b = std::get<double>(r.table.rows[1][col]);
    const double c = std::get<double>(r.table.rows[2][col]);
    ok = r.run.failures == 0 && c >= b && b >= a;
    detail = fmt("mean PSNR 2-bit %.3f", c) + fmt(" >= 1.5-bit %.3f", b) +
             fmt(" >= 1-bit %.3f dB", a) + " over " +
             std::to_string(r.run.records.size() / 3) + " images";
  } catch (const std::exception& e) {
    detail = std::string("sweep failed: ") + e.what();
  }
  report(8, ok, "scheme ordering", detail);
}

}  // namespace

int main() {
  set_log_sink([](LogLevel level, std::string_view msg) {
    if (level >= LogLevel::Error) std::fprintf(stderr, "%.*s\n", static_cast<int>(msg.size()), msg.data());
  });
  const fs::path scratch = fs::temp_directory_path() / ("gradsense_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(scratch);
  std::printf("corpus: %s\n", corpus_dir().string().c_str());

  codec_losslessness();
  table_accounting();
  compression_ratio_corpus();
  reconstruction_fidelity();
  quantizer_oracle();
  huffman_near_optimality();
  determinism(scratch);
  scheme_ordering(scratch);

  std::error_code ec;
  fs::remove_all(scratch, ec);
  std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures ? 1 : 0;
}
