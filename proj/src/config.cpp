#include "gradsense/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gradsense/error.hpp"

namespace gradsense {
namespace {

using nlohmann::json;

bool is_image_path(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + where + key + "'");
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + where + key + "': " + e.what());
  }
}

SchemeId scheme_from(const json& v) {
  if (!v.is_string()) throw ConfigError("scheme names must be strings");
  const auto id = parse_scheme_id(v.get<std::string>());
  if (!id) throw ConfigError("unknown scheme '" + v.get<std::string>() + "'");
  return *id;
}

}  // namespace

std::string_view to_string(YTerm y) {
  switch (y) {
    case YTerm::Auto: return "auto";
    case YTerm::On: return "on";
    case YTerm::Off: return "off";
  }
  return "auto";
}

std::optional<YTerm> parse_y_term(std::string_view text) {
  if (text == "auto") return YTerm::Auto;
  if (text == "on") return YTerm::On;
  if (text == "off") return YTerm::Off;
  return std::nullopt;
}

std::filesystem::path default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  if (env && *env) return env;
  return "gradsense_out";
}

QuantScheme PipelineConfig::scheme(SchemeId id) const {
  const auto it = thresholds.find(id);
  return it == thresholds.end() ? QuantScheme::make(id) : QuantScheme::make(id, it->second);
}

void PipelineConfig::validate() const {
  if (inputs.empty()) throw ConfigError("'inputs' must list at least one path");
  for (const auto& p : inputs) {
    if (!std::filesystem::exists(p)) throw ConfigError("input path does not exist: " + p.string());
  }
  if (schemes.empty()) throw ConfigError("'schemes' must not be empty");
  if (noise_sigmas_8bit.empty()) throw ConfigError("'noise_sigmas' must not be empty");
  for (double s : noise_sigmas_8bit) {
    if (!(s >= 0.0)) throw ConfigError("noise sigmas must be >= 0");
  }
  if (lri_factor < 1) throw ConfigError("'lri_factor' must be >= 1");
  for (SchemeId id : schemes) {
    QuantScheme s;
    try {
      s = scheme(id);
      ReconConfig rc = recon;
      rc.upsample_factor = lri_factor;
      rc.validate();
      DequantTable::make(s, rc);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string(to_string(id)) + ": " + e.what());
    }
    if (y_term == YTerm::On && !s.supports(Direction::Y)) {
      throw ConfigError("y_term 'on' but " + std::string(to_string(id)) +
                        " does not measure y gradients");
    }
  }
  if (tile.enabled()) {
    const auto f = static_cast<std::size_t>(lri_factor);
    if (tile.width % f || tile.height % f || tile.overlap % f) {
      throw ConfigError("tile dimensions and overlap must be multiples of lri_factor");
    }
    if (tile.overlap >= tile.width || tile.overlap >= tile.height) {
      throw ConfigError("tile overlap must be smaller than the tile");
    }
  } else if (tile.width || tile.height) {
    throw ConfigError("tile width and height must both be set");
  }
  if (!(link_gbps > 0.0)) throw ConfigError("'link_gbps' must be > 0");
  if (fps_frame && (fps_frame->first == 0 || fps_frame->second == 0)) {
    throw ConfigError("'fps_frame' must be non-empty");
  }
  if (workers < 1) throw ConfigError("'workers' must be >= 1");
  if (ssim.window < 1 || ssim.window % 2 == 0 || !(ssim.sigma > 0.0)) {
    throw ConfigError("SSIM window must be odd and sigma > 0");
  }
  if (output_dir.empty()) throw ConfigError("'output_dir' must not be empty");
}

std::vector<std::filesystem::path> PipelineConfig::frames() const {
  std::vector<std::filesystem::path> out;
  for (const auto& p : inputs) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> entries;
      for (const auto& e : std::filesystem::directory_iterator(p)) {
        if (e.is_regular_file() && is_image_path(e.path())) entries.push_back(e.path());
      }
      std::sort(entries.begin(), entries.end());
      out.insert(out.end(), entries.begin(), entries.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root,
                 {"inputs", "schemes", "thresholds", "lri_factor", "noise_sigmas", "recon",
                  "tile", "output_dir", "seed", "link_gbps", "fps_frame", "workers",
                  "write_streams", "write_images"},
                 "");

  PipelineConfig cfg;
  if (root.contains("inputs")) {
    const json& in = root["inputs"];
    const auto add = [&](const json& v) {
      if (!v.is_string()) throw ConfigError("'inputs' entries must be strings");
      std::filesystem::path p = v.get<std::string>();
      cfg.inputs.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
    };
    if (in.is_array()) {
      for (const auto& v : in) add(v);
    } else {
      add(in);
    }
  }
  if (root.contains("schemes")) {
    const json& s = root["schemes"];
    cfg.schemes.clear();
    if (s.is_array()) {
      for (const auto& v : s) cfg.schemes.push_back(scheme_from(v));
    } else {
      cfg.schemes.push_back(scheme_from(s));
    }
  }
  if (root.contains("thresholds")) {
    const json& t = root["thresholds"];
    if (!t.is_object()) throw ConfigError("'thresholds' must map scheme names to lists");
    for (const auto& [name, list] : t.items()) {
      cfg.thresholds[scheme_from(name)] = get<std::vector<int>>(t, name.c_str(), "thresholds.");
    }
  }
  if (root.contains("lri_factor")) cfg.lri_factor = get<int>(root, "lri_factor", "");
  if (root.contains("noise_sigmas")) {
    cfg.noise_sigmas_8bit = get<std::vector<double>>(root, "noise_sigmas", "");
  }
  if (root.contains("recon")) {
    const json& r = root["recon"];
    if (!r.is_object()) throw ConfigError("'recon' must be an object");
    reject_unknown(r, {"lambda", "beta", "saturation", "dequant", "y_term", "border_crop",
                       "ssim_window", "ssim_sigma"},
                   "recon.");
    if (r.contains("lambda")) cfg.recon.lambda = get<double>(r, "lambda", "recon.");
    if (r.contains("beta")) cfg.recon.beta = get<double>(r, "beta", "recon.");
    if (r.contains("saturation")) cfg.recon.saturation_8bit = get<double>(r, "saturation", "recon.");
    if (r.contains("dequant")) {
      const json& d = r["dequant"];
      if (!d.is_object()) throw ConfigError("'recon.dequant' must map levels to values");
      for (const auto& [level, value] : d.items()) {
        int l = 0;
        try {
          std::size_t used = 0;
          l = std::stoi(level, &used);
          if (used != level.size()) throw std::invalid_argument(level);
        } catch (const std::exception&) {
          throw ConfigError("'recon.dequant' keys must be integer levels, got '" + level + "'");
        }
        cfg.recon.dequant_overrides[l] = get<double>(d, level.c_str(), "recon.dequant.");
      }
    }
    if (r.contains("y_term")) {
      const auto text = get<std::string>(r, "y_term", "recon.");
      const auto y = parse_y_term(text);
      if (!y) throw ConfigError("'recon.y_term' must be auto, on or off");
      cfg.y_term = *y;
    }
    if (r.contains("border_crop")) {
      cfg.border_crop = get<std::size_t>(r, "border_crop", "recon.");
    }
    if (r.contains("ssim_window")) cfg.ssim.window = get<int>(r, "ssim_window", "recon.");
    if (r.contains("ssim_sigma")) cfg.ssim.sigma = get<double>(r, "ssim_sigma", "recon.");
  }
  if (root.contains("tile")) {
    const json& t = root["tile"];
    if (!t.is_object()) throw ConfigError("'tile' must be an object");
    reject_unknown(t, {"width", "height", "overlap"}, "tile.");
    if (t.contains("width")) cfg.tile.width = get<std::size_t>(t, "width", "tile.");
    if (t.contains("height")) cfg.tile.height = get<std::size_t>(t, "height", "tile.");
    if (t.contains("overlap")) cfg.tile.overlap = get<std::size_t>(t, "overlap", "tile.");
  }
  if (root.contains("output_dir")) {
    cfg.output_dir = get<std::string>(root, "output_dir", "");
  }
  if (root.contains("seed")) cfg.seed = get<std::uint64_t>(root, "seed", "");
  if (root.contains("link_gbps")) cfg.link_gbps = get<double>(root, "link_gbps", "");
  if (root.contains("fps_frame")) {
    const auto dims = get<std::vector<std::uint64_t>>(root, "fps_frame", "");
    if (dims.size() != 2) throw ConfigError("'fps_frame' must be [width, height]");
    cfg.fps_frame = std::make_pair(dims[0], dims[1]);
  }
  if (root.contains("workers")) cfg.workers = get<unsigned>(root, "workers", "");
  if (root.contains("write_streams")) cfg.write_streams = get<bool>(root, "write_streams", "");
  if (root.contains("write_images")) cfg.write_images = get<bool>(root, "write_images", "");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path());
}

}  // namespace gradsense
