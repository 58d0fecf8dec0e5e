#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include "sparsescan/pipeline.hpp"

namespace sparsescan {
namespace fs = std::filesystem;

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::oracle: return "oracle";
    case EstimatorKind::gradient: return "gradient";
    case EstimatorKind::entropy: return "entropy";
    case EstimatorKind::interest: return "interest";
  }
  return "unknown";
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::wdpp: return "wdpp";
    case SamplerKind::topk: return "topk";
    case SamplerKind::random: return "random";
  }
  return "unknown";
}

SamplerKind parse_sampler(std::string_view name) {
  if (name == "wdpp") return SamplerKind::wdpp;
  if (name == "topk") return SamplerKind::topk;
  if (name == "random") return SamplerKind::random;
  throw ValidationError("unknown sampler '" + std::string(name) + "' (expected wdpp, topk or random)");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

fs::path resolve(const fs::path& base_dir, std::string_view value) {
  fs::path p{std::string(value)};
  return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
}

}  // namespace

void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view raw,
                      const fs::path& base_dir) {
  const std::string_view value = trim(raw);
  if (key == "hr_path") {
    cfg.hr_path = resolve(base_dir, value);
  } else if (key == "downsample_rate") {
    cfg.downsample_rate = parse_number<int>(key, value);
  } else if (key == "reconstruction") {
    if (value == "nearest" || value == "bilinear" || value == "bicubic") {
      cfg.reconstruction = parse_interpolation(value);
    } else {
      cfg.reconstruction = resolve(base_dir, value);
    }
  } else if (key == "estimator") {
    if (value == "oracle") cfg.estimator = EstimatorKind::oracle;
    else if (value == "gradient") cfg.estimator = EstimatorKind::gradient;
    else if (value == "entropy") cfg.estimator = EstimatorKind::entropy;
    else if (value == "interest") cfg.estimator = EstimatorKind::interest;
    else cfg.estimator = resolve(base_dir, value);
  } else if (key == "roi") {
    if (value.empty() || value == "none") {
      cfg.roi.reset();
    } else {
      const auto comma = value.find(',');
      if (comma == std::string_view::npos) {
        throw ValidationError("config key 'roi': expected '<roi_hr>,<roi_sr>'");
      }
      cfg.roi = RoiMaps{resolve(base_dir, trim(value.substr(0, comma))),
                        resolve(base_dir, trim(value.substr(comma + 1)))};
    }
  } else if (key == "sampler") {
    cfg.sampler = parse_sampler(value);
  } else if (key == "gamma") {
    cfg.gamma = parse_number<double>(key, value);
  } else if (key == "sigma_s") {
    cfg.sigma_s = parse_number<double>(key, value);
  } else if (key == "tile") {
    cfg.tile = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "total_scan_rate") {
    cfg.total_scan_rate = parse_number<double>(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_number<double>(key, value);
  } else {
    throw ValidationError("unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    set_config_value(cfg, key, line.substr(eq + 1), base_dir);
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text, path.parent_path());
}

void validate(const PipelineConfig& cfg) {
  if (cfg.hr_path.empty()) throw ValidationError("config: hr_path is required");
  if (cfg.downsample_rate < 1) throw ValidationError("config: downsample_rate must be >= 1");
  if (cfg.tile < 1) throw ValidationError("config: tile must be >= 1");
  if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) throw ValidationError("config: gamma must be >= 0");
  if (!(cfg.sigma_s > 0.0) || !std::isfinite(cfg.sigma_s)) throw ValidationError("config: sigma_s must be > 0");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw ValidationError("config: lambda must be >= 0");
  if (!(cfg.total_scan_rate > 0.0 && cfg.total_scan_rate <= 1.0)) {
    throw ValidationError("config: total_scan_rate must be in (0, 1]");
  }
  const double r = cfg.downsample_rate;
  if (cfg.total_scan_rate < 1.0 / (r * r) - 1e-12) {
    throw ValidationError("config: total_scan_rate " + format_number(cfg.total_scan_rate) +
                          " is below the initial-scan rate 1/" + std::to_string(cfg.downsample_rate) + "^2");
  }
  if (const auto* kind = std::get_if<EstimatorKind>(&cfg.estimator)) {
    if ((*kind == EstimatorKind::entropy || *kind == EstimatorKind::interest) && !cfg.roi) {
      throw ValidationError("config: estimator '" + to_string(*kind) + "' needs roi maps");
    }
  }
}

void write_config(std::ostream& out, const PipelineConfig& cfg) {
  out << "hr_path = " << cfg.hr_path.string() << "\n";
  out << "downsample_rate = " << cfg.downsample_rate << "\n";
  if (const auto* m = std::get_if<Interpolation>(&cfg.reconstruction)) {
    out << "reconstruction = " << to_string(*m) << "\n";
  } else {
    out << "reconstruction = " << std::get<fs::path>(cfg.reconstruction).string() << "\n";
  }
  if (const auto* e = std::get_if<EstimatorKind>(&cfg.estimator)) {
    out << "estimator = " << to_string(*e) << "\n";
  } else {
    out << "estimator = " << std::get<fs::path>(cfg.estimator).string() << "\n";
  }
  out << "roi = " << (cfg.roi ? cfg.roi->hr.string() + "," + cfg.roi->sr.string() : std::string("none")) << "\n";
  out << "sampler = " << to_string(cfg.sampler) << "\n";
  out << "gamma = " << format_number(cfg.gamma) << "\n";
  out << "sigma_s = " << format_number(cfg.sigma_s) << "\n";
  out << "tile = " << cfg.tile << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "total_scan_rate = " << format_number(cfg.total_scan_rate) << "\n";
  out << "lambda = " << format_number(cfg.lambda) << "\n";
}

}  // namespace sparsescan
