#include "commands.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sparsescan/metrics.hpp"
#include "sparsescan/pipeline.hpp"
#include "sparsescan/saliency.hpp"

namespace sparsescan::cli {
namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  return values;
}

ExternalEstimator parse_external(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("--emap expects NAME=path[,path...], got '" + spec + "'");
  }
  ExternalEstimator e{spec.substr(0, eq), {}};
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) e.paths.emplace_back(item);
  return e;
}

// Flattens per-image maps into one 1-row map for pooled ranking.
ErrorMap pool(const std::vector<ErrorMap>& maps) {
  std::vector<double> values;
  for (const auto& m : maps) values.insert(values.end(), m.values().begin(), m.values().end());
  const auto n = static_cast<int>(values.size());
  return ErrorMap(n, 1, std::move(values));
}

ErrorMap uniform_noise_map(int width, int height, Rng& rng) {
  std::vector<double> values(static_cast<std::size_t>(width) * height);
  for (auto& v : values) v = uniform01(rng);
  return ErrorMap(width, height, std::move(values));
}

struct Column {
  std::string name;
  std::vector<double> residuals;
};

}  // namespace

SampleSummary cmd_sample(const SampleRequest& request) {
  const ErrorMap saliency = read_emap(request.emap);
  const Bitmap bitmap = tiled_wdpp_bitmap(saliency, SampleBudget{request.k, request.tile, request.seed},
                                          request.gamma, request.sigma_s, request.threads);
  bitmap_to_pbm(bitmap, request.out_pbm);
  SampleSummary summary;
  summary.popcount = bitmap.popcount();
  double total = 0.0;
  for (std::size_t i = 0; i < bitmap.size(); ++i) {
    if (bitmap[i]) total += saliency[i];
  }
  summary.mean_saliency = summary.popcount > 0 ? total / static_cast<double>(summary.popcount) : 0.0;
  return summary;
}

std::vector<std::string> cmd_curves(const CurvesRequest& rq) {
  if (rq.hr.empty()) throw ValidationError("curves: at least one --hr image is required");
  if (!rq.sr.empty() && rq.sr.size() != rq.hr.size()) {
    throw ValidationError("curves: --sr count must match --hr count");
  }
  const bool roi = !rq.roi_hr.empty() || !rq.roi_sr.empty();
  if (roi && (rq.roi_hr.size() != rq.hr.size() || rq.roi_sr.size() != rq.hr.size())) {
    throw ValidationError("curves: --roi-hr and --roi-sr counts must match --hr count");
  }
  for (const auto& e : rq.external) {
    if (e.paths.size() != rq.hr.size()) {
      throw ValidationError("curves: estimator '" + e.name + "' needs one EMAP per --hr image");
    }
  }
  const auto fractions = rq.fractions.empty() ? default_fractions() : rq.fractions;

  std::vector<ErrorMap> truth;
  std::map<std::string, std::vector<ErrorMap>> estimates;
  std::vector<std::string> order{"oracle", "gradient"};
  if (roi) {
    order.push_back("interest");
    order.push_back("entropy");
  }
  for (const auto& e : rq.external) order.push_back(e.name);

  for (std::size_t i = 0; i < rq.hr.size(); ++i) {
    const Image hr = load_image(rq.hr[i]);
    Image sr;
    if (rq.sr.empty()) {
      sr = fit_to(upsample(downsample_nearest(hr, rq.rate), rq.rate, parse_interpolation(rq.reconstruction)),
                  hr.width(), hr.height());
    } else {
      sr = load_image(rq.sr[i]);
    }
    require_same_shape(hr, sr, "curves: HR/SR alignment");
    if (roi) {
      const ProbabilityMap roi_hr = load_probability_map(rq.roi_hr[i]);
      const ProbabilityMap roi_sr = load_probability_map(rq.roi_sr[i]);
      require_same_shape(hr, roi_hr, "curves: ROI alignment");
      require_same_shape(hr, roi_sr, "curves: ROI alignment");
      truth.push_back(residual_error(roi_hr, roi_sr));
      estimates["interest"].push_back(raster_cast<ErrorMap>(roi_sr));
      estimates["entropy"].push_back(entropy_saliency(roi_sr));
    } else {
      truth.push_back(residual_error(hr, sr));
    }
    estimates["oracle"].push_back(truth.back());
    estimates["gradient"].push_back(gradient_saliency(sr));
    for (const auto& e : rq.external) {
      ErrorMap m = load_estimated_error(e.paths[i]);
      require_same_shape(hr, m, "curves: estimator '" + e.name + "' alignment");
      estimates[e.name].push_back(std::move(m));
    }
  }

  const ErrorMap pooled_truth = pool(truth);
  std::vector<Column> columns;
  for (const auto& name : order) {
    columns.push_back({name, sparsification_curve(pool(estimates[name]), pooled_truth, fractions).residuals});
  }
  // Random ranking, averaged over seeds.
  Column random{"random", std::vector<double>(fractions.size(), 0.0)};
  const int seeds = std::max(rq.random_seeds, 1);
  for (int s = 0; s < seeds; ++s) {
    Rng rng(derive_seed(rq.seed, {static_cast<std::uint64_t>(s)}));
    const auto curve = sparsification_curve(uniform_noise_map(pooled_truth.width(), 1, rng), pooled_truth, fractions);
    for (std::size_t f = 0; f < fractions.size(); ++f) random.residuals[f] += curve.residuals[f] / seeds;
  }
  columns.insert(columns.begin() + 2, std::move(random));

  auto out = open_output(rq.out_csv);
  out << "fraction";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    out << format_number(fractions[f]);
    for (const auto& c : columns) out << ',' << format_number(c.residuals[f]);
    out << '\n';
  }
  if (!out) throw IoError("write failure on '" + rq.out_csv.string() + "'");

  if (!rq.correlation_csv.empty()) {
    auto corr = open_output(rq.correlation_csv);
    corr << "estimator,pooled,per_image_mean\n";
    const auto safe_pearson = [](const RasterView& a, const RasterView& b) {
      try {
        return pearson(a, b);
      } catch (const ValidationError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    for (const auto& name : order) {
      if (name == "oracle") continue;
      const auto& maps = estimates[name];
      double mean = 0.0;
      for (std::size_t i = 0; i < maps.size(); ++i) mean += safe_pearson(maps[i], truth[i]) / maps.size();
      corr << name << ',' << format_number(safe_pearson(pool(maps), pooled_truth)) << ',' << format_number(mean)
           << '\n';
    }
  }

  std::vector<std::string> names{"fraction"};
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

double cmd_eval_roi(const EvalRoiRequest& rq) {
  const ProbabilityMap roi_hr = load_probability_map(rq.roi_hr);
  const ProbabilityMap roi_out = load_probability_map(rq.roi_out);
  const double residual = l1_loss(roi_hr, roi_out);
  auto out = open_output(rq.out_csv);
  out << "roi_residual_l1\n" << format_number(residual) << '\n';
  if (!out) throw IoError("write failure on '" + rq.out_csv.string() + "'");
  return residual;
}

namespace {

struct SharedFlags {
  std::string config;
  std::string out_dir = "out";
  int threads = 0;
  std::map<std::string, std::string> overrides;
};

void add_pipeline_flags(CLI::App* cmd, SharedFlags& flags) {
  cmd->add_option("--config", flags.config, "Flat key = value config file");
  cmd->add_option("--out-dir", flags.out_dir, "Directory for artifacts")->capture_default_str();
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  for (const char* key : kConfigKeys) {
    cmd->add_option_function<std::string>(
        std::string("--") + key, [&flags, key](const std::string& v) { flags.overrides[key] = v; },
        std::string("Override config key '") + key + "'");
  }
}

PipelineConfig resolve_config(const SharedFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config.empty()) {
    if (!fs::exists(flags.config)) throw IoError("config file '" + flags.config + "' does not exist");
    cfg = load_config(flags.config);
  }
  for (const auto& [key, value] : flags.overrides) set_config_value(cfg, key, value, fs::path{});
  validate(cfg);
  return cfg;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learning-guided sparse SEM acquisition simulator"};
  app.require_subcommand(1);

  SharedFlags scan_flags;
  auto* scan = app.add_subcommand("scan", "Run one acquisition and write out.pgm, total_scan.pbm, report.csv");
  add_pipeline_flags(scan, scan_flags);

  SharedFlags sweep_flags;
  std::string factors_text = "3,5,7,10,13";
  auto* sweep = app.add_subcommand("sweep", "Acquire at several speedup factors and write sweep.csv");
  add_pipeline_flags(sweep, sweep_flags);
  sweep->add_option("--factors", factors_text, "Comma-separated target speedups")->capture_default_str();

  SampleRequest sample_rq;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Draw a tiled WDPP rescan bitmap from an EMAP saliency map");
  sample->add_option("--emap", sample_rq.emap, "Saliency map (EMAP)")->required();
  sample->add_option("--k", sample_rq.k, "Number of pixels")->required();
  sample->add_option("--gamma", sample_rq.gamma, "Saliency exponent")->capture_default_str();
  sample->add_option("--sigma_s", sample_rq.sigma_s, "Spatial similarity length (pixels)")->capture_default_str();
  sample->add_option("--tile", sample_rq.tile, "Tile side length")->capture_default_str();
  sample->add_option("--seed", sample_rq.seed, "RNG seed")->capture_default_str();
  sample->add_option("--threads", sample_rq.threads, "Worker threads (0 = all cores)");
  sample->add_option("--out", sample_out, "Output PBM")->required();

  CurvesRequest curves_rq;
  std::vector<std::string> curves_hr, curves_sr, curves_roi_hr, curves_roi_sr, curves_emap;
  std::string curves_out, curves_corr, curves_fractions;
  auto* curves = app.add_subcommand("curves", "Sparsification error curves for built-in and external estimators");
  curves->add_option("--hr", curves_hr, "High-resolution image(s)")->required();
  curves->add_option("--sr", curves_sr, "Precomputed reconstruction(s), one per --hr");
  curves->add_option("--rate", curves_rq.rate, "Down-sampling rate when reconstructing")->capture_default_str();
  curves->add_option("--reconstruction", curves_rq.reconstruction, "nearest, bilinear or bicubic")->capture_default_str();
  curves->add_option("--roi-hr", curves_roi_hr, "F_ROI(I_HR) map(s)");
  curves->add_option("--roi-sr", curves_roi_sr, "F_ROI(I_SR) map(s)");
  curves->add_option("--emap", curves_emap, "External estimator NAME=path[,path...]");
  curves->add_option("--random-seeds", curves_rq.random_seeds, "Seeds averaged for the random column")->capture_default_str();
  curves->add_option("--seed", curves_rq.seed, "Base seed for the random column");
  curves->add_option("--fractions", curves_fractions, "Comma-separated fractions (default grid otherwise)");
  curves->add_option("--out", curves_out, "Output CSV")->required();
  curves->add_option("--correlation-out", curves_corr, "Pixel-wise correlation CSV (pooled and per-image mean)");

  EvalRoiRequest roi_rq;
  std::string roi_hr, roi_out, roi_csv;
  auto* eval_roi = app.add_subcommand("eval-roi", "ROI-task residual |F_ROI(I_HR) - F_ROI(I_OUT)|");
  eval_roi->add_option("--roi-hr", roi_hr, "F_ROI(I_HR)")->required();
  eval_roi->add_option("--roi-out", roi_out, "F_ROI(I_OUT)")->required();
  eval_roi->add_option("--out", roi_csv, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return kOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (scan->parsed()) {
      const PipelineConfig cfg = resolve_config(scan_flags);
      run_acquisition(cfg, RunOptions{scan_flags.threads, fs::path(scan_flags.out_dir)});
    } else if (sweep->parsed()) {
      PipelineConfig cfg = resolve_config(sweep_flags);
      sweep_speedup(cfg, parse_list(factors_text, "--factors"),
                    RunOptions{sweep_flags.threads, fs::path(sweep_flags.out_dir)});
    } else if (sample->parsed()) {
      sample_rq.out_pbm = sample_out;
      const SampleSummary s = cmd_sample(sample_rq);
      out << "popcount " << s.popcount << "\n"
          << "mean_saliency " << format_number(s.mean_saliency) << "\n";
    } else if (curves->parsed()) {
      curves_rq.hr.assign(curves_hr.begin(), curves_hr.end());
      curves_rq.sr.assign(curves_sr.begin(), curves_sr.end());
      curves_rq.roi_hr.assign(curves_roi_hr.begin(), curves_roi_hr.end());
      curves_rq.roi_sr.assign(curves_roi_sr.begin(), curves_roi_sr.end());
      for (const auto& e : curves_emap) curves_rq.external.push_back(parse_external(e));
      if (!curves_fractions.empty()) curves_rq.fractions = parse_list(curves_fractions, "--fractions");
      curves_rq.out_csv = curves_out;
      curves_rq.correlation_csv = curves_corr;
      cmd_curves(curves_rq);
    } else if (eval_roi->parsed()) {
      roi_rq.roi_hr = roi_hr;
      roi_rq.roi_out = roi_out;
      roi_rq.out_csv = roi_csv;
      cmd_eval_roi(roi_rq);
    }
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

}  // namespace sparsescan::cli
