#include "tsgaudit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tsgaudit/analysis.hpp"
#include "tsgaudit/baselines.hpp"
#include "tsgaudit/ingest.hpp"
#include "tsgaudit/kernels.hpp"
#include "tsgaudit/manifest.hpp"
#include "tsgaudit/metrics.hpp"
#include "tsgaudit/report.hpp"
#include "tsgaudit/splitter.hpp"
#include "tsgaudit/synth.hpp"

namespace tsgaudit::cli {
namespace {

namespace fs = std::filesystem;

// Raised for flag combinations CLI11 cannot express; maps to exit code 2.
class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  unsigned threads = 1;
  std::string kernel = "auto";
};

struct IngestFlags {
  std::string format = "canonical";
  std::vector<std::string> annotations;
  std::string durations;
  std::string name;
};

struct Outputs {
  fs::path data_file;  // dataset/prediction file
  fs::path manifest;
  fs::path dir;
};

unsigned default_threads() {
  if (const char* env = std::getenv("TSGAUDIT_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// `--out x.jsonl` writes that file plus `x.manifest.json` beside it; any
// other value names a directory holding `default_name` and `manifest.json`.
Outputs resolve_out(const std::string& out, const std::string& default_name) {
  Outputs o;
  const fs::path p(out);
  if (p.extension() == ".jsonl") {
    o.dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
    o.data_file = p;
    o.manifest = o.dir / (p.stem().string() + ".manifest.json");
  } else {
    o.dir = p;
    o.data_file = p / default_name;
    o.manifest = p / "manifest.json";
  }
  fs::create_directories(o.dir);
  return o;
}

Json report_json(const IngestReport& r) {
  Json out;
  out["records"] = r.records;
  out["accepted"] = r.accepted;
  out["swapped"] = r.swapped;
  out["clamped"] = r.clamped;
  out["rejected"] = r.rejected;
  out["renamed"] = r.renamed;
  return out;
}

std::string ingest_name(const IngestFlags& f) {
  if (!f.name.empty()) return f.name;
  return f.format;
}

IngestResult load(const IngestFlags& f, RunManifest& manifest) {
  if (f.annotations.empty()) throw UsageError("--annotations is required");
  std::vector<IngestResult> parts;
  std::optional<DurationTable> durations;
  if (f.format == "charades") {
    if (f.durations.empty()) throw UsageError("--durations is required for --format charades");
    auto in = open_in(f.durations);
    durations = parse_duration_table(in);
    manifest.add_input(f.durations);
  }
  for (const auto& path : f.annotations) {
    auto in = open_in(path);
    manifest.add_input(path);
    try {
      if (f.format == "charades") {
        parts.push_back(parse_charades(in, *durations, ingest_name(f)));
      } else if (f.format == "activitynet") {
        parts.push_back(parse_activitynet(in, ingest_name(f)));
      } else {
        IngestResult r;
        r.dataset = parse_canonical(in, ingest_name(f));
        r.report.records = r.report.accepted = r.dataset.size();
        parts.push_back(std::move(r));
      }
    } catch (const ParseError& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  auto merged = merge(std::move(parts), ingest_name(f));
  manifest.set("ingest", report_json(merged.report));
  return merged;
}

Dataset load_canonical(const std::string& path, RunManifest& manifest) {
  auto in = open_in(path);
  manifest.add_input(path);
  try {
    return parse_canonical(in, fs::path(path).stem().string());
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
  cmd->add_option("--format", f.format, "Annotation layout")
      ->check(CLI::IsMember({"charades", "activitynet", "canonical"}));
  cmd->add_option("--annotations", f.annotations, "Annotation file(s); several are merged in order")
      ->required();
  cmd->add_option("--durations", f.durations, "Charades `<video_id>,<seconds>` table");
  cmd->add_option("--name", f.name, "Dataset name");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not an integer list: " + text);
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number list: " + text);
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

Json common_json(const Common& c) { return {{"threads", c.threads}, {"kernel", c.kernel}}; }

// ---------------------------------------------------------------- commands

int cmd_convert(const IngestFlags& f, const std::string& out_path, const Common& common, std::ostream& out) {
  RunManifest manifest("convert");
  const auto data = load(f, manifest);
  const auto o = resolve_out(out_path, "dataset.jsonl");
  {
    auto file = open_out(o.data_file);
    write_canonical(data.dataset, file);
  }
  manifest.config() = {{"format", f.format}, {"name", ingest_name(f)}, {"common", common_json(common)}};
  manifest.add_output(o.data_file);
  manifest.write(o.manifest);
  out << "converted " << data.dataset.size() << " samples (" << data.report.rejected << " rejected, "
      << data.report.clamped << " clamped, " << data.report.swapped << " swapped) -> " << o.data_file.string()
      << '\n';
  return 0;
}

struct ResplitFlags {
  IngestFlags ingest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<double> overlong;
  bool no_overlong = false;
  double ood_fraction = 0.20;
  std::string ratios = "0.70,0.05,0.05";
  std::string bandwidth = "scott";
};

int cmd_resplit(const ResplitFlags& f, const Common& common, std::ostream& out) {
  if (!f.seed) throw UsageError("--seed is required");
  RunManifest manifest("resplit");
  const auto data = load(f.ingest, manifest);

  const std::string mode = !f.mode.empty() ? f.mode : (f.ingest.format == "activitynet" ? "activitynet" : "charades");
  SplitConfig config = mode == "activitynet" ? SplitConfig::activitynet(*f.seed) : SplitConfig::charades(*f.seed);
  if (f.overlong) config.overlong_threshold = *f.overlong;
  if (f.no_overlong) config.overlong_threshold.reset();
  config.ood_fraction = f.ood_fraction;
  const auto ratios = parse_double_list(f.ratios);
  if (ratios.size() != 3) throw UsageError("--ratios needs three values: training,val,test_iid");
  config.ratios = {ratios[0], ratios[1], ratios[2]};
  config.bandwidth = BandwidthPolicy::parse(f.bandwidth);

  const auto result = resplit(data.dataset, config, common.threads);

  fs::create_directories(f.out);
  const fs::path dir(f.out);
  {
    auto file = open_out(dir / "split.json");
    file << to_json(result).dump(2) << '\n';
  }
  manifest.add_output(dir / "split.json");
  for (auto label : kAllSplits) {
    const auto name = std::string(to_string(label)) + ".jsonl";
    auto file = open_out(dir / name);
    write_canonical(select(data.dataset, result.indices_of(label), std::string(to_string(label))), file);
    file.close();
    manifest.add_output(dir / name);
  }
  manifest.config() = {{"format", f.ingest.format}, {"mode", mode}, {"split", to_json(config)},
                       {"common", common_json(common)}};
  manifest.set("split", to_json(result.manifest));
  manifest.write(dir / "manifest.json");

  const auto& m = result.manifest;
  out << "resplit " << data.dataset.size() << " samples:";
  for (auto label : kAllSplits)
    out << ' ' << to_string(label) << '=' << m.sample_counts[static_cast<std::size_t>(label)] << '/'
        << m.video_counts[static_cast<std::size_t>(label)] << 'v';
  out << " (conflict-moved " << m.conflict_moved << ", overlong-pinned " << m.overlong_pinned << ", rejected "
      << data.report.rejected << ")\n";
  return 0;
}

struct BaselineFlags {
  std::string kind = "bias_based";
  std::string dataset;
  std::string train;
  std::string out;
  int top_n = 5;
  std::optional<std::uint64_t> seed;
  std::string bandwidth = "scott";
};

int cmd_baseline(const BaselineFlags& f, const Common& common, std::ostream& out) {
  RunManifest manifest("baseline");
  BaselineConfig config;
  config.kind = parse_baseline_kind(f.kind);
  config.top_n = f.top_n;
  if (config.kind == BaselineConfig::Kind::bias_based) {
    if (!f.seed) throw UsageError("--seed is required for bias_based");
    if (f.train.empty()) throw UsageError("--train is required for bias_based");
  }
  const auto split = load_canonical(f.dataset, manifest);
  PredictionSet predictions;
  Json echo = {{"kind", f.kind}, {"top_n", f.top_n}};
  if (config.kind == BaselineConfig::Kind::bias_based) {
    config.seed = *f.seed;
    const auto training = load_canonical(f.train, manifest);
    if (training.empty()) throw std::runtime_error("training split is empty");
    const auto model = KdeModel::fit(normalize_all(training), BandwidthPolicy::parse(f.bandwidth));
    predictions = bias_based_predict(model, split, config);
    echo["seed"] = config.seed;
    echo["bandwidth_policy"] = f.bandwidth;
    echo["bandwidth"] = {model.bandwidth().s, model.bandwidth().e};
  } else {
    predictions = predict_all(split, config.top_n);
  }
  const auto o = resolve_out(f.out, "predictions.jsonl");
  {
    auto file = open_out(o.data_file);
    write_predictions(predictions, file);
  }
  echo["common"] = common_json(common);
  manifest.config() = std::move(echo);
  manifest.add_output(o.data_file);
  manifest.write(o.manifest);
  out << "wrote " << predictions.size() << " prediction lists -> " << o.data_file.string() << '\n';
  return 0;
}

struct EvalFlags {
  std::string dataset;
  std::string predictions;
  std::string n = "1,5";
  std::string m = "0.1,0.3,0.5,0.7,0.9";
  std::string comparator = "strict";
  std::string out;
};

int cmd_eval(const EvalFlags& f, const Common& common, std::ostream& out) {
  RunManifest manifest("eval");
  const auto dataset = load_canonical(f.dataset, manifest);
  auto pin = open_in(f.predictions);
  manifest.add_input(f.predictions);
  PredictionSet predictions;
  try {
    predictions = parse_predictions(pin);
  } catch (const ParseError& e) {
    throw std::runtime_error(f.predictions + ": " + e.what());
  }
  const auto table = metric_table(predictions, dataset, parse_int_list(f.n), parse_double_list(f.m),
                                  parse_comparator(f.comparator));
  if (f.out.empty()) {
    write_metric_report(table, out);
    return 0;
  }
  fs::create_directories(f.out);
  const fs::path dir(f.out);
  {
    auto file = open_out(dir / "metrics.json");
    write_metric_report(table, file);
  }
  manifest.config() = {{"n", f.n}, {"m", f.m}, {"iou_comparator", f.comparator}, {"common", common_json(common)}};
  manifest.add_output(dir / "metrics.json");
  manifest.write(dir / "manifest.json");
  for (const auto& c : table.cells)
    out << "R@" << c.n << ",IoU@" << c.m << " = " << c.recall << "   dR = " << c.discounted_recall << '\n';
  return 0;
}

struct AnalyzeFlags {
  std::string dataset;
  std::string split;
  std::string out;
  int grid = 64;
  int bins = 10;
  std::size_t top_verbs = 30;
  std::string verb;
  std::string verbs_file;
  std::string bandwidth = "scott";
};

int cmd_analyze(const AnalyzeFlags& f, const Common& common, std::ostream& out) {
  RunManifest manifest("analyze");
  const auto dataset = load_canonical(f.dataset, manifest);
  std::optional<SplitResult> split;
  if (!f.split.empty()) {
    auto in = open_in(f.split);
    manifest.add_input(f.split);
    split = split_from_json(Json::parse(in), dataset);
  }
  std::unique_ptr<VerbExtractor> extractor;
  if (!f.verbs_file.empty()) {
    auto in = open_in(f.verbs_file);
    manifest.add_input(f.verbs_file);
    extractor = std::make_unique<PrecomputedVerbExtractor>(dataset, in);
  } else {
    extractor = std::make_unique<LexiconVerbExtractor>();
  }
  ReportOptions options;
  options.grid_resolution = f.grid;
  options.histogram_bins = f.bins;
  options.top_verbs = f.top_verbs;
  if (!f.verb.empty()) options.verb_filter = f.verb;
  options.bandwidth = BandwidthPolicy::parse(f.bandwidth);
  options.threads = common.threads;

  const auto report = distribution_report(dataset, split ? &*split : nullptr, options, *extractor);
  fs::create_directories(f.out);
  const fs::path dir(f.out);
  {
    auto file = open_out(dir / "report.json");
    file << report.dump(2) << '\n';
  }
  {
    auto file = open_out(dir / "histogram.csv");
    write_histogram_csv(report, file);
  }
  {
    auto file = open_out(dir / "verbs.csv");
    write_verbs_csv(report, file);
  }
  for (const char* name : {"report.json", "histogram.csv", "verbs.csv"}) manifest.add_output(dir / name);
  manifest.config() = {{"grid", f.grid},         {"bins", f.bins},           {"top_verbs", f.top_verbs},
                       {"verb", f.verb},         {"bandwidth", f.bandwidth}, {"verbs_file", !f.verbs_file.empty()},
                       {"common", common_json(common)}};
  manifest.write(dir / "manifest.json");
  out << "wrote report for " << dataset.size() << " samples -> " << (dir / "report.json").string() << '\n';
  return 0;
}

struct SynthFlags {
  std::string preset = "two-cluster";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> videos;
  std::optional<std::size_t> samples_per_video;
};

int cmd_synth(const SynthFlags& f, const Common& common, std::ostream& out) {
  if (!f.seed) throw UsageError("--seed is required");
  RunManifest manifest("synth");
  auto config = preset(f.preset, *f.seed);
  if (f.videos) config.videos = *f.videos;
  if (f.samples_per_video) config.samples_per_video = *f.samples_per_video;
  const auto dataset = generate(config);
  const auto o = resolve_out(f.out, "dataset.jsonl");
  {
    auto file = open_out(o.data_file);
    write_canonical(dataset, file);
  }
  manifest.config() = {{"preset", f.preset},
                       {"seed", *f.seed},
                       {"videos", config.videos},
                       {"samples_per_video", config.samples_per_video},
                       {"common", common_json(common)}};
  manifest.add_output(o.data_file);
  manifest.write(o.manifest);
  out << "generated " << dataset.size() << " samples -> " << o.data_file.string() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporal sentence grounding benchmark audit: re-splitting, baselines and metrics", "tsgaudit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  common.threads = default_threads();
  app.add_option("--threads", common.threads, "Worker threads (default: $TSGAUDIT_THREADS or 1)")
      ->check(CLI::Range(1u, 1024u));
  app.add_option("--kernel", common.kernel, "Density kernel: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  IngestFlags convert_flags;
  std::string convert_out;
  auto* convert = app.add_subcommand("convert", "Convert annotations to the canonical JSON-lines format");
  add_ingest_flags(convert, convert_flags);
  convert->add_option("--out", convert_out, "Output directory or .jsonl file")->required();

  ResplitFlags rs;
  auto* resplit_cmd = app.add_subcommand("resplit", "Re-split a dataset into training/val/test_iid/test_ood");
  add_ingest_flags(resplit_cmd, rs.ingest);
  resplit_cmd->add_option("--out", rs.out, "Output directory")->required();
  resplit_cmd->add_option("--seed", rs.seed, "Seed for the video shuffle");
  resplit_cmd->add_option("--mode", rs.mode, "charades or activitynet (default follows --format)")
      ->check(CLI::IsMember({"charades", "activitynet"}));
  resplit_cmd->add_option("--overlong-threshold", rs.overlong, "Pin moments longer than this fraction to training");
  resplit_cmd->add_flag("--no-overlong", rs.no_overlong, "Disable overlong pinning");
  resplit_cmd->add_option("--ood-fraction", rs.ood_fraction, "Share of the preliminary test_ood cut");
  resplit_cmd->add_option("--ratios", rs.ratios, "training,val,test_iid shares of the whole dataset");
  resplit_cmd->add_option("--bandwidth", rs.bandwidth, "scott, silverman or <hs>,<he>");

  BaselineFlags bl;
  auto* baseline = app.add_subcommand("baseline", "Emit Bias-based or PredictAll predictions");
  baseline->add_option("--kind", bl.kind)->check(CLI::IsMember({"bias_based", "predict_all"}));
  baseline->add_option("--dataset", bl.dataset, "Canonical file of samples to predict")->required();
  baseline->add_option("--train", bl.train, "Canonical training split (bias_based)");
  baseline->add_option("--out", bl.out, "Output directory or .jsonl file")->required();
  baseline->add_option("--top-n", bl.top_n, "Predictions per sample")->check(CLI::PositiveNumber);
  baseline->add_option("--seed", bl.seed, "Seed (bias_based)");
  baseline->add_option("--bandwidth", bl.bandwidth, "scott, silverman or <hs>,<he>");

  EvalFlags ev;
  auto* eval = app.add_subcommand("eval", "Score predictions with R@n,IoU@m and dR@n,IoU@m");
  eval->add_option("--dataset", ev.dataset, "Canonical ground-truth file")->required();
  eval->add_option("--predictions", ev.predictions, "Prediction file")->required();
  eval->add_option("--n", ev.n, "Comma-separated n values");
  eval->add_option("--m", ev.m, "Comma-separated IoU thresholds");
  eval->add_option("--iou-comparator", ev.comparator, "strict (IoU > m) or inclusive (IoU >= m)")
      ->check(CLI::IsMember({"strict", "inclusive"}));
  eval->add_option("--out", ev.out, "Output directory (default: report on stdout)");

  AnalyzeFlags an;
  auto* analyze = app.add_subcommand("analyze", "Density grids, length histograms and verb profiles");
  analyze->add_option("--dataset", an.dataset, "Canonical dataset file")->required();
  analyze->add_option("--split", an.split, "split.json from resplit");
  analyze->add_option("--out", an.out, "Output directory")->required();
  analyze->add_option("--grid", an.grid, "Grid resolution")->check(CLI::Range(2, 4096));
  analyze->add_option("--bins", an.bins, "Histogram bins")->check(CLI::Range(1, 1000));
  analyze->add_option("--top-verbs", an.top_verbs, "Verbs per profile")->check(CLI::PositiveNumber);
  analyze->add_option("--verb", an.verb, "Also grid the moments whose query contains this verb");
  analyze->add_option("--verbs-file", an.verbs_file, "External verb lists, one line per sample");
  analyze->add_option("--bandwidth", an.bandwidth, "scott, silverman or <hs>,<he>");

  SynthFlags sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic biased dataset");
  synth->add_option("--preset", sy.preset)->check(CLI::IsMember(preset_names()));
  synth->add_option("--seed", sy.seed, "Generator seed");
  synth->add_option("--out", sy.out, "Output directory or .jsonl file")->required();
  synth->add_option("--videos", sy.videos, "Override the preset's video count")->check(CLI::PositiveNumber);
  synth->add_option("--samples-per-video", sy.samples_per_video)->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  }

  try {
    kernels::set_active_isa(kernels::parse_isa(common.kernel));
    if (convert->parsed()) return cmd_convert(convert_flags, convert_out, common, out);
    if (resplit_cmd->parsed()) return cmd_resplit(rs, common, out);
    if (baseline->parsed()) return cmd_baseline(bl, common, out);
    if (eval->parsed()) return cmd_eval(ev, common, out);
    if (analyze->parsed()) return cmd_analyze(an, common, out);
    if (synth->parsed()) return cmd_synth(sy, common, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace tsgaudit::cli
