#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "fmb/analysis.hpp"
#include "fmb/capability_model.hpp"
#include "fmb/csv.hpp"
#include "fmb/design.hpp"
#include "fmb/error.hpp"
#include "fmb/noise.hpp"
#include "fmb/pipeline.hpp"

namespace fmb::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyDesign:
    case ErrorCode::UnsupportedDimension:
    case ErrorCode::NoEdges:
    case ErrorCode::BadBenchmarkDepth:
    case ErrorCode::DensityInfeasible:
    case ErrorCode::DegenerateCircuit:
    case ErrorCode::NotDefiniteOutcome: return kUsage;
    case ErrorCode::NumericalFailure:
    case ErrorCode::EpDivergence:
    case ErrorCode::EpNotConverged:
    case ErrorCode::DegenerateReference: return kNumerical;
    case ErrorCode::MissingData:
    case ErrorCode::IncompleteNoiseModel: return kMissingData;
  }
  return kFailure;
}

void write_output(const std::string& path, std::string_view text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  csv::write_file(path, text);
}

std::string default_manifest(const std::string& out) {
  const fs::path p(out);
  return (p.has_parent_path() ? p.parent_path() / "manifest.json" : fs::path("manifest.json")).string();
}

void record(const std::string& manifest, const std::string& out, const std::string& artifact, const std::string& path,
            const std::map<std::string, std::string>& meta) {
  update_manifest(manifest.empty() ? default_manifest(out) : manifest, artifact, path, meta);
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

double parse_number(std::string_view s, std::string_view what) {
  try {
    return csv::parse_double(s, what);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

int feature_index(const FeatureSpace& space, std::string_view name) {
  const auto idx = space.index_of(name);
  if (!idx) throw UsageError("unknown feature '" + std::string(name) + "'");
  return *idx;
}

/// "w=4,d=16,xi=0" or repeated "name=value" pieces into a full-length vector;
/// unnamed features stay NaN.
FeatureVector parse_assignments(const FeatureSpace& space, const std::vector<std::string>& pieces) {
  FeatureVector v(space.axes.size(), std::nan(""));
  for (const auto& piece : pieces)
    for (const auto& kv : split_on(piece, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("expected name=value, got '" + kv + "'");
      v[static_cast<std::size_t>(feature_index(space, kv.substr(0, eq)))] = parse_number(kv.substr(eq + 1), kv);
    }
  return v;
}

bool complete(const FeatureVector& v) {
  for (double x : v)
    if (std::isnan(x)) return false;
  return true;
}

CapabilityDataset load_dataset(const std::string& design_path, const std::string& results_path, int bootstrap) {
  const auto design = design_from_json(csv::read_file(design_path));
  const auto results = parse_results_csv(csv::read_file(results_path));
  return assemble_dataset(design, records_of(results), bootstrap);
}

// ---------------------------------------------------------------- design

struct DesignArgs {
  std::vector<std::string> axes;
  std::vector<std::string> values;
  std::string method = "grid";
  std::string preset;
  int m = 0;
  int k = 10;
  std::uint64_t seed = 1;
  double max_area = 0;
  std::string out, manifest;
};

int cmd_design(const DesignArgs& a, std::ostream& out) {
  DesignPlan plan;
  if (!a.preset.empty()) {
    if (!a.axes.empty()) throw UsageError("--preset and --axis are mutually exclusive");
    if (a.preset == "algiers")
      plan = algiers_preset(a.seed);
    else if (a.preset == "forte")
      plan = forte_preset(a.seed);
    else
      throw UsageError("unknown preset '" + a.preset + "' (algiers, forte)");
  } else {
    if (a.axes.empty()) throw UsageError("at least one --axis is required");
    FeatureSpace space;
    for (const auto& s : a.axes) {
      try {
        space.axes.push_back(parse_axis(s));
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    space.validate();
    if (a.method == "sobol") {
      if (a.m < 1) throw UsageError("--method sobol needs --m >= 1");
      plan = sobol_design(space, a.m, a.k, a.seed);
    } else if (a.method == "grid") {
      std::vector<std::optional<std::vector<double>>> given(space.axes.size());
      for (const auto& s : a.values) {
        const auto colon = s.find(':');
        if (colon == std::string::npos) throw UsageError("--values expects name:v1,v2,...");
        std::vector<double> vals;
        for (const auto& x : split_on(s.substr(colon + 1), ',')) vals.push_back(parse_number(x, s));
        given[static_cast<std::size_t>(feature_index(space, s.substr(0, colon)))] = std::move(vals);
      }
      std::vector<std::vector<double>> values;
      for (std::size_t d = 0; d < space.axes.size(); ++d)
        values.push_back(given[d] ? *given[d] : default_grid_values(space.axes[d]));
      Exclusion exclude;
      if (a.max_area > 0) {
        const int w = feature_index(space, "w"), dd = feature_index(space, "d");
        exclude = [w, dd, cap = a.max_area](const FeatureVector& v) {
          return v[static_cast<std::size_t>(w)] * v[static_cast<std::size_t>(dd)] > cap;
        };
      }
      plan = grid_design(space, values, exclude, a.k, a.seed);
    } else {
      throw UsageError("--method must be grid or sobol");
    }
  }
  write_output(a.out, design_to_json(plan));
  record(a.manifest, a.out, "design", a.out,
         {{"design_seed", std::to_string(plan.seed)}, {"design_vectors", std::to_string(plan.vectors.size())}});
  out << "wrote " << plan.vectors.size() << " feature vectors (K=" << plan.k << ") to " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string design, out, manifest;
  std::string backend = "noiseless";
  std::string calibration, convention = "direct", uniform_noise;
  std::string counts_in, counts_out, circuits_out, batch_in;
  std::string estimator = "success_prob";
  std::string family;
  std::string connectivity = "line";
  std::vector<int> qubits;
  std::uint64_t shots = 1024;
  int k = 0;
  std::optional<std::uint64_t> seed;
  int bootstrap = 1000;
  double default_xi = 0.25;
  bool strict = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  auto design = design_from_json(csv::read_file(a.design));
  if (a.k > 0) design.k = a.k;
  const auto estimator = [&] {
    try {
      return estimator_from_string(a.estimator);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }();

  std::optional<NoiseModel> noise;
  if (!a.calibration.empty()) {
    const auto conv = a.convention == "depolarizing" ? ErrorRateConvention::Depolarizing : ErrorRateConvention::Direct;
    if (a.convention != "direct" && a.convention != "depolarizing") throw UsageError("--convention is direct or depolarizing");
    noise = ingest_calibration(a.calibration, conv);
  }

  int max_w = 1;
  const auto w_idx = design.space.index_of("w");
  if (!w_idx) throw UsageError("design needs a 'w' axis");
  for (const auto& v : design.vectors) max_w = std::max(max_w, static_cast<int>(v[static_cast<std::size_t>(*w_idx)]));

  if (!a.uniform_noise.empty()) {
    if (noise) throw UsageError("--uniform-noise and --calibration are mutually exclusive");
    const auto parts = split_on(a.uniform_noise, ':');
    if (parts.size() != 3) throw UsageError("--uniform-noise expects e1:e2:readout");
    const double ro = parse_number(parts[2], "readout");
    std::vector<Qubit> q;
    for (int i = 0; i < max_w; ++i) q.push_back(i);
    noise = NoiseModel::uniform(q, parse_number(parts[0], "e1"), parse_number(parts[1], "e2"), {ro, ro});
  }

  CircuitBatch batch;
  if (!a.batch_in.empty()) {
    batch = batch_from_json(csv::read_file(a.batch_in));
  } else {
    SamplingConfig cfg;
    const std::string family = a.family.empty() ? (estimator == EstimatorKind::Srdfe ? "fixed_density" : "mirror") : a.family;
    try {
      cfg.family = circuit_family_from_string(family);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    cfg.default_xi = a.default_xi;
    if (noise && !a.calibration.empty()) {
      cfg.connectivity = noise->connectivity();
    } else if (a.connectivity == "line") {
      cfg.connectivity = ConnectivityGraph::line(max_w);
    } else if (a.connectivity == "all") {
      cfg.connectivity = ConnectivityGraph::all_to_all(max_w);
    } else {
      throw UsageError("--connectivity is line or all");
    }
    if (!a.qubits.empty()) cfg.qubits.explicit_qubits = std::vector<Qubit>(a.qubits.begin(), a.qubits.end());
    batch = sample_batch(design, estimator, cfg, a.seed.value_or(design.seed), a.design);
    if (!a.circuits_out.empty()) write_output(a.circuits_out, batch_to_json(batch));
  }

  std::unique_ptr<Backend> backend;
  if (a.backend == "noiseless") {
    backend = std::make_unique<NoiselessBackend>();
  } else if (a.backend == "noisy") {
    if (!noise) throw UsageError("--backend noisy needs --calibration or --uniform-noise");
    backend = std::make_unique<NoisyBackend>(*noise);
  } else if (a.backend == "replay") {
    if (a.counts_in.empty()) throw UsageError("--backend replay needs --counts");
    backend = std::make_unique<ReplayBackend>(parse_counts_csv(csv::read_file(a.counts_in)));
  } else {
    throw UsageError("--backend is noiseless, noisy or replay");
  }

  const auto run = execute_batch(batch, *backend, {a.shots, a.bootstrap});
  write_output(a.out, results_to_csv(run.results));
  if (!a.counts_out.empty()) write_output(a.counts_out, counts_to_csv(run.counts));

  const std::map<std::string, std::string> meta{{"seed", std::to_string(batch.seed)},
                                                {"backend", backend->id()},
                                                {"estimator", std::string(to_string(batch.estimator))},
                                                {"family", std::string(to_string(batch.family))},
                                                {"shots", std::to_string(a.shots)}};
  if (!a.circuits_out.empty()) record(a.manifest, a.out, "circuits", a.circuits_out, meta);
  if (!a.counts_out.empty()) record(a.manifest, a.out, "counts", a.counts_out, meta);
  record(a.manifest, a.out, "results", a.out, meta);

  out << "executed " << batch.entries.size() - static_cast<std::size_t>(run.errors) << " circuits on " << backend->id()
      << ", wrote " << a.out << "\n";
  if (run.errors > 0) {
    err << run.errors << " circuits have error entries (see the error column of " << a.out << ")\n";
    if (a.strict) return kMissingData;
  }
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string design, results, out, summary, trace, manifest;
  bool monotonic = false, reoptimize_ep = false, force = false;
  double train_frac = 1.0;
  int instances = 0;
  std::optional<std::uint64_t> seed;
  int restarts = 10;
  int virtual_points = 10;
  int ep_max_sweeps = EpConfig{}.max_sweeps;
  double ep_tolerance = EpConfig{}.tolerance;
  std::vector<int> signs;
  int bootstrap = 1000;
};

std::string trace_path(const FitArgs& a) {
  if (!a.trace.empty()) return a.trace;
  return (a.out.empty() ? a.summary : a.out) + ".ep_trace.json";
}

void write_trace(const std::string& path, const std::string& message, const EpSites* sites) {
  json doc = {{"error", message}};
  if (sites) doc.update({{"sweeps", sites->sweeps}, {"converged", sites->converged}, {"trace", sites->trace}});
  write_output(path, doc.dump(1) + "\n");
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  if (a.out.empty() && a.instances == 0) throw UsageError("fit needs --out, --instances, or both");
  if (a.instances > 0 && a.summary.empty() && a.out.empty()) throw UsageError("--instances needs --summary");
  if (!(a.train_frac > 0 && a.train_frac <= 1)) throw UsageError("--train-frac must lie in (0, 1]");
  const auto design = design_from_json(csv::read_file(a.design));
  const auto ds = load_dataset(a.design, a.results, a.bootstrap);
  const std::uint64_t seed = a.seed.value_or(design.seed);

  CapabilityModelConfig cfg;
  cfg.monotonic = a.monotonic;
  cfg.virtual_points_per_dim = a.virtual_points;
  cfg.signs = a.signs;
  cfg.reoptimize_ep = a.reoptimize_ep;
  cfg.optimizer.restarts = a.restarts;
  cfg.ep.max_sweeps = a.ep_max_sweeps;
  cfg.ep.tolerance = a.ep_tolerance;
  cfg.force_unconverged = a.force;
  if (!cfg.signs.empty() && cfg.signs.size() != ds.space.axes.size()) throw UsageError("--signs needs one entry per feature");

  const std::map<std::string, std::string> meta{{"fit_seed", std::to_string(seed)},
                                                {"model", a.monotonic ? "monotonic_gp" : "gp"}};
  try {
    if (a.instances > 0) {
      if (a.train_frac >= 1) throw UsageError("--instances needs --train-frac below 1");
      const auto ev = evaluate_splits(ds, a.train_frac, a.instances, seed, cfg);
      std::ostringstream csvs;
      csvs << "instance,delta_abs\n";
      for (std::size_t r = 0; r < ev.delta_abs.size(); ++r) csvs << r << "," << csv::format_double(ev.delta_abs[r]) << "\n";
      csvs << "mean," << csv::format_double(ev.mean) << "\nsd," << csv::format_double(ev.sd) << "\n";
      const std::string path = a.summary.empty() ? a.out + ".splits.csv" : a.summary;
      write_output(path, csvs.str());
      record(a.manifest, path, "split_summary", path, meta);
      out << a.instances << " instances at train fraction " << a.train_frac << ": delta_abs mean " << ev.mean << " sd "
          << ev.sd << "\n";
    }
    if (!a.out.empty()) {
      std::vector<FeatureVector> xtr, xte;
      std::vector<double> ytr, yte;
      std::vector<int> train, test;
      if (a.train_frac < 1) {
        const auto s = split(ds.vectors.size(), a.train_frac, derive_seed(seed, {kTagSplit, 0}));
        train = s.train;
        test = s.test;
      } else {
        for (std::size_t i = 0; i < ds.vectors.size(); ++i) train.push_back(static_cast<int>(i));
      }
      for (int i : train) {
        xtr.push_back(ds.vectors[static_cast<std::size_t>(i)].v);
        ytr.push_back(ds.vectors[static_cast<std::size_t>(i)].mean);
      }
      for (int i : test) {
        xte.push_back(ds.vectors[static_cast<std::size_t>(i)].v);
        yte.push_back(ds.vectors[static_cast<std::size_t>(i)].mean);
      }
      auto single = cfg;
      single.optimizer.seed = derive_seed(seed, {kTagOptimizer, 0});
      single.force_unconverged = true;
      const auto model = CapabilityModel::fit(ds.space, xtr, ytr, single);
      if (model.monotonic() && !model.monotonic_model()->converged() && !a.force) {
        const auto path = trace_path(a);
        write_trace(path, "EP did not converge", &model.monotonic_model()->sites());
        err << "EpNotConverged: EP did not converge after " << model.monotonic_model()->sites().sweeps
            << " sweeps; trace written to " << path << " (rerun with --force to keep the model)\n";
        return kNumerical;
      }
      write_output(a.out, model.to_json());
      record(a.manifest, a.out, "model", a.out, meta);
      out << "fit " << (a.monotonic ? "monotonic GP" : "GP") << " on " << xtr.size() << " vectors, wrote " << a.out << "\n";
      if (!xte.empty()) {
        const auto pred = model.predict(xte);
        std::vector<double> p(pred.mean.data(), pred.mean.data() + pred.mean.size());
        for (auto& v : p) v = std::clamp(v, 0.0, 1.0);
        out << "held-out delta_abs " << delta_abs(p, yte) << " on " << xte.size() << " vectors\n";
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EpNotConverged || e.code() == ErrorCode::EpDivergence) {
      const auto path = trace_path(a);
      write_trace(path, e.what(), nullptr);
      err << e.what() << "\ntrace written to " << path << "\n";
      return kNumerical;
    }
    throw;
  }
  return kOk;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model, out, vectors, manifest;
  std::vector<std::string> at, grid, fix;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = CapabilityModel::from_json(csv::read_file(a.model));
  const auto& space = model.space();
  const int modes = (!a.at.empty()) + (!a.vectors.empty()) + (!a.grid.empty());
  if (modes != 1) throw UsageError("predict needs exactly one of --at, --vectors, --grid");
  if (!a.grid.empty()) {
    if (a.grid.size() != 2) throw UsageError("--grid takes two axis specs");
    GridAxis rows, cols;
    try {
      rows = parse_grid_axis(space, a.grid[0]);
      cols = parse_grid_axis(space, a.grid[1]);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    auto fixed = parse_assignments(space, a.fix);
    fixed[static_cast<std::size_t>(rows.feature)] = space.axes[static_cast<std::size_t>(rows.feature)].min;
    fixed[static_cast<std::size_t>(cols.feature)] = space.axes[static_cast<std::size_t>(cols.feature)].min;
    if (!complete(fixed)) throw UsageError("--fix must set every feature not on the grid");
    const auto h = continuous_volumetric_grid(model, rows, cols, fixed);
    write_output(a.out, heatmap_csv(h, space));
    out << "wrote " << h.values.rows() << "x" << h.values.cols() << " prediction grid to " << a.out << "\n";
  } else {
    std::vector<FeatureVector> xs;
    if (!a.vectors.empty()) {
      xs = design_from_json(csv::read_file(a.vectors)).vectors;
    } else {
      for (const auto& s : a.at) {
        auto v = parse_assignments(space, {s});
        if (!complete(v)) throw UsageError("--at '" + s + "' must set every feature");
        xs.push_back(std::move(v));
      }
    }
    const auto p = model.predict(xs);
    std::vector<std::string> header;
    for (const auto& ax : space.axes) header.push_back(ax.name);
    for (const char* h : {"mean", "sd", "clamped"}) header.emplace_back(h);
    std::string text = csv::join(header) + "\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::vector<std::string> row;
      for (double x : xs[i]) row.push_back(csv::format_double(x));
      const auto idx = static_cast<Eigen::Index>(i);
      row.push_back(csv::format_double(p.mean(idx)));
      row.push_back(csv::format_double(std::sqrt(p.variance(idx))));
      row.push_back(csv::format_double(std::clamp(p.mean(idx), 0.0, 1.0)));
      text += csv::join(row) + "\n";
    }
    write_output(a.out, text);
    out << "wrote " << xs.size() << " predictions to " << a.out << "\n";
  }
  record(a.manifest, a.out, "prediction", a.out, {{"model_path", a.model}});
  return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::string design, results, model, out, manifest;
  std::string metric = "delta-v";
  std::vector<std::string> project, fix;
  std::string rows = "w", cols = "d";
  int bootstrap = 1000;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto ds = load_dataset(a.design, a.results, a.bootstrap);
  std::string text;
  if (a.metric == "delta-v") {
    std::vector<int> all(ds.space.axes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    std::vector<MonotonicityReport> reports{delta_v(ds, all)};
    std::vector<std::string> names = a.project;
    if (names.size() == 1 && names[0] == "all") {
      names.clear();
      for (const auto& ax : ds.space.axes) names.push_back(ax.name);
    }
    for (const auto& name : names) {
      const int drop = feature_index(ds.space, name);
      std::vector<int> keep;
      for (int f : all)
        if (f != drop) keep.push_back(f);
      if (keep.empty()) throw UsageError("cannot project away the only feature");
      reports.push_back(delta_v(ds, keep));
    }
    text = monotonicity_csv(ds, reports);
    for (const auto& r : reports) {
      out << (r.features.size() == all.size() ? "full" : "projection") << ": " << r.entries.size()
          << " vectors with comparators, " << r.without_comparator << " without\n";
    }
  } else if (a.metric == "volumetric") {
    const int r = feature_index(ds.space, a.rows), c = feature_index(ds.space, a.cols);
    if (r == c) throw UsageError("--rows and --cols must differ");
    const auto h = volumetric_heatmap(ds, r, c, parse_assignments(ds.space, a.fix));
    text = heatmap_csv(h, ds.space);
  } else if (a.metric == "dataset") {
    text = dataset_csv(ds);
  } else if (a.metric == "delta-abs") {
    if (a.model.empty()) throw UsageError("--metric delta-abs needs --model");
    const auto model = CapabilityModel::from_json(csv::read_file(a.model));
    const auto xs = ds.inputs();
    const auto ys = ds.means();
    const auto p = model.predict(xs);
    std::vector<std::string> header{"i"};
    for (const auto& ax : ds.space.axes) header.push_back(ax.name);
    for (const char* h : {"observed", "predicted", "abs_error"}) header.emplace_back(h);
    text = csv::join(header) + "\n";
    std::vector<double> clamped;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double pc = std::clamp(p.mean(static_cast<Eigen::Index>(i)), 0.0, 1.0);
      clamped.push_back(pc);
      std::vector<std::string> row{std::to_string(i)};
      for (double x : xs[i]) row.push_back(csv::format_double(x));
      row.push_back(csv::format_double(ys[i]));
      row.push_back(csv::format_double(pc));
      row.push_back(csv::format_double(std::abs(pc - ys[i])));
      text += csv::join(row) + "\n";
    }
    out << "delta_abs " << delta_abs(clamped, ys) << " over " << xs.size() << " vectors\n";
  } else {
    throw UsageError("--metric is delta-v, volumetric, dataset or delta-abs");
  }
  write_output(a.out, text);
  record(a.manifest, a.out, "report_" + a.metric, a.out, {});
  out << "wrote " << a.metric << " report to " << a.out << "\n";
  return kOk;
}

void apply_thread_setting(int threads) {
  if (threads > 0) {
    omp_set_num_threads(threads);
    return;
  }
  if (const char* env = std::getenv("FMB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) omp_set_num_threads(static_cast<int>(n));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-based capability benchmarking: design, run, fit, predict, report."};
  app.name(args.empty() ? "fmb" : args[0]);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (default: FMB_THREADS, then the OpenMP default)");

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Write a feature-vector design file");
  design->add_option("--axis", da.axes, "Feature axis name:scale:type:min:max (scale log2|linear, type int|real)");
  design->add_option("--method", da.method, "grid or sobol")->capture_default_str();
  design->add_option("--values", da.values, "Grid values for one axis, name:v1,v2,... (int axes default to all values)");
  design->add_option("--m", da.m, "Number of Sobol vectors");
  design->add_option("--k", da.k, "Circuits per feature vector")->capture_default_str();
  design->add_option("--seed", da.seed, "Master seed stored in the design")->capture_default_str();
  design->add_option("--max-area", da.max_area, "Grid only: drop vectors with w*d above this");
  design->add_option("--preset", da.preset, "algiers (531-vector grid) or forte (256-vector Sobol)");
  design->add_option("--out", da.out, "Design JSON path")->required();
  design->add_option("--manifest", da.manifest, "Manifest path (default: manifest.json beside --out)");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Sample circuits, execute them and write per-circuit estimates");
  run->add_option("--design", ra.design, "Design JSON")->required();
  run->add_option("--out", ra.out, "Results CSV path")->required();
  run->add_option("--backend", ra.backend, "noiseless, noisy or replay")->capture_default_str();
  run->add_option("--calibration", ra.calibration, "Device calibration CSV (noise model and connectivity)");
  run->add_option("--convention", ra.convention, "Gate error convention: direct or depolarizing")->capture_default_str();
  run->add_option("--uniform-noise", ra.uniform_noise, "Uniform noise e1:e2:readout on qubits 0..max(w)-1");
  run->add_option("--counts", ra.counts_in, "Counts CSV for the replay backend");
  run->add_option("--counts-out", ra.counts_out, "Write the observed counts here");
  run->add_option("--circuits", ra.circuits_out, "Write the sampled circuit batch here");
  run->add_option("--batch", ra.batch_in, "Execute an existing circuit batch instead of sampling");
  run->add_option("--estimator", ra.estimator, "success_prob or srdfe")->capture_default_str();
  run->add_option("--family", ra.family, "mirror or fixed_density (default: mirror for success_prob, fixed_density for srdfe)");
  run->add_option("--connectivity", ra.connectivity, "line or all, when no calibration is given")->capture_default_str();
  run->add_option("--qubits", ra.qubits, "Explicit physical qubits to sample on");
  run->add_option("--shots", ra.shots, "Shots per circuit")->capture_default_str();
  run->add_option("--k", ra.k, "Override the design's circuits per vector");
  run->add_option("--seed", ra.seed, "Master seed (default: the design seed)");
  run->add_option("--bootstrap", ra.bootstrap, "Bootstrap resamples for SR-DFE standard errors")->capture_default_str();
  run->add_option("--default-xi", ra.default_xi, "Two-qubit density when the design has no xi axis")->capture_default_str();
  run->add_flag("--strict", ra.strict, "Exit 4 when any circuit has an error entry");
  run->add_option("--manifest", ra.manifest, "Manifest path (default: manifest.json beside --out)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a capability model or evaluate random train/test splits");
  fit->add_option("--design", fa.design, "Design JSON")->required();
  fit->add_option("--results", fa.results, "Results CSV")->required();
  fit->add_option("--out", fa.out, "Model JSON path");
  fit->add_flag("--monotonic", fa.monotonic, "Monotonic GP with virtual derivative points");
  fit->add_option("--train-frac", fa.train_frac, "Training fraction of the feature vectors")->capture_default_str();
  fit->add_option("--instances", fa.instances, "Number of random split instances to evaluate");
  fit->add_option("--summary", fa.summary, "Split summary CSV path (default: <out>.splits.csv)");
  fit->add_option("--seed", fa.seed, "Split and optimizer seed (default: the design seed)");
  fit->add_option("--restarts", fa.restarts, "Hyperparameter optimizer restarts")->capture_default_str();
  fit->add_option("--virtual-points", fa.virtual_points, "Virtual points per feature")->capture_default_str();
  fit->add_option("--signs", fa.signs, "Derivative sign per feature: -1, 1 or 0 (default -1)");
  fit->add_option("--ep-max-sweeps", fa.ep_max_sweeps, "EP sweep limit")->capture_default_str();
  fit->add_option("--ep-tolerance", fa.ep_tolerance, "EP convergence tolerance")->capture_default_str();
  fit->add_flag("--reoptimize-ep", fa.reoptimize_ep, "Choose hyperparameters by the EP evidence");
  fit->add_flag("--force", fa.force, "Keep a model whose EP did not converge");
  fit->add_option("--trace", fa.trace, "EP trace path on failure (default: <out>.ep_trace.json)");
  fit->add_option("--bootstrap", fa.bootstrap, "Bootstrap resamples for vector standard errors")->capture_default_str();
  fit->add_option("--manifest", fa.manifest, "Manifest path (default: manifest.json beside --out)");

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Evaluate a model at vectors or on a grid");
  predict->add_option("--model", pa.model, "Model JSON")->required();
  predict->add_option("--out", pa.out, "Output CSV")->required();
  predict->add_option("--at", pa.at, "Feature vector name=value,... (repeatable)");
  predict->add_option("--vectors", pa.vectors, "Predict at every vector of a design file");
  predict->add_option("--grid", pa.grid, "Two grid axes, each name:min:max:points")->expected(2);
  predict->add_option("--fix", pa.fix, "Values of the features not on the grid, name=value");
  predict->add_option("--manifest", pa.manifest, "Manifest path (default: manifest.json beside --out)");

  ReportArgs rpa;
  auto* report = app.add_subcommand("report", "Monotonicity, volumetric, dataset and error reports");
  report->add_option("--design", rpa.design, "Design JSON")->required();
  report->add_option("--results", rpa.results, "Results CSV")->required();
  report->add_option("--out", rpa.out, "Output CSV")->required();
  report->add_option("--metric", rpa.metric, "delta-v, volumetric, dataset or delta-abs")->capture_default_str();
  report->add_option("--project", rpa.project, "delta-v: also report with this feature dropped (or 'all')");
  report->add_option("--rows", rpa.rows, "volumetric: row feature")->capture_default_str();
  report->add_option("--cols", rpa.cols, "volumetric: column feature")->capture_default_str();
  report->add_option("--fix", rpa.fix, "volumetric: keep vectors with these values, name=value");
  report->add_option("--model", rpa.model, "delta-abs: model JSON");
  report->add_option("--bootstrap", rpa.bootstrap, "Bootstrap resamples for vector standard errors")->capture_default_str();
  report->add_option("--manifest", rpa.manifest, "Manifest path (default: manifest.json beside --out)");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    apply_thread_setting(threads);
    if (*design) return cmd_design(da, out);
    if (*run) return cmd_run(ra, out, err);
    if (*fit) return cmd_fit(fa, out, err);
    if (*predict) return cmd_predict(pa, out);
    if (*report) return cmd_report(rpa, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace fmb::cli
