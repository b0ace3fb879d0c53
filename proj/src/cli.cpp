#include "tsgdiff/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsgdiff/config.hpp"
#include "tsgdiff/data.hpp"
#include "tsgdiff/metrics.hpp"
#include "tsgdiff/plots.hpp"
#include "tsgdiff/spectral.hpp"
#include "tsgdiff/train.hpp"
#include "tsgdiff/weights.hpp"

namespace tsgdiff {

namespace {

namespace fs = std::filesystem;

void write_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot write " + path);
  out << text;
  if (!out) fail(Errc::IoError, "short write to " + path);
}

struct Dataset {
  NormalizationParams norm;
  std::vector<std::string> feature_names;
  WindowBatch batch;
  std::vector<TemporalGraph> graphs;
};

std::vector<TemporalGraph> graphs_for(const WindowBatch& batch) {
  std::vector<TemporalGraph> graphs;
  graphs.reserve(batch.count());
  for (std::size_t m = 0; m < batch.count(); ++m) graphs.push_back(window_to_graph(batch.window(m)));
  return graphs;
}

Dataset prepare_real(const std::string& path, std::size_t w, std::size_t stride) {
  TimeSeriesTable table = load_csv(path);
  Dataset ds;
  ds.norm = fit_normalizer(table);
  ds.feature_names = table.feature_names;
  ds.batch = slide_windows(normalize(table, ds.norm), w, stride);
  ds.graphs = graphs_for(ds.batch);
  return ds;
}

bool is_sample_format(const std::vector<std::string>& header) {
  return header.size() > 2 && header[0] == "window_id" && header[1] == "t";
}

// A synthetic dataset is either a plain series (windowed like the real one)
// or a samples file written by `sample`, whose window_id column already
// delimits the windows. Either way it is normalized with the real fit.
WindowBatch prepare_synth(const std::string& path, std::size_t w, std::size_t stride,
                          const NormalizationParams& norm) {
  TimeSeriesTable table = load_csv(path);
  if (!is_sample_format(table.feature_names)) {
    return slide_windows(normalize_matrix(table.values, norm), w, stride);
  }

  const std::size_t d = table.features() - 2;
  require(d == norm.features(), Errc::DimensionMismatch,
          "sample file feature count does not match the real dataset");
  std::map<long long, std::vector<std::size_t>> rows_by_window;
  for (std::size_t i = 0; i < table.length(); ++i)
    rows_by_window[static_cast<long long>(table.values.at(i, 0))].push_back(i);

  WindowBatch batch;
  batch.stride = stride;
  batch.norm = norm;
  batch.windows = Tensor({rows_by_window.size(), w, d});
  std::size_t m = 0;
  for (const auto& [id, rows] : rows_by_window) {
    require(rows.size() == w, Errc::DimensionMismatch,
            "window " + std::to_string(id) + " has " + std::to_string(rows.size()) +
                " rows, expected " + std::to_string(w));
    Tensor win({w, d});
    for (std::size_t t = 0; t < w; ++t)
      for (std::size_t j = 0; j < d; ++j) win.at(t, j) = table.values.at(rows[t], j + 2);
    win = normalize_matrix(win, norm);
    std::copy(win.data.begin(), win.data.end(), batch.windows.data.begin() + m * w * d);
    batch.origin_indices.push_back(m);
    ++m;
  }
  return batch;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// ---- build-graphs ----------------------------------------------------------

int cmd_build_graphs(const RunConfig& cfg, bool export_edges, bool export_spectra) {
  Dataset ds = prepare_real(cfg.dataset_path, cfg.window_size, cfg.stride);

  std::ostringstream summary;
  summary << "window,periods,edge_count\n";
  for (std::size_t m = 0; m < ds.graphs.size(); ++m) {
    const TemporalGraph& g = ds.graphs[m];
    summary << m << ',';
    for (std::size_t i = 0; i < g.periods.size(); ++i)
      summary << (i ? ";" : "") << g.periods.periods[i];
    summary << ',' << g.edge_count() << '\n';
  }
  write_file(join_path(cfg.out_dir, "graph_summary.csv"), summary.str());

  if (export_edges)
    for (std::size_t m = 0; m < ds.graphs.size(); ++m)
      write_file(join_path(cfg.out_dir, "window_" + std::to_string(m) + ".edges"),
                 adjacency_edge_list(ds.graphs[m].adjacency));
  if (export_spectra)
    for (std::size_t m = 0; m < ds.batch.count(); ++m)
      write_file(join_path(cfg.out_dir, "window_" + std::to_string(m) + "_spectrum.csv"),
                 spectrum_csv(pool_spectra(ds.batch.window(m))));

  std::cout << "built " << ds.graphs.size() << " graphs -> "
            << join_path(cfg.out_dir, "graph_summary.csv") << "\n";
  return 0;
}

// ---- train -----------------------------------------------------------------

int cmd_train(const RunConfig& cfg) {
  Dataset ds = prepare_real(cfg.dataset_path, cfg.window_size, cfg.stride);

  Rng rng(cfg.seed);
  Rng init_rng = rng.child(1);
  Rng train_rng = rng.child(2);

  ModelState model(cfg.model_config(ds.batch.features()), init_rng);
  model.norm = ds.norm;
  model.feature_names = ds.feature_names;

  TrainOptions opt;
  opt.epochs = cfg.epochs;
  opt.batch_size = cfg.batch_size;
  opt.lr = cfg.lr;
  opt.beta = cfg.beta;
  opt.gamma = cfg.gamma;
  opt.delta = cfg.delta;
  opt.no_kl = cfg.no_kl;
  opt.no_denoising = cfg.no_denoising;
  opt.no_fourier = cfg.no_fourier;

  TrainLog log = train(model, ds.batch, ds.graphs, opt, train_rng);

  write_file(join_path(cfg.out_dir, "training_log.csv"), log.to_csv());
  fs::create_directories(cfg.out_dir);
  save_weights(model, join_path(cfg.out_dir, "weights.tsgd"));

  const TrainLog::Epoch& last = log.epochs.back();
  std::cout << "trained " << cfg.epochs << " epochs; final total loss " << last.total << " -> "
            << join_path(cfg.out_dir, "weights.tsgd") << "\n";
  return 0;
}

// ---- sample ----------------------------------------------------------------

int cmd_sample(const RunConfig& cfg, const std::string& weights_path, std::size_t n,
               bool deterministic, bool arch_flags_given) {
  ModelState model = load_weights(weights_path);

  if (arch_flags_given) {
    const ModelConfig requested = cfg.model_config(model.cfg.features);
    if (requested.digest() != model.cfg.digest())
      fail(Errc::DigestMismatch, "weights were trained with '" + model.cfg.canonical() +
                                     "' but the flags request '" + requested.canonical() + "'");
  }

  Rng rng = Rng(cfg.seed).child(3);
  const Tensor latents = sample_latents(model.denoiser, model.schedule, n, model.cfg.latent_dim,
                                        rng, deterministic);

  std::ostringstream out;
  out.precision(17);
  out << "window_id,t";
  for (const std::string& name : model.feature_names) out << ',' << name;
  out << '\n';
  const std::size_t w = model.cfg.window_size, d = model.cfg.features;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor z({1, model.cfg.latent_dim});
    std::copy(latents.data.begin() + i * model.cfg.latent_dim,
              latents.data.begin() + (i + 1) * model.cfg.latent_dim, z.data.begin());
    Tensor flat = decode_eval(model.decoder, z);
    Tensor window({w, d});
    window.data = std::move(flat.data);
    window = denormalize(window, model.norm);
    for (std::size_t t = 0; t < w; ++t) {
      out << i << ',' << t;
      for (std::size_t j = 0; j < d; ++j) out << ',' << window.at(t, j);
      out << '\n';
    }
  }
  write_file(join_path(cfg.out_dir, "samples.csv"), out.str());
  std::cout << "wrote " << n << " windows -> " << join_path(cfg.out_dir, "samples.csv") << "\n";
  return 0;
}

// ---- evaluate --------------------------------------------------------------

int cmd_evaluate(const RunConfig& cfg, const std::string& real_path, const std::string& synth_path,
                 std::size_t pairs, double alpha, bool identity_pairing) {
  Dataset real = prepare_real(real_path, cfg.window_size, cfg.stride);
  WindowBatch synth = prepare_synth(synth_path, cfg.window_size, cfg.stride, real.norm);
  std::vector<TemporalGraph> synth_graphs = graphs_for(synth);

  constexpr std::size_t kRepeats = 5;
  std::vector<MetricReport> runs;
  std::size_t corr_warnings = 0;
  const double correlational =
      correlational_score(real.batch.windows, synth.windows, &corr_warnings);
  if (corr_warnings > 0)
    std::cerr << "warning: " << corr_warnings
              << " zero-variance feature(s) treated as uncorrelated\n";

  for (std::size_t r = 0; r < kRepeats; ++r) {
    Rng run_rng = Rng(cfg.seed).child(100 + r);
    MetricReport rep;
    rep.seed = run_rng.base_seed();
    const TopoFidResult topo =
        topo_fid(real.graphs, synth_graphs, alpha, pairs, run_rng, identity_pairing);
    rep.topo_fid = topo.topo_fid;
    rep.s_edit_mean = topo.s_edit_mean;
    rep.s_entropy_mean = topo.s_entropy_mean;
    rep.pair_count = topo.pair_count;
    rep.correlational = correlational;
    rep.discriminative = discriminative_score(real.batch.windows, synth.windows, run_rng);
    rep.predictive = predictive_score(real.batch.windows, synth.windows, run_rng);
    runs.push_back(rep);
  }

  nlohmann::json j;
  j["alpha"] = alpha;
  j["pairs"] = pairs;
  j["identity_pairing"] = identity_pairing;
  j["runs"] = nlohmann::json::array();
  for (const MetricReport& rep : runs) j["runs"].push_back(nlohmann::json::parse(rep.to_json()));

  const char* keys[] = {"topo_fid", "s_edit_mean", "s_entropy_mean",
                        "correlational", "discriminative", "predictive"};
  auto field = [](const MetricReport& rep, const std::string& key) {
    if (key == "topo_fid") return rep.topo_fid;
    if (key == "s_edit_mean") return rep.s_edit_mean;
    if (key == "s_entropy_mean") return rep.s_entropy_mean;
    if (key == "correlational") return rep.correlational;
    if (key == "discriminative") return rep.discriminative;
    return rep.predictive;
  };
  for (const char* key : keys) {
    double lo = field(runs[0], key), hi = lo, sum = 0.0;
    for (const MetricReport& rep : runs) {
      const double v = field(rep, key);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    j["mean"][key] = sum / static_cast<double>(runs.size());
    j["min"][key] = lo;
    j["max"][key] = hi;
  }

  write_file(join_path(cfg.out_dir, "metrics.json"), j.dump(2) + "\n");
  export_plot_data(real.batch.windows, synth.windows, cfg.out_dir);

  std::cout << "topo_fid " << j["mean"]["topo_fid"].get<double>() << ", discriminative "
            << j["mean"]["discriminative"].get<double>() << ", predictive "
            << j["mean"]["predictive"].get<double>() << " -> "
            << join_path(cfg.out_dir, "metrics.json") << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  RunConfig cfg;

  // The config file is applied before flag parsing so that flags win.
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      try {
        apply_config_file(cfg, args[i + 1]);
      } catch (const Error& e) {
        std::cerr << "error[" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
      }
    } else if (args[i].rfind("--config=", 0) == 0) {
      try {
        apply_config_file(cfg, args[i].substr(9));
      } catch (const Error& e) {
        std::cerr << "error[" << errc_name(e.code()) << "]: " << e.what() << "\n";
        return 1;
      }
    }
  }

  CLI::App app{"graph-latent diffusion for time series: graphs, training, sampling, evaluation"};
  app.require_subcommand(1);
  std::string config_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--seed", cfg.seed, "base seed");
    sub->add_option("--profile", cfg.profile, "'desk' or 'paper'");
    sub->add_option("--out-dir", cfg.out_dir, "output directory");
    sub->add_option("--dataset-path", cfg.dataset_path, "input CSV");
    sub->add_option("--window-size", cfg.window_size, "sliding window length");
    sub->add_option("--stride", cfg.stride, "sliding window stride");
    sub->add_option("--hidden-dim", cfg.hidden_dim, "encoder width (0 = profile)");
    sub->add_option("--latent-dim", cfg.latent_dim, "latent width (0 = profile)");
    sub->add_option("--diffusion-steps", cfg.diffusion_steps, "diffusion steps K");
    sub->add_option("--beta-start", cfg.beta_start, "first beta of the schedule");
    sub->add_option("--beta-end", cfg.beta_end, "last beta of the schedule");
  };

  CLI::App* build = app.add_subcommand("build-graphs", "window a dataset and emit its graphs");
  add_common(build);
  bool export_edges = false, export_spectra = false;
  build->add_flag("--export-edges", export_edges, "write one edge list per window");
  build->add_flag("--export-spectra", export_spectra, "write one pooled spectrum per window");

  CLI::App* tr = app.add_subcommand("train", "train on a dataset and save weights");
  add_common(tr);
  tr->add_option("--epochs", cfg.epochs, "training epochs");
  tr->add_option("--batch-size", cfg.batch_size, "minibatch size");
  tr->add_option("--lr", cfg.lr, "learning rate");
  tr->add_option("--beta", cfg.beta, "KL weight");
  tr->add_option("--gamma", cfg.gamma, "denoising weight");
  tr->add_option("--delta", cfg.delta, "Fourier weight");
  tr->add_flag("--no-kl", cfg.no_kl, "drop the KL term");
  tr->add_flag("--no-denoising", cfg.no_denoising, "drop the denoising term");
  tr->add_flag("--no-fourier", cfg.no_fourier, "drop the Fourier term");

  CLI::App* sa = app.add_subcommand("sample", "decode windows from a trained model");
  add_common(sa);
  std::string weights_path;
  std::size_t n_samples = 16;
  bool deterministic = false;
  sa->add_option("--weights", weights_path, "weights file")->required();
  sa->add_option("--n", n_samples, "number of windows");
  sa->add_flag("--deterministic", deterministic, "noise-free reverse chain");

  CLI::App* ev = app.add_subcommand("evaluate", "score synthetic data against real data");
  add_common(ev);
  std::string real_path, synth_path;
  std::size_t pairs = 1000;
  double alpha = 0.5;
  bool identity_pairing = false;
  ev->add_option("--real", real_path, "real dataset CSV")->required();
  ev->add_option("--synth", synth_path, "synthetic dataset or samples CSV")->required();
  ev->add_option("--pairs", pairs, "sampled graph pairs per run");
  ev->add_option("--alpha", alpha, "edit/entropy mixing weight");
  ev->add_flag("--identity-pairing", identity_pairing, "pair index i with index i");

  std::vector<std::string> argv_copy(args);
  try {
    std::vector<const char*> argv;
    argv.push_back("tsgdiff");
    for (const std::string& a : argv_copy) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cfg.validate();
    if (build->parsed()) {
      require(!cfg.dataset_path.empty(), Errc::MissingFile, "no dataset given (--dataset-path)");
      return cmd_build_graphs(cfg, export_edges, export_spectra);
    }
    if (tr->parsed()) {
      require(!cfg.dataset_path.empty(), Errc::MissingFile, "no dataset given (--dataset-path)");
      return cmd_train(cfg);
    }
    if (sa->parsed()) {
      const bool arch_given =
          sa->count("--window-size") || sa->count("--hidden-dim") || sa->count("--latent-dim") ||
          sa->count("--diffusion-steps") || sa->count("--beta-start") || sa->count("--beta-end") ||
          sa->count("--profile");
      return cmd_sample(cfg, weights_path, n_samples, deterministic, arch_given);
    }
    if (ev->parsed()) return cmd_evaluate(cfg, real_path, synth_path, pairs, alpha, identity_pairing);
  } catch (const Error& e) {
    std::cerr << "error[" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return e.code() == Errc::NonFiniteLoss ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error[Internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tsgdiff
