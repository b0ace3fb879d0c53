#include "tsgdiff/config.hpp"

#include <charconv>
#include <fstream>

namespace tsgdiff {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    fail(Errc::ParseError, "config key '" + key + "' has invalid value '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(Errc::ParseError, "config key '" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace

std::size_t RunConfig::resolved_hidden() const {
  if (hidden_dim != 0) return hidden_dim;
  return profile == "paper" ? 1600 : 64;
}

std::size_t RunConfig::resolved_latent() const {
  if (latent_dim != 0) return latent_dim;
  return profile == "paper" ? 1600 : 32;
}

ModelConfig RunConfig::model_config(std::size_t features) const {
  ModelConfig mc;
  mc.window_size = window_size;
  mc.features = features;
  mc.hidden_dim = resolved_hidden();
  mc.latent_dim = resolved_latent();
  mc.diffusion_steps = diffusion_steps;
  mc.beta_start = beta_start;
  mc.beta_end = beta_end;
  return mc;
}

void RunConfig::validate() const {
  require(profile == "desk" || profile == "paper", Errc::InvalidRange,
          "profile must be 'desk' or 'paper'");
  require(window_size >= 4, Errc::InvalidRange, "window_size must be >= 4");
  require(stride >= 1, Errc::InvalidRange, "stride must be positive");
  require(diffusion_steps >= 1, Errc::InvalidRange, "diffusion_steps must be positive");
  require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0, Errc::InvalidRange,
          "beta range must satisfy 0 < start <= end < 1");
  require(epochs >= 1, Errc::InvalidRange, "epochs must be positive");
  require(batch_size >= 2, Errc::InvalidRange, "batch_size must be >= 2");
  require(lr > 0.0, Errc::InvalidRange, "lr must be positive");
  require(beta >= 0.0 && gamma >= 0.0 && delta >= 0.0, Errc::InvalidRange,
          "loss weights must be nonnegative");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingFile, "cannot open config " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(Errc::ParseError, "config line " + std::to_string(line_no) + " is not key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "dataset_path") cfg.dataset_path = value;
    else if (key == "window_size") cfg.window_size = parse_number<std::size_t>(key, value);
    else if (key == "stride") cfg.stride = parse_number<std::size_t>(key, value);
    else if (key == "hidden_dim") cfg.hidden_dim = parse_number<std::size_t>(key, value);
    else if (key == "latent_dim") cfg.latent_dim = parse_number<std::size_t>(key, value);
    else if (key == "diffusion_steps") cfg.diffusion_steps = parse_number<std::size_t>(key, value);
    else if (key == "beta_start") cfg.beta_start = parse_number<double>(key, value);
    else if (key == "beta_end") cfg.beta_end = parse_number<double>(key, value);
    else if (key == "beta") cfg.beta = parse_number<double>(key, value);
    else if (key == "gamma") cfg.gamma = parse_number<double>(key, value);
    else if (key == "delta") cfg.delta = parse_number<double>(key, value);
    else if (key == "epochs") cfg.epochs = parse_number<std::size_t>(key, value);
    else if (key == "batch_size") cfg.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "lr") cfg.lr = parse_number<double>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "no_kl") cfg.no_kl = parse_bool(key, value);
    else if (key == "no_denoising") cfg.no_denoising = parse_bool(key, value);
    else if (key == "no_fourier") cfg.no_fourier = parse_bool(key, value);
    else if (key == "profile") cfg.profile = value;
    else fail(Errc::ParseError, "unknown config key '" + key + "'");
  }
}

}  // namespace tsgdiff
