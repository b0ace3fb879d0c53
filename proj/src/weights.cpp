#include "tsgdiff/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace tsgdiff {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'G', 'D'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kLittleEndian = 0x01;

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    buf_.append(s);
  }
  void raw(const char* p, std::size_t n) { buf_.append(p, n); }

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string bytes) : buf_(std::move(bytes)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf_[pos_++]);
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::uint64_t n) {
    if (pos_ + n > buf_.size()) fail(Errc::CorruptWeights, "truncated weights file");
  }
  std::string buf_;
  std::size_t pos_ = 0;
};

enum class RecordKind : std::uint8_t { Tensor = 0, Counter = 1 };

}  // namespace

void save_weights(ModelState& model, const std::string& path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u8(kVersion);
  w.u8(kLittleEndian);
  w.u64(model.cfg.digest());
  w.u64(model.cfg.window_size);
  w.u64(model.cfg.features);
  w.u64(model.cfg.hidden_dim);
  w.u64(model.cfg.latent_dim);
  w.u64(model.cfg.diffusion_steps);
  w.u64(model.cfg.time_embed_dim);
  w.f64(model.cfg.beta_start);
  w.f64(model.cfg.beta_end);

  w.u64(model.feature_names.size());
  for (const std::string& name : model.feature_names) w.str(name);

  std::size_t records = 0;
  ModelState::Visitor counter{[&records](const std::string&, Tensor&) { ++records; },
                              [&records](const std::string&, std::int64_t&) { ++records; }};
  model.visit_state(counter);
  w.u64(records);

  ModelState::Visitor writer{
      [&w](const std::string& name, Tensor& t) {
        w.u8(static_cast<std::uint8_t>(RecordKind::Tensor));
        w.str(name);
        w.u64(t.shape.size());
        for (std::size_t d : t.shape) w.u64(d);
        for (double v : t.data) w.f64(v);
      },
      [&w](const std::string& name, std::int64_t& c) {
        w.u8(static_cast<std::uint8_t>(RecordKind::Counter));
        w.str(name);
        w.i64(c);
      }};
  model.visit_state(writer);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot write " + path);
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) fail(Errc::IoError, "short write to " + path);
}

ModelState load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingFile, "cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));

  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0)
    fail(Errc::CorruptWeights,
         std::string("bad magic '") + std::string(magic, 4) + "', expected 'TSGD'");
  const std::uint8_t version = r.u8();
  if (version != kVersion)
    fail(Errc::CorruptWeights, "unsupported version " + std::to_string(version));
  const std::uint8_t endian = r.u8();
  if (endian != kLittleEndian)
    fail(Errc::CorruptWeights, "unsupported endianness marker " + std::to_string(endian));

  const std::uint64_t stored_digest = r.u64();
  ModelConfig cfg;
  cfg.window_size = r.u64();
  cfg.features = r.u64();
  cfg.hidden_dim = r.u64();
  cfg.latent_dim = r.u64();
  cfg.diffusion_steps = r.u64();
  cfg.time_embed_dim = r.u64();
  cfg.beta_start = r.f64();
  cfg.beta_end = r.f64();
  if (cfg.digest() != stored_digest)
    fail(Errc::CorruptWeights, "config digest does not match stored fields");

  Rng scratch(0);
  ModelState model(cfg, scratch);

  const std::uint64_t name_count = r.u64();
  if (name_count != cfg.features) fail(Errc::CorruptWeights, "feature name count mismatch");
  model.feature_names.clear();
  for (std::uint64_t i = 0; i < name_count; ++i) model.feature_names.push_back(r.str());

  const std::uint64_t expected_records = r.u64();
  std::uint64_t seen = 0;
  ModelState::Visitor reader{
      [&r, &seen](const std::string& name, Tensor& t) {
        ++seen;
        if (static_cast<RecordKind>(r.u8()) != RecordKind::Tensor)
          fail(Errc::CorruptWeights, "expected tensor record for " + name);
        const std::string stored = r.str();
        if (stored != name)
          fail(Errc::CorruptWeights, "record order mismatch: got '" + stored + "', expected '" +
                                         name + "'");
        const std::uint64_t ndim = r.u64();
        std::vector<std::size_t> shape(ndim);
        for (std::uint64_t i = 0; i < ndim; ++i) shape[i] = r.u64();
        if (shape != t.shape) fail(Errc::CorruptWeights, "shape mismatch for " + name);
        for (double& v : t.data) v = r.f64();
      },
      [&r, &seen](const std::string& name, std::int64_t& c) {
        ++seen;
        if (static_cast<RecordKind>(r.u8()) != RecordKind::Counter)
          fail(Errc::CorruptWeights, "expected counter record for " + name);
        const std::string stored = r.str();
        if (stored != name)
          fail(Errc::CorruptWeights, "record order mismatch: got '" + stored + "', expected '" +
                                         name + "'");
        c = r.i64();
      }};
  model.visit_state(reader);
  if (seen != expected_records) fail(Errc::CorruptWeights, "record count mismatch");
  if (!r.done()) fail(Errc::CorruptWeights, "trailing bytes after records");
  return model;
}

}  // namespace tsgdiff
