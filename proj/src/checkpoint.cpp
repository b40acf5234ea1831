#include "adev/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "adev/csv.hpp"
#include "adev/errors.hpp"

namespace adev {

namespace {

template <class U>
void put(std::string& out, U v) {
  for (std::size_t k = 0; k < sizeof(U); ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  template <class U>
  U get(const char* what) {
    if (pos_ + sizeof(U) > s_.size()) throw ParseError(std::string("checkpoint truncated reading ") + what);
    U v = 0;
    for (std::size_t k = 0; k < sizeof(U); ++k)
      v |= static_cast<U>(static_cast<unsigned char>(s_[pos_ + k])) << (8 * k);
    pos_ += sizeof(U);
    return v;
  }

  bool done() const { return pos_ == s_.size(); }
  std::size_t remaining() const { return s_.size() - pos_; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint& c) {
  std::string out = "ADEV";
  put<std::uint32_t>(out, Checkpoint::kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.kind));
  put<std::uint32_t>(out, c.n);
  put<std::uint32_t>(out, c.d);
  put<std::uint32_t>(out, c.steps);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.hidden.size()));
  for (auto h : c.hidden) put<std::uint32_t>(out, h);
  put<std::uint64_t>(out, c.blocks.size());
  for (const auto& b : c.blocks) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(b.size()));
    for (Eigen::Index k = 0; k < b.size(); ++k) put<std::uint64_t>(out, std::bit_cast<std::uint64_t>(b(k)));
  }
  return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 4 || bytes.compare(0, 4, "ADEV") != 0) throw ParseError("not an ADEV checkpoint (bad magic)");
  const std::string body = bytes.substr(4);
  Reader r(body);
  const auto version = r.get<std::uint32_t>("version");
  if (version != Checkpoint::kVersion)
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  const auto kind = r.get<std::uint32_t>("kind");
  if (kind < 1 || kind > 4) throw ParseError("unknown checkpoint kind " + std::to_string(kind));
  c.kind = static_cast<CheckpointKind>(kind);
  c.n = r.get<std::uint32_t>("n");
  c.d = r.get<std::uint32_t>("d");
  c.steps = r.get<std::uint32_t>("T");
  const auto nh = r.get<std::uint32_t>("hidden count");
  for (std::uint32_t k = 0; k < nh; ++k) c.hidden.push_back(r.get<std::uint32_t>("hidden size"));
  const auto nb = r.get<std::uint64_t>("block count");
  for (std::uint64_t b = 0; b < nb; ++b) {
    const auto len = r.get<std::uint64_t>("block length");
    if (len > r.remaining() / 8) throw ParseError("checkpoint block length exceeds file size");
    RVector v(static_cast<Eigen::Index>(len));
    for (std::uint64_t k = 0; k < len; ++k)
      v(static_cast<Eigen::Index>(k)) = std::bit_cast<double>(r.get<std::uint64_t>("block value"));
    c.blocks.push_back(std::move(v));
  }
  if (!r.done()) throw ParseError("trailing bytes after checkpoint blocks");
  return c;
}

Checkpoint to_checkpoint(const RegressionModel& model) {
  Checkpoint c;
  c.kind = CheckpointKind::regression;
  c.n = static_cast<std::uint32_t>(model.n());
  c.d = static_cast<std::uint32_t>(model.d());
  c.steps = static_cast<std::uint32_t>(model.steps());
  for (int h : model.net().hidden()) c.hidden.push_back(static_cast<std::uint32_t>(h));
  c.blocks.push_back(model.net().params());
  return c;
}

RegressionModel regression_from_checkpoint(const Checkpoint& c) {
  if (c.kind != CheckpointKind::regression) throw ParseError("checkpoint does not hold a regression model");
  if (c.blocks.size() != 1 || c.hidden.empty()) throw ParseError("malformed regression checkpoint");
  std::vector<int> hidden(c.hidden.begin(), c.hidden.end());
  RegressionModel m(static_cast<int>(c.n), static_cast<int>(c.d), static_cast<int>(c.steps), hidden);
  if (c.blocks[0].size() != m.net().param_count()) throw ParseError("regression parameter count mismatch");
  m.net().set_params(c.blocks[0]);
  return m;
}

Checkpoint to_checkpoint(const MapEnsemble& ens) {
  require_arg(!ens.empty(), "cannot store an empty ensemble");
  Checkpoint c;
  c.kind = CheckpointKind::map_ensemble;
  c.n = static_cast<std::uint32_t>(ens.front().lie_dim());
  c.d = static_cast<std::uint32_t>(ens.front().d_in());
  for (const auto& m : ens) c.blocks.push_back(m.params());
  return c;
}

MapEnsemble map_ensemble_from_checkpoint(const Checkpoint& c) {
  if (c.kind != CheckpointKind::map_ensemble) throw ParseError("checkpoint does not hold a map ensemble");
  MapEnsemble ens;
  for (const auto& b : c.blocks) {
    if (b.size() != static_cast<Eigen::Index>(c.n) * c.n * c.d) throw ParseError("map parameter count mismatch");
    ens.push_back(DevMap::from_params(static_cast<int>(c.d), static_cast<int>(c.n), b));
  }
  return ens;
}

Checkpoint to_checkpoint(const MapEnsemble2& ens) {
  require_arg(!ens.empty(), "cannot store an empty ensemble");
  Checkpoint c;
  c.kind = CheckpointKind::map_ensemble2;
  c.n = static_cast<std::uint32_t>(ens.front().n);
  c.d = static_cast<std::uint32_t>(ens.front().lie_dim());
  c.steps = ens.front().time_channel ? 1u : 0u;
  for (const auto& m : ens) c.blocks.push_back(m.map.params());
  return c;
}

MapEnsemble2 map_ensemble2_from_checkpoint(const Checkpoint& c) {
  if (c.kind != CheckpointKind::map_ensemble2) throw ParseError("checkpoint does not hold a rank-2 ensemble");
  const bool time = c.steps != 0;
  const int n = static_cast<int>(c.n);
  const int m = static_cast<int>(c.d);
  const int d_in = DevMap2::input_dim(n, time);
  MapEnsemble2 ens;
  for (const auto& b : c.blocks) {
    if (b.size() != static_cast<Eigen::Index>(d_in) * m * m) throw ParseError("rank-2 parameter count mismatch");
    ens.push_back(make_dev_map2(n, time, DevMap::from_params(d_in, m, b)));
  }
  return ens;
}

Checkpoint to_checkpoint(const GeneratorModel& model) {
  const GeneratorShape& s = model.shape();
  Checkpoint c;
  c.kind = CheckpointKind::generator;
  c.n = static_cast<std::uint32_t>(s.noise_dim);
  c.d = static_cast<std::uint32_t>(s.d);
  c.steps = static_cast<std::uint32_t>(s.steps);
  c.hidden = {static_cast<std::uint32_t>(s.past), static_cast<std::uint32_t>(s.latent_dim),
              static_cast<std::uint32_t>(s.embed_hidden.size())};
  for (int h : s.embed_hidden) c.hidden.push_back(static_cast<std::uint32_t>(h));
  for (int h : s.head_hidden) c.hidden.push_back(static_cast<std::uint32_t>(h));
  c.blocks.push_back(model.params());
  return c;
}

GeneratorModel generator_from_checkpoint(const Checkpoint& c) {
  if (c.kind != CheckpointKind::generator) throw ParseError("checkpoint does not hold a generator");
  if (c.blocks.size() != 1 || c.hidden.size() < 3 || c.hidden.size() < 3 + c.hidden[2])
    throw ParseError("malformed generator checkpoint");
  GeneratorShape s;
  s.noise_dim = static_cast<int>(c.n);
  s.d = static_cast<int>(c.d);
  s.steps = static_cast<int>(c.steps);
  s.past = static_cast<int>(c.hidden[0]);
  s.latent_dim = static_cast<int>(c.hidden[1]);
  const std::size_t ne = c.hidden[2];
  s.embed_hidden.assign(c.hidden.begin() + 3, c.hidden.begin() + 3 + static_cast<std::ptrdiff_t>(ne));
  s.head_hidden.assign(c.hidden.begin() + 3 + static_cast<std::ptrdiff_t>(ne), c.hidden.end());
  GeneratorModel g(s);
  if (c.blocks[0].size() != g.param_count()) throw ParseError("generator parameter count mismatch");
  g.set_params(c.blocks[0]);
  return g;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) { write_text_file_atomic(path, encode_checkpoint(c)); }

Checkpoint load_checkpoint(const std::string& path) { return decode_checkpoint(read_text_file(path)); }

}  // namespace adev
