#include "jet/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jet/text.hpp"

namespace jet {

const char* kind_prefix(PointKind kind) {
  switch (kind) {
    case PointKind::Word: return "word:";
    case PointKind::Term: return "term:";
    case PointKind::Entity: return "ent:";
  }
  return "";
}

const char* kind_name(PointKind kind) {
  switch (kind) {
    case PointKind::Word: return "word";
    case PointKind::Term: return "term";
    case PointKind::Entity: return "entity";
  }
  return "";
}

std::optional<PointKind> parse_kind(std::string_view name) {
  if (name == "word") return PointKind::Word;
  if (name == "term") return PointKind::Term;
  if (name == "entity" || name == "ent") return PointKind::Entity;
  return std::nullopt;
}

std::string namespaced_key(PointKind kind, std::string_view key) {
  return std::string(kind_prefix(kind)) + std::string(key);
}

std::pair<PointKind, std::string> split_namespaced_key(std::string_view key) {
  for (PointKind kind : kAllKinds) {
    const std::string_view prefix = kind_prefix(kind);
    if (key.substr(0, prefix.size()) == prefix) {
      return {kind, std::string(key.substr(prefix.size()))};
    }
  }
  throw std::runtime_error("key '" + std::string(key) +
                           "' has no kind prefix (expected word:/term:/ent:)");
}

size_t EmbeddingSet::size() const {
  return keys_[0].size() + keys_[1].size() + keys_[2].size();
}

void EmbeddingSet::add(PointKind kind, std::string key, std::span<const float> vec) {
  if (dim_ == 0) dim_ = static_cast<uint32_t>(vec.size());
  if (vec.size() != dim_) {
    throw std::invalid_argument("vector for '" + key + "' has dimension " +
                                std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
  }
  auto& index = index_[idx(kind)];
  if (index.contains(key)) {
    throw std::runtime_error("duplicate key '" + namespaced_key(kind, key) + "'");
  }
  index.emplace(key, static_cast<uint32_t>(keys_[idx(kind)].size()));
  keys_[idx(kind)].push_back(std::move(key));
  auto& data = data_[idx(kind)];
  data.insert(data.end(), vec.begin(), vec.end());
}

std::optional<std::span<const float>> EmbeddingSet::find(PointKind kind,
                                                         std::string_view key) const {
  const auto& index = index_[idx(kind)];
  const auto it = index.find(std::string(key));
  if (it == index.end()) return std::nullopt;
  return vector_at(kind, it->second);
}

std::span<const float> EmbeddingSet::at(PointKind kind, std::string_view key) const {
  if (auto v = find(kind, key)) return *v;
  throw std::runtime_error("no " + std::string(kind_name(kind)) + " vector for '" +
                           std::string(key) + "'");
}

namespace {

template <class Real>
double cosine_impl(std::span<const Real> x, std::span<const Real> y) {
  if (x.size() != y.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double xy = 0, xx = 0, yy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    xy += static_cast<double>(x[i]) * y[i];
    xx += static_cast<double>(x[i]) * x[i];
    yy += static_cast<double>(y[i]) * y[i];
  }
  if (xx == 0 || yy == 0) throw std::invalid_argument("cosine: zero vector");
  return xy / (std::sqrt(xx) * std::sqrt(yy));
}

}  // namespace

double cosine(std::span<const float> x, std::span<const float> y) { return cosine_impl(x, y); }
double cosine(std::span<const double> x, std::span<const double> y) { return cosine_impl(x, y); }

std::vector<float> string_vector(const EmbeddingSet& set, std::string_view s) {
  const auto tokens = normalize(s);
  std::vector<double> sum(set.dim(), 0.0);
  size_t known = 0;
  for (const auto& tok : tokens) {
    if (auto v = set.find(PointKind::Word, tok)) {
      ++known;
      for (size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
    }
  }
  if (known == 0) {
    throw std::runtime_error("unrepresentable string: no known word in '" + std::string(s) + "'");
  }
  std::vector<float> mean(set.dim());
  for (size_t i = 0; i < mean.size(); ++i) {
    mean[i] = static_cast<float>(sum[i] / static_cast<double>(known));
  }
  return mean;
}

std::vector<float> term_or_backoff(const EmbeddingSet& set, std::string_view s) {
  const auto tokens = normalize(s);
  if (auto v = set.find(PointKind::Term, term_key(tokens))) {
    return std::vector<float>(v->begin(), v->end());
  }
  return string_vector(set, s);
}

std::vector<Neighbor> nearest(const EmbeddingSet& set, std::span<const float> query,
                              std::span<const PointKind> kinds, size_t topk,
                              const std::set<std::string>& exclude) {
  if (topk < 1) throw std::invalid_argument("nearest: topk must be >= 1");
  double qq = 0;
  for (float x : query) qq += static_cast<double>(x) * x;
  if (qq == 0) throw std::invalid_argument("nearest: zero query vector");
  const double qnorm = std::sqrt(qq);

  std::vector<Neighbor> scored;
  for (PointKind kind : kinds) {
    const auto& keys = set.keys(kind);
    for (uint32_t row = 0; row < keys.size(); ++row) {
      if (!exclude.empty() && exclude.contains(namespaced_key(kind, keys[row]))) continue;
      const auto vec = set.vector_at(kind, row);
      double vq = 0, vv = 0;
      for (size_t i = 0; i < vec.size(); ++i) {
        vq += static_cast<double>(vec[i]) * query[i];
        vv += static_cast<double>(vec[i]) * vec[i];
      }
      if (vv == 0) continue;  // unrankable
      scored.push_back({keys[row], kind, vq / (std::sqrt(vv) * qnorm)});
    }
  }
  if (scored.empty()) throw std::runtime_error("nearest: empty candidate pool");
  std::sort(scored.begin(), scored.end(), [](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return namespaced_key(a.kind, a.key) < namespaced_key(b.kind, b.key);
  });
  if (scored.size() > topk) scored.resize(topk);
  return scored;
}

namespace {

constexpr char kMagic[4] = {'J', 'E', 'T', 'E'};
constexpr uint32_t kBinaryVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  const unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xFF),
                                  static_cast<unsigned char>((v >> 8) & 0xFF),
                                  static_cast<unsigned char>((v >> 16) & 0xFF),
                                  static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

bool get_u32(std::istream& in, uint32_t& v) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
  v = static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
      (static_cast<uint32_t>(bytes[2]) << 16) | (static_cast<uint32_t>(bytes[3]) << 24);
  return true;
}

void put_f32(std::ostream& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(out, bits);
}

bool get_f32(std::istream& in, float& f) {
  uint32_t bits;
  if (!get_u32(in, bits)) return false;
  std::memcpy(&f, &bits, 4);
  return true;
}

void write_text(const EmbeddingSet& set, std::ostream& out) {
  out << set.size() << ' ' << set.dim() << '\n';
  char buf[64];
  for (PointKind kind : kAllKinds) {
    const auto& keys = set.keys(kind);
    for (uint32_t row = 0; row < keys.size(); ++row) {
      out << kind_prefix(kind) << keys[row];
      for (float x : set.vector_at(kind, row)) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<double>(x),
                                       std::chars_format::general, 9);
        out << ' ';
        out.write(buf, res.ptr - buf);
      }
      out << '\n';
    }
  }
}

void write_binary(const EmbeddingSet& set, std::ostream& out) {
  out.write(kMagic, 4);
  put_u32(out, kBinaryVersion);
  put_u32(out, set.dim());
  for (PointKind kind : kAllKinds) {
    const auto& keys = set.keys(kind);
    for (uint32_t row = 0; row < keys.size(); ++row) {
      out.put(static_cast<char>(static_cast<uint8_t>(kind)));
      put_u32(out, static_cast<uint32_t>(keys[row].size()));
      out.write(keys[row].data(), static_cast<std::streamsize>(keys[row].size()));
      for (float x : set.vector_at(kind, row)) put_f32(out, x);
    }
  }
}

}  // namespace

void save_embeddings(const EmbeddingSet& set, const std::string& path, EmbeddingFormat format) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write to " + tmp);
    if (format == EmbeddingFormat::Text) {
      write_text(set, out);
    } else {
      write_binary(set, out);
    }
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

EmbeddingSet load_embeddings_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty embeddings file");
  std::istringstream hs(header);
  uint64_t count = 0;
  uint32_t dim = 0;
  if (!(hs >> count >> dim) || dim == 0) {
    throw std::runtime_error(path + ": bad text header (expected \"count dim\")");
  }
  EmbeddingSet set(dim);
  std::string line;
  std::vector<float> vec(dim);
  uint64_t records = 0;
  uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    for (uint32_t i = 0; i < dim; ++i) {
      if (!(ls >> vec[i])) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": truncated record '" +
                                 key + "'");
      }
    }
    auto [kind, bare] = split_namespaced_key(key);
    try {
      set.add(kind, std::move(bare), vec);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ++records;
  }
  if (records != count) {
    throw std::runtime_error(path + ": header promised " + std::to_string(count) +
                             " records, found " + std::to_string(records));
  }
  return set;
}

EmbeddingSet load_embeddings_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error(path + ": bad magic (not a JETE embeddings file)");
  }
  uint32_t version = 0, dim = 0;
  if (!get_u32(in, version) || version != kBinaryVersion) {
    throw std::runtime_error(path + ": unsupported version");
  }
  if (!get_u32(in, dim) || dim == 0) throw std::runtime_error(path + ": bad dimension");
  EmbeddingSet set(dim);
  std::vector<float> vec(dim);
  uint64_t record = 0;
  while (true) {
    const int kind_byte = in.get();
    if (kind_byte == std::char_traits<char>::eof()) break;
    ++record;
    if (kind_byte > 2) {
      throw std::runtime_error(path + ": record " + std::to_string(record) + ": bad kind byte");
    }
    uint32_t key_len = 0;
    if (!get_u32(in, key_len)) {
      throw std::runtime_error(path + ": record " + std::to_string(record) + ": truncated");
    }
    std::string key(key_len, '\0');
    if (!in.read(key.data(), key_len)) {
      throw std::runtime_error(path + ": record " + std::to_string(record) + ": truncated key");
    }
    for (uint32_t i = 0; i < dim; ++i) {
      if (!get_f32(in, vec[i])) {
        throw std::runtime_error(path + ": record " + std::to_string(record) +
                                 " ('" + key + "'): truncated vector");
      }
    }
    try {
      set.add(static_cast<PointKind>(kind_byte), std::move(key), vec);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": record " + std::to_string(record) + ": " + e.what());
    }
  }
  return set;
}

EmbeddingSet load_embeddings(const std::string& path) {
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
      return load_embeddings_binary(path);
    }
  }
  return load_embeddings_text(path);
}

}  // namespace jet
