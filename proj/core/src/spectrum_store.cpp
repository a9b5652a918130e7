#include "scottlab/spectrum_store.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "scottlab/error.hpp"

namespace scottlab {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'L', 'B', 'B', 'L', 'O', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put(std::string& out, const T& value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > data_.size()) throw Error("truncated cache payload");
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string_view bytes(std::size_t n) {
    if (pos_ + n > data_.size()) throw Error("truncated cache payload");
    auto view = data_.substr(pos_, n);
    pos_ += n;
    return view;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[x & 0xf];
    x >>= 4;
  }
  return s;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string spectrum_key(const RadialGrid& grid, const ChannelSpec& spec,
                         const KineticSymbol& symbol) {
  return std::string(kCodeVersion) + "|" + grid.describe() + "|" + spec.describe() + "|" +
         symbol.name();
}

std::string serialize_states(const std::vector<BoundState>& states) {
  std::string out;
  put<std::uint64_t>(out, states.size());
  for (const auto& s : states) {
    put<std::int32_t>(out, s.n);
    put<double>(out, s.energy);
    put<double>(out, s.localization);
    put<std::int32_t>(out, s.nodes);
    put<std::uint64_t>(out, s.samples.size());
    out.append(reinterpret_cast<const char*>(s.samples.data()), s.samples.size() * sizeof(double));
  }
  return out;
}

std::vector<BoundState> deserialize_states(std::string_view payload, const RadialGrid& grid) {
  Reader in(payload);
  const auto count = in.get<std::uint64_t>();
  std::vector<BoundState> states;
  states.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    BoundState s;
    s.n = in.get<std::int32_t>();
    s.energy = in.get<double>();
    s.localization = in.get<double>();
    s.nodes = in.get<std::int32_t>();
    const auto n = in.get<std::uint64_t>();
    if (n != grid.count()) throw Error("cached state does not match grid");
    const auto raw = in.bytes(n * sizeof(double));
    s.samples.resize(n);
    std::memcpy(s.samples.data(), raw.data(), raw.size());
    s.grid = grid;
    states.push_back(std::move(s));
  }
  if (!in.done()) throw Error("trailing bytes in cache payload");
  return states;
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  const auto tmp = path.string() + ".tmp" + hex64((std::uint64_t{rd()} << 32) ^ rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write to " + tmp + " failed");
  }
  fs::rename(tmp, path);
}

SpectrumStore::SpectrumStore(std::optional<std::filesystem::path> cache_dir, Logger logger)
    : dir_(std::move(cache_dir)), logger_(std::move(logger)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

void SpectrumStore::log(const std::string& message) const {
  if (logger_) logger_(message);
}

std::optional<std::string> SpectrumStore::load_blob(const std::string& description,
                                                    const char* kind) {
  if (!dir_) return std::nullopt;
  const auto path = *dir_ / (hex64(fnv1a(description)) + "." + kind);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string file = buffer.str();
  try {
    Reader r(file);
    const auto magic = r.bytes(sizeof(kMagic));
    if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) throw Error("bad magic");
    if (r.get<std::uint32_t>() != kFormatVersion) throw Error("format version mismatch");
    const auto desc_len = r.get<std::uint64_t>();
    if (r.bytes(desc_len) != description) throw Error("key description mismatch");
    const auto payload_len = r.get<std::uint64_t>();
    const std::string payload(r.bytes(payload_len));
    if (r.get<std::uint64_t>() != fnv1a(payload)) throw Error("checksum mismatch");
    if (!r.done()) throw Error("trailing bytes");
    return payload;
  } catch (const Error& e) {
    std::lock_guard lock(mutex_);
    ++stats_.rejected_files;
    log("cache: discarding " + path.string() + " (" + e.what() + ")");
    return std::nullopt;
  }
}

void SpectrumStore::store_blob(const std::string& description, const char* kind,
                               const std::string& payload) {
  if (!dir_) return;
  std::string file(kMagic, sizeof(kMagic));
  put<std::uint32_t>(file, kFormatVersion);
  put<std::uint64_t>(file, description.size());
  file += description;
  put<std::uint64_t>(file, payload.size());
  file += payload;
  put<std::uint64_t>(file, fnv1a(payload));
  write_file_atomically(*dir_ / (hex64(fnv1a(description)) + "." + kind), file);
}

std::shared_ptr<const ChannelSpectrum> SpectrumStore::spectrum(const RadialGrid& grid,
                                                               const ChannelSpec& spec,
                                                               const KineticSymbol& symbol) {
  const std::string key = spectrum_key(grid, spec, symbol);
  {
    std::lock_guard lock(mutex_);
    if (auto it = spectra_.find(key); it != spectra_.end()) {
      ++stats_.memory_hits;
      return it->second;
    }
  }
  std::shared_ptr<const ChannelSpectrum> result;
  if (auto payload = load_blob(key, "spec")) {
    try {
      result = std::make_shared<const ChannelSpectrum>(
          ChannelSpectrum{spec, grid, symbol, deserialize_states(*payload, grid)});
      std::lock_guard lock(mutex_);
      ++stats_.disk_hits;
    } catch (const Error& e) {
      log(std::string("cache: unreadable spectrum payload (") + e.what() + ")");
    }
    if (result) log("cache hit: " + key);
  }
  if (!result) {
    const auto start = std::chrono::steady_clock::now();
    const auto op = assemble_channel_operator(spec, grid, symbol);
    result = std::make_shared<const ChannelSpectrum>(bound_states(op));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::ostringstream os;
    os.precision(3);
    os << "computed " << key << ": " << result->states.size() << " states in " << elapsed.count()
       << " s";
    log(os.str());
    store_blob(key, "spec", serialize_states(result->states));
    std::lock_guard lock(mutex_);
    ++stats_.computed;
  }
  std::lock_guard lock(mutex_);
  auto [it, inserted] = spectra_.emplace(key, result);
  return it->second;
}

double SpectrumStore::scalar(const std::string& description,
                             const std::function<double()>& compute) {
  const std::string key = std::string(kCodeVersion) + "|scalar|" + description;
  {
    std::lock_guard lock(mutex_);
    if (auto it = scalars_.find(key); it != scalars_.end()) {
      ++stats_.memory_hits;
      return it->second;
    }
  }
  double value = 0.0;
  bool have = false;
  if (auto payload = load_blob(key, "scalar")) {
    if (payload->size() == sizeof(double)) {
      std::memcpy(&value, payload->data(), sizeof(double));
      have = true;
      std::lock_guard lock(mutex_);
      ++stats_.disk_hits;
    }
  }
  if (!have) {
    const auto start = std::chrono::steady_clock::now();
    value = compute();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    std::ostringstream os;
    os.precision(3);
    os << "computed " << description << " in " << elapsed.count() << " s";
    log(os.str());
    std::string payload;
    put<double>(payload, value);
    store_blob(key, "scalar", payload);
    std::lock_guard lock(mutex_);
    ++stats_.computed;
  }
  std::lock_guard lock(mutex_);
  scalars_.emplace(key, value);
  return value;
}

SpectrumStore::Stats SpectrumStore::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

}  // namespace scottlab
