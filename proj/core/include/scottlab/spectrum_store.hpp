#pragma once

// Memoized spectra with an optional on-disk cache.
//
// Cache entries are keyed by a hash of (grid, channel spec, symbol, code
// version). Each file carries its full key description and a checksum of the
// payload; a mismatch on either causes recomputation.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scottlab/spectrum.hpp"

namespace scottlab {

inline constexpr const char* kCodeVersion = "scottlab-0.1.0/spectrum-v1";

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string spectrum_key(const RadialGrid& grid, const ChannelSpec& spec,
                         const KineticSymbol& symbol);

std::string serialize_states(const std::vector<BoundState>& states);
// Grid is not part of the payload; the caller supplies it.
std::vector<BoundState> deserialize_states(std::string_view payload, const RadialGrid& grid);

class SpectrumStore {
 public:
  using Logger = std::function<void(const std::string&)>;

  struct Stats {
    std::size_t memory_hits = 0;
    std::size_t disk_hits = 0;
    std::size_t computed = 0;
    std::size_t rejected_files = 0;
  };

  explicit SpectrumStore(std::optional<std::filesystem::path> cache_dir = std::nullopt,
                         Logger logger = {});

  // All localized bound states for the channel (truncate with .truncated()).
  std::shared_ptr<const ChannelSpectrum> spectrum(const RadialGrid& grid, const ChannelSpec& spec,
                                                  const KineticSymbol& symbol);

  // Memoized scalar, persisted alongside spectra.
  double scalar(const std::string& description, const std::function<double()>& compute);

  Stats stats() const;
  const std::optional<std::filesystem::path>& cache_dir() const noexcept { return dir_; }

 private:
  std::optional<std::string> load_blob(const std::string& description, const char* kind);
  void store_blob(const std::string& description, const char* kind, const std::string& payload);
  void log(const std::string& message) const;

  std::optional<std::filesystem::path> dir_;
  Logger logger_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ChannelSpectrum>> spectra_;
  std::map<std::string, double> scalars_;
  Stats stats_;
};

// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace scottlab
