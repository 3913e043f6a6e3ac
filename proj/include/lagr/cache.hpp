#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "lagr/oracle.hpp"
#include "lagr/rng.hpp"

namespace lagr {

struct CacheKey {
  std::string env_id;
  std::string descriptor_id;
  std::string state_text;
  int tau_centi = 0;  // temperature bucketed to 2 decimals

  auto operator<=>(const CacheKey&) const = default;
};

struct CacheEntry {
  std::vector<std::string> responses;
};

// Persistent oracle-response store: one response per key at temperature 0, a
// pool of pool_size responses above it, picked uniformly on hits. The fill
// for a key happens under the lock, so concurrent misses on one key cannot
// double-call the backend.
class ResponseCache {
 public:
  explicit ResponseCache(int pool_size = 10);
  ResponseCache(ResponseCache&& other) noexcept;
  ResponseCache& operator=(ResponseCache&& other) noexcept;

  int pool_size() const { return pool_size_; }
  static int tau_bucket(double tau);

  struct Result {
    std::string raw;
    bool from_cache = false;
    int backend_calls = 0;
  };

  // Serve the query from the cache, filling it from the backend on a miss.
  // Backend errors propagate and nothing is stored.
  Result query(TextBackend& backend, const OracleQuery& q, RngStream& rng);

  std::size_t size() const;
  bool contains(const CacheKey& key) const;
  std::vector<std::pair<CacheKey, CacheEntry>> entries() const;
  std::map<int, std::size_t> stats_by_tau() const;
  void insert(CacheKey key, CacheEntry entry);

  // Later entries win on conflicting keys; each conflict adds one warning.
  void merge_from(const ResponseCache& other, std::vector<std::string>* warnings);

  // Line-delimited records under a versioned header. A missing file loads as
  // an empty cache; corrupt records are skipped with a warning.
  static ResponseCache load(const std::string& path, int pool_size = 10,
                            std::vector<std::string>* warnings = nullptr);
  void save(const std::string& path) const;

 private:
  mutable std::mutex mu_;
  std::map<CacheKey, CacheEntry> entries_;
  int pool_size_;
};

}  // namespace lagr
