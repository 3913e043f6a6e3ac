#include "lagr/cache.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lagr {

using nlohmann::json;

namespace {
constexpr const char* kCacheMagic = "lagr-cache v1";
}

ResponseCache::ResponseCache(int pool_size) : pool_size_(pool_size) {
  if (pool_size_ < 1) throw std::invalid_argument("pool size must be >= 1");
}

ResponseCache::ResponseCache(ResponseCache&& other) noexcept {
  std::lock_guard<std::mutex> lock(other.mu_);
  entries_ = std::move(other.entries_);
  pool_size_ = other.pool_size_;
}

ResponseCache& ResponseCache::operator=(ResponseCache&& other) noexcept {
  if (this != &other) {
    std::scoped_lock lock(mu_, other.mu_);
    entries_ = std::move(other.entries_);
    pool_size_ = other.pool_size_;
  }
  return *this;
}

int ResponseCache::tau_bucket(double tau) {
  return static_cast<int>(std::llround(tau * 100.0));
}

ResponseCache::Result ResponseCache::query(TextBackend& backend,
                                           const OracleQuery& q,
                                           RngStream& rng) {
  const CacheKey key{q.env_id, q.descriptor_id, q.rendered_state,
                     tau_bucket(q.temperature)};
  const int fills = key.tau_centi == 0 ? 1 : pool_size_;

  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    const auto& pool = it->second.responses;
    const std::size_t pick =
        pool.size() == 1 ? 0
                         : static_cast<std::size_t>(rng.below(pool.size()));
    return {pool[pick], true, 0};
  }

  CacheEntry entry;
  entry.responses.reserve(static_cast<std::size_t>(fills));
  for (int i = 0; i < fills; ++i) {
    entry.responses.push_back(backend.complete(q));  // errors propagate
  }
  const std::size_t pick =
      fills == 1 ? 0 : static_cast<std::size_t>(rng.below(entry.responses.size()));
  Result res{entry.responses[pick], false, fills};
  entries_.emplace(key, std::move(entry));
  return res;
}

std::size_t ResponseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

bool ResponseCache::contains(const CacheKey& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.count(key) > 0;
}

std::vector<std::pair<CacheKey, CacheEntry>> ResponseCache::entries() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {entries_.begin(), entries_.end()};
}

std::map<int, std::size_t> ResponseCache::stats_by_tau() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::map<int, std::size_t> out;
  for (const auto& [key, entry] : entries_) ++out[key.tau_centi];
  return out;
}

void ResponseCache::insert(CacheKey key, CacheEntry entry) {
  if (entry.responses.empty()) {
    throw std::invalid_argument("cache entry must hold at least one response");
  }
  std::lock_guard<std::mutex> lock(mu_);
  entries_[std::move(key)] = std::move(entry);
}

void ResponseCache::merge_from(const ResponseCache& other,
                               std::vector<std::string>* warnings) {
  const auto incoming = other.entries();
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, entry] : incoming) {
    const auto it = entries_.find(key);
    if (it != entries_.end() && it->second.responses != entry.responses) {
      if (warnings != nullptr) {
        warnings->push_back("conflicting cache entry for state '" +
                            key.state_text + "' (tau bucket " +
                            std::to_string(key.tau_centi) +
                            "); keeping the later file's responses");
      }
    }
    entries_[key] = entry;
  }
}

ResponseCache ResponseCache::load(const std::string& path, int pool_size,
                                  std::vector<std::string>* warnings) {
  ResponseCache cache(pool_size);
  std::ifstream in(path);
  if (!in) return cache;  // absent file: empty cache

  std::string line;
  long line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      if (line == kCacheMagic) continue;
      if (warnings != nullptr) {
        warnings->push_back(path + ": missing '" + kCacheMagic +
                            "' header; parsing records anyway");
      }
    }
    try {
      const json rec = json::parse(line);
      CacheKey key{rec.at("env").get<std::string>(),
                   rec.at("desc").get<std::string>(),
                   rec.at("state").get<std::string>(),
                   rec.at("tau").get<int>()};
      CacheEntry entry;
      for (const auto& r : rec.at("responses")) {
        entry.responses.push_back(r.get<std::string>());
      }
      if (entry.responses.empty()) throw std::runtime_error("empty responses");
      cache.entries_[std::move(key)] = std::move(entry);
    } catch (const std::exception& e) {
      if (warnings != nullptr) {
        warnings->push_back(path + ":" + std::to_string(line_no) +
                            ": skipping corrupt record (" + e.what() + ")");
      }
    }
  }
  return cache;
}

void ResponseCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write cache file: " + path);
  out << kCacheMagic << "\n";
  std::lock_guard<std::mutex> lock(mu_);
  for (const auto& [key, entry] : entries_) {
    const json rec{{"env", key.env_id},
                   {"desc", key.descriptor_id},
                   {"tau", key.tau_centi},
                   {"state", key.state_text},
                   {"responses", entry.responses}};
    // replace, not throw, on any stray invalid byte in a live response
    out << rec.dump(-1, ' ', false, json::error_handler_t::replace) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lagr
