#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "taoquant/dates.hpp"

namespace taoquant::ingest {

/// One subnet-day observation in the normalized schema. Numeric fields may be
/// NaN (e.g. no price during startup mode); semantic checks beyond shape
/// (positive prices on non-startup days, ...) happen at panel construction,
/// which quarantines offending rows instead of failing the load.
struct RawSnapshotRow {
    Date date;
    int netuid = 0;
    double price_tao = 0.0;
    double mcap_tao = 0.0;
    double tau_reserve = 0.0;
    double alpha_reserve = 0.0;
    double alpha_staked = 0.0;
    double emission_rao_per_day = 0.0;  // 1e9 rao = 1 TAO
    bool startup_mode = false;
};

enum class SnapshotFormat { csv, json };

/// Loads `date,netuid,price_tao,mcap_tao,tau_reserve,alpha_reserve,
/// alpha_staked,emission_rao_per_day,startup_mode` (exact header). Rows come
/// back sorted by (date, netuid); duplicate keys are fatal.
std::vector<RawSnapshotRow> load_snapshot_csv(const std::string& path);

/// Same schema as a JSON array of objects (or {"rows": [...]}, the shape the
/// remote API returns, so cached payloads load directly).
std::vector<RawSnapshotRow> load_snapshot_json(const std::string& path);

std::vector<RawSnapshotRow> load_snapshot(const std::string& path, SnapshotFormat format);

/// Inverse of load_snapshot_csv: exact column order, shortest round-trip
/// number formatting, missing numerics as "nan".
void write_snapshot_csv(const std::string& path, std::span<const RawSnapshotRow> rows);

/// Daily USD-per-TAO price series, dense between its first and last date.
/// Gaps of up to 3 days are forward-filled at load (with a warning); longer
/// gaps are fatal.
class FxSeries {
  public:
    /// CSV columns: `date,tao_usd`.
    static FxSeries load(const std::string& path, std::vector<std::string>* warnings = nullptr);
    static FxSeries from_points(std::vector<std::pair<Date, double>> points,
                                std::vector<std::string>* warnings = nullptr);

    [[nodiscard]] std::optional<double> try_price(Date d) const;
    [[nodiscard]] double price(Date d) const;  // throws DataError when absent

    /// price(d)/price(d-1) - 1 when both days are covered.
    [[nodiscard]] std::optional<double> daily_return(Date d) const;

    [[nodiscard]] Date first_date() const { return first_; }
    [[nodiscard]] Date last_date() const { return first_ + static_cast<std::int64_t>(px_.size()) - 1; }
    [[nodiscard]] std::size_t size() const { return px_.size(); }

  private:
    Date first_{0};
    std::vector<double> px_;
};

struct HttpConfig {
    std::string base_url;  // e.g. https://api.example.com
    std::string api_key;   // falls back to $TAOQUANT_API_KEY when empty
    std::string cache_dir;  // empty disables the cache
    int max_attempts = 5;
    double backoff_initial_ms = 250.0;  // doubles per retry
};

struct FetchReport {
    std::size_t rows_accepted = 0;
    std::vector<std::string> rejected;  // row-level parse failures, run continues
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
};

/// Fetches one GET /v1/pools?date=YYYY-MM-DD per day in [begin, end], sending
/// `Authorization: Bearer <key>`. Retries transport errors, 429 and 5xx with
/// exponential backoff (max_attempts total); 401/403 is a fatal ConfigError.
/// Raw response bodies are written through to cache_dir, keyed by the request
/// parameters, and replayed byte-identically on later calls.
std::vector<RawSnapshotRow> fetch_remote(const HttpConfig& config, Date begin, Date end,
                                         FetchReport* report = nullptr);

}  // namespace taoquant::ingest
