#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mfdfa {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Returns nullopt on any
/// syntax or calendar error.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date d);

/// Raised by the CSV reader; carries the 1-based line number of the bad row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Dated, strictly positive price observations as ingested.
class PriceSeries {
 public:
  /// Throws std::invalid_argument unless dates are strictly increasing,
  /// every price is positive and finite, and there are at least 2 rows.
  PriceSeries(std::vector<Date> dates, std::vector<double> prices,
              std::string label);

  std::size_t size() const noexcept { return prices_.size(); }
  std::span<const Date> dates() const noexcept { return dates_; }
  std::span<const double> prices() const noexcept { return prices_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<Date> dates_;
  std::vector<double> prices_;
  std::string label_;
};

/// Values actually analysed (log-returns or any derived real series).
/// Timestamps are either empty (synthetic data) or one per value.
class ReturnSeries {
 public:
  ReturnSeries() = default;
  ReturnSeries(std::vector<double> values, std::vector<Date> dates,
               std::string label);
  static ReturnSeries from_values(std::vector<double> values,
                                  std::string label = {});

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool has_dates() const noexcept { return !dates_.empty(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const Date> dates() const noexcept { return dates_; }
  const std::string& label() const noexcept { return label_; }

  /// Same timestamps and label, new values (length must match).
  ReturnSeries with_values(std::vector<double> values) const;

 private:
  std::vector<double> values_;
  std::vector<Date> dates_;
  std::string label_;
};

struct AnalysisPeriod {
  Date start;  // inclusive
  Date end;    // inclusive
  std::string name;

  AnalysisPeriod(Date start, Date end, std::string name);
};

/// Parses `name:YYYY-MM-DD:YYYY-MM-DD`.
AnalysisPeriod parse_period(std::string_view spec);

enum class ExtremumMode { max, min };

/// Reads a `date,price` CSV (LF or CRLF). Errors carry line numbers.
PriceSeries load_price_csv(std::istream& in, std::string label);
PriceSeries load_price_csv_file(const std::string& path);

/// Writes a PriceSeries back in the same `date,price` schema, 17 significant
/// digits so a reload reproduces the doubles exactly.
void write_price_csv(std::ostream& out, const PriceSeries& p);

ReturnSeries log_returns(const PriceSeries& p);

/// Inverse of log_returns: prices[0] = initial, prices[k+1] = prices[k]*exp(r[k]).
/// Dates are taken from `r` when present, otherwise consecutive calendar days
/// starting at `first_date`.
PriceSeries cumulative_prices(const ReturnSeries& r, double initial,
                              Date first_date);

/// Zero mean, unit population variance. Throws on zero variance.
ReturnSeries normalize(const ReturnSeries& r);

ReturnSeries slice_period(const ReturnSeries& r, const AnalysisPeriod& p);

/// Extremum of each complete non-overlapping window of length `window`; the
/// trailing partial window is dropped. Each output is stamped with the date
/// of its window's last sample.
ReturnSeries window_extrema(const ReturnSeries& r, std::size_t window,
                            ExtremumMode mode);

double mean(std::span<const double> x);
/// Population (1/N) variance.
double variance(std::span<const double> x);

}  // namespace mfdfa
