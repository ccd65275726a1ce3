#include "mfdfa/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mfdfa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
  text = trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0;
  unsigned m = 0, d = 0;
  if (!parse_number(text.substr(0, 4), y) || !parse_number(text.substr(5, 2), m) ||
      !parse_number(text.substr(8, 2), d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

PriceSeries::PriceSeries(std::vector<Date> dates, std::vector<double> prices,
                         std::string label)
    : dates_(std::move(dates)), prices_(std::move(prices)), label_(std::move(label)) {
  if (dates_.size() != prices_.size())
    throw std::invalid_argument("price series: dates and prices differ in length");
  if (prices_.size() < 2)
    throw std::invalid_argument("price series: fewer than 2 observations");
  for (std::size_t k = 0; k < prices_.size(); ++k) {
    if (!(prices_[k] > 0.0) || !std::isfinite(prices_[k]))
      throw std::invalid_argument("price series: non-positive price at row " +
                                  std::to_string(k + 1));
    if (k > 0 && !(dates_[k - 1] < dates_[k]))
      throw std::invalid_argument("price series: non-increasing dates at " +
                                  format_iso_date(dates_[k]));
  }
}

ReturnSeries::ReturnSeries(std::vector<double> values, std::vector<Date> dates,
                           std::string label)
    : values_(std::move(values)), dates_(std::move(dates)), label_(std::move(label)) {
  if (!dates_.empty() && dates_.size() != values_.size())
    throw std::invalid_argument("return series: dates and values differ in length");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("return series: non-finite value");
}

ReturnSeries ReturnSeries::from_values(std::vector<double> values, std::string label) {
  return ReturnSeries(std::move(values), {}, std::move(label));
}

ReturnSeries ReturnSeries::with_values(std::vector<double> values) const {
  if (values.size() != values_.size())
    throw std::invalid_argument("return series: replacement length mismatch");
  return ReturnSeries(std::move(values), dates_, label_);
}

AnalysisPeriod::AnalysisPeriod(Date s, Date e, std::string n)
    : start(s), end(e), name(std::move(n)) {
  if (!(start < end)) throw std::invalid_argument("analysis period: start must precede end");
}

AnalysisPeriod parse_period(std::string_view spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c1 == std::string_view::npos || c2 == std::string_view::npos || c1 == 0)
    throw std::invalid_argument("period must look like name:YYYY-MM-DD:YYYY-MM-DD");
  auto start = parse_iso_date(spec.substr(c1 + 1, c2 - c1 - 1));
  auto end = parse_iso_date(spec.substr(c2 + 1));
  if (!start || !end) throw std::invalid_argument("period has a malformed date");
  return AnalysisPeriod(*start, *end, std::string(spec.substr(0, c1)));
}

PriceSeries load_price_csv(std::istream& in, std::string label) {
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<Date> dates;
  std::vector<double> prices;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view row = trim(line);
    if (!header_seen) {
      if (lineno == 1 && row.size() >= 3 && static_cast<unsigned char>(row[0]) == 0xEF)
        row.remove_prefix(3);  // UTF-8 BOM
      if (row != "date,price") throw ParseError(lineno, "expected header 'date,price'");
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(lineno, "expected two comma-separated fields");
    auto date = parse_iso_date(row.substr(0, comma));
    if (!date) throw ParseError(lineno, "malformed date");
    double price = 0.0;
    if (!parse_number(trim(row.substr(comma + 1)), price) || !std::isfinite(price))
      throw ParseError(lineno, "malformed price");
    if (!(price > 0.0)) throw ParseError(lineno, "non-positive price");
    if (!dates.empty() && !(dates.back() < *date))
      throw ParseError(lineno, "non-increasing dates");
    dates.push_back(*date);
    prices.push_back(price);
  }
  if (!header_seen) throw ParseError(0, "empty input");
  if (prices.size() < 2) throw ParseError(lineno, "fewer than 2 rows");
  return PriceSeries(std::move(dates), std::move(prices), std::move(label));
}

PriceSeries load_price_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string label = path;
  if (auto slash = label.find_last_of("/\\"); slash != std::string::npos)
    label = label.substr(slash + 1);
  if (auto dot = label.rfind('.'); dot != std::string::npos && dot > 0)
    label = label.substr(0, dot);
  return load_price_csv(in, label);
}

void write_price_csv(std::ostream& out, const PriceSeries& p) {
  out << "date,price\n";
  char buf[64];
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", p.prices()[k]);
    out << format_iso_date(p.dates()[k]) << ',' << buf << '\n';
  }
}

ReturnSeries log_returns(const PriceSeries& p) {
  std::vector<double> values(p.size() - 1);
  std::vector<Date> dates(p.size() - 1);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    values[k] = std::log(p.prices()[k + 1]) - std::log(p.prices()[k]);
    dates[k] = p.dates()[k + 1];
  }
  return ReturnSeries(std::move(values), std::move(dates), p.label());
}

PriceSeries cumulative_prices(const ReturnSeries& r, double initial, Date first_date) {
  if (!(initial > 0.0)) throw std::invalid_argument("initial price must be positive");
  std::vector<double> prices(r.size() + 1);
  std::vector<Date> dates(r.size() + 1);
  prices[0] = initial;
  // Accumulate in log space so the reconstruction does not drift.
  const double log0 = std::log(initial);
  double acc = log0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    acc += r.values()[k];
    prices[k + 1] = std::exp(acc);
  }
  if (r.has_dates()) {
    dates[0] = std::chrono::sys_days{r.dates()[0]} - std::chrono::days{1};
    std::copy(r.dates().begin(), r.dates().end(), dates.begin() + 1);
  } else {
    const std::chrono::sys_days start{first_date};
    for (std::size_t k = 0; k < dates.size(); ++k)
      dates[k] = start + std::chrono::days{static_cast<long>(k)};
  }
  return PriceSeries(std::move(dates), std::move(prices), r.label());
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(x.size());
}

ReturnSeries normalize(const ReturnSeries& r) {
  if (r.size() < 2) throw std::invalid_argument("normalize: need at least 2 values");
  const double mu = mean(r.values());
  const double var = variance(r.values());
  if (!(var > 0.0)) throw std::invalid_argument("normalize: zero variance");
  const double sd = std::sqrt(var);
  std::vector<double> out(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) out[k] = (r.values()[k] - mu) / sd;
  return r.with_values(std::move(out));
}

ReturnSeries slice_period(const ReturnSeries& r, const AnalysisPeriod& p) {
  if (!r.has_dates()) throw std::invalid_argument("slice_period: series has no dates");
  const auto dates = r.dates();
  const auto first = std::lower_bound(dates.begin(), dates.end(), p.start);
  const auto last = std::upper_bound(dates.begin(), dates.end(), p.end);
  if (first >= last)
    throw std::invalid_argument("slice_period: period '" + p.name +
                                "' does not intersect the series");
  const auto lo = static_cast<std::size_t>(first - dates.begin());
  const auto hi = static_cast<std::size_t>(last - dates.begin());
  std::vector<double> values(r.values().begin() + lo, r.values().begin() + hi);
  std::vector<Date> sub(first, last);
  return ReturnSeries(std::move(values), std::move(sub), r.label());
}

ReturnSeries window_extrema(const ReturnSeries& r, std::size_t window, ExtremumMode mode) {
  if (window < 1) throw std::invalid_argument("window_extrema: window must be >= 1");
  if (r.size() < window) throw std::invalid_argument("window_extrema: series shorter than window");
  const std::size_t n = r.size() / window;
  std::vector<double> values(n);
  std::vector<Date> dates;
  if (r.has_dates()) dates.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto begin = r.values().begin() + static_cast<std::ptrdiff_t>(j * window);
    auto end = begin + static_cast<std::ptrdiff_t>(window);
    values[j] = mode == ExtremumMode::max ? *std::max_element(begin, end)
                                          : *std::min_element(begin, end);
    if (r.has_dates()) dates[j] = r.dates()[(j + 1) * window - 1];
  }
  return ReturnSeries(std::move(values), std::move(dates), r.label());
}

}  // namespace mfdfa
