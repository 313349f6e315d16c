#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Legislature-size data: strict CSV ingestion, the log-log seat regression,
// and the fitted predictor.

namespace epicon {

struct LegislatureRecord {
  std::string country;
  std::uint64_t population = 0;
  std::uint64_t seats = 0;  // both chambers combined where two exist
};

namespace detail {

inline std::uint64_t parsePositiveInt(std::string_view s, bool& ok) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  ok = ec == std::errc() && p == end && !s.empty() && v > 0;
  return v;
}

}  // namespace detail

// Reads `country,population,seats` rows. The whole file is validated before
// anything is returned: every offending row is reported in one error, so a
// bad snapshot surfaces all of its problems at once.
inline std::vector<LegislatureRecord> loadRecords(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("legislature csv: empty input, expected a header");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "country,population,seats") {
    throw std::runtime_error(
        "legislature csv: header must be exactly 'country,population,seats'");
  }

  std::vector<LegislatureRecord> records;
  std::vector<std::string> problems;
  std::size_t rowNo = 1;
  while (std::getline(in, line)) {
    ++rowNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto complain = [&](const std::string& what) {
      problems.push_back("row " + std::to_string(rowNo) + ": " + what);
    };

    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos
                                            : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos ||
        line.find(',', c2 + 1) != std::string::npos) {
      complain("expected exactly 3 comma-separated fields");
      continue;
    }
    LegislatureRecord rec;
    rec.country = line.substr(0, c1);
    const std::string_view popText =
        std::string_view(line).substr(c1 + 1, c2 - c1 - 1);
    const std::string_view seatText = std::string_view(line).substr(c2 + 1);

    bool okPop = false;
    bool okSeats = false;
    rec.population = detail::parsePositiveInt(popText, okPop);
    rec.seats = detail::parsePositiveInt(seatText, okSeats);
    if (rec.country.empty()) {
      complain("empty country name");
    } else if (!okPop) {
      complain("population is not a positive integer");
    } else if (!okSeats) {
      complain("seats is not a positive integer");
    } else if (rec.population < rec.seats) {
      complain("seats exceed population");
    } else {
      records.push_back(std::move(rec));
    }
  }

  if (!problems.empty()) {
    std::string msg = "legislature csv: " + std::to_string(problems.size()) +
                      " bad row(s)";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::runtime_error(msg);
  }
  if (records.empty()) {
    throw std::runtime_error("legislature csv: no records");
  }
  return records;
}

inline std::vector<LegislatureRecord> loadRecords(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("legislature csv: cannot open '" + path + "'");
  }
  return loadRecords(in);
}

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;  // natural-log scale
  double rSquared = 0.0;
  std::size_t nPoints = 0;
};

// Ordinary least squares of ln(seats) on ln(population). A response with no
// variance is a perfect fit of the constant law, so its R^2 is 1.
inline RegressionResult loglogRegression(
    const std::vector<LegislatureRecord>& records) {
  const std::size_t n = records.size();
  if (n < 2) {
    throw std::invalid_argument("regression: needs at least 2 records");
  }
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  double xBar = 0.0;
  double yBar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(static_cast<double>(records[i].population));
    ys[i] = std::log(static_cast<double>(records[i].seats));
    xBar += xs[i];
    yBar += ys[i];
  }
  xBar /= static_cast<double>(n);
  yBar /= static_cast<double>(n);

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xBar) * (xs[i] - xBar);
    sxy += (xs[i] - xBar) * (ys[i] - yBar);
    syy += (ys[i] - yBar) * (ys[i] - yBar);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("regression: all populations identical");
  }

  RegressionResult out;
  out.slope = sxy / sxx;
  out.intercept = yBar - out.slope * xBar;
  out.nPoints = n;
  if (syy > 0.0) {
    double ssRes = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ys[i] - (out.intercept + out.slope * xs[i]);
      ssRes += r * r;
    }
    out.rSquared = std::clamp(1.0 - ssRes / syy, 0.0, 1.0);
  } else {
    out.rSquared = 1.0;
  }
  return out;
}

// Applies the fitted law: round(e^intercept * population^slope), at least 1.
inline std::uint64_t predictSize(std::uint64_t population,
                                 const RegressionResult& reg) {
  if (population < 1) {
    throw std::invalid_argument("predictSize: requires population >= 1");
  }
  const double raw = std::exp(
      reg.intercept + reg.slope * std::log(static_cast<double>(population)));
  if (raw < 1.0) return 1;
  return static_cast<std::uint64_t>(std::llround(raw));
}

}  // namespace epicon
