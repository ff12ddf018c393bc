#pragma once

// UCI bike-sharing hourly file parser and construction of the Saturday
// dataset: 24-hour temperature curves (linearly interpolated onto the
// analysis grid) paired with log daily-mean rental counts.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fsfir/errors.hpp"
#include "fsfir/funcspace.hpp"

namespace fsfir {

struct HourRecord {
    std::string date;  // YYYY-MM-DD
    int hour = 0;      // 0..23
    int weekday = 0;   // 0..6, 6 = Saturday in the UCI encoding
    double temp_normalized = 0.0;
    long count = 0;
};

struct IngestReport {
    std::vector<std::pair<int, std::string>> rejected_rows;     // (row number, reason)
    std::vector<std::pair<std::string, std::string>> excluded_days;  // (date, reason)
};

constexpr int kSaturday = 6;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline bool parse_long(const std::string& s, long& out) {
    try {
        size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

inline bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

}  // namespace detail

inline std::vector<HourRecord> parse_bike_csv(const std::string& path, IngestReport* report = nullptr) {
    std::ifstream in(path);
    if (!in) throw IoError("parse_bike_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("parse_bike_csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = detail::split_csv_line(line);
    auto col = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaError("parse_bike_csv: missing required column " + name);
        return static_cast<int>(it - header.begin());
    };
    const int c_date = col("dteday");
    const int c_hr = col("hr");
    const int c_weekday = col("weekday");
    const int c_temp = col("temp");
    const int c_cnt = col("cnt");
    const int needed = std::max({c_date, c_hr, c_weekday, c_temp, c_cnt});

    std::vector<HourRecord> records;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        auto reject = [&](const std::string& why) {
            if (report) report->rejected_rows.emplace_back(row, why);
        };
        if (static_cast<int>(f.size()) <= needed) {
            reject("too few fields");
            continue;
        }
        HourRecord r;
        long hr = 0, wd = 0;
        if (!detail::parse_long(f[static_cast<size_t>(c_hr)], hr) || hr < 0 || hr > 23) {
            reject("bad hr field");
            continue;
        }
        if (!detail::parse_long(f[static_cast<size_t>(c_weekday)], wd) || wd < 0 || wd > 6) {
            reject("bad weekday field");
            continue;
        }
        if (!detail::parse_double(f[static_cast<size_t>(c_temp)], r.temp_normalized)) {
            reject("bad temp field");
            continue;
        }
        if (!detail::parse_long(f[static_cast<size_t>(c_cnt)], r.count) || r.count < 0) {
            reject("bad cnt field");
            continue;
        }
        r.date = f[static_cast<size_t>(c_date)];
        r.hour = static_cast<int>(hr);
        r.weekday = static_cast<int>(wd);
        records.push_back(std::move(r));
    }
    return records;
}

struct SaturdayDataset {
    std::vector<Curve> X;   // temperature curves
    Eigen::MatrixXd Y;      // n x 1 log daily-mean counts
    std::vector<std::string> dates;
    IngestReport report;
};

/// Linear interpolation of the 24 hourly values (at t_h = h/23) onto a grid.
inline Eigen::VectorXd interpolate_hours(const Eigen::VectorXd& hourly, const GridPtr& grid) {
    Eigen::VectorXd out(grid->n_points());
    for (int i = 0; i < out.size(); ++i) {
        const double u = grid->points(i) * 23.0;
        const int lo = std::min(static_cast<int>(std::floor(u)), 22);
        const double frac = u - lo;
        out(i) = (1.0 - frac) * hourly(lo) + frac * hourly(lo + 1);
    }
    return out;
}

/// Saturdays with all 24 hours present and a positive daily mean count.
inline SaturdayDataset build_saturday_dataset(const std::vector<HourRecord>& records,
                                              const GridPtr& grid) {
    if (records.empty()) throw InvalidArgument("build_saturday_dataset: no records");
    std::map<std::string, std::vector<const HourRecord*>> by_date;
    for (const HourRecord& r : records)
        if (r.weekday == kSaturday) by_date[r.date].push_back(&r);

    SaturdayDataset ds;
    std::vector<double> responses;
    for (const auto& [date, recs] : by_date) {
        std::vector<const HourRecord*> hours(24, nullptr);
        bool duplicate = false;
        for (const HourRecord* r : recs) {
            if (hours[static_cast<size_t>(r->hour)]) duplicate = true;
            hours[static_cast<size_t>(r->hour)] = r;
        }
        if (duplicate) {
            ds.report.excluded_days.emplace_back(date, "duplicate hour rows");
            continue;
        }
        int missing = 0;
        for (const auto* h : hours)
            if (!h) ++missing;
        if (missing > 0) {
            std::string detail = "missing " + std::to_string(missing) + " hour(s):";
            for (int h = 0; h < 24; ++h)
                if (!hours[static_cast<size_t>(h)]) detail += " " + std::to_string(h);
            ds.report.excluded_days.emplace_back(date, detail);
            continue;
        }
        Eigen::VectorXd temps(24);
        double total = 0.0;
        for (int h = 0; h < 24; ++h) {
            temps(h) = hours[static_cast<size_t>(h)]->temp_normalized;
            total += static_cast<double>(hours[static_cast<size_t>(h)]->count);
        }
        if (total <= 0.0) {
            ds.report.excluded_days.emplace_back(date, "zero total count");
            continue;
        }
        ds.X.emplace_back(grid, interpolate_hours(temps, grid));
        responses.push_back(std::log(total / 24.0));
        ds.dates.push_back(date);
    }
    if (ds.X.empty()) throw EmptyDataset("build_saturday_dataset: no retained Saturdays");
    ds.Y.resize(static_cast<int>(responses.size()), 1);
    for (size_t i = 0; i < responses.size(); ++i) ds.Y(static_cast<int>(i), 0) = responses[i];
    return ds;
}

}  // namespace fsfir
