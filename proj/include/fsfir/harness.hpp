#pragma once

// Experiment harness behind the CLI: parameter sweeps over the synthetic
// models, the bike-data downstream-MSE evaluation, and the convergence
// trend study. Replicates run in parallel but are collected in replicate
// order, and every replicate draws from its own hashed substream, so
// emitted bytes depend only on (config, seed).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsfir/errors.hpp"
#include "fsfir/fpca.hpp"
#include "fsfir/funcspace.hpp"
#include "fsfir/ingest.hpp"
#include "fsfir/metrics.hpp"
#include "fsfir/regress.hpp"
#include "fsfir/rng.hpp"
#include "fsfir/sdr.hpp"
#include "fsfir/synth.hpp"

namespace fsfir {

struct ExperimentConfig {
    std::string command;           // synth-sweep | bike-eval | convergence
    std::string model = "M1";
    std::string method = "fsfir";
    int n = 2000;
    int reps = 10;
    uint64_t seed = 7;
    std::vector<int> m_grid;       // defaults below
    std::vector<double> rho_grid;
    std::vector<int> d_grid = {1, 2, 3, 4, 5};
    std::vector<int> n_list = {500, 2000, 8000};
    int H = 10;
    int d = 0;                     // 0 = model default
    double noise_var = 0.25;
    int grid_points = 256;
    int block_size = kDefaultMddBlock;
    int basis_size = 100;
    double gamma = 0.1;            // m-rule exponent parameters
    double alpha1 = 1.1;
    double alpha2 = 2.0;
    double t = 1.0;                // m-rule constant
    int train_size = 90;           // bike-eval split
    int threads = 1;
    std::string out;
    std::string data;              // bike hour.csv path
};

inline std::vector<int> default_m_grid() {
    std::vector<int> g;
    for (int m = 2; m <= 14; ++m) g.push_back(m);
    g.insert(g.end(), {20, 30, 40});
    return g;
}

inline std::vector<double> default_rho_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 10; ++k) g.push_back(0.01 * k);
    for (int k = 15; k <= 30; k += 5) g.push_back(0.01 * k);
    for (int k = 40; k <= 150; k += 10) g.push_back(0.01 * k);
    return g;
}

/// Truncation rule m = round(t * n^{(1-2 gamma)/(2 alpha1 + 2 alpha2 + 1)}).
inline int m_rule(int n, double gamma, double alpha1, double alpha2, double t, int d_min) {
    const double expo = (1.0 - 2.0 * gamma) / (2.0 * alpha1 + 2.0 * alpha2 + 1.0);
    const int m = static_cast<int>(std::llround(t * std::pow(static_cast<double>(n), expo)));
    return std::max(m, d_min);
}

// ---------------------------------------------------------------------------
// Result tables
// ---------------------------------------------------------------------------

struct SweepRow {
    double grid_value = 0.0;
    int rep = 0;
    double error = 0.0;
    std::string status = "ok";  // "ok" or an error tag; error field blank otherwise
};

struct SweepSummary {
    double grid_value = 0.0;
    double mean_error = 0.0;
    double std_error = 0.0;
    int n_ok = 0;
    int n_failed = 0;
    bool is_min = false;
};

struct SweepResult {
    std::string model, method;
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summary;
};

struct TrendRow {
    int n = 0, m = 0, rep = 0;
    double error = 0.0;
    std::string status = "ok";
};

struct TrendSummary {
    int n = 0, m = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    int n_ok = 0, n_failed = 0;
};

struct TrendResult {
    std::string model;
    std::vector<TrendRow> rows;
    std::vector<TrendSummary> summary;
    bool strictly_decreasing = false;
    bool trend_defined = false;  // false when a single n was requested
};

struct BikeRow {
    int d = 0, m = 0, rep = 0;
    double mse = 0.0;
    std::string status = "ok";
};

struct BikeSummary {
    int d = 0, m = 0;
    bool blank = false;  // infeasible cell (m < d)
    double mean_mse = 0.0;
    double std_error = 0.0;
    int n_ok = 0, n_failed = 0;
};

struct BikeResult {
    std::vector<BikeRow> rows;
    std::vector<BikeSummary> summary;
    int retained_saturdays = 0;
    IngestReport report;
};

namespace detail {

inline void run_indexed(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

inline std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

template <typename Row>
void summarize(const std::vector<Row>& rows, double grid_value, SweepSummary& out) {
    std::vector<double> ok;
    int failed = 0;
    for (const Row& r : rows) {
        if (r.grid_value == grid_value) {
            if (r.status == "ok") ok.push_back(r.error);
            else ++failed;
        }
    }
    auto [mean, se] = mean_and_se(ok);
    out.grid_value = grid_value;
    out.mean_error = mean;
    out.std_error = se;
    out.n_ok = static_cast<int>(ok.size());
    out.n_failed = failed;
}

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth-sweep
// ---------------------------------------------------------------------------

inline SweepResult synth_sweep(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw InvalidArgument("synth_sweep: reps must be >= 1");
    const bool is_rho = cfg.method == "rfsir";
    const std::vector<int> m_grid = cfg.m_grid.empty() ? default_m_grid() : cfg.m_grid;
    const std::vector<double> rho_grid = cfg.rho_grid.empty() ? default_rho_grid() : cfg.rho_grid;
    const size_t grid_size = is_rho ? rho_grid.size() : m_grid.size();
    if (grid_size == 0) throw InvalidArgument("synth_sweep: empty parameter grid");
    if (cfg.method != "fsfir" && cfg.method != "tfsir" && !is_rho)
        throw InvalidArgument("synth_sweep: unknown method " + cfg.method);

    const GridPtr grid = make_grid(cfg.grid_points);
    const int d = cfg.d > 0 ? cfg.d : model_dimension(cfg.model);
    const BasisFamily coord_basis = model_coordinate_basis(cfg.model);

    std::vector<std::vector<SweepRow>> per_rep(static_cast<size_t>(cfg.reps));
    detail::run_indexed(cfg.reps, cfg.threads, [&](int rep) {
        const uint64_t sub = Rng::substream(cfg.seed, static_cast<uint64_t>(rep)).next_u64();
        const SynthDataset ds = gen_model(cfg.model, cfg.n, sub, cfg.noise_var, grid);
        const ProjectionMatrix truth_proj = orthonormalize_projection(ds.truth, coord_basis);
        auto& rows = per_rep[static_cast<size_t>(rep)];

        auto record = [&](double gv, const std::function<SdrModel()>& fit) {
            SweepRow row{gv, rep, 0.0, "ok"};
            try {
                const SdrModel model = fit();
                row.error = subspace_distance(
                    truth_proj, orthonormalize_projection(model.directions, coord_basis));
            } catch (const Error& e) {
                row.status = e.what();
            }
            rows.push_back(std::move(row));
        };

        if (cfg.method == "fsfir") {
            const int m_max = *std::max_element(m_grid.begin(), m_grid.end());
            std::optional<FsfirSweep> sweep;
            try {
                sweep = FsfirSweep::prepare(ds.X, ds.Y, m_max, cfg.block_size);
            } catch (const Error&) {
                sweep.reset();  // fall back to per-m fits below
            }
            for (int m : m_grid)
                record(m, [&] { return sweep ? sweep->fit(m, d)
                                             : fsfir_fit(ds.X, ds.Y, m, d, cfg.block_size); });
        } else if (cfg.method == "tfsir") {
            const int m_max = *std::max_element(m_grid.begin(), m_grid.end());
            std::optional<SliceSweep> sweep;
            try {
                sweep = SliceSweep::prepare(ds.X, ds.Y, m_max, cfg.H);
            } catch (const Error&) {
                sweep.reset();
            }
            for (int m : m_grid)
                record(m, [&] { return sweep ? sweep->fit_truncated(m, d)
                                             : tfsir_fit(ds.X, ds.Y, m, cfg.H, d); });
        } else {
            auto [centered, mean] = center(ds.X);
            const int rank = numerical_rank(sample_covariance(centered));
            const int basis = std::min({cfg.basis_size, rank, cfg.n - 1});
            const SliceSweep sweep = SliceSweep::prepare(ds.X, ds.Y, basis, cfg.H);
            for (double rho : rho_grid) record(rho, [&] { return sweep.fit_regularized(rho, d); });
        }
    });

    SweepResult result;
    result.model = cfg.model;
    result.method = cfg.method;
    for (auto& rows : per_rep)
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());

    for (size_t g = 0; g < grid_size; ++g) {
        SweepSummary s;
        detail::summarize(result.rows, is_rho ? rho_grid[g] : double(m_grid[g]), s);
        result.summary.push_back(s);
    }
    int best = -1;
    for (size_t g = 0; g < result.summary.size(); ++g) {
        if (result.summary[g].n_ok == 0) continue;
        if (best < 0 || result.summary[g].mean_error < result.summary[static_cast<size_t>(best)].mean_error)
            best = static_cast<int>(g);
    }
    if (best >= 0) result.summary[static_cast<size_t>(best)].is_min = true;
    return result;
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

inline TrendResult convergence_study(const ExperimentConfig& cfg) {
    if (cfg.n_list.empty()) throw InvalidArgument("convergence_study: empty n list");
    for (size_t i = 1; i < cfg.n_list.size(); ++i)
        if (cfg.n_list[i] <= cfg.n_list[i - 1])
            throw InvalidArgument("convergence_study: n list must be ascending");

    const GridPtr grid = make_grid(cfg.grid_points);
    const int d = cfg.d > 0 ? cfg.d : model_dimension(cfg.model);
    const BasisFamily coord_basis = model_coordinate_basis(cfg.model);

    TrendResult result;
    result.model = cfg.model;
    for (size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        const int n = cfg.n_list[ni];
        const int m = m_rule(n, cfg.gamma, cfg.alpha1, cfg.alpha2, cfg.t, d);
        std::vector<TrendRow> rows(static_cast<size_t>(cfg.reps));
        detail::run_indexed(cfg.reps, cfg.threads, [&](int rep) {
            // substream keyed by (n index, rep) so each n gets fresh draws
            const uint64_t sub =
                Rng::substream(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (ni + 1)),
                               static_cast<uint64_t>(rep))
                    .next_u64();
            const SynthDataset ds = gen_model(cfg.model, n, sub, cfg.noise_var, grid);
            TrendRow row{n, m, rep, 0.0, "ok"};
            try {
                const SdrModel model = fsfir_fit(ds.X, ds.Y, m, d, cfg.block_size);
                row.error = subspace_distance(ds.truth, model.directions, coord_basis);
            } catch (const Error& e) {
                row.status = e.what();
            }
            rows[static_cast<size_t>(rep)] = std::move(row);
        });
        std::vector<double> ok;
        int failed = 0;
        for (const TrendRow& r : rows) {
            if (r.status == "ok") ok.push_back(r.error);
            else ++failed;
        }
        auto [mean, se] = detail::mean_and_se(ok);
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        result.summary.push_back({n, m, mean, se, static_cast<int>(ok.size()), failed});
    }
    result.trend_defined = result.summary.size() > 1;
    result.strictly_decreasing = result.trend_defined;
    for (size_t i = 1; i < result.summary.size(); ++i)
        if (!(result.summary[i].mean_error < result.summary[i - 1].mean_error))
            result.strictly_decreasing = false;
    return result;
}

// ---------------------------------------------------------------------------
// bike-eval
// ---------------------------------------------------------------------------

inline BikeResult bike_eval(const ExperimentConfig& cfg) {
    IngestReport parse_report;
    const std::vector<HourRecord> records = parse_bike_csv(cfg.data, &parse_report);
    const GridPtr grid = make_grid(cfg.grid_points);
    SaturdayDataset ds = build_saturday_dataset(records, grid);
    ds.report.rejected_rows = parse_report.rejected_rows;

    const int n = static_cast<int>(ds.X.size());
    if (cfg.train_size >= n)
        throw InvalidArgument("bike_eval: train size must leave a nonempty test set");
    const std::vector<int> m_grid = cfg.m_grid.empty()
                                        ? std::vector<int>{1, 3, 5, 7, 9, 11, 13}
                                        : cfg.m_grid;

    std::vector<std::vector<BikeRow>> per_rep(static_cast<size_t>(cfg.reps));
    detail::run_indexed(cfg.reps, cfg.threads, [&](int rep) {
        Rng rng = Rng::substream(cfg.seed, static_cast<uint64_t>(rep));
        std::vector<int> idx(static_cast<size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(idx[static_cast<size_t>(i)],
                      idx[static_cast<size_t>(rng.below(static_cast<uint64_t>(i + 1)))]);

        std::vector<Curve> x_train, x_test;
        Eigen::VectorXd y_train(cfg.train_size), y_test(n - cfg.train_size);
        Eigen::MatrixXd y_train_mat(cfg.train_size, 1);
        for (int i = 0; i < n; ++i) {
            const int s = idx[static_cast<size_t>(i)];
            if (i < cfg.train_size) {
                x_train.push_back(ds.X[static_cast<size_t>(s)]);
                y_train(i) = ds.Y(s, 0);
                y_train_mat(i, 0) = ds.Y(s, 0);
            } else {
                x_test.push_back(ds.X[static_cast<size_t>(s)]);
                y_test(i - cfg.train_size) = ds.Y(s, 0);
            }
        }

        const int m_max = *std::max_element(m_grid.begin(), m_grid.end());
        std::optional<FsfirSweep> sweep;
        std::string prepare_status = "ok";
        try {
            auto [centered, mean] = center(x_train);
            const int rank = numerical_rank(sample_covariance(centered));
            sweep = FsfirSweep::prepare(x_train, y_train_mat, std::min(m_max, rank),
                                        cfg.block_size);
        } catch (const Error& e) {
            prepare_status = e.what();
        }

        auto& rows = per_rep[static_cast<size_t>(rep)];
        for (int d : cfg.d_grid) {
            for (int m : m_grid) {
                if (m < d) continue;  // infeasible cell
                BikeRow row{d, m, rep, 0.0, "ok"};
                try {
                    if (!sweep || m > sweep->eig.size()) throw RankDeficient(prepare_status);
                    const SdrModel model = sweep->fit(m, d);
                    const GprModel gpr = gpr_fit(reduce(model, x_train), y_train);
                    const Eigen::VectorXd pred = gpr_predict(gpr, reduce(model, x_test));
                    row.mse = (pred - y_test).squaredNorm() / static_cast<double>(y_test.size());
                } catch (const Error& e) {
                    row.status = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    });

    BikeResult result;
    result.retained_saturdays = n;
    result.report = ds.report;
    for (auto& rows : per_rep)
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    for (int d : cfg.d_grid) {
        for (int m : m_grid) {
            BikeSummary s;
            s.d = d;
            s.m = m;
            if (m < d) {
                s.blank = true;
                result.summary.push_back(s);
                continue;
            }
            std::vector<double> ok;
            for (const BikeRow& r : result.rows)
                if (r.d == d && r.m == m && r.status == "ok") ok.push_back(r.mse);
            int failed = 0;
            for (const BikeRow& r : result.rows)
                if (r.d == d && r.m == m && r.status != "ok") ++failed;
            auto [mean, se] = detail::mean_and_se(ok);
            s.mean_mse = mean;
            s.std_error = se;
            s.n_ok = static_cast<int>(ok.size());
            s.n_failed = failed;
            result.summary.push_back(s);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV / JSON serialization
// ---------------------------------------------------------------------------

inline std::string to_csv(const SweepResult& r) {
    std::string out = "model,method,grid_value,rep,error,status\n";
    for (const SweepRow& row : r.rows) {
        out += r.model + "," + r.method + "," + detail::fmt_double(row.grid_value) + "," +
               std::to_string(row.rep) + "," +
               (row.status == "ok" ? detail::fmt_double(row.error) : "") + "," + row.status +
               "\n";
    }
    return out;
}

inline std::string summary_csv(const SweepResult& r) {
    std::string out = "model,method,grid_value,mean_error,std_error,n_ok,n_failed,is_min\n";
    for (const SweepSummary& s : r.summary) {
        out += r.model + "," + r.method + "," + detail::fmt_double(s.grid_value) + "," +
               detail::fmt_double(s.mean_error) + "," + detail::fmt_double(s.std_error) + "," +
               std::to_string(s.n_ok) + "," + std::to_string(s.n_failed) + "," +
               (s.is_min ? "1" : "0") + "\n";
    }
    return out;
}

inline std::string to_csv(const TrendResult& r) {
    std::string out = "model,n,m,rep,error,status\n";
    for (const TrendRow& row : r.rows) {
        out += r.model + "," + std::to_string(row.n) + "," + std::to_string(row.m) + "," +
               std::to_string(row.rep) + "," +
               (row.status == "ok" ? detail::fmt_double(row.error) : "") + "," + row.status +
               "\n";
    }
    return out;
}

inline std::string summary_csv(const TrendResult& r) {
    std::string out = "model,n,m,mean_error,std_error,n_ok,n_failed,decreasing_from_prev\n";
    for (size_t i = 0; i < r.summary.size(); ++i) {
        const TrendSummary& s = r.summary[i];
        std::string dec =
            i == 0 ? "" : (s.mean_error < r.summary[i - 1].mean_error ? "1" : "0");
        out += r.model + "," + std::to_string(s.n) + "," + std::to_string(s.m) + "," +
               detail::fmt_double(s.mean_error) + "," + detail::fmt_double(s.std_error) + "," +
               std::to_string(s.n_ok) + "," + std::to_string(s.n_failed) + "," + dec + "\n";
    }
    return out;
}

inline std::string to_csv(const BikeResult& r) {
    std::string out = "d,m,rep,mse,status\n";
    for (const BikeRow& row : r.rows) {
        out += std::to_string(row.d) + "," + std::to_string(row.m) + "," +
               std::to_string(row.rep) + "," +
               (row.status == "ok" ? detail::fmt_double(row.mse) : "") + "," + row.status + "\n";
    }
    return out;
}

inline std::string summary_csv(const BikeResult& r) {
    std::string out = "d,m,mean_mse,std_error,n_ok,n_failed\n";
    for (const BikeSummary& s : r.summary) {
        out += std::to_string(s.d) + "," + std::to_string(s.m) + ",";
        if (s.blank) {
            out += ",,,\n";
        } else {
            out += detail::fmt_double(s.mean_mse) + "," + detail::fmt_double(s.std_error) + "," +
                   std::to_string(s.n_ok) + "," + std::to_string(s.n_failed) + "\n";
        }
    }
    return out;
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["model"] = cfg.model;
    j["method"] = cfg.method;
    j["n"] = cfg.n;
    j["reps"] = cfg.reps;
    j["seed"] = cfg.seed;
    j["m_grid"] = cfg.m_grid;
    j["rho_grid"] = cfg.rho_grid;
    j["d_grid"] = cfg.d_grid;
    j["n_list"] = cfg.n_list;
    j["H"] = cfg.H;
    j["d"] = cfg.d;
    j["noise_var"] = cfg.noise_var;
    j["grid_points"] = cfg.grid_points;
    j["block_size"] = cfg.block_size;
    j["basis_size"] = cfg.basis_size;
    j["gamma"] = cfg.gamma;
    j["alpha1"] = cfg.alpha1;
    j["alpha2"] = cfg.alpha2;
    j["t"] = cfg.t;
    j["train_size"] = cfg.train_size;
    j["out"] = cfg.out;
    j["data"] = cfg.data;
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path);
    f << content;
}

/// Write <out>, <out>.summary.csv and the <out>.config.json sidecar.
template <typename Result>
void write_outputs(const ExperimentConfig& cfg, const Result& result) {
    if (cfg.out.empty()) throw InvalidArgument("no output path given");
    write_file(cfg.out, to_csv(result));
    write_file(cfg.out + ".summary.csv", summary_csv(result));
    write_file(cfg.out + ".config.json", config_json(cfg).dump(2) + "\n");
}

}  // namespace fsfir
