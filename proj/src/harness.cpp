#include "betacop/harness.hpp"

#include "betacop/empirical.hpp"
#include "betacop/inference.hpp"
#include "betacop/rank_stats.hpp"
#include "betacop/resampling.hpp"
#include "betacop/special.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace betacop {

ExperimentKind experiment_from_string(const std::string& s) {
    if (s == "covariance") return ExperimentKind::Covariance;
    if (s == "kendall_ci") return ExperimentKind::KendallCI;
    if (s == "spearman_ci") return ExperimentKind::SpearmanCI;
    if (s == "param_ci") return ExperimentKind::ParamCI;
    if (s == "symmetry_size") return ExperimentKind::SymmetrySize;
    if (s == "symmetry_power") return ExperimentKind::SymmetryPower;
    throw ConfigError("unknown experiment type: " + s);
}

std::string experiment_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Covariance: return "covariance";
        case ExperimentKind::KendallCI: return "kendall_ci";
        case ExperimentKind::SpearmanCI: return "spearman_ci";
        case ExperimentKind::ParamCI: return "param_ci";
        case ExperimentKind::SymmetrySize: return "symmetry_size";
        case ExperimentKind::SymmetryPower: return "symmetry_power";
    }
    return "?";
}

double ExperimentConfig::resolved_theta() const {
    if (theta) return *theta;
    if (tau) return theta_of_tau(family, *tau);
    if (rho) return theta_of_rho(family, *rho);
    throw ConfigError("one of theta/tau/rho must be set");
}

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for '" + key + "': " + v);
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for '" + key + "': " + v);
    }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.runs = 1000;
    cfg.boot = 1000;
    std::string line;
    int lineno = 0;
    bool have_type = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) +
                                                      ": malformed section header");
            continue;  // sections are organizational only
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "type") {
            cfg.kind = experiment_from_string(val);
            have_type = true;
        } else if (key == "family") {
            try {
                cfg.family = family_from_string(val);
            } catch (const std::domain_error& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "theta")
            cfg.theta = parse_double(key, val);
        else if (key == "tau")
            cfg.tau = parse_double(key, val);
        else if (key == "rho")
            cfg.rho = parse_double(key, val);
        else if (key == "delta")
            cfg.delta = parse_double(key, val);
        else if (key == "n") {
            cfg.n_values.clear();
            for (const auto& tok : split_list(val))
                cfg.n_values.push_back(static_cast<int>(parse_long(key, tok)));
        } else if (key == "runs")
            cfg.runs = static_cast<int>(parse_long(key, val));
        else if (key == "boot")
            cfg.boot = static_cast<int>(parse_long(key, val));
        else if (key == "level")
            cfg.level = parse_double(key, val);
        else if (key == "alpha")
            cfg.alpha = parse_double(key, val);
        else if (key == "schemes")
            cfg.schemes = split_list(val);
        else if (key == "statistics")
            cfg.statistics = split_list(val);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(parse_long(key, val));
        else if (key == "threads")
            cfg.threads = static_cast<int>(parse_long(key, val));
        else if (key == "truth") {
            cfg.truth.clear();
            for (const auto& tok : split_list(val)) cfg.truth.push_back(parse_double(key, tok));
        } else
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!have_type) throw ConfigError("config missing 'type'");
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse_config(in);
}

namespace {

const std::vector<std::string>& allowed_schemes(ExperimentKind k) {
    static const std::vector<std::string> ci_kendall{"asymp", "boot", "beta"};
    static const std::vector<std::string> ci_spearman{"boot", "beta"};
    static const std::vector<std::string> ci_param{"asymp", "boot", "beta", "param"};
    static const std::vector<std::string> cov{"pdm", "beta", "betasmooth"};
    static const std::vector<std::string> sym{"boot", "beta"};
    switch (k) {
        case ExperimentKind::KendallCI: return ci_kendall;
        case ExperimentKind::SpearmanCI: return ci_spearman;
        case ExperimentKind::ParamCI: return ci_param;
        case ExperimentKind::Covariance: return cov;
        default: return sym;
    }
}

// stable scheme index for seed streams (independent of the requested subset)
int scheme_stream_index(const std::string& s) {
    if (s == "asymp") return 0;
    if (s == "boot") return 1;
    if (s == "beta") return 2;
    if (s == "param") return 3;
    if (s == "pdm") return 4;
    if (s == "betasmooth") return 5;
    return 15;
}

SymmetryStatistic statistic_from_string(const std::string& s) {
    if (s == "Sn") return SymmetryStatistic::Sn;
    if (s == "Rn") return SymmetryStatistic::Rn;
    if (s == "SnBeta") return SymmetryStatistic::SnBeta;
    if (s == "RnBeta") return SymmetryStatistic::RnBeta;
    throw ConfigError("unknown symmetry statistic: " + s);
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw ConfigError("runs must be >= 1");
    if (cfg.boot < 1) throw ConfigError("boot must be >= 1");
    if (cfg.n_values.empty()) throw ConfigError("n must list at least one sample size");
    for (int n : cfg.n_values)
        if (n < 3) throw ConfigError("n values must be >= 3");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level outside (0,1)");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha outside (0,1)");
    const int picks = (cfg.theta ? 1 : 0) + (cfg.tau ? 1 : 0) + (cfg.rho ? 1 : 0);
    if (picks != 1) throw ConfigError("exactly one of theta/tau/rho must be set");
    if (cfg.schemes.empty()) throw ConfigError("schemes must not be empty");
    const auto& allowed = allowed_schemes(cfg.kind);
    for (const auto& s : cfg.schemes)
        if (std::find(allowed.begin(), allowed.end(), s) == allowed.end())
            throw ConfigError("scheme '" + s + "' not valid for experiment " +
                              experiment_name(cfg.kind));
    const bool symmetry =
        cfg.kind == ExperimentKind::SymmetrySize || cfg.kind == ExperimentKind::SymmetryPower;
    if (symmetry) {
        if (cfg.statistics.empty()) throw ConfigError("symmetry experiments need 'statistics'");
        for (const auto& s : cfg.statistics) statistic_from_string(s);
    } else if (!cfg.statistics.empty()) {
        throw ConfigError("'statistics' only applies to symmetry experiments");
    }
    if (cfg.kind == ExperimentKind::SymmetryPower && !cfg.delta)
        throw ConfigError("symmetry_power needs 'delta'");
    if (cfg.kind != ExperimentKind::SymmetryPower && cfg.delta)
        throw ConfigError("'delta' only applies to symmetry_power");
    if (!cfg.truth.empty()) {
        if (cfg.kind != ExperimentKind::Covariance)
            throw ConfigError("'truth' only applies to the covariance experiment");
        if (cfg.truth.size() != 10)
            throw ConfigError("'truth' needs the 10 upper-triangle covariance values");
    }
    try {
        const double th = cfg.resolved_theta();
        check_model(CopulaModel{cfg.family, th, 2});
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    if (cfg.delta && !(*cfg.delta >= 0.0 && *cfg.delta <= 1.0))
        throw ConfigError("delta outside [0,1]");
}

// ---------------------------------------------------------------------------
// experiment runner
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kDataStream = 0xDA7AULL;

enum class Agg { Proportion, Mean, MseTimes1e4 };

struct CellDef {
    std::string scheme;
    std::string metric;
    int stream_index = 0;  // scheme stream used for this cell
    Agg agg = Agg::Proportion;
};

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("BETACOP_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_runs(int total, int threads, const std::function<void(int)>& body,
                   const std::function<void(int)>& progress) {
    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex io_mutex;
    const int step = std::max(total / 100, 1);
    auto worker = [&]() {
        for (;;) {
            const int m = next.fetch_add(1);
            if (m >= total) return;
            body(m);
            const int d = done.fetch_add(1) + 1;
            if (progress && d % step == 0) {
                std::lock_guard<std::mutex> lock(io_mutex);
                progress(d);
            }
        }
    };
    const int nthreads = std::min(threads, total);
    if (nthreads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

struct RunContext {
    const ExperimentConfig& cfg;
    double theta = 0.0;
    double true_tau = 0.0;
    double true_rho = 0.0;
    std::vector<double> truth_cov;  // 10 upper-tri entries
    const IntegralTables* tables = nullptr;
    int n = 0;
};

Sample draw_data(const RunContext& ctx, Rng& rng) {
    const CopulaModel base{ctx.cfg.family, ctx.theta, 2};
    if (ctx.cfg.kind == ExperimentKind::SymmetryPower) {
        const KhoudrajiModel kh{base, *ctx.cfg.delta};
        return copula_sample(kh, static_cast<std::size_t>(ctx.n), rng);
    }
    return copula_sample(base, static_cast<std::size_t>(ctx.n), rng);
}

void record_ci(const ConfidenceInterval& ci, double truth, double* covered, double* length) {
    *covered = (ci.lower <= truth && truth <= ci.upper) ? 1.0 : 0.0;
    *length = ci.upper - ci.lower;
}

const double kFail = std::numeric_limits<double>::quiet_NaN();

// percentile CI of a replicate vector; cell failure when unreliable
bool percentile_ci(const Replicates& rep, std::size_t B, double level, double truth,
                   double* covered, double* length) {
    if (rep.values.size() < 20 || rep.failures * 10 > static_cast<int>(B)) return false;
    const ConfidenceInterval ci = ci_bootstrap_percentile(rep, 0.0, level);
    record_ci(ci, truth, covered, length);
    return true;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const double theta = cfg.resolved_theta();
    const int M = cfg.runs;
    const std::size_t B = static_cast<std::size_t>(cfg.boot);
    const int threads = resolve_threads(cfg.threads);
    const bool symmetry =
        cfg.kind == ExperimentKind::SymmetrySize || cfg.kind == ExperimentKind::SymmetryPower;

    RunContext ctx{cfg, 0.0, 0.0, 0.0, {}, nullptr, 0};
    ctx.theta = theta;
    if (cfg.kind == ExperimentKind::KendallCI) ctx.true_tau = tau_of_theta(cfg.family, theta);
    if (cfg.kind == ExperimentKind::SpearmanCI)
        ctx.true_rho = cfg.rho ? *cfg.rho : rho_of_theta(cfg.family, theta);
    if (cfg.kind == ExperimentKind::Covariance) {
        if (!cfg.truth.empty()) {
            ctx.truth_cov = cfg.truth;
        } else {
            const CopulaModel model{cfg.family, theta, 2};
            const auto grid = covariance_grid();
            for (std::size_t p = 0; p < grid.size(); ++p)
                for (std::size_t q = p; q < grid.size(); ++q)
                    ctx.truth_cov.push_back(limit_covariance(model, grid[p], grid[q]));
        }
    }

    // cell layout, identical for every n
    std::vector<CellDef> cells;
    for (const auto& scheme : cfg.schemes) {
        const int si = scheme_stream_index(scheme);
        switch (cfg.kind) {
            case ExperimentKind::KendallCI:
            case ExperimentKind::SpearmanCI:
            case ExperimentKind::ParamCI:
                cells.push_back({scheme, "coverage", si, Agg::Proportion});
                cells.push_back({scheme, "length", si, Agg::Mean});
                break;
            case ExperimentKind::Covariance:
                for (std::size_t p = 0; p < 4; ++p)
                    for (std::size_t q = p; q < 4; ++q)
                        cells.push_back({scheme,
                                         "mse1e4_p" + std::to_string(p + 1) + "p" +
                                             std::to_string(q + 1),
                                         si, Agg::MseTimes1e4});
                break;
            case ExperimentKind::SymmetrySize:
            case ExperimentKind::SymmetryPower:
                for (const auto& stat : cfg.statistics)
                    cells.push_back({scheme, "reject_" + stat, si, Agg::Proportion});
                break;
        }
    }
    const std::size_t ncells = cells.size();

    ExperimentReport report;
    const int total_runs = M * static_cast<int>(cfg.n_values.size());
    std::atomic<int> global_done{0};

    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
        ctx.n = cfg.n_values[ni];
        const std::size_t n = static_cast<std::size_t>(ctx.n);

        // shared read-only tables for the beta symmetry statistics
        std::optional<IntegralTables> tables;
        if (symmetry) {
            bool need_b = false, need_c = false;
            for (const auto& s : cfg.statistics) {
                const SymmetryStatistic st = statistic_from_string(s);
                need_b = need_b || st == SymmetryStatistic::RnBeta || st == SymmetryStatistic::SnBeta;
                need_c = need_c || st == SymmetryStatistic::SnBeta;
            }
            if (need_b) tables.emplace(n, need_c);
        }
        ctx.tables = tables ? &*tables : nullptr;

        std::vector<double> slots(static_cast<std::size_t>(M) * ncells, kFail);

        auto run_one = [&](int m) {
            const std::uint64_t g = static_cast<std::uint64_t>(ni) * static_cast<std::uint64_t>(M) +
                                    static_cast<std::uint64_t>(m);
            double* out = &slots[static_cast<std::size_t>(m) * ncells];
            Rng data_rng(Rng::derive(cfg.seed, {g, kDataStream}));
            Sample sample = draw_data(ctx, data_rng);
            RankMatrix ranks;
            try {
                ranks = compute_ranks(sample);
            } catch (const std::invalid_argument&) {
                return;  // tied sample (prob ~ 0): count run as failed everywhere
            }

            // point estimates shared by the schemes
            std::optional<KendallResult> kend;
            std::optional<PleResult> ple;
            if (cfg.kind == ExperimentKind::KendallCI) kend = kendall_tau(ranks);
            if (cfg.kind == ExperimentKind::ParamCI) {
                ple = pseudo_likelihood_estimate(ranks, cfg.family);
                if (ple->boundary) return;  // data fit failed: run fails for all schemes
            }

            std::size_t cell = 0;
            for (const auto& scheme : cfg.schemes) {
                const std::uint64_t sseed =
                    Rng::derive(cfg.seed, {g, static_cast<std::uint64_t>(scheme_stream_index(scheme))});
                switch (cfg.kind) {
                    case ExperimentKind::KendallCI: {
                        if (scheme == "asymp") {
                            const ConfidenceInterval ci = ci_asymptotic_tau(ranks, cfg.level);
                            record_ci(ci, ctx.true_tau, &out[cell], &out[cell + 1]);
                        } else if (scheme == "boot") {
                            Replicates rep;
                            rep.scheme = Scheme::Straightforward;
                            rep.values.reserve(B);
                            for (std::size_t b = 0; b < B; ++b) {
                                Rng rb(Rng::derive(sseed, {b}));
                                RankMatrix rs(n, 2);
                                for (std::size_t i = 0; i < n; ++i) {
                                    const std::size_t pick = rb.index(n);
                                    rs(i, 0) = ranks(pick, 0);
                                    rs(i, 1) = ranks(pick, 1);
                                }
                                rep.values.push_back(kendall_tau(rs).tau_hat);
                            }
                            percentile_ci(rep, B, cfg.level, ctx.true_tau, &out[cell],
                                          &out[cell + 1]);
                        } else {  // beta
                            const Replicates rep = smoothed_beta_bootstrap(
                                ranks,
                                RankStatistic([](const RankMatrix& r) {
                                    return kendall_tau(r).tau_hat;
                                }),
                                B, sseed);
                            percentile_ci(rep, B, cfg.level, ctx.true_tau, &out[cell],
                                          &out[cell + 1]);
                        }
                        cell += 2;
                        break;
                    }
                    case ExperimentKind::SpearmanCI: {
                        if (scheme == "boot") {
                            Replicates rep;
                            rep.scheme = Scheme::Straightforward;
                            rep.values.reserve(B);
                            for (std::size_t b = 0; b < B; ++b) {
                                Rng rb(Rng::derive(sseed, {b}));
                                Sample rs(n, 2);
                                for (std::size_t i = 0; i < n; ++i) {
                                    const std::size_t pick = rb.index(n);
                                    rs(i, 0) = static_cast<double>(ranks(pick, 0));
                                    rs(i, 1) = static_cast<double>(ranks(pick, 1));
                                }
                                rep.values.push_back(spearman_rho(rerank(rs)));
                            }
                            percentile_ci(rep, B, cfg.level, ctx.true_rho, &out[cell],
                                          &out[cell + 1]);
                        } else {  // beta
                            const Replicates rep = smoothed_beta_bootstrap(
                                ranks, RankStatistic(spearman_rho), B, sseed);
                            percentile_ci(rep, B, cfg.level, ctx.true_rho, &out[cell],
                                          &out[cell + 1]);
                        }
                        cell += 2;
                        break;
                    }
                    case ExperimentKind::ParamCI: {
                        if (scheme == "asymp") {
                            const auto v = ggr_asymptotic_variance(ranks, cfg.family, ple->theta_hat);
                            if (v) {
                                const double z = norm_quantile(0.5 + cfg.level / 2.0);
                                const double half = z * std::sqrt(*v / static_cast<double>(n));
                                ConfidenceInterval ci;
                                ci.lower = ple->theta_hat - half;
                                ci.upper = ple->theta_hat + half;
                                record_ci(ci, ctx.theta, &out[cell], &out[cell + 1]);
                            }
                        } else if (scheme == "boot") {
                            Replicates rep;
                            rep.scheme = Scheme::Straightforward;
                            rep.values.reserve(B);
                            for (std::size_t b = 0; b < B; ++b) {
                                Rng rb(Rng::derive(sseed, {b}));
                                Sample rs(n, 2);
                                for (std::size_t i = 0; i < n; ++i) {
                                    const std::size_t pick = rb.index(n);
                                    rs(i, 0) = static_cast<double>(ranks(pick, 0));
                                    rs(i, 1) = static_cast<double>(ranks(pick, 1));
                                }
                                const PleResult f =
                                    pseudo_likelihood_estimate(rerank(rs), cfg.family);
                                if (f.boundary)
                                    ++rep.failures;
                                else
                                    rep.values.push_back(f.theta_hat);
                            }
                            percentile_ci(rep, B, cfg.level, ctx.theta, &out[cell], &out[cell + 1]);
                        } else if (scheme == "beta") {
                            const Replicates rep = smoothed_beta_bootstrap(
                                ranks,
                                FallibleRankStatistic(
                                    [&cfg](const RankMatrix& r) -> std::optional<double> {
                                        const PleResult f = pseudo_likelihood_estimate(r, cfg.family);
                                        if (f.boundary) return std::nullopt;
                                        return f.theta_hat;
                                    }),
                                B, sseed);
                            percentile_ci(rep, B, cfg.level, ctx.theta, &out[cell], &out[cell + 1]);
                        } else {  // param
                            const ConfidenceInterval ci =
                                ci_parametric(cfg.family, ranks, B, sseed, cfg.level);
                            if (!ci.flagged)
                                record_ci(ci, ctx.theta, &out[cell], &out[cell + 1]);
                        }
                        cell += 2;
                        break;
                    }
                    case ExperimentKind::Covariance: {
                        CovScheme cs = CovScheme::BetaStandard;
                        if (scheme == "pdm") cs = CovScheme::MultiplierPDM;
                        if (scheme == "betasmooth") cs = CovScheme::BetaSmoothed;
                        const CovarianceEstimate est =
                            covariance_estimate(ranks, cs, covariance_grid(), B, sseed);
                        std::size_t t = 0;
                        for (std::size_t p = 0; p < 4; ++p)
                            for (std::size_t q = p; q < 4; ++q) {
                                const double err = est.at(p, q) - ctx.truth_cov[t];
                                out[cell + t] = err * err;
                                ++t;
                            }
                        cell += 10;
                        break;
                    }
                    case ExperimentKind::SymmetrySize:
                    case ExperimentKind::SymmetryPower: {
                        const SymmetryScheme ss = scheme == "beta" ? SymmetryScheme::BetaSym
                                                                   : SymmetryScheme::BootSym;
                        for (const auto& stat : cfg.statistics) {
                            const TestResult tr = symmetry_test(
                                ranks, statistic_from_string(stat), ss, B, sseed, ctx.tables);
                            out[cell] = tr.p_value <= cfg.alpha ? 1.0 : 0.0;
                            ++cell;
                        }
                        break;
                    }
                }
            }
        };

        auto progress = [&](int done_in_batch) {
            if (!cfg.progress) return;
            const int done = global_done.load() + done_in_batch;
            std::fprintf(stderr, "betacop: %s n=%d  %d/%d runs\n",
                         experiment_name(cfg.kind).c_str(), ctx.n, done, total_runs);
        };
        parallel_runs(M, threads, run_one, cfg.progress ? progress : std::function<void(int)>());
        global_done += M;

        // reduce slots into report rows (deterministic order)
        for (std::size_t c = 0; c < ncells; ++c) {
            double sum = 0.0, sumsq = 0.0;
            int good = 0;
            for (int m = 0; m < M; ++m) {
                const double v = slots[static_cast<std::size_t>(m) * ncells + c];
                if (std::isnan(v)) continue;
                sum += v;
                sumsq += v * v;
                ++good;
            }
            ReportRow row;
            row.experiment = experiment_name(cfg.kind);
            row.family = family_name(cfg.family);
            row.theta = theta;
            row.delta = cfg.delta;
            row.scheme = cells[c].scheme;
            row.n = ctx.n;
            row.metric = cells[c].metric;
            row.failures = M - good;
            if (good > 0) {
                const double mean = sum / good;
                switch (cells[c].agg) {
                    case Agg::Proportion:
                        row.value = mean;
                        row.mc_se = std::sqrt(std::max(mean * (1.0 - mean), 0.0) / good);
                        break;
                    case Agg::Mean:
                    case Agg::MseTimes1e4: {
                        double var = 0.0;
                        if (good > 1) var = (sumsq - sum * sum / good) / (good - 1);
                        row.value = mean;
                        row.mc_se = std::sqrt(std::max(var, 0.0) / good);
                        if (cells[c].agg == Agg::MseTimes1e4) {
                            row.value *= 1e4;
                            row.mc_se *= 1e4;
                        }
                        break;
                    }
                }
            }
            report.rows.push_back(std::move(row));
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_report(const ExperimentReport& report, std::ostream& out) {
    out << "experiment,family,theta,delta,scheme,n,metric,value,mc_se,failures\n";
    for (const auto& r : report.rows) {
        out << r.experiment << ',' << r.family << ',' << fmt_g6(r.theta) << ','
            << (r.delta ? fmt_g6(*r.delta) : "") << ',' << r.scheme << ',' << r.n << ','
            << r.metric << ',' << fmt_g6(r.value) << ',' << fmt_g6(r.mc_se) << ',' << r.failures
            << '\n';
    }
}

void emit_report(const ExperimentReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    write_report(report, out);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> covariance_grid() {
    return {{1.0 / 3.0, 1.0 / 3.0}, {1.0 / 3.0, 2.0 / 3.0}, {2.0 / 3.0, 1.0 / 3.0},
            {2.0 / 3.0, 2.0 / 3.0}};
}

namespace {

ExperimentConfig base_config(ExperimentKind kind, Family family, Scale scale) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.family = family;
    cfg.runs = scale == Scale::Full ? 1000 : 500;
    cfg.boot = scale == Scale::Full ? 1000 : 500;
    return cfg;
}

}  // namespace

std::vector<ExperimentConfig> table_preset(int table, Scale scale) {
    const bool full = scale == Scale::Full;
    std::vector<ExperimentConfig> out;
    const std::vector<int> ci_ns = full ? std::vector<int>{40, 60, 80, 100}
                                        : std::vector<int>{40, 100};
    const std::vector<int> sym_ns = full ? std::vector<int>{50, 100, 200, 400}
                                         : std::vector<int>{50, 100};
    switch (table) {
        case 1: {
            ExperimentConfig cfg = base_config(ExperimentKind::Covariance, Family::Clayton, scale);
            cfg.theta = 1.0;
            cfg.n_values = full ? std::vector<int>{100, 200} : std::vector<int>{100};
            cfg.runs = 1000;
            cfg.boot = 1000;
            cfg.schemes = {"pdm", "beta", "betasmooth"};
            out.push_back(cfg);
            break;
        }
        case 2: {
            for (double tau : {0.0, 0.5, -0.5}) {
                ExperimentConfig cfg = base_config(ExperimentKind::KendallCI, Family::Clayton, scale);
                cfg.tau = tau;
                cfg.n_values = ci_ns;
                cfg.schemes = {"asymp", "boot", "beta"};
                out.push_back(cfg);
            }
            break;
        }
        case 3: {
            for (double rho : {0.0, 0.5, -0.5}) {
                ExperimentConfig cfg = base_config(ExperimentKind::SpearmanCI, Family::Clayton, scale);
                cfg.rho = rho;
                cfg.n_values = ci_ns;
                cfg.schemes = {"boot", "beta"};
                out.push_back(cfg);
            }
            break;
        }
        case 4: {
            for (double theta : {1.0, 2.0}) {
                ExperimentConfig cfg = base_config(ExperimentKind::ParamCI, Family::Clayton, scale);
                cfg.theta = theta;
                cfg.n_values = ci_ns;
                if (!full) {
                    cfg.runs = 300;
                    cfg.boot = 300;
                }
                cfg.schemes = {"asymp", "boot", "beta", "param"};
                out.push_back(cfg);
            }
            break;
        }
        case 5: {
            const std::pair<Family, double> models[] = {{Family::Gauss, 1.0 / std::sqrt(2.0)},
                                                        {Family::Frank, 5.75},
                                                        {Family::GumbelHougaard, 2.0}};
            for (const auto& [fam, theta] : models) {
                ExperimentConfig cfg = base_config(ExperimentKind::ParamCI, fam, scale);
                cfg.theta = theta;
                cfg.n_values = ci_ns;
                if (!full) {
                    cfg.runs = 300;
                    cfg.boot = 300;
                }
                cfg.schemes = {"asymp", "boot", "beta", "param"};
                out.push_back(cfg);
            }
            break;
        }
        case 6:
        case 7: {
            const Family fam = table == 6 ? Family::Clayton : Family::Gauss;
            const std::vector<double> taus = table == 6
                                                 ? std::vector<double>{-0.2, 0.25, 0.5, 0.75}
                                                 : std::vector<double>{-0.5, 0.25, 0.5, 0.75};
            for (double tau : full ? taus : std::vector<double>{0.25, 0.5}) {
                ExperimentConfig cfg = base_config(ExperimentKind::SymmetrySize, fam, scale);
                cfg.tau = tau;
                cfg.n_values = sym_ns;
                if (!full) {
                    cfg.runs = 500;
                    cfg.boot = 250;
                }
                cfg.schemes = {"boot", "beta"};
                cfg.statistics = full ? std::vector<std::string>{"Sn", "Rn", "SnBeta", "RnBeta"}
                                      : std::vector<std::string>{"Sn", "Rn"};
                out.push_back(cfg);
            }
            break;
        }
        case 8: {
            for (Family fam : {Family::Clayton, Family::Gauss}) {
                for (double delta : full ? std::vector<double>{0.25, 0.5, 0.75}
                                         : std::vector<double>{0.5}) {
                    for (double tau : full ? std::vector<double>{0.25, 0.5, 0.75}
                                           : std::vector<double>{0.5, 0.75}) {
                        ExperimentConfig cfg =
                            base_config(ExperimentKind::SymmetryPower, fam, scale);
                        cfg.tau = tau;
                        cfg.delta = delta;
                        cfg.n_values = sym_ns;
                        if (!full) {
                            cfg.runs = 300;
                            cfg.boot = 250;
                        }
                        cfg.schemes = {"boot", "beta"};
                        cfg.statistics = {"Rn", "RnBeta"};
                        out.push_back(cfg);
                    }
                }
            }
            break;
        }
        default: throw ConfigError("paper table must be 1..8");
    }
    return out;
}

}  // namespace betacop
